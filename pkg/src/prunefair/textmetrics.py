"""Sentence splitting, tokenization, and ROUGE overlap metrics.

Splitting is deliberately naive: a sentence ends after '.', '!' or '?'
followed by whitespace or end of text, so abbreviations split too. That
keeps the rule deterministic and easy to reason about. Tokens are maximal
runs of alphanumeric characters, lowercased. ROUGE results are
(precision, recall, f1) tuples; empty inputs yield zeros rather than
errors.
"""

import re
from collections import Counter

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")
# alphanumerics without underscore; unicode-aware and locale-independent
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def split_sentences(text):
    parts = _SENTENCE_BREAK.split(text)
    return [p.strip() for p in parts if p.strip()]


def tokenize(text):
    return _TOKEN.findall(text.lower())


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _prf(overlap, cand_total, ref_total):
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    denom = precision + recall
    f1 = 2.0 * precision * recall / denom if denom else 0.0
    return precision, recall, f1


def rouge_n(candidate, reference, n):
    """Clipped n-gram overlap between token lists; returns (P, R, F1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a, b) -> int:
    """Longest common subsequence length via the standard dynamic program."""
    if not a or not b:
        return 0
    # single-row table; b on the inner loop
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                cur[j] = prev[j - 1] + 1
            else:
                cur[j] = cur[j - 1] if cur[j - 1] >= prev[j] else prev[j]
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference):
    """LCS-based overlap between token lists; returns (P, R, F1)."""
    overlap = lcs_length(candidate, reference)
    return _prf(overlap, len(candidate), len(reference))
