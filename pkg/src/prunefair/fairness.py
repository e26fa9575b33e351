"""Opinion-fairness metrics for summaries of mixed-stance sources.

A summary is compared against its source collection through value
distributions: the share of units (source documents, or summary
sentences) carrying each label. Statistical parity difference (SPD) is
p[a] - p[b] for an ordered value pair, so the caller fixes which side
counts as positive. Second-order SPD subtracts the source SPD from the
summary SPD and therefore lives in [-2, 2]; it is 0 exactly when the
summary mirrors the source balance.

Per-summary deviation metrics between a target and a generated
distribution:

    UER   mean over values of |target - generated|
    SOF   population variance of those absolute errors

BUR is a corpus-level rate: the fraction of summaries whose largest
per-value deviation exceeds a tolerance. The name reads "biased or unfair
rate" and this implementation reports the unfair fraction, smaller is
better; descriptions that phrase it as the fraction deemed fair are the
complement.
"""

from dataclasses import dataclass

import numpy as np

from .textmetrics import tokenize

DEFAULT_TAU_FAIR = 0.1


@dataclass(frozen=True)
class ValueDistribution:
    proportions: dict  # value -> share, sums to 1 when total_units > 0
    total_units: int


@dataclass(frozen=True)
class LabeledSummary:
    sentences: tuple  # of (text, label) pairs, at least one
    source: object  # collection providing docs with .label


def distribution_from_labels(labels, value_set=None) -> ValueDistribution:
    labels = list(labels)
    if value_set is None:
        value_set = sorted(set(labels))
    else:
        value_set = sorted(value_set)
        unknown = set(labels) - set(value_set)
        if unknown:
            raise ValueError("labels %s outside the value set %s" % (sorted(unknown), value_set))
    total = len(labels)
    props = {
        v: (labels.count(v) / total if total else 0.0)
        for v in value_set
    }
    return ValueDistribution(proportions=props, total_units=total)


def first_order_spd(dist, value_a, value_b) -> float:
    for v in (value_a, value_b):
        if v not in dist.proportions:
            raise ValueError("value %r not in distribution %s" % (v, sorted(dist.proportions)))
    return dist.proportions[value_a] - dist.proportions[value_b]


def second_order_spd(summary, value_a, value_b) -> float:
    """Summary SPD minus source SPD; positive means the summary leans
    further toward value_a than its sources do."""
    if not summary.sentences:
        raise ValueError("summary has no sentences")
    values = {value_a, value_b}
    sent_labels = [label for _, label in summary.sentences]
    src_labels = [doc.label for doc in summary.source.docs]
    if not src_labels:
        raise ValueError("source collection is empty")
    gen = distribution_from_labels(sent_labels, values | set(sent_labels))
    src = distribution_from_labels(src_labels, values | set(src_labels))
    return first_order_spd(gen, value_a, value_b) - first_order_spd(src, value_a, value_b)


def value_errors(target, generated) -> dict:
    """Per-value absolute deviation; the two value sets must agree."""
    if set(target.proportions) != set(generated.proportions):
        raise ValueError(
            "value sets differ: %s vs %s"
            % (sorted(target.proportions), sorted(generated.proportions))
        )
    return {
        v: abs(target.proportions[v] - generated.proportions[v])
        for v in sorted(target.proportions)
    }


def uer(target, generated) -> float:
    errors = value_errors(target, generated)
    return sum(errors.values()) / len(errors)


def sof(target, generated) -> float:
    errors = list(value_errors(target, generated).values())
    mean = sum(errors) / len(errors)
    return sum((e - mean) ** 2 for e in errors) / len(errors)


def bur(pairs, tau_fair=DEFAULT_TAU_FAIR) -> float:
    """Unfair fraction of (target, generated) pairs.

    A pair is fair when its largest per-value deviation is <= tau_fair,
    so the result is nonincreasing as tau_fair grows.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one (target, generated) pair")
    unfair = 0
    for target, generated in pairs:
        if max(value_errors(target, generated).values()) > tau_fair:
            unfair += 1
    return unfair / len(pairs)


def ngram_channel(sentences, source) -> np.ndarray:
    """Builtin similarity channel: unigram containment of each sentence in
    each source document, |unigrams(s) & unigrams(d)| / |unigrams(s)|."""
    rows = []
    doc_grams = [set(tokenize(doc.text)) for doc in source.docs]
    for sent in sentences:
        grams = set(tokenize(sent))
        if not grams:
            rows.append([0.0] * len(doc_grams))
            continue
        rows.append([len(grams & dg) / len(grams) for dg in doc_grams])
    return np.asarray(rows, dtype=np.float64)


def match_labels(sentences, source, channels=None) -> LabeledSummary:
    """Label each sentence with the label of its best-matching source doc.

    channels is a list of [n_sentences, n_docs] similarity matrices with
    entries in [0, 1]; they are averaged and each sentence takes the
    argmax document, ties resolved toward the lowest document index.
    Passing None uses the builtin unigram channel.
    """
    sentences = list(sentences)
    if not sentences:
        raise ValueError("summary has no sentences")
    if not source.docs:
        raise ValueError("source collection is empty")
    if channels is None:
        channels = [ngram_channel(sentences, source)]
    channels = [np.asarray(c, dtype=np.float64) for c in channels]
    if not channels:
        raise ValueError("need at least one similarity channel")
    want = (len(sentences), len(source.docs))
    for idx, chan in enumerate(channels):
        if chan.shape != want:
            raise ValueError("channel %d has shape %r, expected %r" % (idx, chan.shape, want))
        if not np.isfinite(chan).all() or (chan < 0).any() or (chan > 1).any():
            raise ValueError("channel %d entries must be finite and in [0, 1]" % idx)
    mean = np.mean(channels, axis=0)
    picks = np.argmax(mean, axis=1)  # first max wins: lowest doc index
    labeled = tuple(
        (sent, source.docs[int(doc_idx)].label)
        for sent, doc_idx in zip(sentences, picks)
    )
    return LabeledSummary(sentences=labeled, source=source)


def fairness_improvement(vanilla_spd, pruned_spd):
    """Signed bias reduction and whether it is a genuine improvement.

    The delta is positive when pruning moved the SPD toward zero from the
    vanilla side. Genuine means the movement stays within [0, |vanilla|]:
    overshooting to the opposite side or amplifying the bias both fail.
    A vanilla SPD of exactly zero can only be matched, never improved.
    """
    if vanilla_spd == 0.0:
        delta = -abs(pruned_spd)
    elif vanilla_spd > 0.0:
        delta = vanilla_spd - pruned_spd
    else:
        delta = pruned_spd - vanilla_spd
    genuine = 0.0 <= delta <= abs(vanilla_spd)
    return delta, genuine
