"""Calibration-set construction and the balanced fairness test set.

A calibration set is 128 input collections. Collection shape is fixed by
domain: 30 documents for political text, 8 same-product documents for
reviews. Input-based kinds are sampled from a labeled corpus:

    single_sided   every document carries one chosen label
    fair_input     each collection is half/half across the two labels
    mixed_input    64 single-sided collections (32 per side, alternating)
                   followed by 64 fair ones

Output-conditioned kinds draw from a pool of collections indexed by the
parity difference their summaries showed on an unpruned model:

    biased_output  |spd| >= 1 - tau_spd
    fair_output    |spd| <= tau_spd
    mixed_output   64 biased followed by 64 fair

All sampling is uniform without replacement from per-(label, product)
strata, driven by one seeded generator per builder call, so a document
never repeats anywhere inside one calibration set and rebuilding with the
same seed reproduces it exactly. Review collections are drawn per
product, the product chosen uniformly among those with enough remaining
documents.
"""

import json
import random
from dataclasses import dataclass

from .corpus import document_to_obj, parse_document

DOMAINS = ("political", "review")
COLLECTION_SIZE = {"political": 30, "review": 8}
NUM_COLLECTIONS = 128
TESTSET_COLLECTIONS = 100
REVIEW_WORD_BOUNDS = (30, 120)
DEFAULT_TAU_SPD = 0.0

INPUT_KINDS = ("single_sided", "fair_input", "mixed_input")
OUTPUT_KINDS = ("biased_output", "fair_output", "mixed_output")
KINDS = INPUT_KINDS + OUTPUT_KINDS


class CalibrationError(ValueError):
    pass


class InsufficientCorpusError(CalibrationError):
    """The corpus cannot supply a stratum; message names the shortfall."""


@dataclass(frozen=True)
class InputCollection:
    docs: tuple
    domain: str

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise CalibrationError("unknown domain %r" % (self.domain,))
        want = COLLECTION_SIZE[self.domain]
        if len(self.docs) != want:
            raise CalibrationError(
                "%s collection has %d documents, needs %d"
                % (self.domain, len(self.docs), want)
            )
        ids = [d.id for d in self.docs]
        if len(set(ids)) != len(ids):
            raise CalibrationError("collection repeats a document id")
        if self.domain == "review":
            groups = {d.group for d in self.docs}
            if None in groups or len(groups) != 1:
                raise CalibrationError("review collection must share one product group")


@dataclass(frozen=True)
class CalibrationSet:
    kind: str
    domain: str
    collections: tuple
    side: str | None = None


@dataclass(frozen=True)
class SpdIndexedCollection:
    collection: InputCollection
    vanilla_spd: float

    def __post_init__(self):
        if not -1.0 <= self.vanilla_spd <= 1.0:
            raise CalibrationError("vanilla_spd %r outside [-1, 1]" % (self.vanilla_spd,))


def _two_sides(corpus):
    labels = sorted({d.label for d in corpus})
    if len(labels) != 2:
        raise CalibrationError("corpus carries labels %s, need exactly two" % labels)
    return labels


def _draw(rng, pool, k, what):
    """Uniform sample of k documents, removed from the pool. Keeps corpus
    order inside the draw so results depend only on the seed."""
    if len(pool) < k:
        raise InsufficientCorpusError(
            "need %d %s, corpus has %d left" % (k, what, len(pool))
        )
    picked_idx = sorted(rng.sample(range(len(pool)), k))
    picked = [pool[i] for i in picked_idx]
    for i in reversed(picked_idx):
        del pool[i]
    return picked


class _Sampler:
    """Without-replacement pools over one corpus for one builder call."""

    def __init__(self, corpus, domain, seed):
        if domain not in DOMAINS:
            raise CalibrationError("unknown domain %r" % (domain,))
        self.domain = domain
        self.rng = random.Random(seed)
        if domain == "political":
            self.by_label = {}
            for doc in corpus:
                self.by_label.setdefault(doc.label, []).append(doc)
        else:
            self.by_group = {}
            for doc in corpus:
                if doc.group is None:
                    raise CalibrationError("review document %r has no product group" % doc.id)
                self.by_group.setdefault(doc.group, {}).setdefault(doc.label, []).append(doc)

    def _label_pool(self, label):
        return self.by_label.setdefault(label, [])

    def _pick_group(self, need):
        """Uniform choice among products that can still satisfy `need`,
        a {label: count} requirement."""
        eligible = [
            g
            for g in sorted(self.by_group)
            if all(len(self.by_group[g].get(lbl, [])) >= k for lbl, k in need.items())
        ]
        if not eligible:
            raise InsufficientCorpusError(
                "no product left with %s reviews"
                % ", ".join("%d %r" % (k, lbl) for lbl, k in sorted(need.items()))
            )
        return self.rng.choice(eligible)

    def single_sided_collection(self, side):
        size = COLLECTION_SIZE[self.domain]
        if self.domain == "political":
            docs = _draw(self.rng, self._label_pool(side), size, "%r documents" % side)
        else:
            group = self._pick_group({side: size})
            docs = _draw(
                self.rng, self.by_group[group][side], size, "%r reviews of %r" % (side, group)
            )
        return InputCollection(docs=tuple(docs), domain=self.domain)

    def fair_collection(self, sides):
        half = COLLECTION_SIZE[self.domain] // 2
        if self.domain == "political":
            docs = []
            for side in sides:
                docs += _draw(self.rng, self._label_pool(side), half, "%r documents" % side)
        else:
            group = self._pick_group({side: half for side in sides})
            docs = []
            for side in sides:
                docs += _draw(
                    self.rng, self.by_group[group][side], half, "%r reviews of %r" % (side, group)
                )
        return InputCollection(docs=tuple(docs), domain=self.domain)


def build_single_sided(corpus, domain, side, seed) -> CalibrationSet:
    sampler = _Sampler(corpus, domain, seed)
    cols = tuple(sampler.single_sided_collection(side) for _ in range(NUM_COLLECTIONS))
    return CalibrationSet(kind="single_sided", domain=domain, collections=cols, side=side)


def build_fair_input(corpus, domain, seed) -> CalibrationSet:
    sides = _two_sides(corpus)
    sampler = _Sampler(corpus, domain, seed)
    cols = tuple(sampler.fair_collection(sides) for _ in range(NUM_COLLECTIONS))
    return CalibrationSet(kind="fair_input", domain=domain, collections=cols)


def build_mixed_input(corpus, domain, seed) -> CalibrationSet:
    """64 single-sided collections with sides alternating a, b, a, b ...
    (32 each), then 64 fair collections, all from shared pools."""
    sides = _two_sides(corpus)
    sampler = _Sampler(corpus, domain, seed)
    half = NUM_COLLECTIONS // 2
    cols = [sampler.single_sided_collection(sides[i % 2]) for i in range(half)]
    cols += [sampler.fair_collection(sides) for _ in range(half)]
    return CalibrationSet(kind="mixed_input", domain=domain, collections=tuple(cols))


def _review_word_check(doc):
    lo, hi = REVIEW_WORD_BOUNDS
    words = len(doc.text.split())
    if not lo <= words <= hi:
        raise CalibrationError(
            "review %r has %d words, outside [%d, %d]" % (doc.id, words, lo, hi)
        )


def build_fairness_testset(corpus, domain, seed) -> CalibrationSet:
    """100 balanced collections for fairness evaluation. Review documents
    must hold 30 to 120 words; an out-of-bounds review is rejected here,
    at ingestion, rather than silently skipped."""
    if domain == "review":
        for doc in corpus:
            _review_word_check(doc)
    sides = _two_sides(corpus)
    sampler = _Sampler(corpus, domain, seed)
    cols = tuple(sampler.fair_collection(sides) for _ in range(TESTSET_COLLECTIONS))
    return CalibrationSet(kind="fair_input", domain=domain, collections=cols)


def build_output_conditioned(pool, kind, tau_spd=DEFAULT_TAU_SPD, seed=0) -> CalibrationSet:
    """Sample collections by the parity difference they produced unpruned."""
    if kind not in OUTPUT_KINDS:
        raise CalibrationError("unknown output-conditioned kind %r" % (kind,))
    if not 0.0 <= tau_spd <= 1.0:
        raise CalibrationError("tau_spd %r outside [0, 1]" % (tau_spd,))
    pool = list(pool)
    rng = random.Random(seed)

    def take(predicate, count, what):
        idx = [i for i, c in enumerate(pool) if pool[i] is not None and predicate(c)]
        if len(idx) < count:
            raise InsufficientCorpusError(
                "need %d %s collections, pool matched %d" % (count, what, len(idx))
            )
        chosen = sorted(rng.sample(idx, count))
        out = [pool[i].collection for i in chosen]
        for i in chosen:
            pool[i] = None
        return out

    def biased(c):
        return abs(c.vanilla_spd) >= 1.0 - tau_spd

    def fair(c):
        return abs(c.vanilla_spd) <= tau_spd
    if kind == "biased_output":
        cols = take(biased, NUM_COLLECTIONS, "biased")
    elif kind == "fair_output":
        cols = take(fair, NUM_COLLECTIONS, "fair")
    else:
        cols = take(biased, NUM_COLLECTIONS // 2, "biased")
        cols += take(fair, NUM_COLLECTIONS // 2, "fair")
    domain = cols[0].domain
    return CalibrationSet(kind=kind, domain=domain, collections=tuple(cols))


def write_calibration_set(path, cset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for col in cset.collections:
            line = {
                "kind": cset.kind,
                "domain": cset.domain,
                "side": cset.side,
                "docs": [document_to_obj(d) for d in col.docs],
            }
            fh.write(json.dumps(line, sort_keys=False))
            fh.write("\n")


def read_calibration_set(path) -> CalibrationSet:
    cols = []
    kind = domain = side = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CalibrationError("bad JSON at line %d: %s" % (lineno, exc)) from exc
            if lineno == 1:
                kind, domain, side = obj.get("kind"), obj.get("domain"), obj.get("side")
            docs = tuple(parse_document(d, lineno) for d in obj.get("docs", ()))
            cols.append(InputCollection(docs=docs, domain=obj.get("domain")))
    if not cols:
        raise CalibrationError("calibration file holds no collections")
    return CalibrationSet(kind=kind, domain=domain, collections=tuple(cols), side=side)


def load_spd_pool(path, corpus) -> list:
    """Read {collection_id, doc_ids, vanilla_spd} lines, resolving ids
    against the corpus. Collection domain follows its document count."""
    by_id = {d.id: d for d in corpus}
    size_to_domain = {size: dom for dom, size in COLLECTION_SIZE.items()}
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CalibrationError("bad JSON at line %d: %s" % (lineno, exc)) from exc
            doc_ids = obj.get("doc_ids")
            if not isinstance(doc_ids, list) or "vanilla_spd" not in obj:
                raise CalibrationError("line %d needs doc_ids and vanilla_spd" % lineno)
            missing = [i for i in doc_ids if i not in by_id]
            if missing:
                raise CalibrationError(
                    "line %d references unknown documents %s" % (lineno, missing)
                )
            domain = size_to_domain.get(len(doc_ids))
            if domain is None:
                raise CalibrationError(
                    "line %d has %d documents, not a known collection size"
                    % (lineno, len(doc_ids))
                )
            col = InputCollection(docs=tuple(by_id[i] for i in doc_ids), domain=domain)
            out.append(SpdIndexedCollection(collection=col, vanilla_spd=float(obj["vanilla_spd"])))
    return out
