"""Regenerate everything under demo/. Deterministic; run from the repo root:

    python3 tools/make_demo_assets.py
"""

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from prunefair import calib, network, textmetrics  # noqa: E402
from prunefair.corpus import Document, write_corpus  # noqa: E402
from prunefair.tensorfile import write_tensor  # noqa: E402

DEMO = os.path.join(os.path.dirname(__file__), "..", "demo")

TOPICS = ["the budget", "the border", "the courts", "healthcare", "the climate bill",
          "tax policy", "the schools", "housing", "transit", "the election"]
LEFT_PHRASES = ["we must expand", "everyone deserves", "invest more in",
                "protect access to", "communities need"]
RIGHT_PHRASES = ["we must cut back on", "families cannot afford", "stop expanding",
                 "local control over", "markets should drive"]
PRODUCT_NOUNS = ["kettle", "router", "backpack", "lamp", "blender", "keyboard",
                 "speaker", "monitor", "charger", "tripod"]
GOOD_BITS = ["works exactly as described", "the build quality feels solid",
             "setup took only a minute", "battery life has been excellent",
             "customer support was quick and helpful", "it looks great on the desk"]
BAD_BITS = ["stopped working after a week", "the build quality feels cheap",
            "setup was confusing and slow", "battery drains far too fast",
            "customer support never answered", "it arrived scratched and dented"]
FILLER = ["I use it almost every day at home and at work.",
          "My whole family ended up trying it during the holidays.",
          "I compared it against two other models before deciding.",
          "Shipping was on time and the box was intact.",
          "The manual is short but covers the basics well enough.",
          "I have owned similar gadgets for years so I had expectations."]


def make_tweets(rng, per_side=4200):
    docs = []
    for side, phrases in (("left", LEFT_PHRASES), ("right", RIGHT_PHRASES)):
        for k in range(per_side):
            text = "%s %s, vote accordingly." % (
                rng.choice(phrases).capitalize(), rng.choice(TOPICS))
            docs.append(Document(id="t%s%05d" % (side[0], k), text=text, label=side))
    rng.shuffle(docs)
    return docs


def review_text(rng, sentiment_bits, noun):
    opener = "This %s %s." % (noun, rng.choice(sentiment_bits))
    bits = rng.sample(sentiment_bits, 3)
    body = " ".join("Honestly, %s." % b for b in bits)
    filler = " ".join(rng.sample(FILLER, 3))
    text = "%s %s %s" % (opener, body, filler)
    words = text.split()
    # pad under the 30-word floor; demo reviews must pass test-set ingestion
    while len(words) < 32:
        words += "I would mention that detail to any buyer.".split()
    return " ".join(words[:120])


def make_reviews(rng, n_products=150, per_side=9):
    docs = []
    for p in range(n_products):
        noun = PRODUCT_NOUNS[p % len(PRODUCT_NOUNS)]
        group = "p%03d" % p
        for side, bits in (("pos", GOOD_BITS), ("neg", BAD_BITS)):
            for k in range(per_side):
                docs.append(Document(
                    id="%s-%s%02d" % (group, side, k),
                    text=review_text(rng, bits, noun),
                    label=side,
                    group=group,
                ))
    return docs


def make_spd_pool(reviews):
    by_group = {}
    for d in reviews:
        by_group.setdefault(d.group, {}).setdefault(d.label, []).append(d.id)
    lines = []
    for idx, group in enumerate(sorted(by_group)):
        pos, neg = by_group[group]["pos"], by_group[group]["neg"]
        lines.append({"collection_id": "fair-%s" % group,
                      "doc_ids": pos[:4] + neg[:4], "vanilla_spd": 0.0})
        side = pos if idx % 2 == 0 else neg
        lines.append({"collection_id": "onesided-%s" % group,
                      "doc_ids": side[:8], "vanilla_spd": 1.0 if idx % 2 == 0 else -1.0})
    return lines


def make_comparisons(rng, methods, strengths, n=100):
    recs = []
    for _ in range(n):
        a, b = rng.sample(methods, 2)
        gap = (strengths[a] - strengths[b]) / 400.0
        p_a = 1.0 / (1.0 + 10.0 ** (-gap))
        votes = ["a" if rng.random() < p_a else "b" for _ in range(3)]
        recs.append({"method_a": a, "method_b": b, "votes": votes})
    return recs


def make_votes(rng, n_items=20):
    rows = []
    for _ in range(n_items):
        a = rng.choice([0, 1, 2, 3])
        rows.append([a, 3 - a])
    return rows


def main():
    os.makedirs(DEMO, exist_ok=True)

    # network + batch for score/prune demos; the sweep config regenerates
    # the same assets from its seed instead of reading these files
    net = network.make_network([32, 16, 4], seed=[0, 0])
    network.save_network(os.path.join(DEMO, "net"), net)
    batch = network.make_batch(8, 32, 4, seed=[0, 1])
    write_tensor(os.path.join(DEMO, "batch_inputs.tensor"), batch.inputs)
    write_tensor(os.path.join(DEMO, "batch_targets.tensor"), batch.targets)
    with open(os.path.join(DEMO, "sweep.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "methods": ["magnitude", "wanda", "gblm_gradient", "gblm_pruner", "hgla"],
            "ratios": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            "granularity": "per_layer",
            "seed": 0,
            "generate": {"sizes": [32, 16, 4], "samples": 8},
            "reference": "dense",
        }, fh, indent=2)
        fh.write("\n")

    rng = random.Random(20240501)
    tweets = make_tweets(rng)
    write_corpus(os.path.join(DEMO, "tweets.jsonl"), tweets)
    reviews = make_reviews(rng)
    write_corpus(os.path.join(DEMO, "reviews.jsonl"), reviews)

    with open(os.path.join(DEMO, "spd_pool.jsonl"), "w", encoding="utf-8") as fh:
        for line in make_spd_pool(reviews):
            fh.write(json.dumps(line) + "\n")

    # fairness demo: balanced review collections plus summaries stitched
    # from leading sentences of the first three documents
    testset = calib.build_fairness_testset(reviews, "review", seed=7)
    small = calib.CalibrationSet(
        kind=testset.kind, domain=testset.domain,
        collections=testset.collections[:20], side=None)
    calib.write_calibration_set(os.path.join(DEMO, "sources.jsonl"), small)
    # balanced collections hold 4 docs per side; vary how many sentences a
    # summary borrows from each half so the metrics show a spread
    with open(os.path.join(DEMO, "summaries.jsonl"), "w", encoding="utf-8") as fh:
        for k, col in enumerate(small.collections):
            lo, hi = col.docs[:4], col.docs[4:]
            picks = [(lo[0], hi[0], hi[1]), (lo[0], lo[1], hi[0]), (lo[0], hi[0])][k % 3]
            parts = [textmetrics.split_sentences(d.text)[0] for d in picks]
            fh.write(json.dumps({"text": " ".join(parts)}) + "\n")

    cands = ["the kettle heats water quickly and looks great",
             "battery life is poor and support never answered",
             "solid build quality for the price",
             "setup was slow but the manual helped",
             "works as described and shipping was on time"]
    refs = ["the kettle heats water very quickly and looks quite good",
            "battery drains too fast and customer support never replied",
            "the build quality is solid given the price",
            "the setup felt slow although the manual covered the basics",
            "it works exactly as described and arrived on time"]
    with open(os.path.join(DEMO, "candidates.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(cands) + "\n")
    with open(os.path.join(DEMO, "references.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(refs) + "\n")

    methods = ["magnitude", "wanda", "gblm_gradient", "gblm_pruner", "hgla"]
    strengths = {"hgla": 1600, "wanda": 1480, "gblm_pruner": 1400,
                 "gblm_gradient": 1320, "magnitude": 1200}
    rng = random.Random(99)
    with open(os.path.join(DEMO, "comparisons.jsonl"), "w", encoding="utf-8") as fh:
        for rec in make_comparisons(rng, methods, strengths, n=150):
            fh.write(json.dumps(rec) + "\n")
    with open(os.path.join(DEMO, "votes.jsonl"), "w", encoding="utf-8") as fh:
        for row in make_votes(rng):
            fh.write(json.dumps(row) + "\n")

    print("demo assets written to %s" % os.path.abspath(DEMO))


if __name__ == "__main__":
    main()
