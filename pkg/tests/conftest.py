"""Shared synthetic-fixture builders for the test suite."""

import random

from prunefair.corpus import Document


def political_corpus(per_side=2000, labels=("left", "right"), words=3):
    docs = []
    for label in labels:
        for k in range(per_side):
            text = " ".join("%s%d" % (label, (k + i) % 97) for i in range(words))
            docs.append(Document(id="%s%05d" % (label[0], k), text=text, label=label))
    return docs


def review_corpus(n_products=140, per_side=9, labels=("pos", "neg"), n_words=31):
    docs = []
    for p in range(n_products):
        group = "g%03d" % p
        for label in labels:
            for k in range(per_side):
                text = " ".join("w%d" % ((p + k + i) % 53) for i in range(n_words))
                docs.append(
                    Document(
                        id="%s-%s%02d" % (group, label, k),
                        text=text,
                        label=label,
                        group=group,
                    )
                )
    return docs


def shuffled(docs, seed=0):
    rng = random.Random(seed)
    out = list(docs)
    rng.shuffle(out)
    return out
