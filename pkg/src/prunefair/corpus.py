"""Line-delimited JSON corpora and report emission.

A corpus file holds one JSON object per line with required string fields
"id", "text", "label" and an optional "group" (product key for reviews).
Unknown fields are ignored. Reports are emitted as a single JSON document
whose rows carry a fixed key order (method, sparsity, then metric names
sorted lexicographically) so repeated runs are byte-identical.
"""

import csv
import io
import json
from dataclasses import dataclass


class CorpusFormatError(ValueError):
    """Malformed corpus line; message carries the 1-based line number."""


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    label: str
    group: str | None = None


@dataclass(frozen=True)
class Report:
    """One evaluation row: a method at a sparsity with named metrics."""

    method: str
    sparsity: float
    metrics: dict


_REQUIRED = ("id", "text", "label")


def parse_document(obj, lineno=None):
    where = "" if lineno is None else " at line %d" % lineno
    if not isinstance(obj, dict):
        raise CorpusFormatError("expected a JSON object%s" % where)
    for field in _REQUIRED:
        if field not in obj:
            raise CorpusFormatError("missing field %r%s" % (field, where))
        if not isinstance(obj[field], str):
            raise CorpusFormatError("field %r must be a string%s" % (field, where))
    group = obj.get("group")
    if group is not None and not isinstance(group, str):
        raise CorpusFormatError("field 'group' must be a string%s" % where)
    return Document(id=obj["id"], text=obj["text"], label=obj["label"], group=group)


def read_corpus(path) -> list:
    """Load documents in file order; duplicate ids and bad lines are errors."""
    docs = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError("bad JSON at line %d: %s" % (lineno, exc)) from exc
            doc = parse_document(obj, lineno)
            if doc.id in seen:
                raise CorpusFormatError("duplicate id %r at line %d" % (doc.id, lineno))
            seen.add(doc.id)
            docs.append(doc)
    return docs


def document_to_obj(doc) -> dict:
    obj = {"id": doc.id, "text": doc.text, "label": doc.label}
    if doc.group is not None:
        obj["group"] = doc.group
    return obj


def write_corpus(path, docs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(document_to_obj(doc), sort_keys=False))
            fh.write("\n")


def report_row_obj(report) -> dict:
    """Row dict in the canonical key order."""
    row = {"method": report.method, "sparsity": report.sparsity}
    for name in sorted(report.metrics):
        row[name] = float(report.metrics[name])
    return row


def reports_to_json(reports) -> str:
    doc = {"rows": [report_row_obj(r) for r in reports]}
    return json.dumps(doc, indent=2) + "\n"


def reports_to_csv(reports) -> str:
    """Delimited form of the same rows; column order mirrors the JSON."""
    names = sorted({name for r in reports for name in r.metrics})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["method", "sparsity"] + names)
    for r in reports:
        row = [r.method, repr(float(r.sparsity))]
        row += [repr(float(r.metrics[n])) if n in r.metrics else "" for n in names]
        writer.writerow(row)
    return buf.getvalue()
