#!/usr/bin/env python3
"""Convert a ContraDoc export into the dataset schema used by contracheck.

The upstream release does not ship in our ingestion format, and its exact
field names vary between dumps. This converter maps the common layouts onto
the canonical JSONL schema:

    {"id": str,
     "text": str OR "sentences": [str, ...],   # exactly one of the two
     "label": "yes" | "no",
     "evidence": [str, ...],                   # non-empty iff label == "yes"
     "contradiction_type": optional str,       # one of the 8 known types
     "domain": optional str}

Anything it cannot map is reported and aborts the conversion; extend the
FIELD_ALIASES below for a dump with different key names.

Usage:
    convert_contradoc.py UPSTREAM_FILE OUTPUT_JSONL
"""

import json
import sys

FIELD_ALIASES = {
    "id": ["id", "doc_id", "uid", "document_id"],
    "text": ["text", "document", "doc", "content"],
    "sentences": ["sentences", "sents"],
    "label": ["label", "contradiction", "is_contradictory", "has_contradiction"],
    "evidence": ["evidence", "evidence_sentences", "contradictory_sentences", "contradictions"],
    "contradiction_type": ["contradiction_type", "type", "contra_type"],
    "domain": ["domain", "source", "genre"],
}

KNOWN_TYPES = {
    "negation", "numeric", "content", "perspective", "emotion", "relation", "factual", "causal",
}

# Upstream type labels seen in the wild -> canonical names.
TYPE_ALIASES = {
    "perspective/view/opinion": "perspective",
    "emotion/mood/feeling": "emotion",
    "view": "perspective",
    "opinion": "perspective",
    "mood": "emotion",
    "feeling": "emotion",
}


def pick(record, field):
    for alias in FIELD_ALIASES[field]:
        if alias in record:
            return record[alias]
    return None


def to_label(value):
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, float)):
        return "yes" if value else "no"
    if isinstance(value, str):
        v = value.strip().lower()
        if v in ("yes", "true", "1", "contradiction", "contradictory"):
            return "yes"
        if v in ("no", "false", "0", "consistent", "none"):
            return "no"
    return None


def convert_record(record, ordinal):
    out = {}
    rid = pick(record, "id")
    out["id"] = str(rid) if rid is not None else f"contradoc-{ordinal}"

    sentences = pick(record, "sentences")
    text = pick(record, "text")
    if sentences is not None:
        out["sentences"] = [str(s) for s in sentences]
    elif text is not None:
        out["text"] = str(text)
    else:
        raise ValueError(f"record {out['id']}: no document text or sentences found")

    label = to_label(pick(record, "label"))
    if label is None:
        raise ValueError(f"record {out['id']}: unmappable label {pick(record, 'label')!r}")
    out["label"] = label

    evidence = pick(record, "evidence") or []
    if isinstance(evidence, str):
        evidence = [evidence]
    out["evidence"] = [str(e) for e in evidence]
    if (label == "yes") != bool(out["evidence"]):
        raise ValueError(f"record {out['id']}: label/evidence mismatch")

    ctype = pick(record, "contradiction_type")
    if ctype:
        ctype = TYPE_ALIASES.get(str(ctype).strip().lower(), str(ctype).strip().lower())
        if ctype not in KNOWN_TYPES:
            raise ValueError(f"record {out['id']}: unknown contradiction type {ctype!r}")
        out["contradiction_type"] = ctype

    domain = pick(record, "domain")
    if domain:
        out["domain"] = str(domain)
    return out


def load_upstream(path):
    with open(path, encoding="utf-8") as f:
        head = f.read(1)
        f.seek(0)
        if head == "[":
            return json.load(f)
        return [json.loads(line) for line in f if line.strip()]


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    records = load_upstream(sys.argv[1])
    converted = [convert_record(r, i) for i, r in enumerate(records)]
    with open(sys.argv[2], "w", encoding="utf-8") as out:
        for rec in converted:
            out.write(json.dumps(rec, ensure_ascii=False) + "\n")
    n_pos = sum(1 for r in converted if r["label"] == "yes")
    print(f"wrote {len(converted)} records ({n_pos} positive) -> {sys.argv[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
