#!/usr/bin/env python3
"""Brute-force check values for the bundled fixture pair.

Recomputes the full two-database comparison over
fixtures/scientometrics-mini and fixtures/scientometrics-mini-b from
first principles: its own TSV parsing, its own text folding, its own
pairing and indicator arithmetic. Deliberately shares no code with the
package so the two implementations can only agree by being right.

Writes tests/golden/compare_mini.json. Every number is full precision;
consumers decide how to round.
"""

from __future__ import annotations

import json
import sys
import unicodedata
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
AUTHORS = ["anna aalto", "bruno bellini", "camilo duarte"]
BOUNDARIES = (50.0, 80.0, 90.0)
NULL = "\\N"


def fold(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    kept = [c for c in decomposed if not unicodedata.combining(c)]
    out = []
    for ch in "".join(kept).lower():
        out.append(ch if ch.isalnum() else " ")
    return " ".join("".join(out).split())


def read_rows(path: Path):
    for line in path.read_text(encoding="utf-8").splitlines():
        yield [None if cell == NULL else cell for cell in line.split("\t")]


def load_side(dirname: str):
    d = ROOT / "fixtures" / dirname
    papers = {}
    for row in read_rows(d / "papers.tsv"):
        pid = int(row[0])
        papers[pid] = {
            "id": pid,
            "title": fold(row[1]),
            "year": int(row[3]) if row[3] is not None else None,
            "cc": int(row[5]),
            "journal": int(row[7]) if row[7] is not None else None,
            "authors": set(),
        }
    for row in read_rows(d / "paper_authors.tsv"):
        papers[int(row[0])]["authors"].add(fold(row[2]))
    journal_row = next(read_rows(d / "journals.tsv"))
    return {"source": f"fixtures/{dirname}", "journal": int(journal_row[0]),
            "journal_name": fold(journal_row[1]), "papers": papers}


def journal_papers(side):
    jid = side["journal"]
    return sorted(p for p in side["papers"].values() if p["journal"] == jid)


def make_refset(side):
    in_journal = [p for p in side["papers"].values()
                  if p["journal"] == side["journal"] and p["year"] is not None]
    years = (min(p["year"] for p in in_journal),
             max(p["year"] for p in in_journal))
    cells = {}
    for p in in_journal:
        cells.setdefault(p["year"], []).append(p["cc"])
    pooled = sorted(cc for v in cells.values() for cc in v)
    means = {y: sum(v) / len(v) for y, v in cells.items()}
    return {"years": years, "means": means, "pooled": pooled,
            "size": len(pooled)}


def percentile(pooled, value):
    if value == 0:
        return 0.0
    return 100.0 * sum(1 for x in pooled if x < value) / len(pooled)


def pr_class(p):
    c = 1
    for b in BOUNDARIES:
        if p >= b:
            c += 1
    return c


def author_block(side, refset, ids):
    papers = [side["papers"][i] for i in ids]
    ranked = [p for p in papers if refset["means"].get(p["year"])]
    scores = [p["cc"] / refset["means"][p["year"]] for p in ranked]
    counts = [0, 0, 0, 0]
    for p in ranked:
        counts[pr_class(percentile(refset["pooled"], p["cc"])) - 1] += 1
    return {
        "paper_ids": sorted(ids),
        "publications": len(papers),
        "citations": sum(p["cc"] for p in papers),
        "jncs": sum(scores) / len(scores),
        "excluded": len(papers) - len(ranked),
        "class_counts": counts,
        "class_shares": [100.0 * c / len(ranked) for c in counts],
    }


def main() -> int:
    side_a = load_side("scientometrics-mini")
    side_b = load_side("scientometrics-mini-b")

    by_title_b = {}
    for p in side_b["papers"].values():
        by_title_b.setdefault(p["title"], []).append(p["id"])

    candidates = sorted(p["id"] for p in side_a["papers"].values()
                        if p["journal"] == side_a["journal"])
    pairs, not_found, ambiguous = [], 0, 0
    for pid in candidates:
        hits = by_title_b.get(side_a["papers"][pid]["title"], [])
        if not hits:
            not_found += 1
        elif len(hits) > 1:
            ambiguous += 1
        else:
            pairs.append((pid, hits[0]))

    refset_a, refset_b = make_refset(side_a), make_refset(side_b)

    per_author = {}
    union_a = set()
    for name in AUTHORS:
        mine = [(ia, ib) for ia, ib in pairs
                if name in side_a["papers"][ia]["authors"]
                or name in side_b["papers"][ib]["authors"]]
        union_a.update(ia for ia, _ in mine)
        per_author[name] = {
            "pairs": mine,
            "a": author_block(side_a, refset_a, [ia for ia, _ in mine]),
            "b": author_block(side_b, refset_b, [ib for _, ib in mine]),
        }

    for key in ("a", "b"):
        ordered = sorted(AUTHORS, key=lambda n: -per_author[n][key]["jncs"])
        rank, last = 0, None
        for n in ordered:
            v = per_author[n][key]["jncs"]
            if v != last:
                rank += 1
                last = v
            per_author[n][key]["rank"] = rank

    audited = sorted(union_a)
    pair_of = dict(pairs)
    mismatches, skipped = [], 0
    for ia in audited:
        ya = side_a["papers"][ia]["year"]
        yb = side_b["papers"][pair_of[ia]]["year"]
        if ya is None or yb is None:
            skipped += 1
        elif ya != yb:
            mismatches.append({"id_a": ia, "id_b": pair_of[ia],
                               "year_a": ya, "year_b": yb,
                               "delta": ya - yb})

    coverage = []
    for name in AUTHORS:
        mine = per_author[name]["pairs"]
        missing_a = sorted(ia for ia, _ in mine
                           if name not in side_a["papers"][ia]["authors"])
        missing_b = sorted(ib for _, ib in mine
                           if name not in side_b["papers"][ib]["authors"])
        la, lb = len(mine) - len(missing_a), len(mine) - len(missing_b)
        coverage.append({
            "author": name, "pairs": len(mine),
            "listed_a": la, "listed_b": lb,
            "fraction_a": la / len(mine), "fraction_b": lb / len(mine),
            "missing_a": missing_a, "missing_b": missing_b,
        })

    def side_meta(side, refset):
        return {"source": side["source"], "journal_id": side["journal"],
                "journal_name": side["journal_name"],
                "years": list(refset["years"]),
                "reference_size": refset["size"]}

    report = {
        "side_a": side_meta(side_a, refset_a),
        "side_b": side_meta(side_b, refset_b),
        "scheme": list(BOUNDARIES),
        "pool": "pooled",
        "authors": [
            {"author": name,
             "a": per_author[name]["a"], "b": per_author[name]["b"]}
            for name in AUTHORS
        ],
        "matching": {"candidates": len(candidates),
                     "matched": len(pairs),
                     "not_found": not_found, "ambiguous": ambiguous},
        "year_audit": {"pairs": len(audited),
                       "skipped": skipped,
                       "mismatches": mismatches,
                       "rate": 100.0 * len(mismatches) / len(audited)},
        "coverage": coverage,
    }

    if len(sys.argv) > 1:
        out = Path(sys.argv[1])
    else:
        out = ROOT / "tests" / "golden" / "compare_mini.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report, indent=1, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {out}")
    print(json.dumps({n: {"a": round(per_author[n]['a']['jncs'], 4),
                          "b": round(per_author[n]['b']['jncs'], 4)}
                      for n in AUTHORS}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
