#!/usr/bin/env python3
"""Generate the bundled fixture snapshots.

Writes two TSV snapshot directories describing the same small literature
as seen by two different databases, plus a small JSON bundle:

* fixtures/scientometrics-mini    (database A: shifted years, missing
                                   author credits)
* fixtures/scientometrics-mini-b  (database B: ground truth)
* fixtures/mini.json              (tiny JSON bundle with descriptions)

Everything is deterministic. The script holds its own arithmetic checks
of the design targets (year-mismatch counts, author coverage, rank
flips, class-4 placement) and refuses to write if any drifts. It uses
only the standard library on purpose: the checks must not share code
with the package under test.

Design in brief: one journal, 130 papers over 2010-2014, three tracked
researchers (anna aalto, bruno bellini, camilo duarte) plus filler
authors. Database A shifts the publication year on 11 researcher papers
and drops camilo duarte's credit on 16 of his 25 papers; database B
tweaks citation counts instead, so the two databases disagree on who
ranks second.
"""

from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

YEARS = (2010, 2011, 2012, 2013, 2014)
JOURNAL_A, JOURNAL_B = 500, 8500
VENUE_A, VENUE_B = 600, 8600
ISSN = "2199-1234"
B_OFFSET = 8000
NULL = "\\N"

# researcher paper counts per year (database B = truth)
ANNA = (3, 3, 3, 3, 4)
BRUNO = (3, 3, 3, 4, 3)
CAMILO = (5, 5, 5, 5, 5)
FILLER = (13, 14, 15, 15, 16)

# citation counts by true-year index
ANNA_CC = (16, 13, 10, 8, 6)
BRUNO_CC = (6, 5, 4, 3, 3)
CAMILO_CC = (5, 4, 3, 2, 2)
FILLER_MAXCC = (16, 13, 10, 7, 5)

ANNA_ID, BRUNO_ID, CAMILO_ID = 9001, 9002, 9003

FIRST = ["dana", "erik", "fiona", "gustav", "hana", "ivan", "jana", "karl",
         "lena", "marc", "nina", "otto", "petra", "quinn", "rosa", "selin",
         "tara", "ulf", "vera", "wim"]
SUR = ["dorn", "eber", "falk", "gruber", "holm", "iserl", "jung", "kolb",
       "lang", "moser", "nagel", "orth", "pauli", "quast", "ried", "sachs",
       "thal", "unger", "voss", "wolf"]

T1 = ["citation", "impact", "coverage", "indexing", "retrieval", "ranking",
      "funding", "review", "metadata", "network"]
T2 = ["cascades", "patterns", "gaps", "dynamics", "signals", "structures",
      "baselines", "profiles", "shifts", "clusters"]
T3 = ["repositories", "journals", "archives", "databases", "platforms",
      "collections", "registries", "catalogs", "indexes", "corpora"]

# The 18 top-level research fields, alphabetical, ids 100..117.
L0 = ["art", "biology", "business", "chemistry", "computer science",
      "economics", "engineering", "environmental science", "geography",
      "geology", "history", "materials science", "mathematics",
      "philosophy", "physics", "political science", "psychology",
      "sociology"]

# year shifts in database A: paper id -> displayed year
SHIFTS = {
    4: 2012, 7: 2013, 10: 2012,            # anna: 3
    17: 2011, 23: 2011, 30: 2013,          # bruno: 3
    38: 2012, 43: 2013, 44: 2011, 48: 2012, 53: 2013,  # camilo: 5
}

# camilo duarte keeps his credit on these papers in database A (9 of 25)
CAMILO_CREDITED_A = set(range(33, 42))

STAR_CC = {0: 60, 13: 45}  # filler index -> citation count override


def filler_name(k: int) -> str:
    return f"{FIRST[k % 20]} {SUR[(k * 7 + 3) % 20]}"


def coauthor_name(k: int) -> str:
    return f"{FIRST[(k * 3 + 1) % 20]} {SUR[(k * 11 + 5) % 20]}"


def title_for(pid: int) -> str:
    return (f"{T1[pid % 10]} {T2[(pid * 3 + 1) % 10]} of "
            f"{T3[(pid * 7 + 2) % 10]} study {pid}")


def display_for(pid: int, title: str) -> str:
    pretty = title.title()
    if pid % 3 == 0:
        return f"Über {pretty}."  # exercise non-normalized display text
    if pid % 2 == 0:
        return f"{pretty}."
    return pretty


def date_for(pid: int, year: int) -> str:
    return f"{year}-{(pid * 7) % 12 + 1:02d}-{(pid * 13) % 28 + 1:02d}"


def doi_for(pid: int, side: str) -> str:
    if side == "b" and pid % 10 == 0:
        return f"10.5555/MINI.{pid:04d}"  # case must not matter when pairing
    return f"10.5555/mini.{pid:04d}"


def build_plan():
    """One row per journal paper: who wrote it, true year, both CCs."""
    plan = []  # dicts with id, author, true_year, cc_a, cc_b, credited lists
    pid = 0

    def add(author_key, author_id, author_name, year_idx, cc_a, cc_b):
        nonlocal pid
        pid += 1
        plan.append({
            "id": pid,
            "author_key": author_key,
            "author_id": author_id,
            "author_name": author_name,
            "true_year": YEARS[year_idx],
            "cc_a": cc_a,
            "cc_b": cc_b,
        })

    for yi, n in enumerate(ANNA):
        for k in range(n):
            cc = ANNA_CC[yi]
            if pid + 1 == 1:
                cc = 40  # the standout hit
            add("anna", ANNA_ID, "anna aalto", yi, cc, cc)
    for yi, n in enumerate(BRUNO):
        for _ in range(n):
            cc = BRUNO_CC[yi]
            add("bruno", BRUNO_ID, "bruno bellini", yi, cc, cc - 1)
    for yi, n in enumerate(CAMILO):
        for _ in range(n):
            cc = CAMILO_CC[yi]
            add("camilo", CAMILO_ID, "camilo duarte", yi, cc, cc + 1)
    fi = 0
    for yi, n in enumerate(FILLER):
        for _ in range(n):
            cc = (7 * fi + 3) % FILLER_MAXCC[yi]
            cc = STAR_CC.get(fi, cc)
            cc_b = cc
            if fi % 3 == 0 and fi not in STAR_CC:
                cc_b = cc + 1
            add("filler", 9100 + fi, filler_name(fi), yi, cc, cc_b)
            plan[-1]["filler_index"] = fi
            fi += 1
    return plan


# ---------------------------------------------------------------------------
# Independent arithmetic checks of the design targets
# ---------------------------------------------------------------------------

def check_design(plan) -> None:
    def year_a(p):
        return SHIFTS.get(p["id"], p["true_year"])

    researchers = [p for p in plan if p["author_key"] != "filler"]
    assert len(plan) == 130, len(plan)
    assert len(researchers) == 57, len(researchers)

    mismatched = [p for p in researchers if year_a(p) != p["true_year"]]
    assert len(mismatched) == 11, len(mismatched)
    assert all(p["id"] in SHIFTS for p in mismatched)
    assert abs(100.0 * 11 / 57 - 19.2982456140) < 1e-6

    credited = [p for p in plan if p["author_key"] == "camilo"
                and p["id"] in CAMILO_CREDITED_A]
    camilo_all = [p for p in plan if p["author_key"] == "camilo"]
    assert len(camilo_all) == 25 and len(credited) == 9
    assert abs(100.0 * (25 - 9) / 25 - 64.0) < 1e-12

    def jncs(side):
        year_of = (lambda p: year_a(p)) if side == "a" else (lambda p: p["true_year"])
        cc_of = (lambda p: p["cc_a"]) if side == "a" else (lambda p: p["cc_b"])
        cells = {}
        for p in plan:
            cells.setdefault(year_of(p), []).append(cc_of(p))
        means = {y: sum(v) / len(v) for y, v in cells.items()}
        out = {}
        for key in ("anna", "bruno", "camilo"):
            mine = [p for p in plan if p["author_key"] == key]
            out[key] = sum(cc_of(p) / means[year_of(p)] for p in mine) / len(mine)
        return out

    ja, jb = jncs("a"), jncs("b")
    assert ja["anna"] > 1.05, ja
    assert ja["bruno"] < 0.95, ja
    assert ja["camilo"] < ja["bruno"] - 0.03, ja  # A: bruno above camilo
    assert jb["anna"] > 1.05, jb
    assert jb["camilo"] < 0.95, jb
    assert jb["bruno"] < jb["camilo"] - 0.03, jb  # B: camilo above bruno

    def class4_count(side, key):
        cc_of = (lambda p: p["cc_a"]) if side == "a" else (lambda p: p["cc_b"])
        pool = sorted(cc_of(p) for p in plan)
        n = len(pool)

        def pct(c):
            return 100.0 * sum(1 for x in pool if x < c) / n

        return sum(1 for p in plan
                   if p["author_key"] == key and pct(cc_of(p)) >= 90.0)

    for side in ("a", "b"):
        assert class4_count(side, "anna") >= 1, side
        assert class4_count(side, "bruno") == 0, side
        assert class4_count(side, "camilo") == 0, side

    print("design checks passed:",
          f"jncs A={ {k: round(v, 3) for k, v in ja.items()} }",
          f"jncs B={ {k: round(v, 3) for k, v in jb.items()} }",
          f"class4 A/anna={class4_count('a', 'anna')}",
          f"B/anna={class4_count('b', 'anna')}")


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def write_tsv(path: Path, rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        for row in rows:
            fh.write("\t".join(NULL if v is None else str(v) for v in row) + "\n")


def venue_papers(side: str):
    """Three conference papers outside the journal, one without a year."""
    offset = B_OFFSET if side == "b" else 0
    venue = VENUE_B if side == "b" else VENUE_A
    out = []
    for base, year, cc in ((7001, 2013, 2), (7002, 2014, 1), (7003, None, 0)):
        pid = base + offset
        title = f"workshop notes on retrieval evaluation {base}"
        out.append({
            "id": pid, "title": title,
            "display": display_for(base, title),
            "year": year,
            "date": date_for(base, year) if year else None,
            "cc": cc, "journal": None, "venue": venue,
            "authors": [(9600 + base - 7000, ["noor veldkamp", "pia stamm",
                                              "remy calder"][base - 7001], 1)],
            "doi": None,
        })
    return out


def emit_snapshot(plan, side: str) -> Path:
    offset = B_OFFSET if side == "b" else 0
    journal = JOURNAL_B if side == "b" else JOURNAL_A
    outdir = FIXTURES / ("scientometrics-mini" + ("-b" if side == "b" else ""))
    if outdir.exists():
        shutil.rmtree(outdir)
    outdir.mkdir(parents=True)

    papers, authors, refs, fos_tags = [], [], [], []
    all_ids = {p["id"] + offset for p in plan}

    for p in plan:
        pid = p["id"] + offset
        year = p["true_year"] if side == "b" else SHIFTS.get(p["id"], p["true_year"])
        cc = p["cc_b"] if side == "b" else p["cc_a"]
        title = title_for(p["id"])
        volume = year - 2009
        fp = (p["id"] % 30) * 10 + 1
        papers.append((
            pid, title, display_for(p["id"], title), year,
            date_for(p["id"], year), cc, cc, journal, None,
            volume, (p["id"] % 4) + 1, fp, fp + 9, doi_for(p["id"], side),
        ))

        position = 1
        drop_credit = (side == "a" and p["author_key"] == "camilo"
                       and p["id"] not in CAMILO_CREDITED_A)
        if not drop_credit:
            affiliation = {
                "anna": (301, "northlake university"),
                "bruno": (302, "alpine institute of technology"),
                "camilo": (303, "rio verde university"),
            }.get(p["author_key"], (None, None))
            authors.append((pid, p["author_id"], p["author_name"],
                            affiliation[0], affiliation[1], position))
            position += 1
        if p["author_key"] != "filler":
            k = p["id"]
            authors.append((pid, 9500 + k, coauthor_name(k), None, None, position))

        for delta in (7, 13):
            rid = p["id"] - delta
            if rid >= 1:
                refs.append((pid, rid + offset))
        if p["id"] == 1:
            refs.append((pid, 99991))  # cited work outside the snapshot

        if p["author_key"] == "filler":
            fos_tags.append((pid, 100 + p["filler_index"] % 18))
        else:
            fos_tags.append((pid, 200))
            fos_tags.append((pid, 300))

    for v in venue_papers(side):
        papers.append((v["id"], v["title"], v["display"], v["year"], v["date"],
                       v["cc"], v["cc"], None, v["venue"],
                       None, None, None, None, v["doi"]))
        for (aid, name, pos) in v["authors"]:
            authors.append((v["id"], aid, name, None, None, pos))
        refs.append((v["id"], 1 + offset))
        fos_tags.append((v["id"], 201))
        fos_tags.append((v["id"], 104))
        all_ids.add(v["id"])

    write_tsv(outdir / "papers.tsv", papers)
    write_tsv(outdir / "paper_authors.tsv", authors)
    write_tsv(outdir / "references.tsv", refs)
    write_tsv(outdir / "paper_fos.tsv", fos_tags)
    write_tsv(outdir / "journals.tsv", [(journal, "scientometrics mini", ISSN)])
    write_tsv(outdir / "venues.tsv",
              [(VENUE_B if side == "b" else VENUE_A,
                "computational humanities workshop",
                "Computational Humanities Workshop", "CHW")])
    fos_rows = [(100 + i, name, "L0") for i, name in enumerate(L0)]
    fos_rows += [(200, "bibliometrics", "L1"),
                 (201, "information retrieval", "L1"),
                 (202, "social sciences", "L1"),
                 (300, "citation analysis", "L2")]
    write_tsv(outdir / "fos.tsv", fos_rows)
    write_tsv(outdir / "fos_hierarchy.tsv",
              [(200, 117), (201, 104), (202, 116), (202, 117), (300, 200)])
    return outdir


def emit_json_bundle() -> Path:
    """A six-paper JSON bundle with descriptions and source links."""
    path = FIXTURES / "mini.json"
    papers = []
    for i in range(1, 7):
        year = 2014 + (i % 3)
        papers.append({
            "Id": 42000 + i,
            "Ti": f"worked example number {i}",
            "DN": f"Worked Example Number {i}",
            "Y": year,
            "D": f"{year}-0{i}-15",
            "CC": i * 2,
            "ECC": i * 2 + 1,
            "JId": 42900,
            "volume": str(i),
            "first_page": str(10 * i),
            "last_page": str(10 * i + 9),
            "DOI": f"10.5555/demo.{i:02d}",
            "authors": [
                {"AuId": 42800 + i, "AuN": filler_name(i), "position": 1},
            ],
            "references": [42000 + i - 1] if i > 1 else [],
            "fos": [104],
            "description": f"A running demonstration record, entry {i}.",
            "sources": [{"Ty": "HTML", "U": f"https://example.org/demo/{i}"}],
        })
    bundle = {
        "journals": [{"JId": 42900, "JN": "demonstration quarterly",
                      "ISSN": "2199-5678"}],
        "venues": [],
        "fos": [{"FId": 104, "FN": "computer science", "level": "L0"}],
        "papers": papers,
    }
    path.write_text(json.dumps(bundle, indent=1), encoding="utf-8")
    return path


def main() -> int:
    plan = build_plan()
    check_design(plan)
    FIXTURES.mkdir(exist_ok=True)
    a = emit_snapshot(plan, "a")
    b = emit_snapshot(plan, "b")
    j = emit_json_bundle()
    for out in (a, b):
        lines = sum(1 for _ in (out / "papers.tsv").open())
        print(f"wrote {out} ({lines} papers)")
    print(f"wrote {j}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
