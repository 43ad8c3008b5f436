"""Shared builders and reference implementations for the test suite.

The reference matcher here re-implements query semantics directly over
the record dataclasses, on purpose: equivalence tests compare the engine
against this second, independently written interpretation.
"""

from __future__ import annotations

import random
from typing import Optional

from akgraph.graph import (
    Authorship,
    ExtendedMeta,
    FieldOfStudyRecord,
    GraphBuilder,
    JournalRecord,
    PaperRecord,
    VenueRecord,
)
from akgraph.query import And, Composite, Compare, Or, Range

WORDS = ["atlas", "beacon", "canyon", "delta", "ember", "fjord", "glacier",
         "harbor", "isle", "juniper", "karst", "lagoon", "mesa", "nectar",
         "orbit", "prairie", "quartz", "ridge", "summit", "tundra"]
NAMES = ["ada lovel", "ben ack", "cleo marsh", "dev patear", "eva strom",
         "fay wen", "gus holt", "ida bloom", "jon reyes", "kay lind"]
AFFS = ["north college", "south institute", "east lab", "west university"]
FIELDS = ["physics", "chemistry", "biology", "computer science", "history"]
JOURNALS = ["applied results", "open findings", "annual methods"]
VENUES = ["spring workshop", "winter symposium"]


def words_of(title: str) -> frozenset[str]:
    return frozenset(title.split())


def make_paper(pid: int, title: str = "plain title", **kw) -> PaperRecord:
    kw.setdefault("words", words_of(title))
    return PaperRecord(id=pid, title_norm=title, **kw)


def small_graph():
    """Hand-built ten-paper graph covering every attribute family."""
    b = GraphBuilder(source="unit")
    b.add_journal(JournalRecord(1, "applied results", "Applied Results", "1111-2222"))
    b.add_journal(JournalRecord(2, "open findings", None, "3333-4444"))
    b.add_venue(VenueRecord(5, "spring workshop", "Spring Workshop", "SW"))
    b.add_field(FieldOfStudyRecord(7, "physics", "L0"))
    b.add_field(FieldOfStudyRecord(8, "optics", "L1", parents=(7,)))
    authors = [
        Authorship(101, "ada lovel", 1, 201, "north college"),
        Authorship(102, "ben ack", 2),
    ]
    for i in range(1, 11):
        title = f"{WORDS[i]} {WORDS[(i * 3) % 20]} report {i}"
        b.add_paper(PaperRecord(
            id=i,
            title_norm=title,
            display_name=f"Paper {i}",
            year=2010 + (i % 4),
            date=f"{2010 + (i % 4)}-0{(i % 9) + 1}-11",
            citation_count=(i * 7) % 13,
            estimated_citation_count=(i * 7) % 13 + (i % 2),
            references=tuple(r for r in (i - 1, i - 3) if r >= 1),
            words=words_of(title),
            authorships=tuple(authors[: (i % 2) + 1]),
            journal_id=1 if i % 3 else 2,
            venue_id=5 if i % 4 == 0 else None,
            fields_of_study=(7, 8) if i % 2 else (7,),
            extended=ExtendedMeta(
                volume=str(i), issue="2", first_page=str(10 * i),
                last_page=str(10 * i + 9), doi=f"10.1000/unit.{i:03d}",
                description=f"record {i}" if i % 2 else None,
                sources=(("HTML", f"https://unit.example/{i}"),) if i % 5 == 0 else (),
            ),
        ))
    return b.build()


def random_graph(rng: random.Random, n_papers: int = 400):
    """Messy random graph: gaps in every optional field, shared names."""
    b = GraphBuilder(source="random")
    n_journals = max(2, n_papers // 50)
    n_venues = max(1, n_papers // 80)
    n_fields = len(FIELDS)
    for j in range(n_journals):
        b.add_journal(JournalRecord(
            1000 + j, JOURNALS[j % len(JOURNALS)] + f" {j}",
            None, f"{1000 + j:04d}-{j:04d}"))
    for v in range(n_venues):
        b.add_venue(VenueRecord(2000 + v, VENUES[v % len(VENUES)] + f" {v}"))
    for f in range(n_fields):
        b.add_field(FieldOfStudyRecord(3000 + f, FIELDS[f], "L0"))

    ids = rng.sample(range(1, n_papers * 10), n_papers)
    for pid in ids:
        title_words = rng.sample(WORDS, rng.randint(1, 4))
        title = " ".join(title_words)
        n_auth = rng.randint(0, 3)
        auths = []
        for pos in range(1, n_auth + 1):
            has_aff = rng.random() < 0.5
            auths.append(Authorship(
                author_id=100 + rng.randrange(40),
                author_name_norm=rng.choice(NAMES),
                position=pos,
                affiliation_id=500 + rng.randrange(8) if has_aff else None,
                affiliation_name_norm=rng.choice(AFFS) if has_aff else None,
            ))
        year = rng.choice([None] + list(range(2005, 2017)))
        refs = tuple(sorted(set(rng.sample(ids, rng.randint(0, 3))) - {pid}))
        cc = rng.randrange(60)
        b.add_paper(PaperRecord(
            id=pid,
            title_norm=title,
            year=year,
            date=(f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
                  if year and rng.random() < 0.8 else None),
            citation_count=cc,
            estimated_citation_count=cc + rng.randrange(4),
            references=refs,
            words=words_of(title),
            authorships=tuple(auths),
            journal_id=1000 + rng.randrange(n_journals) if rng.random() < 0.7 else None,
            venue_id=2000 + rng.randrange(n_venues) if rng.random() < 0.2 else None,
            fields_of_study=tuple(sorted(
                3000 + f for f in rng.sample(range(n_fields), rng.randint(0, 2)))),
            extended=ExtendedMeta(
                volume=str(rng.randrange(40)) if rng.random() < 0.5 else None,
                doi=f"10.2000/r.{pid}" if rng.random() < 0.6 else None,
            ),
        ))
    return b.build()


# ---------------------------------------------------------------------------
# Random expressions
# ---------------------------------------------------------------------------

STRING_ATTRS = ["Ti", "W", "AA.AuN", "AA.AfN", "F.FN", "J.JN", "C.CN"]
ID_ATTRS = ["Id", "RId", "AA.AuId", "AA.AfId", "F.FId", "J.JId", "C.CId"]
NUMERIC_ATTRS = ["Y", "CC", "ECC"]
COMPOSITE_OF = {"AA.AuN": "AA", "AA.AuId": "AA", "AA.AfN": "AA", "AA.AfId": "AA"}


def random_ast(rng: random.Random, depth: int = 0):
    """Grammar-driven random expression with canonical-form literals."""
    roll = rng.random()
    if depth < 3 and roll < 0.35:
        node = And if rng.random() < 0.5 else Or
        return node(random_ast(rng, depth + 1), random_ast(rng, depth + 1))
    if depth < 3 and roll < 0.45:
        prefix = rng.choice(["AA", "AA", "F", "J", "C"])
        members = {
            "AA": ["AA.AuN", "AA.AuId", "AA.AfN", "AA.AfId"],
            "F": ["F.FN", "F.FId"],
            "J": ["J.JN", "J.JId"],
            "C": ["C.CN", "C.CId"],
        }[prefix]

        def leaf():
            attr = rng.choice(members)
            if attr.endswith("N"):
                return Compare(attr, "=", " ".join(rng.sample(WORDS, 2)))
            return Compare(attr, "=", rng.randrange(1, 10**6))

        inner = leaf()
        if rng.random() < 0.5:
            combiner = And if rng.random() < 0.5 else Or
            inner = combiner(inner, leaf())
        return Composite(prefix, inner)
    kind = rng.choice(["string", "id", "numeric", "date", "range"])
    if kind == "string":
        return Compare(rng.choice(STRING_ATTRS), "=",
                       " ".join(rng.sample(WORDS, rng.randint(1, 3))))
    if kind == "id":
        return Compare(rng.choice(ID_ATTRS), "=", rng.randrange(1, 10**9))
    if kind == "numeric":
        return Compare(rng.choice(NUMERIC_ATTRS), rng.choice(["=", "<", "<=", ">", ">="]),
                       rng.randrange(0, 3000))
    if kind == "date":
        d = f"{rng.randint(1980, 2020)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        return Compare("D", rng.choice(["=", "<", "<=", ">", ">="]), d)
    attr = rng.choice(["Y", "CC", "ECC", "D"])
    if attr == "D":
        lo = f"{rng.randint(1990, 2005)}-06-15"
        hi = f"{rng.randint(2006, 2020)}-06-15"
    else:
        lo = rng.randrange(0, 1500)
        hi = lo + rng.randrange(1, 500)
    return Range(attr, lo, hi, rng.random() < 0.5, rng.random() < 0.5)


def random_query(rng: random.Random, graph, depth: int = 0):
    """Random expression whose literals are sampled from the graph."""
    papers = list(graph.papers.values())

    def pick():
        return rng.choice(papers)

    roll = rng.random()
    if depth < 2 and roll < 0.4:
        node = And if rng.random() < 0.5 else Or
        return node(random_query(rng, graph, depth + 1),
                    random_query(rng, graph, depth + 1))
    if depth < 2 and roll < 0.5:
        p = pick()
        if rng.random() < 0.25 and graph.fields:
            fid = rng.choice(list(graph.fields))
            return Composite("F", And(Compare("F.FId", "=", fid),
                                      Compare("F.FN", "=", graph.fields[fid].name_norm)))
        if p.authorships and rng.random() < 0.8:
            a = rng.choice(p.authorships)
            inner = And(Compare("AA.AuN", "=", a.author_name_norm),
                        Compare("AA.AuId", "=", a.author_id))
            if rng.random() < 0.4:
                other = pick()
                other_id = (other.authorships[0].author_id
                            if other.authorships else 1)
                inner = And(inner, Compare("AA.AuId", "=", other_id))
            return Composite("AA", inner)
        return Composite("AA", Compare("AA.AuN", "=", rng.choice(NAMES)))
    kind = rng.choice(["title", "word", "author", "journal", "venue", "field",
                       "year", "cites", "date", "range", "rid", "ids"])
    p = pick()
    if kind == "title":
        return Compare("Ti", "=", p.title_norm)
    if kind == "word":
        return Compare("W", "=", rng.choice(WORDS))
    if kind == "author":
        if p.authorships:
            return Compare("AA.AuN", "=", rng.choice(p.authorships).author_name_norm)
        return Compare("AA.AuN", "=", rng.choice(NAMES))
    if kind == "journal":
        if rng.random() < 0.5 and p.journal_id is not None:
            return Compare("J.JId", "=", p.journal_id)
        jid = rng.choice(list(graph.journals))
        return Compare("J.JN", "=", graph.journals[jid].name_norm)
    if kind == "venue":
        vid = rng.choice(list(graph.venues))
        if rng.random() < 0.5:
            return Compare("C.CId", "=", vid)
        return Compare("C.CN", "=", graph.venues[vid].name_norm)
    if kind == "field":
        fid = rng.choice(list(graph.fields))
        if rng.random() < 0.5:
            return Compare("F.FId", "=", fid)
        return Compare("F.FN", "=", graph.fields[fid].name_norm)
    if kind == "year":
        y = p.year if p.year is not None else 2010
        return Compare("Y", rng.choice(["=", "<", "<=", ">", ">="]), y)
    if kind == "cites":
        attr = rng.choice(["CC", "ECC"])
        return Compare(attr, rng.choice(["=", "<", "<=", ">", ">="]),
                       rng.randrange(0, 65))
    if kind == "date":
        d = p.date if p.date is not None else "2012-06-15"
        return Compare("D", rng.choice(["=", "<", "<=", ">", ">="]), d)
    if kind == "range":
        if rng.random() < 0.5:
            lo = rng.randint(2004, 2016)
            return Range("Y", lo, lo + rng.randint(1, 6),
                         rng.random() < 0.5, rng.random() < 0.5)
        lo = rng.randrange(0, 40)
        return Range("CC", lo, lo + rng.randrange(1, 30),
                     rng.random() < 0.5, rng.random() < 0.5)
    if kind == "rid":
        target = rng.choice(list(graph.papers)) if rng.random() < 0.7 else 12345
        return Compare("RId", "=", target)
    return Compare("Id", "=", p.id if rng.random() < 0.7 else 987654321)


# ---------------------------------------------------------------------------
# Reference matcher
# ---------------------------------------------------------------------------

def _attr_values(graph, paper, attr) -> list:
    """Every stored value of one attribute, as a list (empty if absent)."""
    j = graph.journals.get(paper.journal_id) if paper.journal_id else None
    v = graph.venues.get(paper.venue_id) if paper.venue_id else None
    table = {
        "Ti": [paper.title_norm],
        "Id": [paper.id],
        "Y": [paper.year] if paper.year is not None else [],
        "D": [paper.date] if paper.date is not None else [],
        "CC": [paper.citation_count],
        "ECC": [paper.estimated_citation_count],
        "RId": list(paper.references),
        "W": sorted(paper.words),
        "AA.AuN": [a.author_name_norm for a in paper.authorships],
        "AA.AuId": [a.author_id for a in paper.authorships],
        "AA.AfN": [a.affiliation_name_norm for a in paper.authorships
                   if a.affiliation_name_norm is not None],
        "AA.AfId": [a.affiliation_id for a in paper.authorships
                    if a.affiliation_id is not None],
        "F.FN": [graph.fields[f].name_norm for f in paper.fields_of_study
                 if f in graph.fields],
        "F.FId": list(paper.fields_of_study),
        "J.JN": [j.name_norm] if j else [],
        "J.JId": [paper.journal_id] if paper.journal_id is not None else [],
        "C.CN": [v.name_norm] if v else [],
        "C.CId": [paper.venue_id] if paper.venue_id is not None else [],
        "E.DOI": [paper.extended.doi] if paper.extended.doi is not None else [],
        "E.V": [paper.extended.volume] if paper.extended.volume is not None else [],
        "E.I": [paper.extended.issue] if paper.extended.issue is not None else [],
        "E.FP": [paper.extended.first_page] if paper.extended.first_page is not None else [],
        "E.LP": [paper.extended.last_page] if paper.extended.last_page is not None else [],
    }
    return table[attr]


def _cmp(op: str, stored, wanted) -> bool:
    if op == "=":
        if isinstance(stored, str) and isinstance(wanted, str):
            return stored == wanted
        return stored == wanted
    if op == "<":
        return stored < wanted
    if op == "<=":
        return stored <= wanted
    if op == ">":
        return stored > wanted
    return stored >= wanted


def _embedded_records(graph, paper, prefix):
    """Embedded records under one composite prefix, as per-attr value dicts."""
    if prefix == "AA":
        return [{"AA.AuN": a.author_name_norm, "AA.AuId": a.author_id,
                 "AA.AfN": a.affiliation_name_norm, "AA.AfId": a.affiliation_id}
                for a in paper.authorships]
    if prefix == "F":
        return [{"F.FId": fid,
                 "F.FN": graph.fields[fid].name_norm if fid in graph.fields else None}
                for fid in paper.fields_of_study]
    if prefix == "J":
        if paper.journal_id is None:
            return []
        j = graph.journals.get(paper.journal_id)
        return [{"J.JId": paper.journal_id, "J.JN": j.name_norm if j else None}]
    if paper.venue_id is None:
        return []
    v = graph.venues.get(paper.venue_id)
    return [{"C.CId": paper.venue_id, "C.CN": v.name_norm if v else None}]


def naive_matches(graph, paper, expr) -> bool:
    """Independent interpretation of query semantics, for equivalence tests."""
    if isinstance(expr, And):
        return naive_matches(graph, paper, expr.left) and naive_matches(graph, paper, expr.right)
    if isinstance(expr, Or):
        return naive_matches(graph, paper, expr.left) or naive_matches(graph, paper, expr.right)
    if isinstance(expr, Composite):
        return any(_embedded_ok(rec, expr.expr)
                   for rec in _embedded_records(graph, paper, expr.prefix))
    if isinstance(expr, Compare):
        if expr.attr == "E.DOI":
            want = expr.value.upper() if isinstance(expr.value, str) else expr.value
            return any(s is not None and s.upper() == want
                       for s in _attr_values(graph, paper, "E.DOI"))
        return any(_cmp(expr.op, s, expr.value)
                   for s in _attr_values(graph, paper, expr.attr))
    if isinstance(expr, Range):
        for s in _attr_values(graph, paper, expr.attr):
            lo_ok = s >= expr.low if expr.low_inclusive else s > expr.low
            hi_ok = s <= expr.high if expr.high_inclusive else s < expr.high
            if lo_ok and hi_ok:
                return True
        return False
    raise AssertionError(f"unknown node {expr!r}")


def _embedded_ok(record: dict, expr) -> bool:
    if isinstance(expr, And):
        return _embedded_ok(record, expr.left) and _embedded_ok(record, expr.right)
    if isinstance(expr, Or):
        return _embedded_ok(record, expr.left) or _embedded_ok(record, expr.right)
    if isinstance(expr, Compare):
        stored = record[expr.attr]
        return stored is not None and stored == expr.value
    raise AssertionError(f"unexpected node inside composite: {expr!r}")


def naive_match_ids(graph, expr) -> list[int]:
    found = [p.id for p in graph.papers.values() if naive_matches(graph, p, expr)]
    found.sort(key=lambda pid: graph.ecc_rank[pid])
    return found


def naive_value_counts(graph, paper_ids, attribute):
    """Bucket counts recomputed straight off the records."""
    from collections import Counter

    counter = Counter()
    for pid in paper_ids:
        counter.update(_attr_values(graph, graph.papers[pid], attribute))
    return counter
