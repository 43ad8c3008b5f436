"""Cross-database metadata quality audits.

Two graph snapshots covering the same literature rarely agree. This
module pairs up publications between a primary snapshot (A) and a
comparison snapshot (B) by normalized title, then measures how the
paired metadata diverges:

* publication-year discrepancies, with signed per-pair deltas and an
  overall mismatch rate;
* author-name coverage, i.e. on what share of the paired records a
  given name actually appears on each side.

Matching is deterministic and order-independent: every candidate is
resolved against the full comparison snapshot on its own, with no
mutable claiming of B-side records.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import EmptyPairs, NotFound
from .graph import AcademicGraph

NOT_FOUND = "NotFound"
AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class MatchedPair:
    """One A-paper matched to one B-paper, with the fields audits need."""

    key: str  # normalized title both sides share
    id_a: int
    id_b: int
    year_a: Optional[int]
    year_b: Optional[int]
    authors_a: frozenset
    authors_b: frozenset


@dataclass(frozen=True)
class Unmatched:
    paper_id: int  # A-side id
    reason: str  # NotFound | Ambiguous
    candidates: tuple[int, ...] = ()  # B-side ids for Ambiguous


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[MatchedPair, ...]
    unmatched: tuple[Unmatched, ...]


def _author_names(paper) -> frozenset:
    return frozenset(a.author_name_norm for a in paper.authorships)


def _year_gap(paper_a, paper_b) -> float:
    if paper_a.year is None or paper_b.year is None:
        return float("inf")
    return abs(paper_a.year - paper_b.year)


def match_publications(
    graph_a: AcademicGraph,
    graph_b: AcademicGraph,
    candidate_ids_a: Sequence[int],
    use_doi: bool = False,
) -> MatchResult:
    """Pair A-side candidates with B-side papers by normalized title.

    Every candidate is searched for in the whole of ``graph_b``. A title
    holding several B-papers is broken by the smallest absolute year gap;
    if that still leaves several, the candidate comes back unmatched with
    reason ``Ambiguous`` (its rival ids attached). Candidates whose title
    is absent come back as ``NotFound``. Each candidate lands in exactly
    one of the two lists, so pairs plus unmatched always re-add to the
    candidate count.

    With ``use_doi`` set, a candidate carrying a DOI that also appears in
    ``graph_b`` is paired through it (case-insensitively) before any
    title lookup.
    """
    by_title: dict[str, list[int]] = {}
    for pid in sorted(graph_b.papers):
        by_title.setdefault(graph_b.papers[pid].title_norm, []).append(pid)
    by_doi: dict[str, list[int]] = {}
    if use_doi:
        for pid in sorted(graph_b.papers):
            doi = graph_b.papers[pid].extended.doi
            if doi:
                by_doi.setdefault(doi.upper(), []).append(pid)

    pairs: list[MatchedPair] = []
    unmatched: list[Unmatched] = []
    for pid in dict.fromkeys(candidate_ids_a):
        if pid not in graph_a.papers:
            raise NotFound(pid, "paper")
        paper_a = graph_a.papers[pid]
        bucket: list[int] = []
        if use_doi and paper_a.extended.doi:
            bucket = by_doi.get(paper_a.extended.doi.upper(), [])
        if not bucket:
            bucket = by_title.get(paper_a.title_norm, [])
        if not bucket:
            unmatched.append(Unmatched(pid, NOT_FOUND))
            continue
        best_gap = min(_year_gap(paper_a, graph_b.papers[b]) for b in bucket)
        best = [b for b in bucket if _year_gap(paper_a, graph_b.papers[b]) == best_gap]
        if len(best) > 1:
            unmatched.append(Unmatched(pid, AMBIGUOUS, tuple(best)))
            continue
        paper_b = graph_b.papers[best[0]]
        pairs.append(MatchedPair(
            key=paper_a.title_norm,
            id_a=pid,
            id_b=paper_b.id,
            year_a=paper_a.year,
            year_b=paper_b.year,
            authors_a=_author_names(paper_a),
            authors_b=_author_names(paper_b),
        ))
    return MatchResult(tuple(pairs), tuple(unmatched))


def papers_in_journal(graph: AcademicGraph, journal_id: int) -> list[int]:
    """Ascending ids of all papers assigned to one journal."""
    return sorted(
        pid for pid, p in graph.papers.items() if p.journal_id == journal_id
    )


def pairs_for_author(
    pairs: Sequence[MatchedPair], author_name_norm: str
) -> list[MatchedPair]:
    """Pairs naming the author on at least one side."""
    return [
        p for p in pairs
        if author_name_norm in p.authors_a or author_name_norm in p.authors_b
    ]


# ---------------------------------------------------------------------------
# Year audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class YearMismatch:
    id_a: int
    id_b: int
    year_a: int
    year_b: int
    delta: int  # year_a - year_b, sign preserved


@dataclass(frozen=True)
class YearAudit:
    pairs_checked: int
    skipped: int  # pairs lacking a year on either side
    mismatches: tuple[YearMismatch, ...]
    rate: float  # percentage of checked pairs, 100 * mismatches / pairs


def year_discrepancies(pairs: Sequence[MatchedPair]) -> YearAudit:
    """Signed year deltas across matched pairs, plus the mismatch rate.

    Pairs missing a year on either side are skipped (counted, never
    treated as mismatches); the rate divides by all pairs passed in.
    Raises :class:`EmptyPairs` on an empty input.
    """
    if not pairs:
        raise EmptyPairs()
    mismatches: list[YearMismatch] = []
    skipped = 0
    for p in pairs:
        if p.year_a is None or p.year_b is None:
            skipped += 1
            continue
        if p.year_a != p.year_b:
            mismatches.append(YearMismatch(
                p.id_a, p.id_b, p.year_a, p.year_b, p.year_a - p.year_b,
            ))
    rate = 100.0 * len(mismatches) / len(pairs)
    return YearAudit(len(pairs), skipped, tuple(mismatches), rate)


# ---------------------------------------------------------------------------
# Author coverage audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageAudit:
    author: str
    pairs_checked: int
    listed_a: int
    listed_b: int
    fraction_a: float  # share of pairs naming the author on side A
    fraction_b: float
    missing_a: tuple[int, ...]  # A-side ids where the name is absent
    missing_b: tuple[int, ...]  # B-side ids where the name is absent


def author_coverage(
    pairs: Sequence[MatchedPair], author_name_norm: str
) -> CoverageAudit:
    """How often a name appears on each side of the given pairs.

    The caller picks the pairs (usually everything attributable to the
    author on either side); all of them count toward both denominators.
    Raises :class:`EmptyPairs` on an empty input.
    """
    if not pairs:
        raise EmptyPairs()
    missing_a = [p.id_a for p in pairs if author_name_norm not in p.authors_a]
    missing_b = [p.id_b for p in pairs if author_name_norm not in p.authors_b]
    n = len(pairs)
    return CoverageAudit(
        author=author_name_norm,
        pairs_checked=n,
        listed_a=n - len(missing_a),
        listed_b=n - len(missing_b),
        fraction_a=(n - len(missing_a)) / n,
        fraction_b=(n - len(missing_b)) / n,
        missing_a=tuple(missing_a),
        missing_b=tuple(missing_b),
    )
