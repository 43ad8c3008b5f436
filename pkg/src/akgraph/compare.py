"""Author comparison within one snapshot or across two.

Given a journal and a year window, the comparison builds the journal's
reference set per snapshot and computes, for each requested author:
publication and citation totals, the journal-normalized citation score,
percentile-rank class shares, and the author's rank among the compared
authors. With two snapshots the journal's papers are first paired across
them by title; author publication lists come from those pairs (credited
on either side, so attribution gaps stay in scope) and metadata audits
ride along: the year-discrepancy rate over the authors' pairs and
per-author attribution coverage.

Everything numeric is kept at full precision in the report; the text
renderer applies the display conventions (scores to 2 decimals, shares
as whole percents, rates to 1 decimal, halves away from zero). The text
rendering is deterministic down to the byte for equal inputs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Sequence

from .audit import (
    CoverageAudit,
    MatchedPair,
    MatchResult,
    YearAudit,
    author_coverage,
    match_publications,
    pairs_for_author,
    papers_in_journal,
    year_discrepancies,
)
from .errors import AllExcluded, UnknownJournal
from .graph import AcademicGraph, JournalRecord
from .indicators import (
    DEFAULT_BOUNDARIES,
    author_papers,
    build_reference_set,
    jncs,
    journal_year_span,
    pr_distribution,
    pubs_of,
    rank_by_jncs,
    validate_boundaries,
)
from .normalize import normalize_text

# ---------------------------------------------------------------------------
# Display rounding (text output only; JSON and CSV stay full precision)
# ---------------------------------------------------------------------------

def round_half_away(value: float, places: int) -> float:
    """Round with ties away from zero, e.g. 0.125 -> 0.13 at 2 places."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def fmt_score(value: float) -> str:
    """Normalized scores: two decimals."""
    return f"{round_half_away(value, 2):.2f}"


def fmt_share(percentage: float) -> str:
    """Class shares: whole percents."""
    return f"{round_half_away(percentage, 0):.0f}%"


def fmt_rate(percentage: float) -> str:
    """Discrepancy and coverage rates: one decimal place."""
    return f"{round_half_away(percentage, 1):.1f}%"


# ---------------------------------------------------------------------------
# Journal resolution
# ---------------------------------------------------------------------------

def resolve_journal(
    graph: AcademicGraph,
    journal_id: Optional[int] = None,
    issn: Optional[str] = None,
    name: Optional[str] = None,
) -> JournalRecord:
    """Find a journal by id, ISSN, or normalized name, in that order.

    Later keys act as fallbacks: an ISSN miss falls through to the name
    when one is given. Raises :class:`UnknownJournal` when nothing hits.
    """
    if journal_id is not None:
        record = graph.journals.get(journal_id)
        if record is not None:
            return record
    if issn is not None:
        for record in sorted(graph.journals.values(), key=lambda j: j.id):
            if record.issn == issn:
                return record
    if name is not None:
        wanted = normalize_text(name)
        for record in sorted(graph.journals.values(), key=lambda j: j.id):
            if record.name_norm == wanted:
                return record
    raise UnknownJournal(journal_id if journal_id is not None else (issn or name))


def resolve_journal_pair(
    graph_a: AcademicGraph,
    graph_b: AcademicGraph,
    journal_id: Optional[int] = None,
    issn: Optional[str] = None,
    name: Optional[str] = None,
) -> tuple[JournalRecord, JournalRecord]:
    """Resolve the same journal in both snapshots.

    Side A uses the given keys directly. Side B cannot share ids across
    databases, so it resolves by ISSN first and falls back to the
    normalized journal name, borrowing both from side A's record when not
    given explicitly.
    """
    journal_a = resolve_journal(graph_a, journal_id, issn, name)
    journal_b = resolve_journal(
        graph_b, None, issn or journal_a.issn, name or journal_a.name_norm)
    return journal_a, journal_b


# ---------------------------------------------------------------------------
# Report structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SideInfo:
    label: str  # "A" or "B"
    source: str
    journal_id: int
    journal_name: str
    years: tuple[int, int]
    reference_size: int  # pooled reference-set size


@dataclass(frozen=True)
class AuthorSide:
    paper_ids: tuple[int, ...]
    publications: int
    citations: int
    jncs: float
    excluded: int
    class_counts: tuple[int, ...]  # per class 1..k
    class_shares: tuple[float, ...]  # percentages per class 1..k
    rank: int


@dataclass(frozen=True)
class AuthorComparison:
    author: str
    a: AuthorSide
    b: Optional[AuthorSide]


@dataclass(frozen=True)
class MatchStats:
    candidates: int
    matched: int
    not_found: int
    ambiguous: int


@dataclass(frozen=True)
class ComparisonReport:
    side_a: SideInfo
    side_b: Optional[SideInfo]
    scheme: tuple[float, ...]
    pool: str
    authors: tuple[AuthorComparison, ...]
    matching: Optional[MatchStats]
    year_audit: Optional[YearAudit]
    coverage: tuple[CoverageAudit, ...]


def _author_stats(graph, refset, ids, scheme, pool) -> dict:
    pubs = pubs_of(graph, ids)
    score = jncs(pubs, refset)
    classes = pr_distribution(pubs, refset, scheme, pool)
    counts = [0] * (len(scheme) + 1)
    for p in classes.pubs:
        counts[p.pr_class - 1] += 1
    return {
        "paper_ids": tuple(ids),
        "publications": len(ids),
        "citations": sum(graph.papers[i].citation_count for i in ids),
        "jncs": score.value,
        # a pub can be unplaceable for the score, the classes, or both;
        # report the larger loss
        "excluded": max(len(score.excluded), len(classes.excluded))
        + (len(ids) - len(pubs)),
        "class_counts": tuple(counts),
        "class_shares": classes.shares,
    }


def _finish_sides(stats: dict[str, dict]) -> dict[str, AuthorSide]:
    ranks = rank_by_jncs({name: s["jncs"] for name, s in stats.items()})
    return {
        name: AuthorSide(rank=ranks[name], **s) for name, s in stats.items()
    }


def run_compare(
    graph_a: AcademicGraph,
    graph_b: Optional[AcademicGraph],
    authors: Sequence[str],
    journal_id: Optional[int] = None,
    issn: Optional[str] = None,
    journal_name: Optional[str] = None,
    years: Optional[tuple[int, int]] = None,
    scheme: Sequence[float] = DEFAULT_BOUNDARIES,
    pool: str = "pooled",
) -> ComparisonReport:
    """Compare authors inside one snapshot or across two.

    ``years`` bounds the reference sets (inclusive); when omitted, each
    side uses the span of its own journal's dated papers. Author names
    are normalized here, so callers can pass display forms. Raises
    :class:`AllExcluded` naming any author with no usable publications
    and :class:`UnknownJournal` when the journal cannot be resolved.
    """
    if not authors:
        raise ValueError("at least one author is required")
    scheme = validate_boundaries(scheme)
    names = [normalize_text(a) for a in authors]

    if graph_b is None:
        journal_a = resolve_journal(graph_a, journal_id, issn, journal_name)
        years_a = years or journal_year_span(graph_a, journal_a.id)
        refset_a = build_reference_set(graph_a, journal_a.id, years_a)
        stats = {}
        for name in names:
            ids = author_papers(graph_a, name, journal_a.id, years_a)
            if not ids:
                raise AllExcluded(
                    name, f"no publications in journal {journal_a.id} "
                          f"within {years_a[0]}-{years_a[1]}")
            stats[name] = _author_stats(graph_a, refset_a, ids, scheme, pool)
        sides = _finish_sides(stats)
        return ComparisonReport(
            side_a=SideInfo("A", graph_a.meta.source, journal_a.id,
                            journal_a.name_norm, years_a, len(refset_a.pooled)),
            side_b=None,
            scheme=scheme,
            pool=pool,
            authors=tuple(
                AuthorComparison(name, sides[name], None) for name in names
            ),
            matching=None,
            year_audit=None,
            coverage=(),
        )

    journal_a, journal_b = resolve_journal_pair(
        graph_a, graph_b, journal_id, issn, journal_name)
    years_a = years or journal_year_span(graph_a, journal_a.id)
    years_b = years or journal_year_span(graph_b, journal_b.id)
    refset_a = build_reference_set(graph_a, journal_a.id, years_a)
    refset_b = build_reference_set(graph_b, journal_b.id, years_b)

    candidates = papers_in_journal(graph_a, journal_a.id)
    result: MatchResult = match_publications(graph_a, graph_b, candidates)
    matching = MatchStats(
        candidates=len(candidates),
        matched=len(result.pairs),
        not_found=sum(1 for u in result.unmatched if u.reason == "NotFound"),
        ambiguous=sum(1 for u in result.unmatched if u.reason == "Ambiguous"),
    )

    stats_a: dict[str, dict] = {}
    stats_b: dict[str, dict] = {}
    author_pairs: dict[str, list[MatchedPair]] = {}
    for name in names:
        apairs = pairs_for_author(result.pairs, name)
        if not apairs:
            raise AllExcluded(
                name, f"no matched publications in journal {journal_a.id}")
        author_pairs[name] = apairs
        ids_a = sorted(p.id_a for p in apairs)
        ids_b = sorted(p.id_b for p in apairs)
        stats_a[name] = _author_stats(graph_a, refset_a, ids_a, scheme, pool)
        stats_b[name] = _author_stats(graph_b, refset_b, ids_b, scheme, pool)
    sides_a = _finish_sides(stats_a)
    sides_b = _finish_sides(stats_b)

    union: dict[int, MatchedPair] = {}
    for name in names:
        for p in author_pairs[name]:
            union.setdefault(p.id_a, p)
    union_pairs = [union[k] for k in sorted(union)]

    return ComparisonReport(
        side_a=SideInfo("A", graph_a.meta.source, journal_a.id,
                        journal_a.name_norm, years_a, len(refset_a.pooled)),
        side_b=SideInfo("B", graph_b.meta.source, journal_b.id,
                        journal_b.name_norm, years_b, len(refset_b.pooled)),
        scheme=scheme,
        pool=pool,
        authors=tuple(
            AuthorComparison(name, sides_a[name], sides_b[name])
            for name in names
        ),
        matching=matching,
        year_audit=year_discrepancies(union_pairs),
        coverage=tuple(
            author_coverage(author_pairs[name], name) for name in names
        ),
    )


# ---------------------------------------------------------------------------
# Renderers
# ---------------------------------------------------------------------------

def _table(rows: list[list[str]], align_right: Sequence[bool]) -> list[str]:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    out = []
    for r in rows:
        cells = [
            c.rjust(w) if right else c.ljust(w)
            for c, w, right in zip(r, widths, align_right)
        ]
        out.append("  ".join(cells).rstrip())
    return out

def render_text(report: ComparisonReport) -> str:
    """Human-readable report; byte-identical for equal inputs."""
    k = len(report.scheme) + 1
    lines: list[str] = []
    a, b = report.side_a, report.side_b
    lines.append(f"Journal: {a.journal_name}")
    lines.append(
        f"Database A: {a.source} (journal {a.journal_id}, "
        f"{a.years[0]}-{a.years[1]}, {a.reference_size} reference papers)")
    if b is not None:
        lines.append(
            f"Database B: {b.source} (journal {b.journal_id}, "
            f"{b.years[0]}-{b.years[1]}, {b.reference_size} reference papers)")
    scheme_text = "/".join(f"{x:g}" for x in report.scheme)
    lines.append(f"Classes at percentiles {scheme_text}; pool: {report.pool}")
    lines.append("")

    header = ["Author", "DB", "Pubs", "Cites", "JNCS", "Rank"]
    header += [f"C{c}" for c in range(k, 0, -1)]
    rows = [header]
    for entry in report.authors:
        for label, side in (("A", entry.a), ("B", entry.b)):
            if side is None:
                continue
            row = [
                entry.author if label == "A" else "",
                label,
                str(side.publications),
                str(side.citations),
                fmt_score(side.jncs),
                str(side.rank),
            ]
            row += [fmt_share(side.class_shares[c - 1]) for c in range(k, 0, -1)]
            rows.append(row)
    align = [False, False] + [True] * (4 + k)
    lines.extend(_table(rows, align))

    if report.matching is not None:
        m = report.matching
        lines.append("")
        lines.append(
            f"Matching: {m.matched} of {m.candidates} journal papers paired "
            f"({m.not_found} not found, {m.ambiguous} ambiguous)")
    if report.year_audit is not None:
        ya = report.year_audit
        lines.append(
            f"Year check over the authors' {ya.pairs_checked} pairs: "
            f"{len(ya.mismatches)} differ ({fmt_rate(ya.rate)})")
    for cov in report.coverage:
        missing_a = 100.0 * len(cov.missing_a) / cov.pairs_checked
        missing_b = 100.0 * len(cov.missing_b) / cov.pairs_checked
        lines.append(
            f"Coverage {cov.author}: listed on {cov.listed_a}/{cov.pairs_checked} "
            f"in A ({fmt_rate(missing_a)} missing), "
            f"{cov.listed_b}/{cov.pairs_checked} in B "
            f"({fmt_rate(missing_b)} missing)")
    return "\n".join(lines) + "\n"


def _side_payload(side: Optional[AuthorSide]) -> Optional[dict]:
    if side is None:
        return None
    return {
        "paper_ids": list(side.paper_ids),
        "publications": side.publications,
        "citations": side.citations,
        "jncs": side.jncs,
        "rank": side.rank,
        "excluded": side.excluded,
        "class_counts": list(side.class_counts),
        "class_shares": list(side.class_shares),
    }


def _info_payload(info: Optional[SideInfo]) -> Optional[dict]:
    if info is None:
        return None
    return {
        "source": info.source,
        "journal_id": info.journal_id,
        "journal_name": info.journal_name,
        "years": list(info.years),
        "reference_size": info.reference_size,
    }


def report_payload(report: ComparisonReport) -> dict:
    """Full-precision JSON form of a comparison report."""
    payload: dict = {
        "side_a": _info_payload(report.side_a),
        "side_b": _info_payload(report.side_b),
        "scheme": list(report.scheme),
        "pool": report.pool,
        "authors": [
            {
                "author": entry.author,
                "a": _side_payload(entry.a),
                "b": _side_payload(entry.b),
            }
            for entry in report.authors
        ],
    }
    if report.matching is not None:
        m = report.matching
        payload["matching"] = {
            "candidates": m.candidates,
            "matched": m.matched,
            "not_found": m.not_found,
            "ambiguous": m.ambiguous,
        }
    if report.year_audit is not None:
        ya = report.year_audit
        payload["year_audit"] = {
            "pairs": ya.pairs_checked,
            "skipped": ya.skipped,
            "mismatches": [
                {
                    "id_a": mm.id_a, "id_b": mm.id_b,
                    "year_a": mm.year_a, "year_b": mm.year_b,
                    "delta": mm.delta,
                }
                for mm in ya.mismatches
            ],
            "rate": ya.rate,
        }
    if report.coverage:
        payload["coverage"] = [
            {
                "author": cov.author,
                "pairs": cov.pairs_checked,
                "listed_a": cov.listed_a,
                "listed_b": cov.listed_b,
                "fraction_a": cov.fraction_a,
                "fraction_b": cov.fraction_b,
                "missing_a": list(cov.missing_a),
                "missing_b": list(cov.missing_b),
            }
            for cov in report.coverage
        ]
    return payload


def report_csv(report: ComparisonReport) -> str:
    """Indicator block as CSV, one row per author and side, full precision."""
    k = len(report.scheme) + 1
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["author", "side", "publications", "citations", "jncs", "rank",
         "excluded"] + [f"share_c{c}" for c in range(1, k + 1)])
    for entry in report.authors:
        for label, side in (("A", entry.a), ("B", entry.b)):
            if side is None:
                continue
            writer.writerow(
                [entry.author, label, side.publications, side.citations,
                 side.jncs, side.rank, side.excluded]
                + [side.class_shares[c - 1] for c in range(1, k + 1)])
    return buf.getvalue()
