"""Immutable in-memory store of the heterogeneous academic graph.

Entities: papers, journals, venues, fields of study. Authorships and
affiliations are embedded in paper records rather than stored standalone.
After :meth:`GraphBuilder.build` the graph is read-only for all consumers;
reads are safe under unrestricted concurrency. A snapshot reload produces
a fresh graph object that callers swap in atomically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Optional

from .errors import NotFound
from .normalize import is_normalized

MAX_ENTITY_ID = 2**64 - 1
YEAR_MIN = 1000
YEAR_MAX = 3000


@dataclass(frozen=True)
class Authorship:
    """One author position on a paper; names are stored normalized."""

    author_id: int
    author_name_norm: str
    position: int
    affiliation_id: Optional[int] = None
    affiliation_name_norm: Optional[str] = None


@dataclass(frozen=True)
class ExtendedMeta:
    """Response-only publication metadata (the extended attributes)."""

    volume: Optional[str] = None
    issue: Optional[str] = None
    first_page: Optional[str] = None
    last_page: Optional[str] = None
    doi: Optional[str] = None
    description: Optional[str] = None
    sources: tuple[tuple[str, str], ...] = ()


EMPTY_META = ExtendedMeta()


@dataclass(frozen=True)
class PaperRecord:
    """One publication with all stored attributes.

    ``title_norm``, ``words`` and embedded author/affiliation names are in
    normalized form; ``display_name`` and ``extended.description`` are raw.
    """

    id: int
    title_norm: str
    display_name: Optional[str] = None
    year: Optional[int] = None
    date: Optional[str] = None
    citation_count: int = 0
    estimated_citation_count: int = 0
    references: tuple[int, ...] = ()
    words: frozenset[str] = frozenset()
    authorships: tuple[Authorship, ...] = ()
    journal_id: Optional[int] = None
    venue_id: Optional[int] = None
    fields_of_study: tuple[int, ...] = ()
    extended: ExtendedMeta = EMPTY_META


@dataclass(frozen=True)
class JournalRecord:
    id: int
    name_norm: str
    display_name: Optional[str] = None
    issn: Optional[str] = None


@dataclass(frozen=True)
class VenueRecord:
    id: int
    name_norm: str
    display_name: Optional[str] = None
    short_name: Optional[str] = None


@dataclass(frozen=True)
class FieldOfStudyRecord:
    id: int
    name_norm: str
    level: str = "L0"  # L0..L3
    parents: tuple[int, ...] = ()


@dataclass
class GraphMeta:
    """Snapshot provenance, reported by /health and the load CLI."""

    source: str = "memory"
    papers: int = 0
    journals: int = 0
    venues: int = 0
    fields: int = 0


class AcademicGraph:
    """Keyed entity collections plus the derived lookup indexes.

    Indexes are exact inversions of the stored records: every
    ``(journal_id, year)`` bucket holds exactly the papers carrying that
    journal and year, and every normalized author name maps to exactly the
    papers listing that name. Papers without a year are excluded from the
    journal-year index.
    """

    def __init__(
        self,
        papers: dict[int, PaperRecord],
        journals: dict[int, JournalRecord],
        venues: dict[int, VenueRecord],
        fields: dict[int, FieldOfStudyRecord],
        source: str = "memory",
    ):
        self.papers = papers
        self.journals = journals
        self.venues = venues
        self.fields = fields
        self.index_journal_year: dict[tuple[int, int], frozenset[int]] = {}
        self.index_author_name: dict[str, frozenset[int]] = {}
        self.ecc_rank: dict[int, int] = {}
        self.meta = GraphMeta(
            source=source,
            papers=len(papers),
            journals=len(journals),
            venues=len(venues),
            fields=len(fields),
        )
        self._reindex()

    def _reindex(self) -> None:
        by_jy: dict[tuple[int, int], set[int]] = {}
        by_author: dict[str, set[int]] = {}
        for p in self.papers.values():
            if p.journal_id is not None and p.year is not None:
                by_jy.setdefault((p.journal_id, p.year), set()).add(p.id)
            for a in p.authorships:
                by_author.setdefault(a.author_name_norm, set()).add(p.id)
        self.index_journal_year = {k: frozenset(v) for k, v in by_jy.items()}
        self.index_author_name = {k: frozenset(v) for k, v in by_author.items()}
        # Static match-quality rank: all papers by descending ECC, ascending id.
        ordered = sorted(self.papers.values(), key=lambda p: (-p.estimated_citation_count, p.id))
        self.ecc_rank = {p.id: i for i, p in enumerate(ordered)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AcademicGraph):
            return NotImplemented
        return (
            self.papers == other.papers
            and self.journals == other.journals
            and self.venues == other.venues
            and self.fields == other.fields
        )

    def __repr__(self) -> str:
        m = self.meta
        return (
            f"AcademicGraph(papers={m.papers}, journals={m.journals}, "
            f"venues={m.venues}, fields={m.fields})"
        )


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _check_id(value: int, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    if value <= 0 or value > MAX_ENTITY_ID:
        raise ValueError(f"{what} must be a non-zero 64-bit unsigned integer, got {value}")
    return value


class GraphBuilder:
    """Single-writer assembly of an :class:`AcademicGraph`.

    Validates record invariants on insertion and freezes the result in
    :meth:`build`. Not thread-safe; build once, then share the graph.
    """

    def __init__(self, source: str = "memory"):
        self._papers: dict[int, PaperRecord] = {}
        self._journals: dict[int, JournalRecord] = {}
        self._venues: dict[int, VenueRecord] = {}
        self._fields: dict[int, FieldOfStudyRecord] = {}
        self._source = source

    def add_paper(self, record: PaperRecord) -> None:
        _check_id(record.id, "paper id")
        if record.id in self._papers:
            raise ValueError(f"duplicate paper id {record.id}")
        if record.year is not None and not (YEAR_MIN <= record.year <= YEAR_MAX):
            raise ValueError(f"paper {record.id}: year {record.year} outside [{YEAR_MIN}, {YEAR_MAX}]")
        if record.citation_count < 0 or record.estimated_citation_count < 0:
            raise ValueError(f"paper {record.id}: negative citation count")
        if len(set(record.references)) != len(record.references):
            raise ValueError(f"paper {record.id}: duplicate references")
        if record.id in record.references:
            raise ValueError(f"paper {record.id}: references itself")
        if not is_normalized(record.title_norm):
            # Non-Latin letters kept by the normalizer are legal; anything
            # else indicates the caller skipped normalization.
            raise ValueError(f"paper {record.id}: title is not in normalized form")
        for a in record.authorships:
            _check_id(a.author_id, f"paper {record.id} author id")
            if a.position < 1:
                raise ValueError(f"paper {record.id}: authorship position must be 1-based")
        self._papers[record.id] = record

    def add_journal(self, record: JournalRecord) -> None:
        _check_id(record.id, "journal id")
        if record.id in self._journals:
            raise ValueError(f"duplicate journal id {record.id}")
        self._journals[record.id] = record

    def add_venue(self, record: VenueRecord) -> None:
        _check_id(record.id, "venue id")
        if record.id in self._venues:
            raise ValueError(f"duplicate venue id {record.id}")
        self._venues[record.id] = record

    def add_field(self, record: FieldOfStudyRecord) -> None:
        _check_id(record.id, "field id")
        if record.id in self._fields:
            raise ValueError(f"duplicate field id {record.id}")
        self._fields[record.id] = record

    def build(self) -> AcademicGraph:
        return AcademicGraph(
            self._papers, self._journals, self._venues, self._fields, source=self._source
        )


# ---------------------------------------------------------------------------
# Read operations
# ---------------------------------------------------------------------------

def get_paper(graph: AcademicGraph, paper_id: int) -> PaperRecord:
    """Fetch one paper record; raises :class:`NotFound` for absent or zero ids."""
    record = graph.papers.get(paper_id)
    if record is None:
        raise NotFound(paper_id, "paper")
    return record


def papers_in_journal_year(graph: AcademicGraph, journal_id: int, year: int) -> set[int]:
    """Paper ids published in ``journal_id`` during ``year`` (empty set if none)."""
    return set(graph.index_journal_year.get((journal_id, year), ()))


def recompute_citation_counts(
    graph: AcademicGraph, mode: Literal["stored", "derived"] = "stored"
) -> int:
    """Optionally replace stored citation counts with in-snapshot in-degrees.

    ``stored`` keeps counts as loaded (the default: counts come from an
    external database and include out-of-snapshot citations). ``derived``
    sets each paper's count to the number of in-snapshot papers referencing
    it; dangling reference targets are ignored. Estimated citation counts
    are never derived. Returns the number of papers whose count changed;
    a second derived run returns 0.
    """
    if mode == "stored":
        return 0
    if mode != "derived":
        raise ValueError(f"unknown recompute mode {mode!r}")
    indegree: dict[int, int] = {pid: 0 for pid in graph.papers}
    for p in graph.papers.values():
        for ref in p.references:
            if ref in indegree:
                indegree[ref] += 1
    changed = 0
    for pid, count in indegree.items():
        record = graph.papers[pid]
        if record.citation_count != count:
            graph.papers[pid] = replace(record, citation_count=count)
            changed += 1
    return changed
