"""The closed attribute registry.

18 entity attributes can appear in query expressions and in response
attribute lists; 12 extended attributes are response-only unless the
extended-query flag unlocks the scalar ones (DOI, volume, issue, pages).
Each attribute knows its value type, multiplicity, and how to pull values
out of a paper record (some resolve names through the graph's journal,
venue, and field collections).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional

from .errors import NonQueryableAttributeError, UnknownAttributeError
from .graph import AcademicGraph, Authorship, PaperRecord


class AttrType(Enum):
    TEXT = "text-normalized"
    NUMERIC = "numeric"
    ID = "id"
    DATE = "date"
    RAW = "raw-text"  # extended attributes; compared verbatim


Getter = Callable[[AcademicGraph, PaperRecord], Any]


@dataclass(frozen=True)
class AttributeSpec:
    path: str
    type: AttrType
    multi: bool
    extended: bool
    getter: Getter
    # Only scalar extended attributes gain query position under the
    # extended-query flag; structured/free-text ones never do.
    flag_queryable: bool = False

    @property
    def queryable(self) -> bool:
        return not self.extended


def _journal_name(g: AcademicGraph, p: PaperRecord) -> Optional[str]:
    if p.journal_id is None:
        return None
    j = g.journals.get(p.journal_id)
    return j.name_norm if j else None


def _venue_name(g: AcademicGraph, p: PaperRecord) -> Optional[str]:
    if p.venue_id is None:
        return None
    v = g.venues.get(p.venue_id)
    return v.name_norm if v else None


def _venue_display(g: AcademicGraph, p: PaperRecord) -> Optional[str]:
    if p.venue_id is None:
        return None
    v = g.venues.get(p.venue_id)
    return v.display_name if v else None


def _venue_short(g: AcademicGraph, p: PaperRecord) -> Optional[str]:
    if p.venue_id is None:
        return None
    v = g.venues.get(p.venue_id)
    return v.short_name if v else None


def _field_names(g: AcademicGraph, p: PaperRecord) -> tuple[str, ...]:
    out = []
    for fid in p.fields_of_study:
        f = g.fields.get(fid)
        if f is not None:
            out.append(f.name_norm)
    return tuple(out)


def _spec(path, type_, multi, getter, extended=False, flag_queryable=False):
    return AttributeSpec(path, type_, multi, extended, getter, flag_queryable)


REGISTRY: dict[str, AttributeSpec] = {
    s.path: s
    for s in [
        # --- paper (8) ---
        _spec("Ti", AttrType.TEXT, False, lambda g, p: p.title_norm),
        _spec("Id", AttrType.ID, False, lambda g, p: p.id),
        _spec("Y", AttrType.NUMERIC, False, lambda g, p: p.year),
        _spec("D", AttrType.DATE, False, lambda g, p: p.date),
        _spec("CC", AttrType.NUMERIC, False, lambda g, p: p.citation_count),
        _spec("ECC", AttrType.NUMERIC, False, lambda g, p: p.estimated_citation_count),
        _spec("RId", AttrType.ID, True, lambda g, p: p.references),
        _spec("W", AttrType.TEXT, True, lambda g, p: tuple(sorted(p.words))),
        # --- author (4) ---
        _spec("AA.AuN", AttrType.TEXT, True,
              lambda g, p: tuple(a.author_name_norm for a in p.authorships)),
        _spec("AA.AuId", AttrType.ID, True,
              lambda g, p: tuple(a.author_id for a in p.authorships)),
        _spec("AA.AfN", AttrType.TEXT, True,
              lambda g, p: tuple(a.affiliation_name_norm for a in p.authorships
                                 if a.affiliation_name_norm is not None)),
        _spec("AA.AfId", AttrType.ID, True,
              lambda g, p: tuple(a.affiliation_id for a in p.authorships
                                 if a.affiliation_id is not None)),
        # --- field of study / journal / venue (2 each) ---
        _spec("F.FN", AttrType.TEXT, True, _field_names),
        _spec("F.FId", AttrType.ID, True, lambda g, p: p.fields_of_study),
        _spec("J.JN", AttrType.TEXT, False, _journal_name),
        _spec("J.JId", AttrType.ID, False, lambda g, p: p.journal_id),
        _spec("C.CN", AttrType.TEXT, False, _venue_name),
        _spec("C.CId", AttrType.ID, False, lambda g, p: p.venue_id),
        # --- extended (12, response-only by default) ---
        _spec("E.V", AttrType.RAW, False, lambda g, p: p.extended.volume,
              extended=True, flag_queryable=True),
        _spec("E.I", AttrType.RAW, False, lambda g, p: p.extended.issue,
              extended=True, flag_queryable=True),
        _spec("E.FP", AttrType.RAW, False, lambda g, p: p.extended.first_page,
              extended=True, flag_queryable=True),
        _spec("E.LP", AttrType.RAW, False, lambda g, p: p.extended.last_page,
              extended=True, flag_queryable=True),
        _spec("E.DOI", AttrType.RAW, False, lambda g, p: p.extended.doi,
              extended=True, flag_queryable=True),
        _spec("E.DN", AttrType.RAW, False, lambda g, p: p.display_name, extended=True),
        _spec("E.D", AttrType.RAW, False, lambda g, p: p.extended.description, extended=True),
        _spec("E.S", AttrType.RAW, True,
              lambda g, p: tuple({"Ty": ty, "U": u} for ty, u in p.extended.sources),
              extended=True),
        _spec("E.S.Ty", AttrType.RAW, True,
              lambda g, p: tuple(ty for ty, _ in p.extended.sources), extended=True),
        _spec("E.S.U", AttrType.RAW, True,
              lambda g, p: tuple(u for _, u in p.extended.sources), extended=True),
        _spec("E.VFN", AttrType.RAW, False, _venue_display, extended=True),
        _spec("E.VSN", AttrType.RAW, False, _venue_short, extended=True),
    ]
}

ENTITY_ATTRIBUTES = tuple(p for p, s in REGISTRY.items() if not s.extended)
EXTENDED_ATTRIBUTES = tuple(p for p, s in REGISTRY.items() if s.extended)

# Embedded-entity prefixes usable inside Composite(...); maps prefix to
# (per-paper record iterator, per-record attribute getters).
_AA_GETTERS: dict[str, Callable[[AcademicGraph, Authorship], Any]] = {
    "AA.AuN": lambda g, a: a.author_name_norm,
    "AA.AuId": lambda g, a: a.author_id,
    "AA.AfN": lambda g, a: a.affiliation_name_norm,
    "AA.AfId": lambda g, a: a.affiliation_id,
}


def _field_name_of(g: AcademicGraph, fid: int) -> Optional[str]:
    f = g.fields.get(fid)
    return f.name_norm if f else None


COMPOSITE_PREFIXES: dict[str, tuple[Callable[[AcademicGraph, PaperRecord], tuple], dict]] = {
    "AA": (lambda g, p: p.authorships, _AA_GETTERS),
    "F": (
        lambda g, p: p.fields_of_study,
        {"F.FId": lambda g, fid: fid, "F.FN": _field_name_of},
    ),
    "J": (
        lambda g, p: (p.journal_id,) if p.journal_id is not None else (),
        {"J.JId": lambda g, jid: jid,
         "J.JN": lambda g, jid: g.journals[jid].name_norm if jid in g.journals else None},
    ),
    "C": (
        lambda g, p: (p.venue_id,) if p.venue_id is not None else (),
        {"C.CId": lambda g, cid: cid,
         "C.CN": lambda g, cid: g.venues[cid].name_norm if cid in g.venues else None},
    ),
}


def lookup(path: str) -> AttributeSpec:
    spec = REGISTRY.get(path)
    if spec is None:
        raise UnknownAttributeError(path)
    return spec


def lookup_queryable(path: str, extended_query: bool = False) -> AttributeSpec:
    """Resolve an attribute for query position, enforcing the extended flag."""
    spec = lookup(path)
    if spec.extended:
        if not extended_query:
            raise NonQueryableAttributeError(
                path, f"extended attribute {path!r} cannot be used in query expressions "
                      "(enable extended queries to allow it)")
        if not spec.flag_queryable:
            raise NonQueryableAttributeError(
                path, f"extended attribute {path!r} is response-only")
    return spec


def lookup_histogrammable(path: str) -> AttributeSpec:
    """Resolve an attribute for histogram position (entity attributes only)."""
    spec = lookup(path)
    if spec.extended:
        raise NonQueryableAttributeError(
            path, f"attribute {path!r} is not histogrammable")
    return spec
