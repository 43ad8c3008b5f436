"""Snapshot loading and export.

Two on-disk forms are understood:

* **TSV directory.** Headerless tab-separated files with ``\\N`` for null:
  ``papers.tsv`` (required) plus optional ``paper_authors.tsv``,
  ``references.tsv``, ``paper_fos.tsv``, ``journals.tsv``, ``venues.tsv``,
  ``fos.tsv`` and ``fos_hierarchy.tsv``. This is the bulk-snapshot format.
* **JSON bundle.** One ``.json`` file with ``papers`` / ``journals`` /
  ``venues`` / ``fos`` arrays, field names matching the TSV columns.
  Richer than TSV: it can carry paper descriptions and source links,
  which have no TSV column.

Loading normalizes every title and name it stores (idempotent when the
input is already normalized) and derives each paper's word set from the
normalized title plus description. ``strict`` mode raises on the first
malformed row; ``lenient`` skips bad rows and records a warning per skip.
Duplicate entity ids are an error in both modes. Warnings also flag
suspicious but loadable values: DOIs that do not look like DOIs, and
publication dates that disagree with the publication year.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from datetime import date as _date
from pathlib import Path
from typing import Literal, Optional, Union

from .errors import DuplicateId, MalformedRow, MissingFile
from .graph import (
    YEAR_MAX,
    YEAR_MIN,
    AcademicGraph,
    Authorship,
    ExtendedMeta,
    FieldOfStudyRecord,
    GraphBuilder,
    JournalRecord,
    PaperRecord,
    VenueRecord,
)
from .normalize import normalize_text, tokens

LoadMode = Literal["strict", "lenient"]

_NULL = "\\N"
_DOI_SHAPE = re.compile(r"10\.\S+/\S+")


def _level_num(level: str) -> int:
    return int(level[1:])

PAPER_FILE = "papers.tsv"
AUTHOR_FILE = "paper_authors.tsv"
REFERENCE_FILE = "references.tsv"
PAPER_FOS_FILE = "paper_fos.tsv"
JOURNAL_FILE = "journals.tsv"
VENUE_FILE = "venues.tsv"
FOS_FILE = "fos.tsv"
FOS_HIERARCHY_FILE = "fos_hierarchy.tsv"


@dataclass
class LoadReport:
    source: str
    mode: LoadMode
    papers: int = 0
    journals: int = 0
    venues: int = 0
    fields: int = 0
    authorship_rows: int = 0
    reference_rows: int = 0
    dangling_references: int = 0
    skipped_rows: int = 0
    warnings: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# TSV directories
# ---------------------------------------------------------------------------

class _TsvLoader:
    def __init__(self, root: Path, mode: LoadMode):
        self.root = root
        self.mode = mode
        self.report = LoadReport(source=str(root), mode=mode)

    def rows(self, filename: str, width: int, required: bool = False):
        path = self.root / filename
        if not path.exists():
            if required:
                raise MissingFile(path)
            return
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
            for lineno, raw in enumerate(reader, start=1):
                if not raw or raw == [""]:
                    continue
                if len(raw) != width:
                    if self.skip(filename, lineno, f"expected {width} columns, found {len(raw)}"):
                        continue
                yield lineno, [None if v == _NULL else v for v in raw]

    def skip(self, filename: str, lineno: int, detail: str) -> bool:
        """Skip the offending row in lenient mode, raise in strict."""
        if self.mode == "strict":
            raise MalformedRow(filename, lineno, detail)
        self.report.skipped_rows += 1
        self.report.warnings.append(f"{filename}:{lineno}: {detail} (row skipped)")
        return True

    def warn(self, filename: str, lineno: int, detail: str) -> None:
        self.report.warnings.append(f"{filename}:{lineno}: {detail}")

    def int_or_skip(self, filename, lineno, value, what) -> Optional[int]:
        try:
            return int(value)
        except (TypeError, ValueError):
            self.skip(filename, lineno, f"{what} is not an integer: {value!r}")
            return None


def load_tsv_snapshot(root: Union[str, Path], mode: LoadMode = "strict") -> tuple[AcademicGraph, LoadReport]:
    """Load a TSV snapshot directory into a fresh graph."""
    root = Path(root)
    if not root.is_dir():
        raise MissingFile(root)
    ld = _TsvLoader(root, mode)
    builder = GraphBuilder(source=str(root))

    # --- journals / venues ------------------------------------------------
    seen: set[int] = set()
    for lineno, row in ld.rows(JOURNAL_FILE, 3):
        jid = ld.int_or_skip(JOURNAL_FILE, lineno, row[0], "journal id")
        if jid is None:
            continue
        if jid in seen:
            raise DuplicateId(JOURNAL_FILE, jid)
        seen.add(jid)
        builder.add_journal(JournalRecord(jid, normalize_text(row[1] or ""), None, row[2]))
        ld.report.journals += 1

    seen = set()
    for lineno, row in ld.rows(VENUE_FILE, 4):
        cid = ld.int_or_skip(VENUE_FILE, lineno, row[0], "venue id")
        if cid is None:
            continue
        if cid in seen:
            raise DuplicateId(VENUE_FILE, cid)
        seen.add(cid)
        builder.add_venue(VenueRecord(cid, normalize_text(row[1] or ""), row[2], row[3]))
        ld.report.venues += 1

    # --- fields of study ----------------------------------------------------
    fos_rows: dict[int, tuple[str, str]] = {}
    for lineno, row in ld.rows(FOS_FILE, 3):
        fid = ld.int_or_skip(FOS_FILE, lineno, row[0], "field id")
        if fid is None:
            continue
        if fid in fos_rows:
            raise DuplicateId(FOS_FILE, fid)
        level = row[2] or "L0"
        if level not in ("L0", "L1", "L2", "L3"):
            if ld.skip(FOS_FILE, lineno, f"unknown field level {level!r}"):
                continue
        fos_rows[fid] = (normalize_text(row[1] or ""), level)

    parents: dict[int, list[int]] = {}
    for lineno, row in ld.rows(FOS_HIERARCHY_FILE, 2):
        child = ld.int_or_skip(FOS_HIERARCHY_FILE, lineno, row[0], "child field id")
        parent = ld.int_or_skip(FOS_HIERARCHY_FILE, lineno, row[1], "parent field id")
        if child is None or parent is None:
            continue
        if child not in fos_rows:
            # dangling, not malformed: dropped with a warning in both modes
            ld.report.skipped_rows += 1
            ld.warn(FOS_HIERARCHY_FILE, lineno,
                    f"hierarchy row for unknown field {child} (row dropped)")
            continue
        if parent not in fos_rows:
            ld.warn(FOS_HIERARCHY_FILE, lineno,
                    f"parent field {parent} is not defined")
        elif _level_num(fos_rows[parent][1]) >= _level_num(fos_rows[child][1]):
            # kept: the link is real data even when the levels look inverted
            ld.warn(FOS_HIERARCHY_FILE, lineno,
                    f"parent {parent} ({fos_rows[parent][1]}) is not above "
                    f"child {child} ({fos_rows[child][1]})")
        parents.setdefault(child, []).append(parent)

    for fid, (name, level) in fos_rows.items():
        builder.add_field(FieldOfStudyRecord(fid, name, level, tuple(sorted(parents.get(fid, ())))))
        ld.report.fields += 1

    # --- papers ---------------------------------------------------------------
    # Columns: id, title, display_name, year, date, citation_count,
    # estimated_citation_count, journal_id, venue_id, volume, issue,
    # first_page, last_page, doi.
    papers: dict[int, dict] = {}
    for lineno, row in ld.rows(PAPER_FILE, 14, required=True):
        pid = ld.int_or_skip(PAPER_FILE, lineno, row[0], "paper id")
        if pid is None:
            continue
        if pid in papers:
            raise DuplicateId(PAPER_FILE, pid)
        if not row[1]:
            if ld.skip(PAPER_FILE, lineno, "paper has no title"):
                continue
        parsed = _parse_paper_row(ld, lineno, pid, row)
        if parsed is not None:
            papers[pid] = parsed

    # --- link files ------------------------------------------------------------
    # Columns: paper id, author id, author name, affiliation id,
    # affiliation name, 1-based author position.
    for lineno, row in ld.rows(AUTHOR_FILE, 6):
        pid = ld.int_or_skip(AUTHOR_FILE, lineno, row[0], "paper id")
        aid = ld.int_or_skip(AUTHOR_FILE, lineno, row[1], "author id")
        pos = ld.int_or_skip(AUTHOR_FILE, lineno, row[5], "author position")
        if pid is None or aid is None or pos is None:
            continue
        if pid not in papers:
            if ld.skip(AUTHOR_FILE, lineno, f"authorship for unknown paper {pid}"):
                continue
        if pos < 1:
            if ld.skip(AUTHOR_FILE, lineno, f"author position {pos} is not 1-based"):
                continue
        afid = None
        if row[3] is not None:
            afid = ld.int_or_skip(AUTHOR_FILE, lineno, row[3], "affiliation id")
            if afid is None:
                continue
        papers[pid]["authors"].append(Authorship(
            aid, normalize_text(row[2] or ""), pos, afid,
            normalize_text(row[4]) if row[4] else None,
        ))
        ld.report.authorship_rows += 1

    for lineno, row in ld.rows(REFERENCE_FILE, 2):
        pid = ld.int_or_skip(REFERENCE_FILE, lineno, row[0], "paper id")
        rid = ld.int_or_skip(REFERENCE_FILE, lineno, row[1], "referenced paper id")
        if pid is None or rid is None:
            continue
        if pid not in papers:
            if ld.skip(REFERENCE_FILE, lineno, f"reference from unknown paper {pid}"):
                continue
        if rid == pid:
            if ld.skip(REFERENCE_FILE, lineno, f"paper {pid} references itself"):
                continue
        if rid in papers[pid]["references"]:
            if ld.skip(REFERENCE_FILE, lineno, f"duplicate reference {pid} -> {rid}"):
                continue
        if rid not in papers:
            # the edge is kept: citing a paper outside the snapshot is
            # normal for partial dumps, but worth surfacing
            ld.report.dangling_references += 1
            ld.warn(REFERENCE_FILE, lineno,
                    f"paper {pid} references {rid}, which this snapshot does not hold")
        papers[pid]["references"].append(rid)
        ld.report.reference_rows += 1

    for lineno, row in ld.rows(PAPER_FOS_FILE, 2):
        pid = ld.int_or_skip(PAPER_FOS_FILE, lineno, row[0], "paper id")
        fid = ld.int_or_skip(PAPER_FOS_FILE, lineno, row[1], "field id")
        if pid is None or fid is None:
            continue
        if pid not in papers:
            if ld.skip(PAPER_FOS_FILE, lineno, f"field tag for unknown paper {pid}"):
                continue
        if fid not in fos_rows:
            ld.report.skipped_rows += 1
            ld.warn(PAPER_FOS_FILE, lineno,
                    f"field tag names unknown field {fid} (row dropped)")
            continue
        if fid not in papers[pid]["fields"]:
            papers[pid]["fields"].append(fid)

    # --- assemble ----------------------------------------------------------------
    for pid in sorted(papers):
        p = papers[pid]
        p["authors"].sort(key=lambda a: (a.position, a.author_id))
        builder.add_paper(PaperRecord(
            id=pid,
            title_norm=p["title"],
            display_name=p["display_name"],
            year=p["year"],
            date=p["date"],
            citation_count=p["cc"],
            estimated_citation_count=p["ecc"],
            references=tuple(p["references"]),
            words=tokens(p["title"]),
            authorships=tuple(p["authors"]),
            journal_id=p["journal_id"],
            venue_id=p["venue_id"],
            fields_of_study=tuple(p["fields"]),
            extended=p["extended"],
        ))
        ld.report.papers += 1
    return builder.build(), ld.report


def _parse_paper_row(ld: _TsvLoader, lineno: int, pid: int, row: list) -> Optional[dict]:
    year = None
    if row[3] is not None:
        year = ld.int_or_skip(PAPER_FILE, lineno, row[3], "year")
        if year is None:
            return None
        if not YEAR_MIN <= year <= YEAR_MAX:
            ld.skip(PAPER_FILE, lineno, f"year {year} outside [{YEAR_MIN}, {YEAR_MAX}]")
            return None
    pub_date = row[4]
    if pub_date is not None:
        try:
            parsed = _date.fromisoformat(pub_date)
        except ValueError:
            ld.skip(PAPER_FILE, lineno, f"date is not ISO-8601: {pub_date!r}")
            return None
        if year is not None and parsed.year != year:
            ld.warn(PAPER_FILE, lineno, f"date {pub_date} disagrees with year {year}")
    cc = ld.int_or_skip(PAPER_FILE, lineno, row[5] or "0", "citation count")
    if cc is None:
        return None
    if cc < 0:
        ld.skip(PAPER_FILE, lineno, f"negative citation count {cc}")
        return None
    if row[6] is None:
        ecc = cc  # estimate defaults to the known count
    else:
        ecc = ld.int_or_skip(PAPER_FILE, lineno, row[6], "estimated citation count")
        if ecc is None:
            return None
        if ecc < 0:
            ld.skip(PAPER_FILE, lineno, f"negative estimated citation count {ecc}")
            return None
    journal_id = venue_id = None
    if row[7] is not None:
        journal_id = ld.int_or_skip(PAPER_FILE, lineno, row[7], "journal id")
        if journal_id is None:
            return None
    if row[8] is not None:
        venue_id = ld.int_or_skip(PAPER_FILE, lineno, row[8], "venue id")
        if venue_id is None:
            return None
    doi = row[13]
    if doi is not None and not _DOI_SHAPE.fullmatch(doi):
        ld.warn(PAPER_FILE, lineno, f"value does not look like a DOI: {doi!r}")
    return {
        "title": normalize_text(row[1]),
        "display_name": row[2],
        "year": year,
        "date": pub_date,
        "cc": cc,
        "ecc": ecc,
        "journal_id": journal_id,
        "venue_id": venue_id,
        "extended": ExtendedMeta(
            volume=row[9], issue=row[10], first_page=row[11],
            last_page=row[12], doi=doi,
        ),
        "authors": [],
        "references": [],
        "fields": [],
    }


# ---------------------------------------------------------------------------
# JSON bundles
# ---------------------------------------------------------------------------

def load_json_snapshot(path: Union[str, Path], mode: LoadMode = "strict") -> tuple[AcademicGraph, LoadReport]:
    """Load a one-file JSON snapshot into a fresh graph.

    Field names mirror the TSV columns (``Id``, ``Ti``, ``Y``, ``JId``,
    ``AuN`` and so on); the per-paper ``authors``, ``references`` and
    ``fos`` arrays replace the TSV link files. Only JSON can carry a
    paper ``description`` and ``sources`` list.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    with path.open(encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedRow(path.name, exc.lineno, f"invalid JSON: {exc.msg}") from None
    report = LoadReport(source=str(path), mode=mode)
    builder = GraphBuilder(source=str(path))

    def fail_or_skip(where: str, index: int, detail: str) -> bool:
        if mode == "strict":
            raise MalformedRow(f"{path.name}#{where}", index, detail)
        report.skipped_rows += 1
        report.warnings.append(f"{path.name}: {where}[{index}]: {detail} (entry skipped)")
        return True

    seen: set[int] = set()
    for index, obj in enumerate(data.get("journals", ())):
        try:
            jid = obj["JId"]
            if jid in seen:
                raise DuplicateId(path.name, jid)
            builder.add_journal(JournalRecord(
                jid, normalize_text(obj.get("JN", "")), None, obj.get("ISSN")))
        except DuplicateId:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if fail_or_skip("journals", index, repr(exc)):
                continue
        seen.add(jid)
        report.journals += 1

    seen = set()
    for index, obj in enumerate(data.get("venues", ())):
        try:
            cid = obj["CId"]
            if cid in seen:
                raise DuplicateId(path.name, cid)
            builder.add_venue(VenueRecord(
                cid, normalize_text(obj.get("CN", "")),
                obj.get("DN"), obj.get("SN")))
        except DuplicateId:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if fail_or_skip("venues", index, repr(exc)):
                continue
        seen.add(cid)
        report.venues += 1

    seen = set()
    for index, obj in enumerate(data.get("fos", ())):
        try:
            fid = obj["FId"]
            if fid in seen:
                raise DuplicateId(path.name, fid)
            builder.add_field(FieldOfStudyRecord(
                fid, normalize_text(obj.get("FN", "")),
                obj.get("level", "L0"), tuple(sorted(obj.get("parents", ())))))
        except DuplicateId:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if fail_or_skip("fos", index, repr(exc)):
                continue
        seen.add(fid)
        report.fields += 1

    seen = set()
    reference_lists: dict[int, tuple[int, ...]] = {}
    for index, obj in enumerate(data.get("papers", ())):
        try:
            pid = obj["Id"]
            if pid in seen:
                raise DuplicateId(path.name, pid)
            title = normalize_text(obj.get("Ti", ""))
            if not title:
                raise ValueError(f"paper {pid} has no title")
            description = obj.get("description")
            words = tokens(title)
            if description:
                words = words | tokens(normalize_text(description))
            cc = obj.get("CC", 0)
            authorships = tuple(sorted(
                (Authorship(
                    a["AuId"], normalize_text(a.get("AuN", "")),
                    a.get("position", i + 1), a.get("AfId"),
                    normalize_text(a["AfN"]) if a.get("AfN") else None,
                ) for i, a in enumerate(obj.get("authors", ()))),
                key=lambda a: (a.position, a.author_id)))
            record = PaperRecord(
                id=pid,
                title_norm=title,
                display_name=obj.get("DN"),
                year=obj.get("Y"),
                date=obj.get("D"),
                citation_count=cc,
                estimated_citation_count=obj.get("ECC", cc),
                references=tuple(obj.get("references", ())),
                words=words,
                authorships=authorships,
                journal_id=obj.get("JId"),
                venue_id=obj.get("CId"),
                fields_of_study=tuple(obj.get("fos", ())),
                extended=ExtendedMeta(
                    volume=obj.get("volume"), issue=obj.get("issue"),
                    first_page=obj.get("first_page"), last_page=obj.get("last_page"),
                    doi=obj.get("DOI"), description=description,
                    sources=tuple((s["Ty"], s["U"]) for s in obj.get("sources", ())),
                ),
            )
            builder.add_paper(record)
        except DuplicateId:
            raise
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            if fail_or_skip("papers", index, repr(exc)):
                continue
        seen.add(pid)
        reference_lists[pid] = record.references
        report.papers += 1
        report.authorship_rows += len(record.authorships)
        report.reference_rows += len(record.references)

    for pid in sorted(reference_lists):
        for rid in reference_lists[pid]:
            if rid not in seen:
                report.dangling_references += 1
                report.warnings.append(
                    f"{path.name}: paper {pid} references {rid}, "
                    "which this snapshot does not hold")
    return builder.build(), report


def load_snapshot(path: Union[str, Path], mode: LoadMode = "strict") -> tuple[AcademicGraph, LoadReport]:
    """Load a snapshot from a TSV directory or a ``.json`` bundle."""
    path = Path(path)
    if path.is_dir():
        return load_tsv_snapshot(path, mode)
    if path.suffix == ".json":
        return load_json_snapshot(path, mode)
    raise MissingFile(path)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def _cell(value) -> str:
    return _NULL if value is None else str(value)


def export_tsv_snapshot(graph: AcademicGraph, root: Union[str, Path]) -> None:
    """Write a graph back out as a TSV snapshot directory.

    Inverse of :func:`load_tsv_snapshot` up to the TSV column set: paper
    descriptions, source links and journal display names have no TSV
    column and are not exported. Output ordering is deterministic
    (ascending ids).
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)

    def write(filename: str, rows) -> None:
        with (root / filename).open("w", encoding="utf-8", newline="") as fh:
            for row in rows:
                fh.write("\t".join(_cell(v) for v in row) + "\n")

    write(JOURNAL_FILE, ((j.id, j.name_norm, j.issn)
                         for j in sorted(graph.journals.values(), key=lambda j: j.id)))
    write(VENUE_FILE, ((v.id, v.name_norm, v.display_name, v.short_name)
                       for v in sorted(graph.venues.values(), key=lambda v: v.id)))
    write(FOS_FILE, ((f.id, f.name_norm, f.level)
                     for f in sorted(graph.fields.values(), key=lambda f: f.id)))
    write(FOS_HIERARCHY_FILE, ((f.id, parent)
                               for f in sorted(graph.fields.values(), key=lambda f: f.id)
                               for parent in f.parents))
    papers = sorted(graph.papers.values(), key=lambda p: p.id)
    write(PAPER_FILE, ((p.id, p.title_norm, p.display_name, p.year, p.date,
                        p.citation_count, p.estimated_citation_count,
                        p.journal_id, p.venue_id, p.extended.volume,
                        p.extended.issue, p.extended.first_page,
                        p.extended.last_page, p.extended.doi)
                       for p in papers))
    write(AUTHOR_FILE, ((p.id, a.author_id, a.author_name_norm,
                         a.affiliation_id, a.affiliation_name_norm, a.position)
                        for p in papers for a in p.authorships))
    write(REFERENCE_FILE, ((p.id, rid) for p in papers for rid in p.references))
    write(PAPER_FOS_FILE, ((p.id, fid) for p in papers for fid in p.fields_of_study))
