"""Command-line interface.

One executable, ``akgraph``, with subcommands for loading snapshots,
running queries and histograms, computing citation indicators, comparing
authors within one snapshot or across two, auditing metadata quality,
and serving the HTTP API.

Exit codes: 0 on success, 1 for usage problems (bad flags, malformed
query expressions), 2 when the data cannot answer the request (unknown
journal, empty result sets, broken snapshot files). ``--json`` output is
byte-identical to the HTTP service's responses for the same request.
"""

from __future__ import annotations

import sys
from typing import Optional

import click

from .audit import (
    author_coverage,
    match_publications,
    pairs_for_author,
    papers_in_journal,
    year_discrepancies,
)
from .compare import (
    fmt_rate,
    fmt_score,
    fmt_share,
    render_text,
    report_csv,
    report_payload,
    resolve_journal,
    resolve_journal_pair,
    run_compare,
)
from .errors import DataError, QueryError
from .graph import recompute_citation_counts
from .histogram import DEFAULT_CAP, calc_histogram
from .indicators import (
    author_papers,
    build_reference_set,
    jncs,
    journal_year_span,
    pr_distribution,
    validate_boundaries,
)
from .ingest import export_tsv_snapshot, load_snapshot
from .normalize import normalize_text
from .query import evaluate, parse
from .wire import (
    dumps,
    evaluate_payload,
    histogram_payload,
    load_report_payload,
)

# ---------------------------------------------------------------------------
# Option helpers
# ---------------------------------------------------------------------------

_mode_option = click.option(
    "--mode", type=click.Choice(["strict", "lenient"]), default="strict",
    show_default=True, help="How to treat malformed snapshot rows.")


def _parse_scheme(ctx, param, value):
    try:
        return validate_boundaries([float(p) for p in value.split(",")])
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


def _parse_years(ctx, param, value):
    if value is None:
        return None
    try:
        lo, hi = (int(p) for p in value.split(","))
    except ValueError:
        raise click.BadParameter("expected two comma-separated years") from None
    if lo > hi:
        raise click.BadParameter("year window must be low,high")
    return (lo, hi)


def _parse_authors(ctx, param, value):
    names = [p.strip() for p in value.split(",") if p.strip()]
    if not names:
        raise click.BadParameter("expected a comma-separated list of author names")
    return names


_scheme_option = click.option(
    "--scheme", default="50,80,90", show_default=True, callback=_parse_scheme,
    help="Percentile class boundaries, comma-separated, ascending.")
_pool_option = click.option(
    "--percentile-pool", type=click.Choice(["pooled", "per-year"]),
    default="pooled", show_default=True,
    help="Rank against the whole window or the paper's own year only.")
_years_option = click.option(
    "--years", default=None, callback=_parse_years,
    help="Inclusive reference-set window, e.g. 2010,2014. "
         "Defaults to the journal's own year span.")
_journal_options = (
    click.option("--journal", default=None, help="Journal name (normalized before lookup)."),
    click.option("--journal-id", type=int, default=None, help="Journal id in the snapshot."),
    click.option("--issn", default=None, help="Journal ISSN."),
)


def _with_journal_options(fn):
    for opt in reversed(_journal_options):
        fn = opt(fn)
    return fn


def _load(path: str, mode: str):
    graph, report = load_snapshot(path, mode)
    return graph, report


def _author_pubs(graph, name, journal_id, years):
    """Author's journal papers, split into dated ids and (cc, year) pairs."""
    ids = author_papers(graph, name, journal_id, years)
    dated = [pid for pid in ids if graph.papers[pid].year is not None]
    pubs = [(graph.papers[pid].citation_count, graph.papers[pid].year)
            for pid in dated]
    return ids, dated, pubs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group()
def cli() -> None:
    """Query, analyze and audit academic-graph snapshots."""


@cli.command("load")
@click.argument("snapshot")
@_mode_option
@click.option("--recount", is_flag=True,
              help="Replace citation counts with in-snapshot reference counts.")
@click.option("--export", "export_dir", default=None,
              help="Write the loaded graph back out as TSV into this directory.")
@click.option("--json", "as_json", is_flag=True, help="Emit the load report as JSON.")
def cmd_load(snapshot: str, mode: str, recount: bool, export_dir: Optional[str], as_json: bool) -> None:
    """Load a snapshot and report what was read."""
    graph, report = _load(snapshot, mode)
    changed = recompute_citation_counts(graph, "derived") if recount else 0
    if export_dir:
        export_tsv_snapshot(graph, export_dir)
    if as_json:
        payload = load_report_payload(report)
        if recount:
            payload["recounted"] = changed
        click.echo(dumps(payload))
        return
    click.echo(f"loaded {report.source}")
    click.echo(f"papers: {report.papers}  journals: {report.journals}  "
               f"venues: {report.venues}  fields: {report.fields}")
    click.echo(f"authorships: {report.authorship_rows}  references: {report.reference_rows}")
    if recount:
        click.echo(f"recounted citations: {changed} papers changed")
    if report.dangling_references:
        click.echo(f"dangling references: {report.dangling_references}")
    if report.skipped_rows:
        click.echo(f"skipped rows: {report.skipped_rows}")
    for warning in report.warnings:
        click.echo(f"warning: {warning}")
    if export_dir:
        click.echo(f"exported to {export_dir}")


@cli.command("evaluate")
@click.argument("expr")
@click.option("--snapshot", required=True, help="Snapshot directory or JSON bundle.")
@_mode_option
@click.option("--count", type=int, default=10, show_default=True)
@click.option("--offset", type=int, default=0, show_default=True)
@click.option("--attributes", default="Id,Ti", show_default=True,
              help="Comma-separated attributes to return.")
@click.option("--extended-query", is_flag=True,
              help="Allow scalar extended attributes (DOI, volume, issue, pages) in EXPR.")
@click.option("--json", "as_json", is_flag=True, help="Emit the wire JSON envelope.")
def cmd_evaluate(expr: str, snapshot: str, mode: str, count: int, offset: int,
                 attributes: str, extended_query: bool, as_json: bool) -> None:
    """Run a query expression and list matching papers."""
    if count < 1:
        raise click.BadParameter("count must be positive", param_hint="--count")
    if offset < 0:
        raise click.BadParameter("offset must be non-negative", param_hint="--offset")
    attrs = [a.strip() for a in attributes.split(",") if a.strip()]
    if not attrs:
        raise click.BadParameter("expected at least one attribute", param_hint="--attributes")
    graph, _ = _load(snapshot, mode)
    ast = parse(expr, extended_query=extended_query)
    resp = evaluate(graph, ast, count=count, offset=offset,
                    attributes=attrs, expr_text=expr)
    if as_json:
        click.echo(dumps(evaluate_payload(resp)))
        return
    click.echo(f"expr: {resp.expr_echo}")
    if not resp.entities:
        click.echo("no matches in window")
        return
    for entity in resp.entities:
        parts = [f"logprob={entity.logprob:.3f}"]
        for key, value in entity.values.items():
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            parts.append(f"{key}={value}")
        click.echo("  ".join(parts))


@cli.command("histogram")
@click.argument("expr")
@click.option("--snapshot", required=True, help="Snapshot directory or JSON bundle.")
@_mode_option
@click.option("--attributes", default="Y", show_default=True,
              help="Comma-separated attributes to aggregate.")
@click.option("--count", type=int, default=10, show_default=True,
              help="Buckets to show per attribute.")
@click.option("--offset", type=int, default=0, show_default=True)
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True,
              help="Refuse requests matching more entities than this.")
@click.option("--json", "as_json", is_flag=True, help="Emit the wire JSON envelope.")
def cmd_histogram(expr: str, snapshot: str, mode: str, attributes: str,
                  count: int, offset: int, cap: int, as_json: bool) -> None:
    """Compute attribute-value distributions over query matches."""
    if count < 1:
        raise click.BadParameter("count must be positive", param_hint="--count")
    if offset < 0:
        raise click.BadParameter("offset must be non-negative", param_hint="--offset")
    attrs = [a.strip() for a in attributes.split(",") if a.strip()]
    if not attrs:
        raise click.BadParameter("expected at least one attribute", param_hint="--attributes")
    graph, _ = _load(snapshot, mode)
    ast = parse(expr)
    resp = calc_histogram(graph, ast, attrs, count=count, offset=offset,
                          expr_text=expr, cap=cap)
    if as_json:
        click.echo(dumps(histogram_payload(resp)))
        return
    click.echo(f"expr: {resp.expr_echo}")
    click.echo(f"matches: {resp.num_entities}")
    for hist in resp.histograms:
        click.echo(f"{hist.attribute}: {hist.distinct_count} distinct, "
                   f"{hist.total_count} total")
        for bucket in hist.buckets:
            click.echo(f"  {bucket.value}\t{bucket.count}")


@cli.command("jncs")
@click.option("--snapshot", required=True)
@_mode_option
@click.option("--author", required=True, help="Author name (normalized before lookup).")
@_with_journal_options
@_years_option
@click.option("--json", "as_json", is_flag=True)
def cmd_jncs(snapshot: str, mode: str, author: str, journal: Optional[str],
             journal_id: Optional[int], issn: Optional[str],
             years: Optional[tuple[int, int]], as_json: bool) -> None:
    """Journal-normalized citation score for one author."""
    graph, _ = _load(snapshot, mode)
    record = resolve_journal(graph, journal_id, issn, journal)
    window = years or journal_year_span(graph, record.id)
    refset = build_reference_set(graph, record.id, window)
    name = normalize_text(author)
    ids, dated, pubs = _author_pubs(graph, name, record.id, window)
    result = jncs(pubs, refset)
    if as_json:
        click.echo(dumps({
            "author": name,
            "journal": record.name_norm,
            "years": list(window),
            "publications": len(ids),
            "scored": len(result.scores),
            "excluded": [
                {"paper": dated[e.index], "year": e.year, "reason": e.reason}
                for e in result.excluded
            ],
            "jncs": result.value,
            "papers": [
                {"paper": dated[s.index], "citations": s.citation_count,
                 "year": s.year, "cell_mean": s.cell_mean, "score": s.score}
                for s in result.scores
            ],
        }))
        return
    click.echo(f"author: {name}")
    click.echo(f"journal: {record.name_norm} ({window[0]}-{window[1]})")
    click.echo(f"publications: {len(ids)} (scored {len(result.scores)}, "
               f"excluded {len(ids) - len(result.scores)})")
    click.echo(f"jncs: {fmt_score(result.value)}")


@cli.command("prclasses")
@click.option("--snapshot", required=True)
@_mode_option
@click.option("--author", required=True, help="Author name (normalized before lookup).")
@_with_journal_options
@_years_option
@_scheme_option
@_pool_option
@click.option("--json", "as_json", is_flag=True)
def cmd_prclasses(snapshot: str, mode: str, author: str, journal: Optional[str],
                  journal_id: Optional[int], issn: Optional[str],
                  years: Optional[tuple[int, int]], scheme: tuple[float, ...],
                  percentile_pool: str, as_json: bool) -> None:
    """Percentile-rank class distribution for one author."""
    graph, _ = _load(snapshot, mode)
    record = resolve_journal(graph, journal_id, issn, journal)
    window = years or journal_year_span(graph, record.id)
    refset = build_reference_set(graph, record.id, window)
    name = normalize_text(author)
    ids, dated, pubs = _author_pubs(graph, name, record.id, window)
    dist = pr_distribution(pubs, refset, scheme, percentile_pool)
    counts = [0] * (len(scheme) + 1)
    for p in dist.pubs:
        counts[p.pr_class - 1] += 1
    if as_json:
        click.echo(dumps({
            "author": name,
            "journal": record.name_norm,
            "years": list(window),
            "scheme": list(scheme),
            "pool": percentile_pool,
            "publications": len(ids),
            "classed": len(dist.pubs),
            "excluded": [
                {"paper": dated[e.index], "year": e.year, "reason": e.reason}
                for e in dist.excluded
            ],
            "class_counts": counts,
            "class_shares": list(dist.shares),
            "papers": [
                {"paper": dated[p.index], "citations": p.citation_count,
                 "year": p.year, "percentile": p.percentile, "class": p.pr_class}
                for p in dist.pubs
            ],
        }))
        return
    click.echo(f"author: {name}")
    click.echo(f"journal: {record.name_norm} ({window[0]}-{window[1]})")
    click.echo(f"publications: {len(ids)} (classed {len(dist.pubs)}, "
               f"excluded {len(ids) - len(dist.pubs)})")
    shares = "  ".join(
        f"c{i + 1} {fmt_share(s)}" for i, s in enumerate(dist.shares))
    click.echo(f"class shares: {shares}")


@cli.command("compare")
@click.argument("snapshot_a")
@click.argument("snapshot_b", required=False, default=None)
@_mode_option
@click.option("--authors", required=True, callback=_parse_authors,
              help="Comma-separated author names to compare.")
@_with_journal_options
@_years_option
@_scheme_option
@_pool_option
@click.option("--json", "as_json", is_flag=True, help="Emit the full report as JSON.")
@click.option("--csv", "as_csv", is_flag=True, help="Emit the indicator block as CSV.")
def cmd_compare(snapshot_a: str, snapshot_b: Optional[str], mode: str,
                authors: list[str], journal: Optional[str],
                journal_id: Optional[int], issn: Optional[str],
                years: Optional[tuple[int, int]], scheme: tuple[float, ...],
                percentile_pool: str, as_json: bool, as_csv: bool) -> None:
    """Compare authors' indicators, in one snapshot or across two."""
    if as_json and as_csv:
        raise click.UsageError("--json and --csv are mutually exclusive")
    graph_a, _ = _load(snapshot_a, mode)
    graph_b = None
    if snapshot_b is not None:
        graph_b, _ = _load(snapshot_b, mode)
    report = run_compare(
        graph_a, graph_b, authors,
        journal_id=journal_id, issn=issn, journal_name=journal,
        years=years, scheme=scheme, pool=percentile_pool,
    )
    if as_json:
        click.echo(dumps(report_payload(report)))
    elif as_csv:
        click.echo(report_csv(report), nl=False)
    else:
        click.echo(render_text(report), nl=False)


@cli.command("audit")
@click.argument("snapshot_a")
@click.argument("snapshot_b")
@_mode_option
@click.option("--authors", required=True, callback=_parse_authors,
              help="Comma-separated author names to audit.")
@_with_journal_options
@click.option("--use-doi", is_flag=True,
              help="Pair papers by DOI when both sides carry one.")
@click.option("--json", "as_json", is_flag=True)
def cmd_audit(snapshot_a: str, snapshot_b: str, mode: str, authors: list[str],
              journal: Optional[str], journal_id: Optional[int], issn: Optional[str],
              use_doi: bool, as_json: bool) -> None:
    """Audit metadata agreement between two snapshots."""
    graph_a, _ = _load(snapshot_a, mode)
    graph_b, _ = _load(snapshot_b, mode)
    journal_a, journal_b = resolve_journal_pair(
        graph_a, graph_b, journal_id, issn, journal)
    candidates = papers_in_journal(graph_a, journal_a.id)
    result = match_publications(graph_a, graph_b, candidates, use_doi=use_doi)
    wanted = [normalize_text(a) for a in authors]
    per_author = {a: pairs_for_author(result.pairs, a) for a in wanted}
    union = {}
    for a in wanted:
        for pair in per_author[a]:
            union.setdefault(pair.id_a, pair)
    union_pairs = [union[k] for k in sorted(union)]
    years_audit = year_discrepancies(union_pairs)
    coverage = [author_coverage(per_author[a], a) for a in wanted if per_author[a]]
    if as_json:
        click.echo(dumps({
            "journal": journal_a.name_norm,
            "matching": {
                "candidates": len(candidates),
                "matched": len(result.pairs),
                "not_found": sum(1 for u in result.unmatched if u.reason == "NotFound"),
                "ambiguous": sum(1 for u in result.unmatched if u.reason == "Ambiguous"),
            },
            "year_audit": {
                "pairs": years_audit.pairs_checked,
                "skipped": years_audit.skipped,
                "mismatches": [
                    {"id_a": d.id_a, "id_b": d.id_b,
                     "year_a": d.year_a, "year_b": d.year_b, "delta": d.delta}
                    for d in years_audit.mismatches
                ],
                "rate": years_audit.rate,
            },
            "coverage": [
                {"author": c.author, "pairs": c.pairs_checked,
                 "listed_a": c.listed_a, "listed_b": c.listed_b,
                 "fraction_a": c.fraction_a, "fraction_b": c.fraction_b,
                 "missing_a": list(c.missing_a), "missing_b": list(c.missing_b)}
                for c in coverage
            ],
        }))
        return
    click.echo(f"journal: {journal_a.name_norm}")
    click.echo(f"matched: {len(result.pairs)} of {len(candidates)} journal papers "
               f"({len(result.unmatched)} unmatched)")
    click.echo(f"year check over the authors' {years_audit.pairs_checked} pairs: "
               f"{len(years_audit.mismatches)} differ ({fmt_rate(years_audit.rate)})")
    for c in coverage:
        missing_a = 100.0 * len(c.missing_a) / c.pairs_checked
        missing_b = 100.0 * len(c.missing_b) / c.pairs_checked
        click.echo(f"  {c.author}: listed on {c.listed_a}/{c.pairs_checked} in A "
                   f"({fmt_rate(missing_a)} missing), {c.listed_b}/{c.pairs_checked} "
                   f"in B ({fmt_rate(missing_b)} missing)")


@cli.command("serve")
@click.option("--snapshot", required=True)
@_mode_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True,
              help="Histogram entity cap.")
@click.option("--extended-query", is_flag=True,
              help="Let queries use scalar extended attributes (DOI, volume, ...).")
def cmd_serve(snapshot: str, mode: str, host: str, port: int, cap: int,
              extended_query: bool) -> None:
    """Serve the HTTP API over a snapshot."""
    from .service import ServiceConfig, run_server  # deferred: pulls in fastapi

    run_server(ServiceConfig(
        host=host, port=port, snapshot_path=snapshot, mode=mode,
        cap=cap, extended_query=extended_query,
    ))


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv: Optional[list[str]] = None) -> int:
    """Run the CLI; returns the process exit code instead of raising."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except QueryError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
