"""Canonical JSON envelopes.

The HTTP service and the CLI JSON output share these encoders so the same
request yields byte-identical JSON everywhere. Encoding is compact (no
spaces), UTF-8 verbatim (no ``\\uXXXX`` escapes), floats at full repr
precision; display rounding is a presentation concern and never happens
here.
"""

from __future__ import annotations

import json
from typing import Any

from .histogram import HistogramResponse
from .ingest import LoadReport
from .query import EvaluateResponse


def dumps(payload: Any) -> str:
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False)


def evaluate_payload(resp: EvaluateResponse) -> dict:
    return {
        "expr": resp.expr_echo,
        "entities": [
            {"logprob": e.logprob, **e.values} for e in resp.entities
        ],
    }


def histogram_payload(resp: HistogramResponse) -> dict:
    return {
        "expr": resp.expr_echo,
        "num_entities": resp.num_entities,
        "histograms": [
            {
                "attribute": h.attribute,
                "distinct_values": h.distinct_count,
                "total_count": h.total_count,
                "histogram": [
                    {"value": b.value, "count": b.count} for b in h.buckets
                ],
            }
            for h in resp.histograms
        ],
    }


def error_payload(exc: Exception) -> dict:
    code = getattr(exc, "code", "InternalError")
    body: dict = {"code": code, "message": str(exc)}
    position = getattr(exc, "position", None)
    if position is not None:
        body["position"] = position
    return {"error": body}


def load_report_payload(report: LoadReport) -> dict:
    return {
        "source": report.source,
        "mode": report.mode,
        "papers": report.papers,
        "journals": report.journals,
        "venues": report.venues,
        "fields": report.fields,
        "authorship_rows": report.authorship_rows,
        "reference_rows": report.reference_rows,
        "dangling_references": report.dangling_references,
        "skipped_rows": report.skipped_rows,
        "warnings": list(report.warnings),
    }
