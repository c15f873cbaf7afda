"""Durable output files: samples CSV, summary/log-fit JSON, run manifest.

All writes are atomic (temp file in the destination directory, then rename)
so a crashed run never leaves a half-written artifact. Floats in the CSV
carry 17 significant digits, which round-trips IEEE doubles exactly; the
JSON encoder round-trips by construction. Summaries are a pure function of
(samples, n_capped, bin_count), so recomputing one from a samples CSV
reproduces the original file byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Any, Optional, Sequence

from . import stats
from .campaign import CampaignSummary
from .engine import EXTINCTION, MAX_EVENTS, MAX_TIME, ExtinctionRecord
from .stats import LogFit

CSV_HEADER = ("replication", "seed", "extinction_time", "spike_events", "leak_events", "terminated_by")
_TERMINATIONS = (EXTINCTION, MAX_EVENTS, MAX_TIME)


class OutputError(ValueError):
    pass


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def samples_csv_text(records: Sequence[ExtinctionRecord]) -> str:
    """One row per replication, in replication order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for i, r in enumerate(records):
        w.writerow(
            [i, r.seed, _f17(r.extinction_time), r.spike_events, r.leak_events, r.terminated_by]
        )
    return buf.getvalue()


def read_samples_csv(path: str) -> list[ExtinctionRecord]:
    """Parse a samples CSV back into records (replication order enforced)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise OutputError(f"{path}: expected header {','.join(CSV_HEADER)}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise OutputError(f"{path}:{lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            rep = int(row[0])
            rec = ExtinctionRecord(
                extinction_time=float(row[2]),
                spike_events=int(row[3]),
                leak_events=int(row[4]),
                seed=int(row[1]),
                terminated_by=row[5],
            )
        except ValueError as exc:
            raise OutputError(f"{path}:{lineno}: {exc}") from exc
        if rec.terminated_by not in _TERMINATIONS:
            raise OutputError(f"{path}:{lineno}: unknown termination {rec.terminated_by!r}")
        if rep != lineno - 2:
            raise OutputError(f"{path}:{lineno}: replication index {rep} out of order")
        records.append(rec)
    return records


def trace_csv_text(events: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("time", "neuron", "kind"))
    for t, neuron, kind in events:
        w.writerow([_f17(t), neuron, kind])
    return buf.getvalue()


def json_text(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2) + "\n"


def summary_payload(
    samples: Sequence[float], n_capped: int, bin_count: int
) -> dict[str, Any]:
    """The summary JSON body. Statistic keys are omitted when undefined
    (no clean samples; variances additionally need >= 2 samples)."""
    payload: dict[str, Any] = {}
    if samples:
        st = stats.summarize(samples)
        payload["mean"] = st.mean
        if st.variance is not None:
            payload["variance"] = st.variance
            payload["renormalized_variance"] = st.renormalized_variance
        payload["ks_distance"] = stats.ks_distance(stats.renormalize(samples))
        hist = stats.histogram(samples, bin_count)
        payload["histogram"] = {
            "edges": list(hist.edges),
            "densities": list(hist.densities),
        }
    payload["n_capped"] = int(n_capped)
    return payload


def summary_json_text(summary: CampaignSummary, bin_count: int) -> str:
    return json_text(summary_payload(summary.samples, summary.n_capped, bin_count))


def logfit_payload(fit: LogFit, summaries: Sequence[CampaignSummary]) -> dict[str, Any]:
    points = []
    for s in summaries:
        points.append(
            {
                "n": s.neuron_count,
                "mean": s.mean,
                "variance": s.variance,
                "renormalized_variance": s.renormalized_variance,
                "ks_distance": s.ks_distance,
                "n_capped": s.n_capped,
            }
        )
    return {
        "C": fit.C,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "C_no_intercept": fit.C_no_intercept,
        "points": points,
    }


def logfit_json_text(fit: LogFit, summaries: Sequence[CampaignSummary]) -> str:
    return json_text(logfit_payload(fit, summaries))


def manifest_payload(
    command: str,
    resolved_config: dict[str, Any],
    master_seed: int,
    code_version: str,
    started_at: str,
    finished_at: str,
) -> dict[str, Any]:
    return {
        "command": command,
        "config": resolved_config,
        "master_seed": master_seed,
        "code_version": code_version,
        "started_at": started_at,
        "finished_at": finished_at,
    }


def manifest_json_text(**kwargs: Any) -> str:
    return json_text(manifest_payload(**kwargs))


def read_json(path: str) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
