"""Command-line front end.

Subcommands:

  simulate   one run, record printed to stdout (optionally with a trace CSV)
  replicate  fixed-size campaign -> samples.csv + summary.json + manifest.json
  scaling    1D size sweep -> per-size outputs + logfit.json + manifest.json
  analyze    recompute summary.json from an existing samples.csv

Exit codes: 0 success; 2 configuration problem (bad file, bad flag combo,
missing seed); 3 campaign finished but some runs hit a cap (outputs are
still written); 4 I/O failure. Anything else crashing out is a bug.

Every random number traces back to one master seed, taken from --seed or
the config's master_seed (the flag wins). There is no fallback entropy
source: a campaign without a seed is refused.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from datetime import datetime, timezone
from typing import Any, Optional

from . import __version__, outputs
from .campaign import CampaignSpec, CampaignSummary, fit_scaling, run_campaign
from .config import ConfigError, resolve_config, resolve_config_dict, spec_from_resolved
from .engine import run_to_extinction
from .model import ModelError
from .rng import derive_run_seed
from .stats import StatsError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPPED = 3
EXIT_IO = 4


class _CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str) -> None:
    try:
        outputs.write_atomic(path, text)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from exc


def _load_resolved(args: argparse.Namespace) -> dict[str, Any]:
    """Config file + flag overrides -> resolved config dict."""
    text = _read_text(args.config)
    try:
        resolved = resolve_config(text)
        overrides: dict[str, Any] = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if getattr(args, "reps", None) is not None:
            overrides["replications"] = args.reps
        if getattr(args, "bins", None) is not None:
            overrides["bins"] = args.bins
        if getattr(args, "max_events", None) is not None:
            overrides["max_events"] = args.max_events
        if overrides:
            resolved = resolve_config_dict({**resolved, **overrides})
    except (ConfigError, ModelError) as exc:
        raise _CliError(EXIT_CONFIG, f"{args.config}: {exc}") from exc
    if resolved["master_seed"] is None:
        raise _CliError(
            EXIT_CONFIG, "no seed: pass --seed or set master_seed in the config"
        )
    return resolved


def _spec_of(resolved: dict[str, Any]) -> CampaignSpec:
    try:
        return spec_from_resolved(resolved)
    except (ConfigError, ModelError) as exc:
        raise _CliError(EXIT_CONFIG, str(exc)) from exc


def _manifest(command: str, resolved: dict[str, Any], started: str) -> str:
    return outputs.manifest_json_text(
        command=command,
        resolved_config=resolved,
        master_seed=resolved["master_seed"],
        code_version=__version__,
        started_at=started,
        finished_at=_utc_now(),
    )


def _point_outputs(out_dir: str, summary: CampaignSummary, bins: int) -> None:
    _write(os.path.join(out_dir, "samples.csv"), outputs.samples_csv_text(summary.records))
    _write(os.path.join(out_dir, "summary.json"), outputs.summary_json_text(summary, bins))


def _cmd_simulate(args: argparse.Namespace) -> int:
    resolved = _load_resolved(args)
    if resolved["size_sweep"] is not None or resolved["gamma_sweep"] is not None:
        raise _CliError(EXIT_CONFIG, "simulate runs a single setting; drop the sweep")
    spec = _spec_of(resolved)
    # same derivation as replication 0 of a campaign on this seed
    run_seed = derive_run_seed(resolved["master_seed"], 0, 0)
    trace: Optional[list] = [] if args.trace else None
    record = run_to_extinction(spec.base_params, run_seed, trace=trace)
    if args.trace:
        _write(args.trace, outputs.trace_csv_text(trace))
    for field in dataclasses.fields(record):
        print(f"{field.name} {getattr(record, field.name)}")
    return EXIT_CAPPED if record.terminated_by != "extinction" else EXIT_OK


def _cmd_replicate(args: argparse.Namespace) -> int:
    resolved = _load_resolved(args)
    if resolved["size_sweep"] is not None:
        raise _CliError(EXIT_CONFIG, "replicate is fixed-size; use `scaling` for size sweeps")
    spec = _spec_of(resolved)
    started = _utc_now()
    summaries = run_campaign(spec)
    bins = resolved["bins"]
    if len(summaries) == 1:
        _point_outputs(args.out, summaries[0], bins)
    else:  # one subdirectory per gamma-sweep point
        for s in summaries:
            _point_outputs(os.path.join(args.out, f"point_{s.sweep_index:02d}"), s, bins)
    _write(os.path.join(args.out, "manifest.json"), _manifest("replicate", resolved, started))
    n_capped = sum(s.n_capped for s in summaries)
    if n_capped:
        print(f"warning: {n_capped} run(s) hit a cap; statistics exclude them", file=sys.stderr)
        return EXIT_CAPPED
    return EXIT_OK


def _cmd_scaling(args: argparse.Namespace) -> int:
    resolved = _load_resolved(args)
    if resolved["size_sweep"] is None:
        raise _CliError(EXIT_CONFIG, "scaling needs a size_sweep in the config")
    if len(resolved["size_sweep"]) < 3:
        raise _CliError(EXIT_CONFIG, "scaling needs at least 3 sweep sizes to fit")
    spec = _spec_of(resolved)
    started = _utc_now()
    summaries = run_campaign(spec)
    bins = resolved["bins"]
    for s in summaries:
        _point_outputs(os.path.join(args.out, f"n_{s.neuron_count:05d}"), s, bins)
    try:
        fit = fit_scaling(summaries)
    except StatsError as exc:
        raise _CliError(EXIT_CONFIG, f"log fit failed: {exc}") from exc
    _write(os.path.join(args.out, "logfit.json"), outputs.logfit_json_text(fit, summaries))
    _write(os.path.join(args.out, "manifest.json"), _manifest("scaling", resolved, started))
    n_capped = sum(s.n_capped for s in summaries)
    if n_capped:
        print(f"warning: {n_capped} run(s) hit a cap; statistics exclude them", file=sys.stderr)
        return EXIT_CAPPED
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        records = outputs.read_samples_csv(args.in_path)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read {args.in_path}: {exc.strerror}") from exc
    except outputs.OutputError as exc:
        raise _CliError(EXIT_CONFIG, str(exc)) from exc
    samples = tuple(r.extinction_time for r in records if r.terminated_by == "extinction")
    n_capped = len(records) - len(samples)
    bins = args.bins if args.bins is not None else 50
    try:
        payload = outputs.summary_payload(samples, n_capped, bins)
    except StatsError as exc:
        raise _CliError(EXIT_CONFIG, str(exc)) from exc
    out_dir = args.out if args.out is not None else (os.path.dirname(args.in_path) or ".")
    _write(os.path.join(out_dir, "summary.json"), outputs.json_text(payload))
    return EXIT_CAPPED if n_capped else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikelattice",
        description="Spiking-neuron lattice simulator: run campaigns, summarize extinction times.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, reps: bool = True) -> None:
        p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        if reps:
            p.add_argument("--reps", type=int, default=None, help="replications (overrides config)")
            p.add_argument("--bins", type=int, default=None, help="histogram bins (overrides config)")
        p.add_argument(
            "--max-events", type=int, default=None, dest="max_events",
            help="per-run event cap (overrides config)",
        )

    p = sub.add_parser("simulate", help="run one trajectory and print its record")
    common(p, reps=False)
    p.add_argument("--trace", default=None, help="write an event trace CSV here")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("replicate", help="run a fixed-size campaign")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_replicate)

    p = sub.add_parser("scaling", help="run a 1D size sweep and fit mean vs log(n)")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("analyze", help="recompute summary.json from a samples CSV")
    p.add_argument("--in", required=True, dest="in_path", help="samples.csv from a previous run")
    p.add_argument("--bins", type=int, default=None, help="histogram bins (default 50)")
    p.add_argument("--out", default=None, help="output directory (default: alongside the CSV)")
    p.set_defaults(func=_cmd_analyze)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
