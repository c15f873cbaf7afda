"""Figure assembly and rendering for campaign output files.

The renderer never recomputes statistics: histogram bars are taken
verbatim from a summary's `histogram` field, scaling points and the
fitted curve from a `logfit.json`. Everything drawable is first
assembled into a plain PlotData value (a pure function of the input
files), then handed to matplotlib; tests can therefore check the plotted
data exactly without parsing image files.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import matplotlib

matplotlib.use("Agg")
# deterministic ids inside SVG output, so re-rendering is byte-identical
matplotlib.rcParams["svg.hashsalt"] = "spikeplots"
matplotlib.rcParams["svg.fonttype"] = "none"  # keep labels as text, not glyph paths

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = (
    "renormalized_histogram",
    "mean_vs_logn",
    "variance_vs_n",
    "renorm_variance_vs_n",
)

_OVERLAY_SAMPLES = 256


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: a kind, input files, labels, and the optional overlay.

    ``overlay`` draws t -> exp(-t) on histogram figures and the fitted
    C*log(n) + b curve on mean-growth figures; the variance kinds have no
    overlay and ignore the flag.
    """

    kind: str
    inputs: tuple[str, ...]
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    labels: tuple[str, ...] = field(default_factory=tuple)
    overlay: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.inputs:
            raise PlotError("a figure needs at least one input file")
        if self.labels and len(self.labels) != len(self.inputs):
            raise PlotError(
                f"{len(self.labels)} legend labels for {len(self.inputs)} inputs"
            )


class Series(NamedTuple):
    label: str
    x: tuple[float, ...]  # histogram: bin edges (one more than y)
    y: tuple[float, ...]  # histogram: densities


class PlotData(NamedTuple):
    kind: str
    series: tuple[Series, ...]
    overlays: tuple[Series, ...]
    title: str
    xlabel: str
    ylabel: str


def _read_json(path: str) -> dict:
    if not os.path.isfile(path):
        raise PlotError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlotError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise PlotError(f"{path}: expected a JSON object")
    return payload


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


def _load_histogram(path: str) -> Series:
    payload = _read_json(path)
    hist = payload.get("histogram")
    if not isinstance(hist, dict) or not hist.get("edges") or not hist.get("densities"):
        raise PlotError(f"{path}: summary has no usable histogram field")
    edges = tuple(float(e) for e in hist["edges"])
    densities = tuple(float(d) for d in hist["densities"])
    if len(edges) != len(densities) + 1:
        raise PlotError(
            f"{path}: histogram needs one more edge than densities "
            f"({len(edges)} edges, {len(densities)} densities)"
        )
    return Series(label=_stem(path), x=edges, y=densities)


def _load_points(path: str, y_key: str) -> tuple[dict, Series]:
    payload = _read_json(path)
    points = payload.get("points")
    if not isinstance(points, list) or not points:
        raise PlotError(f"{path}: log-fit file has no points")
    xs, ys = [], []
    for p in points:
        if not isinstance(p, dict) or "n" not in p or p.get(y_key) is None:
            raise PlotError(f"{path}: every point needs 'n' and a {y_key!r} value")
        xs.append(float(p["n"]))
        ys.append(float(p[y_key]))
    for key in ("C", "intercept"):
        if not isinstance(payload.get(key), (int, float)):
            raise PlotError(f"{path}: log-fit file is missing {key!r}")
    return payload, Series(label=_stem(path), x=tuple(xs), y=tuple(ys))


def _relabel(series: Series, spec: FigureSpec, index: int) -> Series:
    if spec.labels:
        return series._replace(label=spec.labels[index])
    return series


def _exp_overlay(upto: float) -> Series:
    xs = tuple(i * upto / (_OVERLAY_SAMPLES - 1) for i in range(_OVERLAY_SAMPLES))
    return Series(label="exp(-t)", x=xs, y=tuple(math.exp(-x) for x in xs))


def _fit_overlay(payload: dict, series: Series) -> Series:
    c, b = float(payload["C"]), float(payload["intercept"])
    lo, hi = math.log(min(series.x)), math.log(max(series.x))
    xs = tuple(
        math.exp(lo + i * (hi - lo) / (_OVERLAY_SAMPLES - 1))
        for i in range(_OVERLAY_SAMPLES)
    )
    return Series(
        label=f"{c:.3g} log(n) + {b:.3g}", x=xs, y=tuple(c * math.log(x) + b for x in xs)
    )


_AXIS_DEFAULTS = {
    "renormalized_histogram": ("renormalized extinction time", "density"),
    "mean_vs_logn": ("neurons", "mean extinction time"),
    "variance_vs_n": ("neurons", "variance of extinction time"),
    "renorm_variance_vs_n": ("neurons", "variance of renormalized extinction time"),
}


def prepare(spec: FigureSpec) -> PlotData:
    """Assemble everything the figure will draw; raises PlotError on any
    missing or mismatched input."""
    series: list[Series] = []
    overlays: list[Series] = []
    if spec.kind == "renormalized_histogram":
        for i, path in enumerate(spec.inputs):
            series.append(_relabel(_load_histogram(path), spec, i))
        if spec.overlay:
            overlays.append(_exp_overlay(max(s.x[-1] for s in series)))
    else:
        y_key = {
            "mean_vs_logn": "mean",
            "variance_vs_n": "variance",
            "renorm_variance_vs_n": "renormalized_variance",
        }[spec.kind]
        for i, path in enumerate(spec.inputs):
            payload, pts = _load_points(path, y_key)
            series.append(_relabel(pts, spec, i))
            if spec.overlay and spec.kind == "mean_vs_logn":
                overlays.append(_fit_overlay(payload, pts))
    xlabel, ylabel = _AXIS_DEFAULTS[spec.kind]
    return PlotData(
        kind=spec.kind,
        series=tuple(series),
        overlays=tuple(overlays),
        title=spec.title,
        xlabel=spec.xlabel or xlabel,
        ylabel=spec.ylabel or ylabel,
    )


def build_figure(spec: FigureSpec):
    """Matplotlib figure plus the exact data it draws."""
    data = prepare(spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    want_legend = len(data.series) > 1 or bool(spec.labels) or data.overlays
    if data.kind == "renormalized_histogram":
        if len(data.series) == 1:
            s = data.series[0]
            widths = [b - a for a, b in zip(s.x, s.x[1:])]
            ax.bar(
                s.x[:-1], s.y, width=widths, align="edge",
                color="#9ecae9", edgecolor="#4a7fae", linewidth=0.6, label=s.label,
            )
        else:  # outlines stay readable when histograms share the axes
            for s in data.series:
                ax.stairs(s.y, s.x, linewidth=1.4, label=s.label)
        ax.set_xlim(0.0, max(s.x[-1] for s in data.series))
        ax.set_ylim(bottom=0.0)
    else:
        for s in data.series:
            ax.plot(s.x, s.y, "o", markersize=5, label=s.label)
        ax.set_xscale("log")
    for curve in data.overlays:
        ax.plot(curve.x, curve.y, color="#c43b3b", linewidth=1.6, label=curve.label)
    ax.set_title(data.title)
    ax.set_xlabel(data.xlabel)
    ax.set_ylabel(data.ylabel)
    if want_legend:
        ax.legend(frameon=False)
    fig.tight_layout()
    return fig, data


# metadata fields that would otherwise embed the current date
_STRIP_DATES = {".svg": {"Date": None}, ".pdf": {"CreationDate": None}}


def render(spec: FigureSpec, out_path: str) -> PlotData:
    """Write the figure to ``out_path`` and return the plotted data.

    The extension picks the format (.svg default when absent, .png/.pdf
    on request); output carries no timestamps, so re-rendering the same
    spec from the same files is byte-identical.
    """
    root, ext = os.path.splitext(out_path)
    if not ext:
        out_path, ext = out_path + ".svg", ".svg"
    fig, data = build_figure(spec)
    try:
        fig.savefig(out_path, metadata=_STRIP_DATES.get(ext.lower()), dpi=150)
    finally:
        plt.close(fig)
    return data
