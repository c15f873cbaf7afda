"""Replication campaigns: many runs, one statistical summary per sweep point.

A campaign fixes the model parameters and a replication count, optionally
sweeping either the 1D network size or gamma (never both at once). Each
replication gets its own seed derived from (master_seed, sweep_index,
replication_index), so adding sweep points or replications never perturbs
the seeds already assigned — results are extendable without re-running.

Capped runs (max_events / max_time) are censored observations, not
extinction times: their records are kept for the output files but their
times are excluded from the statistics, and the summary is flagged
non-clean via n_capped.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from . import stats
from .engine import EXTINCTION, ExtinctionRecord, run_to_extinction
from .model import ModelError, SimulationParams, build_line
from .rng import derive_run_seed


@dataclass(frozen=True)
class CampaignSpec:
    base_params: SimulationParams
    replications: int
    # A spec can be built without a seed (e.g. from a config file that leaves
    # it to the command line), but no run starts until one is set.
    master_seed: Optional[int] = None
    size_sweep: Optional[tuple[int, ...]] = None
    gamma_sweep: Optional[tuple[float, ...]] = None
    bin_count: int = 50

    def __post_init__(self):
        if self.replications < 1:
            raise ModelError(f"replications must be >= 1, got {self.replications}")
        if self.bin_count < 1:
            raise ModelError(f"bin_count must be >= 1, got {self.bin_count}")
        if self.size_sweep is not None and self.gamma_sweep is not None:
            raise ModelError("a campaign sweeps size or gamma, not both")
        if self.size_sweep is not None:
            object.__setattr__(self, "size_sweep", tuple(int(n) for n in self.size_sweep))
            if len(self.size_sweep) == 0:
                raise ModelError("size_sweep must not be empty")
            if any(n < 1 for n in self.size_sweep):
                raise ModelError(f"size_sweep entries must be >= 1, got {self.size_sweep}")
            if self.base_params.graph.dimension != 1:
                raise ModelError("size sweeps are defined for 1D networks only")
        if self.gamma_sweep is not None:
            object.__setattr__(self, "gamma_sweep", tuple(float(g) for g in self.gamma_sweep))
            if len(self.gamma_sweep) == 0:
                raise ModelError("gamma_sweep must not be empty")
            if any(not g > 0 for g in self.gamma_sweep):
                raise ModelError(f"gamma_sweep entries must be positive, got {self.gamma_sweep}")

    def point_params(self) -> list[SimulationParams]:
        """Resolved SimulationParams for every sweep point, in sweep order."""
        if self.size_sweep is not None:
            return [
                dataclasses.replace(self.base_params, graph=build_line(n))
                for n in self.size_sweep
            ]
        if self.gamma_sweep is not None:
            return [dataclasses.replace(self.base_params, gamma=g) for g in self.gamma_sweep]
        return [self.base_params]


@dataclass(frozen=True)
class CampaignSummary:
    """Statistics of one sweep point, plus the raw records behind them.

    Statistic fields are None when no clean (extinct) run exists; variance
    fields are additionally None for a single clean sample.
    """

    sweep_index: int
    neuron_count: int
    gamma: float
    records: tuple[ExtinctionRecord, ...]  # all replications, index order
    samples: tuple[float, ...]  # extinction times of clean runs only
    n_capped: int
    mean: Optional[float]
    variance: Optional[float]
    renormalized_variance: Optional[float]
    ks_distance: Optional[float]
    histogram: Optional[stats.Histogram]

    @property
    def clean(self) -> bool:
        return self.n_capped == 0


def _summarize_point(
    sweep_index: int,
    params: SimulationParams,
    records: list[ExtinctionRecord],
    bin_count: int,
) -> CampaignSummary:
    samples = tuple(r.extinction_time for r in records if r.terminated_by == EXTINCTION)
    n_capped = len(records) - len(samples)
    mean = variance = renorm_var = ks = hist = None
    if samples:
        st = stats.summarize(samples)
        mean, variance, renorm_var = st
        ks = stats.ks_distance(stats.renormalize(samples))
        hist = stats.histogram(samples, bin_count)
    return CampaignSummary(
        sweep_index=sweep_index,
        neuron_count=params.graph.neuron_count,
        gamma=params.gamma,
        records=tuple(records),
        samples=samples,
        n_capped=n_capped,
        mean=mean,
        variance=variance,
        renormalized_variance=renorm_var,
        ks_distance=ks,
        histogram=hist,
    )


def run_campaign(spec: CampaignSpec) -> list[CampaignSummary]:
    """Execute every replication of every sweep point; one summary per point.

    Replications are independent (each owns its seed and RNG stream) and are
    collected in replication order, so the result depends only on the spec.
    """
    if spec.master_seed is None:
        raise ModelError("campaign has no master seed; set one explicitly")
    out = []
    for sweep_index, params in enumerate(spec.point_params()):
        records = [
            run_to_extinction(params, derive_run_seed(spec.master_seed, sweep_index, rep))
            for rep in range(spec.replications)
        ]
        out.append(_summarize_point(sweep_index, params, records, spec.bin_count))
    return out


def fit_scaling(summaries: list[CampaignSummary]) -> stats.LogFit:
    """Fit mean extinction time against log(neuron count) across sweep points."""
    points = []
    for s in summaries:
        if s.mean is None:
            raise stats.StatsError(
                f"sweep point {s.sweep_index} (n={s.neuron_count}) has no clean runs"
            )
        points.append((s.neuron_count, s.mean))
    return stats.fit_log_growth(points)
