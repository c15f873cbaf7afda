"""Campaign orchestration: seed derivation, censoring, summary determinism."""
import math

import pytest

from spikelattice.campaign import CampaignSpec, fit_scaling, run_campaign
from spikelattice.engine import EXTINCTION, MAX_EVENTS
from spikelattice.model import (
    HARD_THRESHOLD,
    ActivationFunction,
    ModelError,
    SimulationParams,
    build_lattice,
    build_line,
)
from spikelattice.outputs import samples_csv_text, summary_json_text
from spikelattice.rng import derive_run_seed
from spikelattice.stats import StatsError

HARD = ActivationFunction(HARD_THRESHOLD)


def base(n=5, gamma=3.0, **kw):
    return SimulationParams(gamma=gamma, activation=HARD, graph=build_line(n), **kw)


class TestSpecValidation:
    def test_both_sweeps_rejected(self):
        with pytest.raises(ModelError, match="not both"):
            CampaignSpec(base(), 3, 1, size_sweep=(5, 7), gamma_sweep=(1.0,))

    def test_empty_sweeps_rejected(self):
        with pytest.raises(ModelError):
            CampaignSpec(base(), 3, 1, size_sweep=())
        with pytest.raises(ModelError):
            CampaignSpec(base(), 3, 1, gamma_sweep=())

    def test_size_sweep_requires_1d(self):
        p = SimulationParams(gamma=1.0, activation=HARD, graph=build_lattice(2, (3, 3)))
        with pytest.raises(ModelError, match="1D"):
            CampaignSpec(p, 3, 1, size_sweep=(5, 7))

    def test_replications_and_bins_validated(self):
        with pytest.raises(ModelError):
            CampaignSpec(base(), 0, 1)
        with pytest.raises(ModelError):
            CampaignSpec(base(), 1, 1, bin_count=0)

    def test_point_params(self):
        spec = CampaignSpec(base(), 2, 1, size_sweep=(3, 9))
        assert [p.graph.neuron_count for p in spec.point_params()] == [3, 9]
        spec = CampaignSpec(base(), 2, 1, gamma_sweep=(0.5, 2.0))
        assert [p.gamma for p in spec.point_params()] == [0.5, 2.0]
        assert all(p.graph is spec.base_params.graph for p in spec.point_params())
        spec = CampaignSpec(base(), 2, 1)
        assert spec.point_params() == [spec.base_params]


class TestRunCampaign:
    def test_requires_master_seed(self):
        with pytest.raises(ModelError, match="seed"):
            run_campaign(CampaignSpec(base(), 2))

    def test_single_point_seeds_and_stats(self):
        spec = CampaignSpec(base(), replications=40, master_seed=15)
        (s,) = run_campaign(spec)
        assert s.sweep_index == 0
        assert s.neuron_count == 5 and s.gamma == 3.0
        assert [r.seed for r in s.records] == [derive_run_seed(15, 0, r) for r in range(40)]
        assert all(r.terminated_by == EXTINCTION for r in s.records)
        assert s.samples == tuple(r.extinction_time for r in s.records)
        assert s.n_capped == 0 and s.clean
        assert s.mean == pytest.approx(math.fsum(s.samples) / 40)
        assert s.histogram is not None and s.ks_distance is not None

    def test_adding_replications_preserves_prefix(self):
        short = run_campaign(CampaignSpec(base(), 10, master_seed=8))[0]
        long = run_campaign(CampaignSpec(base(), 25, master_seed=8))[0]
        assert long.records[:10] == short.records

    def test_gamma_sweep_points_use_distinct_seed_streams(self):
        spec = CampaignSpec(base(), 12, master_seed=5, gamma_sweep=(2.0, 2.0))
        a, b = run_campaign(spec)
        assert a.gamma == b.gamma == 2.0
        assert a.sweep_index == 0 and b.sweep_index == 1
        # same parameters, different sweep index -> different runs
        assert a.records != b.records
        assert [r.seed for r in b.records] == [derive_run_seed(5, 1, r) for r in range(12)]

    def test_byte_identical_reruns(self):
        spec = CampaignSpec(base(n=9, gamma=2.0), 30, master_seed=77, bin_count=12)
        a = run_campaign(spec)[0]
        b = run_campaign(spec)[0]
        assert samples_csv_text(a.records) == samples_csv_text(b.records)
        assert summary_json_text(a, 12) == summary_json_text(b, 12)

    def test_capped_runs_are_censored(self):
        spec = CampaignSpec(base(n=9, gamma=0.4, max_events=30), 25, master_seed=4)
        (s,) = run_campaign(spec)
        capped = [r for r in s.records if r.terminated_by == MAX_EVENTS]
        assert capped  # gamma this small on 9 neurons outlives 30 events
        assert s.n_capped == len(capped)
        assert not s.clean
        assert len(s.samples) == 25 - len(capped)
        assert all(r.extinction_time in s.samples for r in s.records if r.terminated_by == EXTINCTION)

    def test_all_capped_leaves_stats_undefined(self):
        spec = CampaignSpec(base(n=21, gamma=0.05, max_events=25), 6, master_seed=9)
        (s,) = run_campaign(spec)
        assert s.n_capped == 6 and s.samples == ()
        assert s.mean is None and s.variance is None
        assert s.renormalized_variance is None and s.ks_distance is None
        assert s.histogram is None


class TestFitScaling:
    def test_fit_over_size_sweep(self):
        spec = CampaignSpec(base(), 150, master_seed=21, size_sweep=(5, 11, 21, 51))
        summaries = run_campaign(spec)
        assert [s.neuron_count for s in summaries] == [5, 11, 21, 51]
        fit = fit_scaling(summaries)
        assert fit.C > 0 and math.isfinite(fit.intercept)
        assert 0.0 <= fit.r_squared <= 1.0

    def test_refuses_points_without_clean_runs(self):
        spec = CampaignSpec(base(gamma=0.05, max_events=20), 3, master_seed=2,
                            size_sweep=(11, 21, 51))
        summaries = run_campaign(spec)
        with pytest.raises(StatsError, match="no clean runs"):
            fit_scaling(summaries)
