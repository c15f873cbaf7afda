"""Full-scale statistical acceptance checks.

Each test runs a campaign at its full replication count (the bundled
configs under configs/ fix the settings and master seeds), checks the
statistical claim, and records one PASS/FAIL line in the terminal
summary. Runtime is dominated by the six metastable campaigns at 10,000
replications each (~2.5-3 hours in total); everything else finishes in
seconds. For the fast development loop, deselect this file.
"""
import dataclasses
import math
import os
import random
from functools import lru_cache

import pytest

from ctmc_oracle import line_neighbors, mean_extinction_time
from spikelattice.campaign import CampaignSpec, fit_scaling, run_campaign
from spikelattice.config import parse_config
from spikelattice.engine import audit, initialize, step
from spikelattice.model import (
    HARD_THRESHOLD,
    LINEAR,
    SIGMOID,
    ActivationFunction,
    SimulationParams,
    build_lattice,
    build_line,
)
from spikelattice.outputs import samples_csv_text, summary_json_text
from spikelattice.rng import Xoshiro256
from spikelattice.stats import histogram, ks_distance, renormalize

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

HARD = ActivationFunction(HARD_THRESHOLD)


def config_spec(name: str) -> CampaignSpec:
    with open(os.path.join(CONFIG_DIR, name + ".toml"), encoding="utf-8") as fh:
        return parse_config(fh.read())


@lru_cache(maxsize=None)
def campaign(name: str):
    return run_campaign(config_spec(name))


def check(report, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    report(line)
    print(line)
    assert ok, line


class TestOracleMeans:
    def test_single_neuron_mean(self, acceptance_report):
        # one active neuron, hard threshold: extinction at min(Exp(1), Exp(4))
        spec = CampaignSpec(
            SimulationParams(gamma=4.0, activation=HARD, graph=build_line(1)),
            replications=100_000,
            master_seed=2201,
        )
        (s,) = run_campaign(spec)
        ok = abs(s.mean - 0.2) <= 0.003 and s.n_capped == 0
        check(
            acceptance_report,
            "single-neuron mean (1e5 reps)",
            ok,
            f"mean={s.mean:.5f}, expected 0.2 +/- 0.003",
        )

    def test_two_neuron_mean_vs_matrix_oracle(self, acceptance_report):
        oracle = mean_extinction_time(line_neighbors(2), gamma=1.0)
        assert oracle == 1.25  # closed form 1/(2(1+gamma)) + 1/gamma
        spec = CampaignSpec(
            SimulationParams(gamma=1.0, activation=HARD, graph=build_line(2)),
            replications=100_000,
            master_seed=2202,
        )
        (s,) = run_campaign(spec)
        ok = abs(s.mean - oracle) <= 0.02 and s.n_capped == 0
        check(
            acceptance_report,
            "two-neuron mean vs absorbing-chain oracle (1e5 reps)",
            ok,
            f"mean={s.mean:.5f}, oracle={oracle} +/- 0.02",
        )


class TestMetastableExponentialLimit:
    @pytest.mark.parametrize(
        "name",
        [
            "sub_1d_hard",
            "sub_2d_hard",
            "sub_3d_hard",
            "sub_1d_linear",
            "sub_2d_linear",
            "sub_1d_sigmoid",
        ],
    )
    def test_renormalized_times_are_exponential(self, acceptance_report, name):
        (s,) = campaign(name)
        ok = (
            s.n_capped == 0
            and s.ks_distance < 0.05
            and 0.8 <= s.renormalized_variance <= 1.2
        )
        check(
            acceptance_report,
            f"metastable Exp(1) limit [{name}] (1e4 reps)",
            ok,
            f"ks={s.ks_distance:.4f} (< 0.05), rvar={s.renormalized_variance:.4f} "
            f"(in [0.8, 1.2]), capped={s.n_capped}",
        )


class TestConcentration:
    PICKS = (11, 101, 501, 2000)

    def picks_of(self, name):
        rvar = {s.neuron_count: s.renormalized_variance for s in campaign(name)}
        return [rvar[n] for n in self.PICKS]

    def test_renormalized_variance_decreases_hard(self, acceptance_report):
        v = self.picks_of("scaling_1d_hard")
        ok = all(a > b for a, b in zip(v, v[1:])) and v[-1] < 0.25 * v[0]
        check(
            acceptance_report,
            "concentration: renorm variance strictly decreasing + 4x drop (hard)",
            ok,
            "rvar(n=11,101,501,2000)=" + ", ".join(f"{x:.4f}" for x in v)
            + f"; ratio={v[-1] / v[0]:.3f} (< 0.25)",
        )

    @pytest.mark.parametrize("name", ["scaling_1d_linear", "scaling_1d_sigmoid"])
    def test_renormalized_variance_decreases(self, acceptance_report, name):
        v = self.picks_of(name)
        ok = all(a > b for a, b in zip(v, v[1:]))
        check(
            acceptance_report,
            f"concentration: renorm variance strictly decreasing [{name}]",
            ok,
            "rvar(n=11,101,501,2000)=" + ", ".join(f"{x:.4f}" for x in v),
        )


class TestLogarithmicGrowth:
    def test_mean_grows_like_log_n_hard(self, acceptance_report):
        fit = fit_scaling(campaign("scaling_1d_hard"))
        ok = 0.27 <= fit.C <= 0.37 and fit.r_squared > 0.95
        check(
            acceptance_report,
            "log growth of the mean (hard, 8 sizes x 1e3 reps)",
            ok,
            f"C={fit.C:.4f} (in [0.27, 0.37]), r2={fit.r_squared:.4f} (> 0.95)",
        )

    @pytest.mark.parametrize("name", ["scaling_1d_linear", "scaling_1d_sigmoid"])
    def test_mean_grows_like_log_n(self, acceptance_report, name):
        fit = fit_scaling(campaign(name))
        ok = fit.C > 0 and fit.r_squared > 0.95
        check(
            acceptance_report,
            f"log growth of the mean [{name}]",
            ok,
            f"C={fit.C:.4f} (> 0), r2={fit.r_squared:.4f} (> 0.95)",
        )


class TestNearCriticalNonExponential:
    def test_renormalized_times_reject_exponential(self, acceptance_report):
        (s,) = campaign("super_1d_hard")
        ok = s.ks_distance > 0.1 and s.n_capped == 0
        check(
            acceptance_report,
            "near-critical non-exponentiality (gamma=0.85, 1e4 reps)",
            ok,
            f"ks={s.ks_distance:.4f} (> 0.1)",
        )


class TestDeterminism:
    def test_rerun_is_byte_identical(self, acceptance_report):
        spec = dataclasses.replace(config_spec("super_1d_hard"), replications=300)
        a = run_campaign(spec)[0]
        b = run_campaign(spec)[0]
        ok = (
            samples_csv_text(a.records) == samples_csv_text(b.records)
            and summary_json_text(a, spec.bin_count) == summary_json_text(b, spec.bin_count)
        )
        check(
            acceptance_report,
            "determinism: same master seed, byte-identical CSV + summary",
            ok,
            f"{len(a.records)} records compared",
        )


class TestPropertySuite:
    def test_invariants(self, acceptance_report):
        failures = []

        # lattice invariants on the three campaign networks
        for dim, ext in ((1, (101,)), (2, (11, 11)), (3, (5, 5, 5))):
            g = build_lattice(dim, ext)
            for i, nbrs in enumerate(g.neighbors):
                if not (dim <= len(nbrs) <= 2 * dim):
                    failures.append(f"degree bound violated at {dim}D neuron {i}")
                if i in nbrs or list(nbrs) != sorted(set(nbrs)):
                    failures.append(f"bad neighbor list at {dim}D neuron {i}")
                if any(i not in g.neighbors[j] for j in nbrs):
                    failures.append(f"asymmetric edge at {dim}D neuron {i}")

        # activation: zero at zero, nondecreasing, positive above zero
        for activation in (HARD, ActivationFunction(LINEAR), ActivationFunction(SIGMOID)):
            values = [activation.evaluate(x) for x in range(0, 80)]
            if values[0] != 0.0:
                failures.append(f"phi(0) != 0 for {activation.kind}")
            if any(b < a for a, b in zip(values, values[1:])):
                failures.append(f"{activation.kind} not nondecreasing")
            if any(v <= 0 for v in values[1:]):
                failures.append(f"{activation.kind} not positive for x > 0")

        # clock-consistency audit across 100 randomly-seeded short runs
        rnd = random.Random(424242)
        graphs = [build_line(7), build_lattice(2, (5, 5)), build_lattice(3, (3, 3, 3))]
        for case in range(100):
            p = SimulationParams(
                gamma=rnd.uniform(0.3, 4.0),
                activation=rnd.choice(
                    [HARD, ActivationFunction(LINEAR), ActivationFunction(SIGMOID)]
                ),
                graph=rnd.choice(graphs),
            )
            state = initialize(p, rnd.getrandbits(63))
            try:
                audit(state, p)
                for _ in range(40):
                    if state.active_count == 0:
                        break
                    step(state, p)
                    audit(state, p)
            except Exception as exc:  # noqa: BLE001 - report, don't abort
                failures.append(f"audit case {case}: {exc}")

        # histogram area and KS scale invariance on random samples
        u = Xoshiro256(2024)
        xs = [-math.log(u.random()) * 3.7 for _ in range(5000)]
        h = histogram(xs, 37)
        area = math.fsum(
            (hi - lo) * d for lo, hi, d in zip(h.edges, h.edges[1:], h.densities)
        )
        if abs(area - 1.0) > 1e-9:
            failures.append(f"histogram area {area}")
        base = ks_distance(renormalize(xs))
        for scale in (0.125, 8.0, 0.37, 512.0):
            scaled = ks_distance(renormalize([scale * x for x in xs]))
            if abs(scaled - base) > 1e-12:
                failures.append(f"ks not scale-invariant at {scale}")

        check(
            acceptance_report,
            "property suite (lattice/activation/audit/histogram/ks)",
            not failures,
            "; ".join(failures) if failures else "all invariants hold",
        )
