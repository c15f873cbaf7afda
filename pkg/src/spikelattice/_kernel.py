"""Compiled fast path for whole-trajectory runs.

Behaviour mirrors the reference engine exactly: same xoshiro256++ stream
(see rng.py), same draw order, same event order including tie-breaking.
The event queue here is an index min-tree (a complete binary tournament
over per-neuron next-event times) instead of the reference path's lazy
heap: a clock change rewrites one leaf and percolates O(log n) nodes, and
the root always holds the globally next event, so there are no stale
entries to skip. Each leaf collapses a neuron's two clocks, leak winning
ties; across neurons the tree compares (time, kind, neuron), leak before
spike, which is precisely the reference heap's ordering. A trajectory is
therefore bit-identical to one from the pure-Python path for the same
seed; the test suite asserts this. Only whole runs without tracing come
through here — stepping, tracing and state inspection stay on the
reference path.

Requires numba; callers must check AVAILABLE before using run_raw.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .model import (
    HARD_THRESHOLD,
    LINEAR,
    MAX_POTENTIAL,
    SIGMOID,
    ActivationFunction,
    NetworkGraph,
    SimulationParams,
)

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - numba is an install-time expectation
    AVAILABLE = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        return wrap


# Statuses returned by _run; keep in sync with engine terminated_by strings.
STATUS_EXTINCTION = 0
STATUS_MAX_EVENTS = 1
STATUS_MAX_TIME = 2
STATUS_OVERFLOW = 3

_TO_DOUBLE = 2.0**-52
_KIND_IDS = {HARD_THRESHOLD: 0, LINEAR: 1, SIGMOID: 2}


@njit(inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (np.uint64(64) - k))


@njit(inline="always")
def _seed_state(seed, s):
    # SplitMix64 expansion; must match rng.splitmix64_init bit for bit.
    x = seed
    for i in range(4):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        z = x
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        s[i] = z ^ (z >> np.uint64(31))
    if s[0] == np.uint64(0) and s[1] == np.uint64(0) and s[2] == np.uint64(0) and s[3] == np.uint64(0):
        s[0] = np.uint64(1)


@njit(inline="always")
def _next_double(s):
    # xoshiro256++, top 52 bits -> strictly inside (0, 1)
    s0 = s[0]
    s3 = s[3]
    x = s0 + s3
    result = _rotl(x, np.uint64(23)) + s0
    t = s[1] << np.uint64(17)
    s[2] ^= s0
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], np.uint64(45))
    return ((result >> np.uint64(12)) + 0.5) * _TO_DOUBLE


@njit(inline="always")
def _phi(x, table, kind_id, slope, shift):
    if x < table.shape[0]:
        return table[x]
    if kind_id == 0:
        return 1.0
    if kind_id == 1:
        return float(x)
    return 1.0 / (1.0 + math.exp(-slope * float(x) + shift))


@njit(inline="always")
def _leaf_update(tree_t, tree_k, half, n, i, lt, st):
    # Leaf i holds the earlier of the neuron's two clocks; leak wins ties.
    # Keys order as (kind, neuron): leak of i -> i, spike of i -> n + i.
    # Keys are unique per leaf, so an unchanged (time, key) pair means every
    # ancestor is already consistent and percolation can stop early.
    lk = lt <= st
    t = lt if lk else st
    k = i if lk else n + i
    v = half + i
    if tree_t[v] == t and tree_k[v] == k:
        return
    tree_t[v] = t
    tree_k[v] = k
    v >>= 1
    while v >= 1:
        a = v + v
        b = a + 1
        ta = tree_t[a]
        tb = tree_t[b]
        ka = tree_k[a]
        kb = tree_k[b]
        # non-short-circuit boolean: compiles to a select, and the winner
        # side is data-random so a branch here would mispredict every level
        right = (tb < ta) | ((tb == ta) & (kb < ka))
        wt = tb if right else ta
        wk = kb if right else ka
        if tree_t[v] == wt and tree_k[v] == wk:
            return
        tree_t[v] = wt
        tree_k[v] = wk
        v >>= 1


@njit(cache=True)
def _run(
    nbr_ptr,
    nbr_flat,
    gamma,
    table,
    kind_id,
    slope,
    shift,
    init_potential,
    init_spike_rate,
    seed,
    max_events,
    time_cap,
    max_potential,
):
    n = nbr_ptr.shape[0] - 1
    s = np.empty(4, np.uint64)
    _seed_state(seed, s)

    pot = np.zeros(n, np.int64)
    sclock = np.empty(n, np.float64)
    lclock = np.empty(n, np.float64)

    half = 1
    while half < n:
        half *= 2
    tree_t = np.full(2 * half, np.inf, np.float64)
    tree_k = np.full(2 * half, 2 * n, np.int64)

    active = 0
    # Initialization draw order: per neuron, leak clock then spike clock.
    for i in range(n):
        lclock[i] = 0.0 - math.log(_next_double(s)) / gamma
        if init_potential > 0:
            pot[i] = init_potential
            sclock[i] = 0.0 - math.log(_next_double(s)) / init_spike_rate
            active += 1
        else:
            sclock[i] = np.inf
    for i in range(n):
        _leaf_update(tree_t, tree_k, half, n, i, lclock[i], sclock[i])

    n_spike = 0
    n_leak = 0
    now = 0.0
    while active > 0:
        if n_spike + n_leak >= max_events:
            return STATUS_MAX_EVENTS, now, n_spike, n_leak
        t0 = tree_t[1]
        k0 = tree_k[1]
        now = t0
        if k0 >= n:
            i0 = k0 - n
            n_spike += 1
            pot[i0] = 0
            active -= 1
            sclock[i0] = np.inf
            _leaf_update(tree_t, tree_k, half, n, i0, lclock[i0], np.inf)
            for e in range(nbr_ptr[i0], nbr_ptr[i0 + 1]):
                j = nbr_flat[e]
                xj = pot[j] + 1
                pot[j] = xj
                if xj == 1:
                    active += 1
                elif xj > max_potential:
                    return STATUS_OVERFLOW, now, n_spike, n_leak
                rate = _phi(xj, table, kind_id, slope, shift)
                nt = now - math.log(_next_double(s)) / rate
                sclock[j] = nt
                _leaf_update(tree_t, tree_k, half, n, j, lclock[j], nt)
        else:
            i0 = k0
            n_leak += 1
            if pot[i0] > 0:
                pot[i0] = 0
                active -= 1
                sclock[i0] = np.inf
            nt = now - math.log(_next_double(s)) / gamma
            lclock[i0] = nt
            _leaf_update(tree_t, tree_k, half, n, i0, nt, sclock[i0])
        if time_cap < np.inf and now >= time_cap and active > 0:
            return STATUS_MAX_TIME, now, n_spike, n_leak
    return STATUS_EXTINCTION, now, n_spike, n_leak


@njit(cache=True)
def _uniforms(seed, out):
    # Test hook: the raw uniform stream, for parity checks against rng.py.
    s = np.empty(4, np.uint64)
    _seed_state(seed, s)
    for i in range(out.shape[0]):
        out[i] = _next_double(s)


def uniforms(seed: int, count: int) -> np.ndarray:
    out = np.empty(count, np.float64)
    _uniforms(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), out)
    return out


@lru_cache(maxsize=16)
def _csr_of(graph: NetworkGraph) -> tuple[np.ndarray, np.ndarray]:
    n = graph.neuron_count
    ptr = np.zeros(n + 1, np.int64)
    for i in range(n):
        ptr[i + 1] = ptr[i] + len(graph.neighbors[i])
    flat = np.empty(ptr[n], np.int64)
    k = 0
    for i in range(n):
        for j in graph.neighbors[i]:
            flat[k] = j
            k += 1
    return ptr, flat


# Table size covers every potential reachable in practice; beyond it the
# kernel falls back to the closed form, which agrees exactly with
# ActivationFunction.evaluate there (constants for hard, float(x) for
# linear, and a sigmoid already saturated to 1.0 in float64).
_TABLE_SIZE = 2048


@lru_cache(maxsize=16)
def _table_of(activation: ActivationFunction) -> np.ndarray:
    size = _TABLE_SIZE
    if activation.kind == SIGMOID:
        # extend to the saturation point so the fallback is exact even for
        # shallow slopes: exp underflows once slope*x - shift > 746
        sat = int((746.0 + activation.sigmoid_shift) / activation.sigmoid_slope) + 2
        size = max(size, min(sat, 1 << 22))
    return np.array([activation.evaluate(x) for x in range(size)], np.float64)


def run_raw(params: SimulationParams, seed: int) -> tuple[int, float, int, int]:
    """One full trajectory; returns (status, time, spike_events, leak_events)."""
    ptr, flat = _csr_of(params.graph)
    table = _table_of(params.activation)
    kind_id = _KIND_IDS[params.activation.kind]
    init = params.initial_potential
    if init > 0:
        if params.init_spike_rate == "unit":
            init_rate = 1.0
        else:
            init_rate = float(table[init]) if init < table.shape[0] else params.activation.evaluate(init)
    else:
        init_rate = 0.0
    max_events = params.max_events if params.max_events is not None else 1 << 62
    time_cap = params.max_time if params.max_time is not None else math.inf
    return _run(
        ptr,
        flat,
        float(params.gamma),
        table,
        kind_id,
        float(params.activation.sigmoid_slope),
        float(params.activation.sigmoid_shift),
        init,
        init_rate,
        np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
        max_events,
        time_cap,
        MAX_POTENTIAL,
    )
