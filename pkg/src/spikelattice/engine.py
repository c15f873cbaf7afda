"""Event-driven engine: one trajectory from all-active start to extinction.

Each neuron owns two exponential clocks, the next-spike time (infinite
while quiescent) and the next-leak time. Events are drained in time order
from an indexed binary heap with lazy invalidation: every clock change
bumps a per-neuron version counter and pushes a fresh entry, and popped
entries whose version is stale are discarded. This keeps event selection
at O(log n) instead of the O(n) scan of the obvious implementation.

Randomness contract: event selection consumes no randomness; every clock
reset consumes exactly one uniform draw u from the open interval (0, 1),
mapped to t + (-ln u)/rate. Draw order is fixed: at initialization, per neuron in
index order, leak clock then spike clock; at a leak, one draw for the new
leak clock; at a spike, one draw per postsynaptic neighbour in neighbour
index order. Uniforms come from xoshiro256++ (rng.py), one generator per
run seeded from the 64-bit run seed. Same seed, same build: bit-identical
trajectories.

Two execution paths share this contract: the pure-Python reference below
(stepping, tracing, state inspection) and a compiled whole-run kernel
(_kernel.py) used by run_to_extinction when tracing is off. They produce
bit-identical records; the test suite enforces it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import NamedTuple

from .model import MAX_POTENTIAL, SimulationParams
from .rng import Xoshiro256
from . import _kernel

LEAK = "leak"
SPIKE = "spike"
# Heap entries are (time, kind, neuron, version); leak sorts before spike
# and lower index first, making float ties deterministic.
_LEAK = 0
_SPIKE = 1

EXTINCTION = "extinction"
MAX_EVENTS = "max_events"
MAX_TIME = "max_time"
_KERNEL_STATUS = {
    _kernel.STATUS_EXTINCTION: EXTINCTION,
    _kernel.STATUS_MAX_EVENTS: MAX_EVENTS,
    _kernel.STATUS_MAX_TIME: MAX_TIME,
}

_INF = math.inf


class EngineError(RuntimeError):
    """The engine was driven outside its contract."""


class PotentialOverflowError(EngineError):
    """A membrane potential exceeded the 32-bit store."""


def sample_event_time(rate: float, now: float, rng: Xoshiro256) -> float:
    """Absolute time of the next event of an exponential clock of the given rate.

    Zero rate yields infinity (the clock never rings). One uniform draw is
    consumed per finite sample; u stays strictly inside (0, 1), so the
    increment -ln(u)/rate is always finite and positive.
    """
    if not (rate >= 0.0):
        raise EngineError(f"rate must be nonnegative, got {rate}")
    if not math.isfinite(now):
        raise EngineError(f"current time must be finite, got {now}")
    if rate == 0.0:
        return _INF
    return now - math.log(rng.random()) / rate


class Event(NamedTuple):
    time: float
    neuron: int
    kind: str  # "leak" or "spike"


@dataclass(frozen=True)
class ExtinctionRecord:
    """Outcome of one run."""

    extinction_time: float
    spike_events: int
    leak_events: int
    seed: int
    terminated_by: str  # "extinction", "max_events" or "max_time"


class SimulationState:
    """Mutable per-run state; strictly single-threaded."""

    __slots__ = (
        "time",
        "potentials",
        "spike_clock",
        "leak_clock",
        "active_count",
        "rng",
        "_heap",
        "_spike_ver",
        "_leak_ver",
        "_rates",
    )

    def __init__(self, time, potentials, spike_clock, leak_clock, active_count, rng, rates):
        self.time = time
        self.potentials = potentials
        self.spike_clock = spike_clock
        self.leak_clock = leak_clock
        self.active_count = active_count
        self.rng = rng
        self._spike_ver = [0] * len(potentials)
        self._leak_ver = [0] * len(potentials)
        self._rates = rates
        self._rebuild_heap()

    def _rebuild_heap(self):
        heap = []
        for i, t in enumerate(self.leak_clock):
            if t != _INF:
                heap.append((t, _LEAK, i, self._leak_ver[i]))
        for i, t in enumerate(self.spike_clock):
            if t != _INF:
                heap.append((t, _SPIKE, i, self._spike_ver[i]))
        heapify(heap)
        self._heap = heap

    def force(self, potentials=None, spike_clock=None, leak_clock=None):
        """Overwrite parts of the state and rebuild the event queue.

        Debug/test hook for constructing exact scenarios; not used by the
        normal run path.
        """
        if potentials is not None:
            self.potentials = list(potentials)
        if spike_clock is not None:
            self.spike_clock = list(spike_clock)
        if leak_clock is not None:
            self.leak_clock = list(leak_clock)
        n = len(self.potentials)
        if not (len(self.spike_clock) == len(self.leak_clock) == n):
            raise EngineError("state arrays must have equal lengths")
        for i in range(n):
            if (self.spike_clock[i] == _INF) != (self.potentials[i] == 0):
                raise EngineError(f"spike clock of neuron {i} inconsistent with its potential")
        self.active_count = sum(1 for x in self.potentials if x > 0)
        self._spike_ver = [v + 1 for v in self._spike_ver]
        self._leak_ver = [v + 1 for v in self._leak_ver]
        self._rebuild_heap()


def _rate_table(params: SimulationParams) -> list[float]:
    evaluate = params.activation.evaluate
    return [evaluate(x) for x in range(params.initial_potential + 1)]


def initialize(params: SimulationParams, seed: int) -> SimulationState:
    """All-active initial state at time zero.

    Every potential starts at ``initial_potential``; each neuron gets an
    independent leak clock at rate gamma and spike clock at the initial
    spike rate (see SimulationParams.init_spike_rate).
    """
    n = params.graph.neuron_count
    rng = Xoshiro256(seed)
    rates = _rate_table(params)
    if params.initial_potential == 0:
        spike_rate = 0.0  # nobody is active; spike clocks stay infinite
    elif params.init_spike_rate == "phi":
        spike_rate = rates[params.initial_potential]
    else:
        spike_rate = 1.0
    potentials = [params.initial_potential] * n
    leak_clock = [0.0] * n
    spike_clock = [0.0] * n
    for i in range(n):
        leak_clock[i] = sample_event_time(params.gamma, 0.0, rng)
        spike_clock[i] = sample_event_time(spike_rate, 0.0, rng)
    return SimulationState(
        time=0.0,
        potentials=potentials,
        spike_clock=spike_clock,
        leak_clock=leak_clock,
        active_count=n if params.initial_potential > 0 else 0,
        rng=rng,
        rates=rates,
    )


def _drive(state, params, event_budget, time_cap, trace):
    """Apply events until extinction, budget exhaustion or the time cap.

    Returns (spike_events, leak_events, status). The hot path: locals are
    bound once and the heap is drained in place.
    """
    heap = state._heap
    pop = heappop
    push = heappush
    potentials = state.potentials
    spike_clock = state.spike_clock
    leak_clock = state.leak_clock
    spike_ver = state._spike_ver
    leak_ver = state._leak_ver
    rnd = state.rng.random
    log = math.log
    gamma = params.gamma
    neighbors = params.graph.neighbors
    rates = state._rates
    evaluate = params.activation.evaluate
    active = state.active_count
    now = state.time
    remaining = event_budget if event_budget is not None else _INF

    n_spike = 0
    n_leak = 0
    status = None
    while active > 0:
        if remaining <= 0:
            status = MAX_EVENTS
            break
        remaining -= 1
        while True:
            t, kind, i, ver = pop(heap)
            if ver == (spike_ver[i] if kind else leak_ver[i]):
                break
        now = t
        if kind:
            n_spike += 1
            potentials[i] = 0
            active -= 1
            spike_clock[i] = _INF
            spike_ver[i] += 1
            for j in neighbors[i]:
                xj = potentials[j] + 1
                potentials[j] = xj
                if xj == 1:
                    active += 1
                elif xj > MAX_POTENTIAL:
                    raise PotentialOverflowError(
                        f"potential of neuron {j} exceeded {MAX_POTENTIAL}"
                    )
                while xj >= len(rates):
                    rates.append(evaluate(len(rates)))
                nt = t - log(rnd()) / rates[xj]
                spike_clock[j] = nt
                v = spike_ver[j] + 1
                spike_ver[j] = v
                push(heap, (nt, _SPIKE, j, v))
            if trace is not None:
                trace.append((t, i, SPIKE))
        else:
            n_leak += 1
            if potentials[i]:
                potentials[i] = 0
                active -= 1
                spike_clock[i] = _INF
                spike_ver[i] += 1
            nt = t - log(rnd()) / gamma
            leak_clock[i] = nt
            v = leak_ver[i] + 1
            leak_ver[i] = v
            push(heap, (nt, _LEAK, i, v))
            if trace is not None:
                trace.append((t, i, LEAK))
        if time_cap is not None and now >= time_cap and active > 0:
            status = MAX_TIME
            break
    state.active_count = active
    state.time = now
    if status is None:
        status = EXTINCTION
    return n_spike, n_leak, status


def step(state: SimulationState, params: SimulationParams) -> Event:
    """Apply the single globally-earliest event and return its descriptor.

    A leak resets the neuron and redraws its leak clock; a spike resets the
    neuron, leaves its leak clock untouched, and increments every
    postsynaptic neighbour, redrawing each neighbour's spike clock at the
    new rate.
    """
    if state.active_count == 0:
        raise EngineError("cannot step an extinct state")
    applied: list[tuple[float, int, str]] = []
    _drive(state, params, 1, None, applied)
    t, neuron, kind = applied[0]
    return Event(time=t, neuron=neuron, kind=kind)


def run_to_extinction(
    params: SimulationParams,
    seed: int,
    trace: list | None = None,
    compiled: bool | None = None,
) -> ExtinctionRecord:
    """Run until every neuron is quiescent, or a cap converts the run.

    ``trace``, when given, receives one (time, neuron, kind) tuple per
    applied event. A cap termination is not a failure: it flags a run that
    would outlive the configured budget (typical of long sub-critical
    survival on large graphs).

    ``compiled`` selects the execution path: the default (None) uses the
    compiled kernel when available and no trace is requested, else the
    reference path. Both paths yield bit-identical records.
    """
    if compiled is None:
        compiled = trace is None and _kernel.AVAILABLE
    if compiled:
        if trace is not None:
            raise EngineError("tracing requires the reference path (compiled=False)")
        if not _kernel.AVAILABLE:
            raise EngineError("compiled path requested but numba is not installed")
        status_code, time, n_spike, n_leak = _kernel.run_raw(params, seed)
        if status_code == _kernel.STATUS_OVERFLOW:
            raise PotentialOverflowError(f"a potential exceeded {MAX_POTENTIAL}")
        status = _KERNEL_STATUS[status_code]
        return ExtinctionRecord(
            extinction_time=time,
            spike_events=n_spike,
            leak_events=n_leak,
            seed=int(seed),
            terminated_by=status,
        )
    state = initialize(params, seed)
    n_spike, n_leak, status = _drive(
        state, params, params.max_events, params.max_time, trace
    )
    return ExtinctionRecord(
        extinction_time=state.time,
        spike_events=n_spike,
        leak_events=n_leak,
        seed=int(seed),
        terminated_by=status,
    )


def audit(state: SimulationState, params: SimulationParams) -> None:
    """Full-scan consistency check; raises EngineError on any violation.

    Meant for debug runs and tests: verifies the clock/potential coupling,
    the active count, clock ordering against current time, and that every
    finite clock has a live entry in the queue.
    """
    n = params.graph.neuron_count
    live = {}
    for t, kind, i, ver in state._heap:
        cur = state._spike_ver[i] if kind else state._leak_ver[i]
        if ver == cur:
            live[(kind, i)] = t
    active = 0
    for i in range(n):
        x = state.potentials[i]
        if x < 0:
            raise EngineError(f"negative potential at neuron {i}")
        if x > 0:
            active += 1
        spike_t = state.spike_clock[i]
        if (spike_t == _INF) != (x == 0):
            raise EngineError(f"spike clock of neuron {i} inconsistent with potential {x}")
        leak_t = state.leak_clock[i]
        if leak_t == _INF:
            raise EngineError(f"leak clock of neuron {i} must stay finite")
        if leak_t < state.time or (spike_t != _INF and spike_t < state.time):
            raise EngineError(f"clock of neuron {i} lies in the past")
        if live.get((_LEAK, i)) != leak_t:
            raise EngineError(f"leak clock of neuron {i} missing from the event queue")
        if spike_t != _INF and live.get((_SPIKE, i)) != spike_t:
            raise EngineError(f"spike clock of neuron {i} missing from the event queue")
    if active != state.active_count:
        raise EngineError(
            f"active_count {state.active_count} disagrees with scan {active}"
        )
