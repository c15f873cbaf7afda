"""Network graphs, activation functions and simulation parameters.

The model lives on a finite box cut out of a 1-, 2- or 3-dimensional
integer lattice. Each neuron carries a nonnegative integer membrane
potential; its spiking rate is a function of that potential, and a
spontaneous leak resets the potential to zero at a fixed rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

HARD_THRESHOLD = "hard_threshold"
LINEAR = "linear"
SIGMOID = "sigmoid"
ACTIVATION_KINDS = (HARD_THRESHOLD, LINEAR, SIGMOID)

# Membrane potentials are bounded in practice but not in principle; refuse to
# wrap instead of silently overflowing a 32-bit store.
MAX_POTENTIAL = 2**31 - 1

# Refuse boxes that would not fit in memory anyway.
MAX_NEURONS = 100_000_000


class ModelError(ValueError):
    """Invalid model construction (bad lattice, bad parameters)."""


@dataclass(frozen=True)
class ActivationFunction:
    """Maps a membrane potential to an instantaneous spiking rate.

    All kinds satisfy evaluate(0) == 0, so quiescent neurons never spike,
    and are positive and nondecreasing on the positive integers.
    """

    kind: str = HARD_THRESHOLD
    sigmoid_slope: float = 3.0
    sigmoid_shift: float = 6.0

    def __post_init__(self):
        if self.kind not in ACTIVATION_KINDS:
            raise ModelError(
                f"unknown activation kind {self.kind!r}; expected one of {ACTIVATION_KINDS}"
            )
        if self.kind == SIGMOID:
            if not (math.isfinite(self.sigmoid_slope) and self.sigmoid_slope > 0):
                raise ModelError("sigmoid_slope must be positive and finite")
            if not math.isfinite(self.sigmoid_shift):
                raise ModelError("sigmoid_shift must be finite")

    def evaluate(self, x: int) -> float:
        """Spiking rate at potential x (nonnegative integer)."""
        if x < 0:
            raise ModelError(f"potential must be nonnegative, got {x}")
        if x == 0:
            return 0.0
        if self.kind == HARD_THRESHOLD:
            return 1.0
        if self.kind == LINEAR:
            return float(x)
        return 1.0 / (1.0 + math.exp(-self.sigmoid_slope * x + self.sigmoid_shift))


def evaluate_activation(f: ActivationFunction, x: int) -> float:
    """Rate of the spiking point process for a neuron at potential x."""
    return f.evaluate(x)


@dataclass(frozen=True)
class NetworkGraph:
    """Finite lattice box with symmetric nearest-neighbour synapses.

    Neurons are indexed row-major over the box; ``neighbors[i]`` lists the
    indices at L1 distance exactly 1 inside the box. Because the synapse
    relation is distance-based it is symmetric: presynaptic and
    postsynaptic sets coincide.
    """

    dimension: int
    side_extents: tuple[int, ...]
    neuron_count: int
    neighbors: tuple[tuple[int, ...], ...]
    periodic: bool = False

    def coordinate_of(self, index: int) -> tuple[int, ...]:
        """Centered lattice coordinates (each axis runs -N..N) for debugging."""
        if not 0 <= index < self.neuron_count:
            raise ModelError(f"neuron index {index} out of range")
        coords = []
        for ext in reversed(self.side_extents):
            coords.append(index % ext - ext // 2)
            index //= ext
        return tuple(reversed(coords))

    def index_of(self, coords: tuple[int, ...]) -> int:
        """Inverse of coordinate_of."""
        if len(coords) != self.dimension:
            raise ModelError("coordinate dimensionality mismatch")
        index = 0
        for c, ext in zip(coords, self.side_extents):
            offset = c + ext // 2
            if not 0 <= offset < ext:
                raise ModelError(f"coordinate {coords} outside the box")
            index = index * ext + offset
        return index


def _box_neighbors(side_extents: tuple[int, ...], periodic: bool) -> tuple[tuple[int, ...], ...]:
    dimension = len(side_extents)
    strides = [1] * dimension
    for axis in range(dimension - 2, -1, -1):
        strides[axis] = strides[axis + 1] * side_extents[axis + 1]

    neighbors: list[tuple[int, ...]] = []
    for offsets in product(*(range(ext) for ext in side_extents)):
        index = sum(o * s for o, s in zip(offsets, strides))
        adjacent = []
        for axis in range(dimension):
            ext = side_extents[axis]
            for step in (-1, 1):
                o = offsets[axis] + step
                if periodic:
                    o %= ext
                elif not 0 <= o < ext:
                    continue
                adjacent.append(index + (o - offsets[axis]) * strides[axis])
        adjacent = sorted(set(adjacent))
        neighbors.append(tuple(adjacent))
    return tuple(neighbors)


def build_lattice(
    dimension: int,
    side_extents: list[int] | tuple[int, ...],
    periodic: bool = False,
) -> NetworkGraph:
    """Build the open-boundary box graph on the d-dimensional lattice.

    Extents must be odd so the box is {-N..N} along each axis. Interior
    neurons have 2*dimension neighbours, corner neurons have dimension.
    With ``periodic`` the box wraps around instead (extension, off by
    default; requires extents >= 3 so no site is its own neighbour).
    """
    if dimension not in (1, 2, 3):
        raise ModelError(f"dimension must be 1, 2 or 3, got {dimension}")
    extents = tuple(int(e) for e in side_extents)
    if len(extents) != dimension:
        raise ModelError(
            f"expected {dimension} extents for a {dimension}-d lattice, got {len(extents)}"
        )
    for ext in extents:
        if ext < 1:
            raise ModelError(f"extents must be >= 1, got {ext}")
        if ext % 2 == 0:
            raise ModelError(f"extents must be odd (box is -N..N), got {ext}")
    if periodic and any(ext < 3 for ext in extents):
        raise ModelError("periodic boundaries need every extent >= 3")
    count = math.prod(extents)
    if count > MAX_NEURONS:
        raise ModelError(f"lattice too large: {count} neurons (limit {MAX_NEURONS})")
    return NetworkGraph(
        dimension=dimension,
        side_extents=extents,
        neuron_count=count,
        neighbors=_box_neighbors(extents, periodic),
        periodic=periodic,
    )


def build_line(neuron_count: int) -> NetworkGraph:
    """1-d open path on any number of neurons (even sizes allowed).

    Size sweeps range over arbitrary neuron counts, which do not all fit
    the odd-sized {-N..N} box; dynamically the open path is the same
    graph family.
    """
    n = int(neuron_count)
    if n < 1:
        raise ModelError(f"neuron count must be >= 1, got {n}")
    if n > MAX_NEURONS:
        raise ModelError(f"lattice too large: {n} neurons (limit {MAX_NEURONS})")
    if n % 2 == 1:
        return build_lattice(1, (n,))
    neighbors = tuple(
        tuple(j for j in (i - 1, i + 1) if 0 <= j < n) for i in range(n)
    )
    return NetworkGraph(dimension=1, side_extents=(n,), neuron_count=n, neighbors=neighbors)


INIT_SPIKE_RATE_MODES = ("phi", "unit")


@dataclass(frozen=True)
class SimulationParams:
    """Everything a single trajectory needs besides its random seed.

    ``init_spike_rate`` selects the rate of the very first spike clock:
    "phi" draws it at rate activation(initial_potential) as in the event
    loop, "unit" at rate 1. The two agree for the hard threshold and the
    linear activation started at potential 1.
    """

    gamma: float
    activation: ActivationFunction
    graph: NetworkGraph
    initial_potential: int = 1
    max_events: int | None = 1_000_000_000
    max_time: float | None = None
    init_spike_rate: str = "phi"

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ModelError(f"gamma must be positive and finite, got {self.gamma}")
        if self.initial_potential < 1:
            raise ModelError(
                f"initial_potential must be >= 1 (all neurons start active), got {self.initial_potential}"
            )
        if self.max_events is not None and self.max_events < 1:
            raise ModelError("max_events must be a positive integer")
        if self.max_time is not None and not (
            math.isfinite(self.max_time) and self.max_time > 0
        ):
            raise ModelError("max_time must be positive and finite")
        if self.init_spike_rate not in INIT_SPIKE_RATE_MODES:
            raise ModelError(
                f"init_spike_rate must be one of {INIT_SPIKE_RATE_MODES}, got {self.init_spike_rate!r}"
            )
        for i, adjacent in enumerate(self.graph.neighbors):
            if i in adjacent:
                raise ModelError(f"graph has a self-loop at neuron {i}")
