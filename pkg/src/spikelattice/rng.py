"""Deterministic random streams for reproducible runs.

The engine uses xoshiro256++ (Blackman & Vigna), a 256-bit-state generator
with period 2^256 - 1, initialized from a 64-bit seed through SplitMix64.
The same algorithm is implemented both here (reference engine) and inside
the compiled kernel, so the two execution paths consume identical streams.

Campaign streams are derived, not split: replication r of sweep point s
under master seed m uses the 64-bit seed sha256("m:s:r") truncated to its
first 8 bytes. Derivations are therefore stable when sweep points or
replications are appended.
"""
from __future__ import annotations

import hashlib

_MASK64 = 0xFFFFFFFFFFFFFFFF
# (u52 + 0.5) / 2^52 yields a uniform double strictly inside (0, 1), so
# inverse-CDF exponential sampling never sees ln(0) and every waiting time
# is strictly positive.
_TO_DOUBLE = 2.0**-52


def splitmix64_init(seed: int) -> tuple[int, int, int, int]:
    """Expand a 64-bit seed into a nonzero xoshiro256 state."""
    x = seed & _MASK64
    out = []
    for _ in range(4):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    if not any(out):  # all-zero state is the one fixed point; never reachable in practice
        out[0] = 1
    return tuple(out)


class Xoshiro256(object):
    """xoshiro256++ with the uniform-double interface the engine consumes."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        self.s0, self.s1, self.s2, self.s3 = splitmix64_init(seed)

    def next_uint64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s0 + s3) & _MASK64
        result = ((x << 23 | x >> 41) & _MASK64) + s0 & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = (s3 << 45 | s3 >> 19) & _MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform double in the open interval (0, 1), from the top 52 bits."""
        return ((self.next_uint64() >> 12) + 0.5) * _TO_DOUBLE


def derive_run_seed(master_seed: int, sweep_index: int, replication: int) -> int:
    """64-bit per-run seed for one replication of one sweep point."""
    digest = hashlib.sha256(
        f"{master_seed}:{sweep_index}:{replication}".encode("ascii")
    ).digest()
    return int.from_bytes(digest[:8], "big")
