"""Fibonacci LFSRs and deterministic per-node seed tables.

Every source of randomness in the stochastic engine is a small linear
feedback shift register.  A register emits its current state, then shifts;
with maximal taps the state walks the full cycle of 2^width - 1 nonzero
values, so a seed pins the entire output sequence forever.

The register state doubles as the comparator variate of the
binary-to-stochastic converters: `value_bipolar` maps states onto an even
grid inside (-1, 1) and `value_unit` onto (0, 1).  Both maps exclude their
endpoints so that encoding q = -1 (p = 0) yields an all-zeros stream and
q = +1 (p = 1) an all-ones stream, exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_MASK64 = (1 << 64) - 1

DEFAULT_WIDTH = 16
# Maximal-length tap set for width 16 (period 65535), positions counted
# from 1 at the output end of the register.
DEFAULT_TAPS = (16, 15, 13, 4)


def splitmix64(x: int) -> int:
    """One splitmix64 output for integer input x (used for seed derivation)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_ints(*parts: int) -> int:
    """Hash-combine integers into one 64-bit value, order sensitive."""
    h = 0x243F6A8885A308D3
    for p in parts:
        h = splitmix64(h ^ (p & _MASK64))
    return h


class Lfsr:
    """Fibonacci LFSR: emit the current state, then shift one step.

    The feedback bit is the XOR of the tap positions and enters at the MSB
    while the register shifts toward the LSB.  The all-zero state is the
    absorbing state and is rejected at construction.
    """

    __slots__ = ("width", "taps", "state", "_shifts")

    def __init__(self, seed: int, width: int = DEFAULT_WIDTH, taps: tuple[int, ...] = DEFAULT_TAPS):
        if width < 2:
            raise ValueError(f"width must be >= 2, got {width}")
        if not taps or any(t < 1 or t > width for t in taps):
            raise ValueError(f"taps must lie in 1..{width}, got {taps}")
        if not (0 < seed < (1 << width)):
            raise ValueError(f"seed must be a nonzero {width}-bit value, got {seed}")
        self.width = width
        self.taps = tuple(sorted(set(taps), reverse=True))
        self.state = seed
        self._shifts = tuple(width - t for t in self.taps)

    def step(self) -> int:
        """Advance the register one tick and return the new state."""
        s = self.state
        b = 0
        for sh in self._shifts:
            b ^= s >> sh
        self.state = (s >> 1) | ((b & 1) << (self.width - 1))
        return self.state

    def next_value(self) -> int:
        """Emit the current state, then advance."""
        v = self.state
        self.step()
        return v

    def next_real(self) -> float:
        """Emit a comparator value on the bipolar grid inside (-1, 1)."""
        return self.next_value() / (1 << (self.width - 1)) - 1.0

    def next_unit(self) -> float:
        """Emit a comparator value on the unipolar grid inside (0, 1)."""
        return self.next_value() / (1 << self.width)

    def values(self, count: int) -> np.ndarray:
        """Emit `count` successive register states as an int array."""
        if count < 0:
            raise ValueError("count must be >= 0")
        tables = cycle_tables(self.width, self.taps)
        if tables is not None:
            pos = tables.position[self.state]
            if pos >= 0:
                idx = (pos + np.arange(count)) % tables.period
                out = tables.states[idx].astype(np.int64)
                self.state = int(tables.states[(pos + count) % tables.period])
                return out
        out = np.empty(count, dtype=np.int64)
        for i in range(count):
            out[i] = self.next_value()
        return out

    def reals(self, count: int) -> np.ndarray:
        """Emit `count` bipolar comparator values in (-1, 1)."""
        return self.values(count) / (1 << (self.width - 1)) - 1.0

    def units(self, count: int) -> np.ndarray:
        """Emit `count` unipolar comparator values in (0, 1)."""
        return self.values(count) / (1 << self.width)


@dataclass(frozen=True)
class CycleTables:
    """Precomputed full cycle of an LFSR (states in emission order)."""

    states: np.ndarray    # uint32, shape (period,)
    position: np.ndarray  # int32, shape (2^width,), -1 for states off the cycle
    period: int

    def bipolar(self) -> np.ndarray:
        width = int(self.position.shape[0]).bit_length() - 1
        return self.states / (1 << (width - 1)) - 1.0

    def unit(self) -> np.ndarray:
        width = int(self.position.shape[0]).bit_length() - 1
        return self.states / (1 << width)


@lru_cache(maxsize=8)
def cycle_tables(width: int, taps: tuple[int, ...]) -> CycleTables | None:
    """Walk the cycle containing state 1; None for registers too wide to table.

    Non-maximal tap sets leave some states off the tabled cycle; generation
    for such seeds falls back to stepping.
    """
    if width > 20:
        return None
    gen = Lfsr(1, width=width, taps=taps)
    limit = (1 << width) - 1
    states = []
    while True:
        states.append(gen.state)
        gen.step()
        if gen.state == 1 or len(states) > limit:
            break
    arr = np.asarray(states, dtype=np.uint32)
    position = np.full(1 << width, -1, dtype=np.int64)
    position[arr] = np.arange(len(arr))
    return CycleTables(states=arr, position=position, period=len(arr))


# Stream roles of one reservoir node.  Every role owns its own register so
# the gate algebra sees independent operands.
ROLE_INPUT = "input"
ROLE_WEIGHT = "weight"
ROLE_BIAS = "bias"
ROLE_HALF_SEL = "half_sel"
ROLE_ALPHA_SEL = "alpha_sel"
ROLE_FEEDBACK = "feedback"


def coeff_role(k: int) -> str:
    return f"coeff_{k}"


def node_roles(bernstein_order: int) -> tuple[str, ...]:
    base = (ROLE_INPUT, ROLE_WEIGHT, ROLE_BIAS, ROLE_HALF_SEL, ROLE_ALPHA_SEL, ROLE_FEEDBACK)
    return base + tuple(coeff_role(k) for k in range(bernstein_order + 1))


@dataclass(frozen=True)
class SeedTable:
    """Per-(node, role) register seeds, all nonzero and pairwise distinct."""

    width: int
    seeds: dict[tuple[int, str], int]

    def seed_for(self, node: int, role: str) -> int:
        return self.seeds[(node, role)]

    def __post_init__(self):
        vals = list(self.seeds.values())
        if any(v == 0 for v in vals):
            raise ValueError("seed table contains a zero seed")
        if len(set(vals)) != len(vals):
            raise ValueError("seed table contains duplicate seeds")


def build_seed_table(
    master_seed: int,
    n_nodes: int,
    roles: tuple[str, ...],
    width: int = DEFAULT_WIDTH,
) -> SeedTable:
    """Derive one distinct nonzero seed per (node, role) from a master seed.

    Deterministic: the same (master_seed, n_nodes, roles) always yields the
    same table.  Collisions and zeros are resolved by rehashing.
    """
    if n_nodes * len(roles) >= (1 << width):
        raise ValueError("more (node, role) pairs than distinct register states")
    mask = (1 << width) - 1
    used: set[int] = set()
    seeds: dict[tuple[int, str], int] = {}
    for node in range(n_nodes):
        for ridx, role in enumerate(roles):
            h = mix_ints(master_seed, node, ridx)
            seed = h & mask
            while seed == 0 or seed in used:
                h = splitmix64(h)
                seed = h & mask
            used.add(seed)
            seeds[(node, role)] = seed
    return SeedTable(width=width, seeds=seeds)
