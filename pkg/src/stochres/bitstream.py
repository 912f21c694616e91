"""Bit streams and the gate-level arithmetic of stochastic logic.

A value q in [-1, 1] is carried by a Bernoulli bit stream whose ones
probability is p = (q + 1) / 2 (bipolar encoding); a probability in [0, 1]
is carried directly (unipolar encoding).  Multiplication of bipolar values
is a per-tick XNOR, negation a complement, and weighted summation a
multiplexer.  A Bernstein polynomial evaluator is a multiplexer whose
select line counts ones across several copies of the argument stream.

All operations are pure functions of their input bits; given the same
generator seeds they reproduce bit for bit.
"""

from __future__ import annotations

import numpy as np

from .lfsr import Lfsr


def _check_bipolar(q: float) -> float:
    q = float(q)
    if not -1.0 <= q <= 1.0:
        raise ValueError(f"bipolar value must lie in [-1, 1], got {q}")
    return q


def _check_prob(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return p


def to_prob(q: float) -> float:
    """Map a bipolar value q in [-1, 1] to its ones probability (q + 1) / 2."""
    return (_check_bipolar(q) + 1.0) / 2.0


def from_prob(p: float) -> float:
    """Map a ones probability back to the bipolar value 2p - 1."""
    return 2.0 * _check_prob(p) - 1.0


class BitStream:
    """A finite sequence of {0, 1} bits of length >= 1."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a bit stream is a nonempty 1-d sequence")
        arr = arr.astype(np.uint8)
        if np.any(arr > 1):
            raise ValueError("bits must be 0 or 1")
        self.bits = arr

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return len(self) == len(other) and bool(np.all(self.bits == other.bits))

    def __repr__(self) -> str:
        head = self.to01() if len(self) <= 32 else self.to01()[:32] + "..."
        return f"BitStream({head}, length={len(self)})"

    def ones_fraction(self) -> float:
        return float(self.bits.mean())

    def to01(self) -> str:
        """ASCII '0'/'1' rendering, for debug dumps."""
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from01(cls, text: str) -> "BitStream":
        return cls([1 if c == "1" else 0 for c in text.strip()])


def b2s(q: float, gen: Lfsr, length: int) -> BitStream:
    """Encode a bipolar value as `length` bits, advancing `gen` in place.

    A tick emits 1 when the generator's comparator value r satisfies r <= q.
    The comparator grid excludes -1 and +1, so q = -1 encodes as all zeros
    and q = +1 as all ones.
    """
    q = _check_bipolar(q)
    if length < 1:
        raise ValueError("stream length must be >= 1")
    r = gen.reals(length)
    return BitStream((r <= q).astype(np.uint8))


def b2s_unipolar(p: float, gen: Lfsr, length: int) -> BitStream:
    """Encode a probability as `length` bits, advancing `gen` in place."""
    p = _check_prob(p)
    if length < 1:
        raise ValueError("stream length must be >= 1")
    u = gen.units(length)
    return BitStream((u <= p).astype(np.uint8))


def s2b_bipolar(stream: BitStream) -> float:
    """Decode a stream to its bipolar value (ones - zeros) / length."""
    ones = int(stream.bits.sum())
    return (2 * ones - len(stream)) / len(stream)


def s2b_unipolar(stream: BitStream) -> float:
    """Decode a stream to its ones fraction."""
    return int(stream.bits.sum()) / len(stream)


def _check_same_length(*streams: BitStream) -> int:
    lengths = {len(s) for s in streams}
    if len(lengths) != 1:
        raise ValueError(f"stream lengths differ: {sorted(lengths)}")
    return lengths.pop()


def sc_mul(a: BitStream, b: BitStream) -> BitStream:
    """Bipolar multiply: per-tick XNOR of two streams of equal length."""
    _check_same_length(a, b)
    return BitStream(np.logical_not(np.bitwise_xor(a.bits, b.bits)).astype(np.uint8))


def sc_neg(a: BitStream) -> BitStream:
    """Bipolar negation: bitwise complement."""
    return BitStream((1 - a.bits).astype(np.uint8))


def sc_mux(sel: BitStream, a: BitStream, b: BitStream) -> BitStream:
    """Weighted sum: out[t] = a[t] where sel[t] = 1, else b[t]."""
    _check_same_length(sel, a, b)
    return BitStream(np.where(sel.bits == 1, a.bits, b.bits).astype(np.uint8))


def make_delayed_copies(
    a: BitStream, n: int, d: int = 1, history: BitStream | None = None
) -> list[BitStream]:
    """Produce n copies of `a`, copy k delayed by k*d ticks.

    Copy 0 is `a` itself.  The first k*d ticks of copy k come from
    `history` (the generator output that preceded `a`) when given;
    otherwise the stream is treated as periodic and delayed bits wrap
    around from its own tail.  Zero padding is never used since it would
    bias the early bits.
    """
    if n < 1:
        raise ValueError("copy count must be >= 1")
    if d < 1:
        raise ValueError("per-copy delay must be >= 1")
    need = (n - 1) * d
    length = len(a)
    if history is not None:
        if len(history) < need:
            raise ValueError(f"history of >= {need} bits required, got {len(history)}")
        ext = np.concatenate([history.bits[len(history) - need:], a.bits])
        return [BitStream(ext[need - k * d: need - k * d + length]) for k in range(n)]
    return [BitStream(np.roll(a.bits, k * d)) for k in range(n)]


def sc_bernstein(x_copies: list[BitStream], coeff_streams: list[BitStream]) -> BitStream:
    """Bernstein evaluator: a mux over coefficient streams, selected by the
    per-tick count of ones across the argument copies.

    With n independent copies of an argument of probability p and
    coefficient streams encoding beta_0..beta_n, the ones probability of
    the output is sum_k beta_k * C(n,k) * p^k * (1-p)^(n-k).
    """
    n = len(x_copies)
    if n < 1:
        raise ValueError("need at least one argument copy")
    if len(coeff_streams) != n + 1:
        raise ValueError(f"need {n + 1} coefficient streams, got {len(coeff_streams)}")
    length = _check_same_length(*x_copies, *coeff_streams)
    counts = np.zeros(length, dtype=np.int64)
    for c in x_copies:
        counts += c.bits
    coeff = np.stack([c.bits for c in coeff_streams])
    return BitStream(coeff[counts, np.arange(length)])


def transition_density(a: BitStream) -> float:
    """Fraction of adjacent tick pairs whose bits differ (switching activity)."""
    if len(a) < 2:
        raise ValueError("transition density needs at least 2 bits")
    return float(np.count_nonzero(a.bits[1:] != a.bits[:-1])) / (len(a) - 1)


def xnor_expected(p_a: float, p_b: float) -> float:
    """Exact ones probability of the XNOR of two independent streams."""
    return p_a * p_b + (1.0 - p_a) * (1.0 - p_b)


def mux_expected(p_sel, p_a, p_b):
    """Exact ones probability of a mux over independent streams."""
    return p_sel * p_a + (1.0 - p_sel) * p_b
