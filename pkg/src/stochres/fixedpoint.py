"""Signed 8-bit Q1.7 arithmetic and the piecewise-linear activation table.

Raw values are integers in [-128, 127] interpreted as raw / 128, covering
[-1, 1).  Addition saturates, multiplication rounds the 7-bit shift to
nearest with ties away from zero, then saturates.  All helpers accept
plain ints or integer numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activation import eval_activation

SCALE = 128
RAW_MIN = -128
RAW_MAX = 127


def saturate(raw):
    return np.clip(raw, RAW_MIN, RAW_MAX) if isinstance(raw, np.ndarray) else max(RAW_MIN, min(RAW_MAX, int(raw)))


def _round_half_away(x):
    # works on floats or float arrays
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def fx_quantize(value):
    """Real value -> Q1.7 raw, round to nearest, ties away, saturating."""
    raw = _round_half_away(np.asarray(value, dtype=float) * SCALE)
    raw = np.clip(raw, RAW_MIN, RAW_MAX)
    return raw.astype(np.int64) if raw.ndim else int(raw)


def fx_to_float(raw):
    return np.asarray(raw, dtype=float) / SCALE if isinstance(raw, np.ndarray) else raw / SCALE


def fx_add(a, b):
    """Saturating Q1.7 addition."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.clip(np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64), RAW_MIN, RAW_MAX)
    return saturate(int(a) + int(b))


def _shift7_round(prod):
    # (prod / 128) rounded to nearest, ties away from zero; prod is exact int
    if isinstance(prod, np.ndarray):
        prod = prod.astype(np.int64)
        mag = (np.abs(prod) + 64) >> 7
        return np.sign(prod) * mag
    mag = (abs(prod) + 64) >> 7
    return mag if prod >= 0 else -mag


def fx_mul(a, b):
    """Q1.7 multiply: (a * b) >> 7 with round-to-nearest, saturating."""
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        prod = np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)
        return np.clip(_shift7_round(prod), RAW_MIN, RAW_MAX)
    return saturate(_shift7_round(int(a) * int(b)))


def fx_neg(a):
    """Saturating negation (-(-128) clips to 127)."""
    if isinstance(a, np.ndarray):
        return np.clip(-np.asarray(a, dtype=np.int64), RAW_MIN, RAW_MAX)
    return saturate(-int(a))


@dataclass(frozen=True)
class PwlTable:
    """Piecewise-linear activation over [0, 1] with Q1.7 knot values.

    Knot abscissae are the quantized uniform grid k / segments; the final
    knot saturates at 127/128 since 1.0 is not representable.  Inputs are
    clamped to the covered range.
    """

    s_raw: np.ndarray  # int64, strictly increasing
    g_raw: np.ndarray  # int64, same length

    @property
    def segments(self) -> int:
        return int(self.s_raw.size) - 1

    def to_text(self) -> str:
        lines = [f"{int(s)} {int(g)}" for s, g in zip(self.s_raw, self.g_raw)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PwlTable":
        pairs = [line.split() for line in text.splitlines() if line.strip()]
        s = np.asarray([int(p[0]) for p in pairs], dtype=np.int64)
        g = np.asarray([int(p[1]) for p in pairs], dtype=np.int64)
        return cls(s_raw=s, g_raw=g)


def build_pwl(gamma: float, segments: int = 16) -> PwlTable:
    """Tabulate sin^2(gamma * s) at `segments` + 1 uniform knots, Q1.7 values."""
    if segments < 2:
        raise ValueError(f"need >= 2 segments, got {segments}")
    knots = np.arange(segments + 1) / segments
    s_raw = np.minimum(_round_half_away(knots * SCALE).astype(np.int64), RAW_MAX)
    if np.any(np.diff(s_raw) <= 0):
        raise ValueError(f"{segments} segments collapse in Q1.7 resolution")
    g_raw = fx_quantize(eval_activation(gamma, knots))
    return PwlTable(s_raw=s_raw, g_raw=np.asarray(g_raw, dtype=np.int64))


def pwl_eval_raw(table: PwlTable, s_raw):
    """Interpolate in integer arithmetic: Q1.7 in, Q1.7 out, inputs clamped."""
    scalar = not isinstance(s_raw, np.ndarray)
    s = np.atleast_1d(np.asarray(s_raw, dtype=np.int64))
    s = np.clip(s, table.s_raw[0], table.s_raw[-1])
    seg = np.clip(np.searchsorted(table.s_raw, s, side="right") - 1, 0, table.segments - 1)
    s0 = table.s_raw[seg]
    s1 = table.s_raw[seg + 1]
    g0 = table.g_raw[seg]
    g1 = table.g_raw[seg + 1]
    num = (g1 - g0) * (s - s0)
    den = s1 - s0
    frac = np.sign(num) * ((2 * np.abs(num) + den) // (2 * den))
    out = g0 + frac.astype(np.int64)
    return int(out[0]) if scalar else out


def pwl_eval(table: PwlTable, s):
    """Real-valued interpolation through the quantized knots, for error sweeps."""
    scalar = np.isscalar(s)
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("activation argument must lie in [0, 1]")
    sv = table.s_raw / SCALE
    gv = table.g_raw / SCALE
    out = np.interp(np.clip(arr, sv[0], sv[-1]), sv, gv)
    return float(out[0]) if scalar else out
