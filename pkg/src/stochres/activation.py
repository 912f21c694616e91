"""The non-linear node's activation in its analytic and polynomial forms.

The node computes g(s) = sin^2(gamma * s) on the unit interval, which
already lands in [0, 1] and satisfies g(0) = 0.  The stochastic engine
realizes g through a Bernstein polynomial whose coefficients must be
probabilities, so both fit methods return coefficients clipped to [0, 1].
"""

from __future__ import annotations

from math import comb

import numpy as np


def eval_activation(gamma: float, s):
    """sin^2(gamma * s) for s in [0, 1]; scalar or array."""
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("activation argument must lie in [0, 1]")
    out = np.sin(gamma * arr) ** 2
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def bernstein_basis(n: int, s) -> np.ndarray:
    """Stack of the n-th order Bernstein basis polynomials at s (rows k=0..n)."""
    arr = np.asarray(s, dtype=float)
    return np.stack([comb(n, k) * arr**k * (1.0 - arr) ** (n - k) for k in range(n + 1)])

def fit_bernstein(gamma: float, n: int, method: str = "sample") -> np.ndarray:
    """Coefficients beta_0..beta_n approximating sin^2(gamma * s) on [0, 1].

    method="sample" reads the target at the knots, beta_k = g(k / n).
    method="lstsq" minimizes the L2 error on a dense grid and clips the
    result into [0, 1] so every coefficient stays encodable as a
    probability.
    """
    if n < 1:
        raise ValueError(f"polynomial order must be >= 1, got {n}")
    if method == "sample":
        beta = eval_activation(gamma, np.arange(n + 1) / n)
    elif method == "lstsq":
        grid = np.linspace(0.0, 1.0, 512)
        design = bernstein_basis(n, grid).T
        target = eval_activation(gamma, grid)
        beta, *_ = np.linalg.lstsq(design, target, rcond=None)
        beta = np.clip(beta, 0.0, 1.0)
    else:
        raise ValueError(f"unknown fit method {method!r}")
    return np.asarray(beta, dtype=float)


def eval_bernstein(beta: np.ndarray, s):
    """Evaluate sum_k beta_k C(n,k) s^k (1-s)^(n-k); scalar or array."""
    beta = np.asarray(beta, dtype=float)
    n = beta.size - 1
    if n < 0:
        raise ValueError("need at least one coefficient")
    arr = np.asarray(s, dtype=float)
    out = np.tensordot(beta, bernstein_basis(n, arr), axes=1)
    return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def coeffs_to_text(beta: np.ndarray) -> str:
    """One coefficient per line, for experiment provenance."""
    return "\n".join(repr(float(b)) for b in beta) + "\n"


def coeffs_from_text(text: str) -> np.ndarray:
    vals = [float(line) for line in text.splitlines() if line.strip()]
    if not vals:
        raise ValueError("no coefficients found")
    return np.asarray(vals, dtype=float)
