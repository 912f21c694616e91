"""Linear readout training and task scoring.

The output layer is an affine map fitted by least squares on the
collected reservoir states, optionally with a small ridge penalty as a
numerical stabilizer.  Scores: normalized mean squared error for
regression, thresholded classification error, and symbol error rate for
the channel-equalization alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ReadoutModel:
    """Affine readout: weights for each state column plus a constant term."""

    weights: np.ndarray  # shape (n_columns + 1,), constant term last

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 1 or not np.all(np.isfinite(self.weights)):
            raise ValueError("readout weights must be a finite 1-d vector")


def _design(states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    if states.ndim != 2:
        raise ValueError("states must be a 2-d matrix")
    return np.hstack([states, np.ones((states.shape[0], 1))])


def train_readout(states, targets, ridge: float = 1e-8) -> ReadoutModel:
    """Solve min ||[states | 1] w - y||^2 + ridge ||w||^2.

    With ridge = 0 a singular system falls back to the minimum-norm
    least-squares solution.
    """
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    x = _design(states)
    y = np.asarray(targets, dtype=float)
    if y.ndim != 1 or y.size != x.shape[0]:
        raise ValueError(f"targets length {y.size} != state rows {x.shape[0]}")
    if ridge == 0.0:
        w, *_ = np.linalg.lstsq(x, y, rcond=None)
    else:
        gram = x.T @ x + ridge * np.eye(x.shape[1])
        try:
            w = np.linalg.solve(gram, x.T @ y)
        except np.linalg.LinAlgError:
            w, *_ = np.linalg.lstsq(x, y, rcond=None)
    return ReadoutModel(weights=w)


def predict(model: ReadoutModel, states) -> np.ndarray:
    x = _design(states)
    if x.shape[1] != model.weights.size:
        raise ValueError(f"state columns {x.shape[1] - 1} do not match model size {model.weights.size - 1}")
    return x @ model.weights


def nmse(y, y_hat) -> float:
    """sum (y - y_hat)^2 / sum (y - mean(y))^2; undefined for constant y."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1 or y.size < 2:
        raise ValueError("series must be equal-length 1-d with >= 2 points")
    denom = float(np.sum((y - y.mean()) ** 2))
    if denom == 0.0:
        raise ValueError("nmse undefined for a constant target series")
    return float(np.sum((y - y_hat) ** 2)) / denom


def classification_error(labels, predictions, threshold: float = 0.0) -> float:
    """Fraction of points where sign(prediction - threshold) misses the label."""
    labels = np.asarray(labels, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if labels.shape != predictions.shape or labels.size == 0:
        raise ValueError("labels and predictions must be equal-length and nonempty")
    decided = np.where(predictions >= threshold, 1.0, -1.0)
    return float(np.mean(decided != np.sign(labels)))


def decode_nearest(predictions, symbols) -> np.ndarray:
    """Snap each prediction to the nearest symbol of the alphabet."""
    symbols = np.asarray(symbols, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    idx = np.argmin(np.abs(predictions[:, None] - symbols[None, :]), axis=1)
    return symbols[idx]


def ser(symbols_true, decoded) -> float:
    """Symbol error rate: fraction of decoded symbols that miss the truth."""
    a = np.asarray(symbols_true, dtype=float)
    b = np.asarray(decoded, dtype=float)
    if a.shape != b.shape or a.size == 0:
        raise ValueError("series must be equal-length and nonempty")
    return float(np.mean(a != b))
