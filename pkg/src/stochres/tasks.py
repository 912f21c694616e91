"""Benchmark dataset generation and loading.

Four tasks: NARMA10 system identification, sine/square waveform
discrimination, one-step Santa Fe laser prediction (file-based), and
non-linear channel equalization over the {-3, -1, 1, 3} alphabet.

Every generator is a pure function of its parameters and seed.  Datasets
carry raw inputs, engine-ready scaled inputs in [-1, 1], aligned targets,
and the train/test boundary; scaling is always fitted on the training
split only and never touches the targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

NCE_SYMBOLS = (-3.0, -1.0, 1.0, 3.0)

# linear channel taps for d(n+2) .. d(n-7)
_NCE_TAPS = (0.08, -0.12, 1.0, 0.18, -0.1, 0.091, -0.05, 0.04, 0.03, 0.01)


@dataclass
class TaskDataset:
    kind: str
    inputs: np.ndarray       # raw input series
    scaled: np.ndarray       # inputs mapped into [-1, 1] for the reservoir
    targets: np.ndarray
    train_end: int           # inputs[:train_end] train, the rest test
    scaling: tuple[float, float]  # scaled = clip(a * raw + b)
    symbols: tuple[float, ...] | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.scaled = np.asarray(self.scaled, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if not (self.inputs.size == self.scaled.size == self.targets.size):
            raise ValueError("inputs, scaled inputs and targets must align")
        if not 0 < self.train_end < self.inputs.size:
            raise ValueError("train_end must split the series in two nonempty parts")

    @property
    def train_scaled(self) -> np.ndarray:
        return self.scaled[: self.train_end]

    @property
    def test_scaled(self) -> np.ndarray:
        return self.scaled[self.train_end:]

    @property
    def train_targets(self) -> np.ndarray:
        return self.targets[: self.train_end]

    @property
    def test_targets(self) -> np.ndarray:
        return self.targets[self.train_end:]

    def manifest_block(self) -> str:
        lines = [f"task = {self.kind}", f"train_end = {self.train_end}",
                 f"scale_a = {self.scaling[0]!r}", f"scale_b = {self.scaling[1]!r}"]
        for k in sorted(self.params):
            lines.append(f"{k} = {self.params[k]}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("index,raw_input,scaled_input,target,split\n")
            for i in range(self.inputs.size):
                split = "train" if i < self.train_end else "test"
                fh.write(
                    f"{i},{float(self.inputs[i])!r},{float(self.scaled[i])!r},"
                    f"{float(self.targets[i])!r},{split}\n"
                )


def _affine_fit(train_raw: np.ndarray, lo: float, hi: float) -> tuple[float, float]:
    mn, mx = float(train_raw.min()), float(train_raw.max())
    if mx == mn:
        raise ValueError("cannot fit input scaling on a constant training split")
    a = (hi - lo) / (mx - mn)
    return a, lo - a * mn


def scale_inputs(dataset: TaskDataset, lo: float = -1.0, hi: float = 1.0) -> TaskDataset:
    """Refit the input scaling on the training split to the range [lo, hi].

    Test values falling outside the training range clamp to the range ends.
    """
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError("target range must be inside [-1, 1]")
    a, b = _affine_fit(dataset.inputs[: dataset.train_end], lo, hi)
    scaled = np.clip(a * dataset.inputs + b, lo, hi)
    return replace(dataset, scaled=scaled, scaling=(a, b))


def narma10_series(u: np.ndarray, literal_input_product: bool = False) -> np.ndarray | None:
    """Drive the tenth-order recurrence with input u, zero initial history.

    y(t+1) = 0.3 y(t) + 0.05 y(t) sum_{k=0..9} y(t-k) + 1.5 u(t-9) u(t) + 0.1.
    Returns the length len(u)+1 response, or None if it leaves [-1, 1].
    """
    u = np.asarray(u, dtype=float)
    y = np.zeros(u.size + 1)
    for t in range(u.size):
        tail = y[max(0, t - 9): t + 1].sum()
        u_past = u[t] if literal_input_product else (u[t - 9] if t >= 9 else 0.0)
        y[t + 1] = 0.3 * y[t] + 0.05 * y[t] * tail + 1.5 * u_past * u[t] + 0.1
        if abs(y[t + 1]) > 1.0:
            return None
    return y


def gen_narma10(
    length: int = 2000,
    seed: int = 0,
    train_fraction: float = 0.5,
    literal_input_product: bool = False,
) -> TaskDataset:
    """Tenth-order NARMA driven by u ~ U[0, 0.5].

    The target at index t is y(t+1).  The widely used input product
    u(t-9) u(t) is the default; `literal_input_product` switches to the
    u(t)^2 variant for fidelity experiments.  Unstable draws (|y| > 1)
    regenerate with the next seed.
    """
    if length < 20:
        raise ValueError("length must be >= 20")
    for attempt in range(100):
        rng = np.random.default_rng(seed + attempt)
        u = rng.uniform(0.0, 0.5, size=length)
        y = narma10_series(u, literal_input_product)
        if y is not None:
            train_end = int(length * train_fraction)
            ds = TaskDataset(
                kind="narma10",
                inputs=u,
                scaled=u,
                targets=y[1:],
                train_end=train_end,
                scaling=(1.0, 0.0),
                params={"length": length, "seed": seed + attempt,
                        "literal_input_product": literal_input_product},
            )
            return scale_inputs(ds)
    raise RuntimeError("NARMA10 generation diverged for 100 consecutive seeds")


def _one_period(kind: int, period: int) -> np.ndarray:
    j = np.arange(period)
    if kind == 0:  # sine
        return np.sin(2.0 * np.pi * j / period)
    return np.where(j < period // 2, 1.0, -1.0)  # square, exactly +-1


def gen_sine_square(
    num_signals: int = 20,
    points_per_signal: int = 1000,
    period: int = 12,
    seed: int = 0,
) -> TaskDataset:
    """Waveform discrimination: random one-period sine or square segments.

    Each signal concatenates randomly chosen single-period segments and is
    truncated to points_per_signal; the per-point label is +1 for square
    and -1 for sine.  Training and test sets each hold num_signals signals,
    run back to back.
    """
    if period < 4 or period % 2:
        raise ValueError("period must be an even integer >= 4")
    if num_signals < 1 or points_per_signal < period:
        raise ValueError("need >= 1 signal of >= one period")
    rng = np.random.default_rng(seed)
    waves = [_one_period(0, period), _one_period(1, period)]
    segs_per_signal = -(-points_per_signal // period)

    def build(count):
        xs, ys = [], []
        for _ in range(count):
            kinds = rng.integers(0, 2, size=segs_per_signal)
            x = np.concatenate([waves[k] for k in kinds])[:points_per_signal]
            lab = np.repeat(kinds * 2 - 1, period)[:points_per_signal]
            xs.append(x)
            ys.append(lab.astype(float))
        return np.concatenate(xs), np.concatenate(ys)

    x_train, y_train = build(num_signals)
    x_test, y_test = build(num_signals)
    inputs = np.concatenate([x_train, x_test])
    targets = np.concatenate([y_train, y_test])
    return TaskDataset(
        kind="sine_square",
        inputs=inputs,
        scaled=inputs.copy(),
        targets=targets,
        train_end=x_train.size,
        scaling=(1.0, 0.0),
        params={"num_signals": num_signals, "points_per_signal": points_per_signal,
                "period": period, "seed": seed},
    )


def load_santa_fe(path, train_len: int = 9000, test_len: int = 1000) -> TaskDataset:
    """One-step-ahead laser intensity prediction from a plain-text file.

    The file holds one numeric sample per line; the target is the next raw
    sample, inputs are scaled to [0, 1] by the training split's range.
    """
    with open(path) as fh:
        raw = np.asarray([float(line) for line in fh if line.strip()], dtype=float)
    needed = train_len + test_len + 1
    if raw.size < needed:
        raise ValueError(f"need at least {needed} samples, file has {raw.size}")
    raw = raw[:needed]
    ds = TaskDataset(
        kind="santa_fe",
        inputs=raw[:-1],
        scaled=raw[:-1],
        targets=raw[1:],
        train_end=train_len,
        scaling=(1.0, 0.0),
        params={"path": str(path), "train_len": train_len, "test_len": test_len},
    )
    return scale_inputs(ds, lo=0.0, hi=1.0)


def nce_channel(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Receiver model: linear multipath mix q, then polynomial distortion.

    Returns (q, u) for the valid index range n = 7 .. len(d) - 3, where
    q(n) combines d(n+2) .. d(n-7) and u(n) = q + 0.036 q^2 - 0.011 q^3.
    """
    d = np.asarray(d, dtype=float)
    if d.size < 10:
        raise ValueError("need at least 10 symbols")
    valid = d.size - 9
    q = np.zeros(valid)
    for j, c in enumerate(_NCE_TAPS):
        # tap j reads d(n + 2 - j); n runs over 7 .. d.size - 3
        lo = 9 - j
        q += c * d[lo: lo + valid]
    u = q + 0.036 * q**2 - 0.011 * q**3
    return q, u


def gen_nce(length: int = 2000, seed: int = 0, noise_snr_db: float | None = None,
            train_fraction: float = 0.5) -> TaskDataset:
    """Channel equalization: recover the sent symbol from the receiver output.

    Symbols are i.i.d. uniform over {-3, -1, 1, 3}; the receiver output u
    optionally carries white Gaussian noise at the given SNR.  Inputs are
    scaled by the training split's maximum magnitude.
    """
    if length < 100:
        raise ValueError("length must be >= 100")
    rng = np.random.default_rng(seed)
    d = rng.choice(np.asarray(NCE_SYMBOLS), size=length + 9)
    _, u = nce_channel(d)
    if noise_snr_db is not None:
        power = float(np.mean(u**2))
        noise_power = power / (10.0 ** (noise_snr_db / 10.0))
        u = u + rng.normal(0.0, np.sqrt(noise_power), size=u.size)
    targets = d[7: 7 + u.size]
    train_end = int(length * train_fraction)
    max_abs = float(np.max(np.abs(u[:train_end])))
    if max_abs == 0.0:
        raise ValueError("cannot scale a zero training split")
    scaled = np.clip(u / max_abs, -1.0, 1.0)
    return TaskDataset(
        kind="nce",
        inputs=u,
        scaled=scaled,
        targets=targets,
        train_end=train_end,
        scaling=(1.0 / max_abs, 0.0),
        symbols=NCE_SYMBOLS,
        params={"length": length, "seed": seed, "noise_snr_db": noise_snr_db},
    )
