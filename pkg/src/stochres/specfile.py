"""Flat key = value experiment spec files.

One assignment per line, `#` starts a comment, commas make lists for the
sweepable keys.  Short aliases follow the report column names: N for
n_nodes, L for stream_len, m for metric_m, seed for master_seed.
"""

from __future__ import annotations

from pathlib import Path

from .experiment import ConfigError, ExperimentSpec

_ALIASES = {
    "n": "n_nodes",
    "l": "stream_len",
    "seed": "master_seed",
    "m": "metric_m",
    "runs": "metric_runs",
    "engine": "engines",
}

_LIST_INT = ("n_nodes", "stream_len")
_LIST_FLOAT = ("alpha", "gamma")
_LIST_STR = ("engines",)
_LIST_BOOL = ("reseed",)
_INT = ("trials", "master_seed", "washout", "bernstein_order", "task_length",
        "sine_signals", "sine_points", "sine_period", "metric_m", "metric_runs",
        "threads")
_FLOAT = ("theta", "ridge", "noise_amp", "rank_tol", "esn_spectral_radius",
          "esn_input_scaling", "esn_bias_scaling")
_OPT_FLOAT = ("nce_snr_db",)
_STR = ("task",)
_OPT_STR = ("santa_fe_path",)


def _to_bool(token: str) -> bool:
    t = token.strip().lower()
    if t in ("on", "true", "1", "yes"):
        return True
    if t in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"expected on/off, got {token!r}")


def parse_spec_text(text: str) -> dict:
    """Raw key/value pairs from spec text; values stay strings."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip().lower()] = value.strip()
    return pairs


def _convert(key: str, value: str):
    items = [v.strip() for v in value.split(",") if v.strip()]
    if key in _LIST_INT:
        return tuple(int(v) for v in items)
    if key in _LIST_FLOAT:
        return tuple(float(v) for v in items)
    if key in _LIST_STR:
        return tuple(items)
    if key in _LIST_BOOL:
        return tuple(_to_bool(v) for v in items)
    if key in _INT:
        return int(value)
    if key in _FLOAT:
        return float(value)
    if key in _OPT_FLOAT:
        return None if value.lower() == "none" else float(value)
    if key in _STR:
        return value
    if key in _OPT_STR:
        return None if value.lower() == "none" else value
    raise ConfigError(f"unknown spec key {key!r}")


def spec_from_pairs(pairs: dict, overrides: dict | None = None,
                    default_task: str = "narma10") -> ExperimentSpec:
    kwargs = {"task": default_task}
    for key, value in pairs.items():
        key = _ALIASES.get(key, key)
        try:
            kwargs[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    if overrides:
        kwargs.update(overrides)
    try:
        return ExperimentSpec(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(path, overrides: dict | None = None,
              default_task: str = "narma10") -> ExperimentSpec:
    """Spec from a file; path None builds the default spec plus overrides."""
    pairs = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"spec file not found: {path}")
        pairs = parse_spec_text(p.read_text())
    return spec_from_pairs(pairs, overrides, default_task=default_task)
