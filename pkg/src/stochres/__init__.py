"""Bit-exact stochastic-logic time delay reservoir simulator.

Layers: LFSR stream generation and gate-level stochastic arithmetic, the
activation in analytic / Bernstein / fixed-point form, four reservoir
engines plus an ESN baseline, least-squares readout and rank metrics, the
benchmark tasks, and a batch experiment harness with CSV and figure
reports.
"""

from .activation import eval_activation, eval_bernstein, fit_bernstein
from .bitstream import (
    BitStream,
    b2s,
    b2s_unipolar,
    from_prob,
    make_delayed_copies,
    s2b_bipolar,
    s2b_unipolar,
    sc_bernstein,
    sc_mul,
    sc_mux,
    sc_neg,
    to_prob,
    transition_density,
)
from .experiment import ExperimentSpec, RunRecord, emit_report, run_experiment, run_metrics_grid
from .fixedpoint import PwlTable, build_pwl, fx_add, fx_mul, fx_quantize, pwl_eval
from .lfsr import Lfsr, SeedTable, build_seed_table
from .metrics import MetricsConfig, generalization_rank, kernel_quality, numerical_rank
from .readout import (
    ReadoutModel,
    classification_error,
    decode_nearest,
    nmse,
    predict,
    ser,
    train_readout,
)
from .reservoir import (
    EsnConfig,
    StateMatrix,
    TdrConfig,
    TdrState,
    make_engine,
    run_esn,
    run_reservoir,
    tdr_step_fixed,
    tdr_step_float,
    tdr_step_stochastic,
)
from .tasks import TaskDataset, gen_narma10, gen_nce, gen_sine_square, load_santa_fe, scale_inputs

__version__ = "0.1.0"
