import numpy as np
import pytest

from stochres.experiment import (
    ConfigError,
    ExperimentSpec,
    RECORDS_HEADER,
    RunRecord,
    derive_seed,
    emit_report,
    run_experiment,
    run_metrics_grid,
)
from stochres.specfile import load_spec, parse_spec_text, spec_from_pairs


def small_spec(**kw):
    base = dict(task="narma10", engines=("float",), n_nodes=(10,), trials=2,
                task_length=300, washout=20, master_seed=7, threads=1)
    base.update(kw)
    return ExperimentSpec(**base)


# --- spec files ---------------------------------------------------------------

def test_parse_flat_pairs():
    pairs = parse_spec_text("""
    # narma sweep
    task = narma10
    engines = float,stochastic
    N = 20,30
    L = 16,32
    alpha = 0.6
    seed = 3
    reseed = on,off
    """)
    spec = spec_from_pairs(pairs)
    assert spec.engines == ("float", "stochastic")
    assert spec.n_nodes == (20, 30)
    assert spec.stream_len == (16, 32)
    assert spec.master_seed == 3
    assert spec.reseed == (True, False)


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError):
        spec_from_pairs({"wibble": "3"})


def test_parse_rejects_bad_line():
    with pytest.raises(ConfigError):
        parse_spec_text("task narma10")


def test_spec_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentSpec(task="tetris")
    with pytest.raises(ConfigError):
        ExperimentSpec(engines=("warp",))
    with pytest.raises(ConfigError):
        ExperimentSpec(engines=("stochastic",), stream_len=())
    with pytest.raises(ConfigError):
        ExperimentSpec(trials=0)


def test_task_operating_point_defaults():
    assert ExperimentSpec(task="narma10").alpha == (0.45,)
    assert ExperimentSpec(task="sine_square").alpha == (0.6,)
    assert ExperimentSpec(task="sine_square").gamma == (2.0,)


def test_manifest_round_trip():
    spec = small_spec(engines=("float", "esn"), alpha=(0.4, 0.6))
    again = spec_from_pairs(parse_spec_text(spec.manifest_text()))
    assert again == spec


def test_load_spec_missing_file():
    with pytest.raises(ConfigError):
        load_spec("/nonexistent/spec.cfg")


# --- running ---------------------------------------------------------------------

def test_single_config_single_trial():
    records = run_experiment(small_spec(trials=1))
    assert len(records) == 1
    assert records[0].std == 0.0
    assert records[0].metric_name == "nmse"
    assert len(records[0].scores) == 1


def test_matched_seeds_across_engines():
    # trial seeds ignore the engine, so engines see identical datasets
    assert derive_seed(1, "narma10", 10, 0.45, 1.5, 0) == derive_seed(1, "narma10", 10, 0.45, 1.5, 0)
    recs = run_experiment(small_spec(engines=("float", "expectation"), trials=2))
    assert len(recs) == 2


def test_stochastic_cells_expand_lengths():
    spec = small_spec(engines=("float", "stochastic"), stream_len=(8, 16), trials=1)
    recs = run_experiment(spec)
    assert len(recs) == 3  # float once, stochastic per L
    stoch = [r for r in recs if r.engine == "stochastic"]
    assert sorted(r.stream_len for r in stoch) == [8, 16]


def test_thread_count_does_not_change_records(tmp_path):
    spec1 = small_spec(engines=("float", "fixed"), trials=2, threads=1)
    spec2 = small_spec(engines=("float", "fixed"), trials=2, threads=4)
    r1 = run_experiment(spec1)
    r2 = run_experiment(spec2)
    emit_report(r1, tmp_path / "a", spec=spec1, make_plots=False)
    emit_report(r2, tmp_path / "b", spec=spec2, make_plots=False)
    a = (tmp_path / "a" / "records.csv").read_bytes()
    b = (tmp_path / "b" / "records.csv").read_bytes()
    assert a == b
    at = (tmp_path / "a" / "trials.csv").read_bytes()
    bt = (tmp_path / "b" / "trials.csv").read_bytes()
    assert at == bt


def test_rerun_byte_identical(tmp_path):
    spec = small_spec(trials=2)
    emit_report(run_experiment(spec), tmp_path / "x", spec=spec, make_plots=False)
    emit_report(run_experiment(spec), tmp_path / "y", spec=spec, make_plots=False)
    for name in ("records.csv", "trials.csv", "summary.txt", "manifest.txt"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()


def test_records_csv_schema(tmp_path):
    spec = small_spec(trials=1)
    emit_report(run_experiment(spec), tmp_path, spec=spec, make_plots=False)
    lines = (tmp_path / "records.csv").read_text().splitlines()
    assert lines[0] == "task,engine,N,L,alpha,gamma,reseed,trial_count,metric_name,mean,std"
    cells = lines[1].split(",")
    assert cells[0] == "narma10" and cells[1] == "float"
    assert cells[7] == "1" and cells[8] == "nmse"


def test_summary_matches_per_trial_recomputation(tmp_path):
    spec = small_spec(trials=3)
    records = run_experiment(spec)
    emit_report(records, tmp_path, spec=spec, make_plots=False)
    trial_lines = (tmp_path / "trials.csv").read_text().splitlines()[1:]
    scores = [float(line.split(",")[-1]) for line in trial_lines]
    rec_line = (tmp_path / "records.csv").read_text().splitlines()[1]
    mean = float(rec_line.split(",")[-2])
    std = float(rec_line.split(",")[-1])
    assert mean == pytest.approx(np.mean(scores), abs=1e-12)
    assert std == pytest.approx(np.std(scores), abs=1e-12)


def test_metrics_grid_zero_alpha_row():
    spec = ExperimentSpec(task="metrics_grid", engines=("float",), n_nodes=(15,),
                          alpha=(0.0, 0.6), gamma=(2.0,), metric_m=15, metric_runs=2,
                          master_seed=1)
    records = run_metrics_grid(spec)
    kq_zero = [r for r in records if r.metric_name == "KQ" and r.alpha == 0.0]
    assert len(kq_zero) == 1
    assert kq_zero[0].mean == 0.0
    names = {r.metric_name for r in records}
    assert names == {"KQ", "GR", "KQ_minus_GR"}


def test_metrics_grid_rejects_esn():
    spec = ExperimentSpec(task="metrics_grid", engines=("esn",))
    with pytest.raises(ConfigError):
        run_metrics_grid(spec)


def test_benchmark_rejects_metrics_mismatch():
    spec = ExperimentSpec(task="metrics_grid", engines=("float",), n_nodes=(8,),
                          metric_m=8, metric_runs=1)
    records = run_experiment(spec)  # dispatches to the metrics path
    assert all(r.task == "metrics_grid" for r in records)


def test_santa_fe_requires_path():
    spec = ExperimentSpec(task="santa_fe", engines=("float",), trials=1)
    with pytest.raises(ConfigError):
        run_experiment(spec)


def test_emit_report_requires_records(tmp_path):
    with pytest.raises(ConfigError):
        emit_report([], tmp_path)


def test_figures_are_rendered(tmp_path):
    spec = small_spec(engines=("float", "fixed"), n_nodes=(8, 12), trials=1)
    written = emit_report(run_experiment(spec), tmp_path, spec=spec, make_plots=True)
    pngs = [p for p in written if p.suffix == ".png"]
    assert pngs and all(p.exists() and p.stat().st_size > 0 for p in pngs)


def test_metrics_figures(tmp_path):
    spec = ExperimentSpec(task="metrics_grid", engines=("float",), n_nodes=(10,),
                          alpha=(0.2, 0.6), gamma=(1.0, 2.0), metric_m=10, metric_runs=1)
    written = emit_report(run_metrics_grid(spec), tmp_path, spec=spec, make_plots=True)
    assert any(p.name == "metrics_grid_float.png" for p in written)


def test_run_record_stats():
    rec = RunRecord(task="narma10", engine="float", n_nodes=5, stream_len=0,
                    alpha=0.5, gamma=1.0, reseed=True, metric_name="nmse",
                    scores=[1.0, 3.0])
    assert rec.mean == 2.0
    assert rec.std == 1.0
    assert rec.csv_row().startswith("narma10,float,5,0,")
