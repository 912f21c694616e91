"""Figure rendering for experiment reports.

Every figure is derived from the same records that land in records.csv:
benchmark sweeps become mean +- std curves over reservoir size (or stream
length), metric grids become KQ / GR / KQ-GR heatmaps, and stream-length
studies become KQ and GR curves for both re-seeding modes.  Files are
written next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

BENCH_METRICS = ("nmse", "classification_error", "ser")
RANK_METRICS = ("KQ", "GR", "KQ_minus_GR")


def _engine_label(rec) -> str:
    if rec.engine == "stochastic":
        return f"stochastic L={rec.stream_len}"
    return rec.engine


def render_figures(records, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    bench = [r for r in records if r.metric_name in BENCH_METRICS]
    ranks = [r for r in records if r.metric_name in RANK_METRICS]
    if bench:
        written.extend(_render_benchmark(bench, out_dir))
    if ranks:
        written.extend(_render_ranks(ranks, out_dir))
    return written


def _render_benchmark(records, out_dir) -> list[Path]:
    written = []
    for task in sorted({r.task for r in records}):
        recs = [r for r in records if r.task == task]
        n_values = sorted({r.n_nodes for r in recs})
        sweep_l = len(n_values) == 1 and len({r.stream_len for r in recs if r.engine == "stochastic"}) > 1
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        for label in sorted({_engine_label(r) for r in recs}):
            group = sorted((r for r in recs if _engine_label(r) == label),
                           key=lambda r: (r.stream_len if sweep_l else r.n_nodes))
            xs = [r.stream_len if sweep_l else r.n_nodes for r in group]
            ys = [r.mean for r in group]
            es = [r.std for r in group]
            ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=label)
        ax.set_xlabel("stream length L" if sweep_l else "reservoir size N")
        ax.set_ylabel(recs[0].metric_name)
        ax.set_title(task)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{task}_results.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written


def _render_ranks(records, out_dir) -> list[Path]:
    alphas = sorted({r.alpha for r in records})
    gammas = sorted({r.gamma for r in records})
    lengths = sorted({r.stream_len for r in records})
    if len(alphas) > 1 and len(gammas) > 1:
        return _rank_heatmaps(records, out_dir, alphas, gammas)
    if len(lengths) > 1:
        return _rank_vs_length(records, out_dir, lengths)
    return _rank_bars(records, out_dir)


def _rank_heatmaps(records, out_dir, alphas, gammas) -> list[Path]:
    written = []
    for engine in sorted({r.engine for r in records}):
        fig, axes = plt.subplots(1, 3, figsize=(12.5, 3.8))
        for ax, metric in zip(axes, RANK_METRICS):
            grid = np.full((len(gammas), len(alphas)), np.nan)
            for r in records:
                if r.engine == engine and r.metric_name == metric:
                    grid[gammas.index(r.gamma), alphas.index(r.alpha)] = r.mean
            im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis",
                           extent=(min(alphas), max(alphas), min(gammas), max(gammas)))
            ax.set_xlabel("alpha")
            ax.set_ylabel("gamma")
            ax.set_title(metric)
            fig.colorbar(im, ax=ax, shrink=0.85)
        fig.suptitle(f"rank metrics, {engine} engine")
        fig.tight_layout()
        path = out_dir / f"metrics_grid_{engine}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written


def _rank_vs_length(records, out_dir, lengths) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for metric in ("KQ", "GR"):
        for reseed in (True, False):
            group = sorted(
                (r for r in records if r.metric_name == metric and r.reseed == reseed),
                key=lambda r: r.stream_len,
            )
            if not group:
                continue
            style = "-" if reseed else "--"
            ax.errorbar([r.stream_len for r in group], [r.mean for r in group],
                        yerr=[r.std for r in group], marker="o", capsize=3,
                        linestyle=style,
                        label=f"{metric}, reseed {'on' if reseed else 'off'}")
    ax.set_xscale("log")
    ax.set_xlabel("stream length L")
    ax.set_ylabel("rank")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = out_dir / "metrics_vs_length.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return [path]


def _rank_bars(records, out_dir) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    labels = [f"{r.engine[:5]} {r.metric_name}" for r in records]
    ax.bar(range(len(records)), [r.mean for r in records],
           yerr=[r.std for r in records], capsize=3)
    ax.set_xticks(range(len(records)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("rank")
    fig.tight_layout()
    path = out_dir / "metrics_summary.png"
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return [path]
