"""Benchmark report rendering: JSON, CSV, a console table, and figures."""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .bench import BenchReport


def report_to_dict(report: BenchReport) -> dict:
    out = {"note": report.note, "measurements": [], "fits": {}}
    for m in report.measurements:
        out["measurements"].append(
            {
                "generator": m.scenario.generator,
                "n": m.scenario.n,
                "target_degree": m.scenario.target_degree,
                "seed": m.scenario.seed,
                "achieved_degree": m.achieved_degree,
                "count_1hop": m.count_1hop,
                "count_2hop": m.count_2hop,
                "time_1hop_s": m.time_1hop,
                "time_2hop_s": m.time_2hop,
                "time_ratio": (
                    m.time_ratio if m.time_1hop == m.time_1hop else None
                ),
            }
        )
    for key, pair in report.fits.items():
        out["fits"][key] = {
            name: {"slope": fit.slope, "stderr": fit.stderr, "ci95": fit.ci95}
            for name, fit in pair.items()
        }
    return out


def write_json(report: BenchReport, path):
    with open(path, "w") as fh:
        json.dump(report_to_dict(report), fh, indent=1)


def write_csv(report: BenchReport, path):
    """Raw per-repetition timing samples for external plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["generator", "n", "target_degree", "method", "repetition", "seconds"]
        )
        for m in report.measurements:
            for rep, s in enumerate(m.samples_1hop):
                writer.writerow(
                    [m.scenario.generator, m.scenario.n,
                     m.scenario.target_degree, "1hop", rep, f"{s:.9f}"]
                )
            for rep, s in enumerate(m.samples_2hop):
                writer.writerow(
                    [m.scenario.generator, m.scenario.n,
                     m.scenario.target_degree, "2hop", rep, f"{s:.9f}"]
                )


def render_table(report: BenchReport) -> str:
    lines = [report.note, ""]
    header = (
        f"{'generator':<11} {'n':>7} {'k_tgt':>6} {'k_ach':>7} "
        f"{'count 1hop':>11} {'count 2hop':>11} {'t1hop[ms]':>10} "
        f"{'t2hop[ms]':>10} {'ratio':>7}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for m in report.measurements:
        timed = m.time_1hop == m.time_1hop  # NaN check
        lines.append(
            f"{m.scenario.generator:<11} {m.scenario.n:>7} "
            f"{m.scenario.target_degree:>6.1f} {m.achieved_degree:>7.2f} "
            f"{m.count_1hop:>11} {m.count_2hop:>11} "
            + (f"{m.time_1hop * 1e3:>10.3f} {m.time_2hop * 1e3:>10.3f} "
               f"{m.time_ratio:>7.2f}" if timed else f"{'-':>10} {'-':>10} {'-':>7}")
        )
    if report.fits:
        lines.append("")
        lines.append("fitted count exponents (log-log least squares, 95% CI):")
        for key, pair in report.fits.items():
            for name, fit in pair.items():
                lo, hi = fit.ci95
                lines.append(
                    f"  {key:<22} {name:<8} slope {fit.slope:6.3f} "
                    f"[{lo:6.3f}, {hi:6.3f}]"
                )
    return "\n".join(lines)


def plot_scaling(report: BenchReport, path):
    """Log-log figure: counts (and timings when present) for both methods."""
    timed = any(m.time_1hop == m.time_1hop for m in report.measurements)
    fig, axes = plt.subplots(1, 2 if timed else 1, figsize=(10 if timed else 5, 4))
    if not timed:
        axes = [axes]
    ax = axes[0]
    ks = [m.achieved_degree for m in report.measurements]
    ax.loglog(ks, [m.count_1hop for m in report.measurements], "o-", label="1-hop tuples")
    ax.loglog(ks, [m.count_2hop for m in report.measurements], "s-", label="2-hop triplets")
    ax.set_xlabel("mean degree k")
    ax.set_ylabel("count")
    ax.legend()
    ax.set_title("geometry work items")
    if timed:
        ax = axes[1]
        ax.loglog(ks, [m.time_1hop for m in report.measurements], "o-", label="1-hop")
        ax.loglog(ks, [m.time_2hop for m in report.measurements], "s-", label="2-hop")
        ax.set_xlabel("mean degree k")
        ax.set_ylabel("median kernel time [s]")
        ax.legend()
        ax.set_title("kernel wall time")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
