"""Figure rendering for sweep reports: accuracy and stage times vs sketch
size, written as PNG files alongside the CSV."""

import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

STAGES = ["sketch", "solve", "graph", "spectral"]


def _read_rows(csv_path):
    with open(csv_path) as f:
        return [r for r in csv.DictReader(f) if r["status"] == "ok"]


def render_sweep_figures(csv_path, out_dir):
    """Render accuracy_vs_n.png and time_vs_n.png from a sweep CSV.

    Returns the list of files written (empty if there are no ok rows)."""
    rows = _read_rows(csv_path)
    if not rows:
        return []
    by_n = defaultdict(list)
    for r in rows:
        by_n[int(r["n"])].append(r)
    ns = sorted(by_n)
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    accs = [[float(r["accuracy"]) for r in by_n[n] if r["accuracy"] != ""]
            for n in ns]
    if any(accs):
        for n, a in zip(ns, accs):
            ax.plot([n] * len(a), a, "o", color="tab:gray", ms=3, alpha=0.5)
        ax.plot(ns, [np.mean(a) if a else np.nan for a in accs],
                "o-", color="tab:blue", label="mean accuracy")
        ax.set_xlabel("sketch size n")
        ax.set_ylabel("clustering accuracy")
        ax.set_ylim(0, 1.05)
        ax.legend()
        fig.tight_layout()
        path = f"{out_dir}/accuracy_vs_n.png"
        fig.savefig(path, dpi=150)
        written.append(path)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for stage in STAGES:
        means = [np.mean([float(r[f"t_{stage}"]) for r in by_n[n]])
                 for n in ns]
        ax.plot(ns, means, "o-", label=stage)
    totals = [np.mean([sum(float(r[f"t_{s}"]) for s in STAGES)
                       for r in by_n[n]]) for n in ns]
    ax.plot(ns, totals, "k--", label="total")
    ax.set_xlabel("sketch size n")
    ax.set_ylabel("wall time (s)")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = f"{out_dir}/time_vs_n.png"
    fig.savefig(path, dpi=150)
    written.append(path)
    plt.close(fig)
    return written
