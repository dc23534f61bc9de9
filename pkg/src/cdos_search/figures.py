"""Matplotlib renderings of the CSV datasets.

The CSV exports stay the canonical outputs; these figures are companions for
quick inspection. Rendering is headless (Agg) and always writes to a file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .problem import PartitionSchedule, ProblemInstance, empirical_cdos, ideal_cdos
from .search import grover_success_probability


def render_cdos_figure(instance: ProblemInstance, schedule: PartitionSchedule, out_path) -> None:
    """Realized vs ideal cumulative density with the partition thresholds."""
    density = empirical_cdos(instance)
    n = instance.n_states
    grid = np.linspace(0.0, float(density.sorted_costs[-1]) * 1.05, 512)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.step(
        density.sorted_costs,
        np.arange(1, n + 1),
        where="post",
        label="realized",
        lw=1.2,
    )
    ax.plot(grid, ideal_cdos(grid, n), "--", label="ideal", lw=1.2)
    for i, (c, size) in enumerate(zip(schedule.thresholds, schedule.sizes), start=1):
        ax.axvline(float(c), color="gray", lw=0.8, ls=":")
        ax.annotate(f"$c_{{{i}}}$", (float(c), float(size)), textcoords="offset points",
                    xytext=(4, 4), fontsize=9)
    ax.set_xlabel("cost c")
    ax.set_ylabel(r"cumulative density $\nu(c)$")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_trace_figure(states, out_path) -> None:
    """Amplitude modulus by basis index, one panel per step."""
    n_steps = len(states)
    fig, axes = plt.subplots(
        n_steps, 1, figsize=(6.0, 1.6 * n_steps), sharex=True, squeeze=False
    )
    for step, (ax, state) in enumerate(zip(axes[:, 0], states)):
        mods = np.abs(state)
        markerline, stemlines, _ = ax.stem(np.arange(len(state)), mods)
        plt.setp(markerline, markersize=2.5)
        plt.setp(stemlines, linewidth=0.8)
        ax.set_ylabel(f"step {step}", fontsize=9)
        ax.set_ylim(0.0, 1.1)
    axes[-1, 0].set_xlabel("basis index")
    fig.suptitle("amplitude modulus per step")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_robustness_figure(successes, out_path) -> None:
    """Histogram of per-trial success probabilities."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(np.asarray(successes), bins=20, range=(0.0, 1.0), edgecolor="black", lw=0.5)
    ax.set_xlabel("success probability")
    ax.set_ylabel("trials")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_grover_figure(n_states: int, n_targets: int, max_iterations: int, out_path) -> None:
    """Closed-form success probability against the iteration count."""
    ms = np.arange(0, max_iterations + 1)
    probs = [grover_success_probability(n_states, n_targets, int(m)) for m in ms]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ms, probs, "o-", lw=1.2, markersize=4)
    ax.set_xlabel("iterations")
    ax.set_ylabel("success probability")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"N={n_states}, T={n_targets}")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
