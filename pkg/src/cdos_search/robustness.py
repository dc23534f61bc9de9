"""Monte Carlo study of search success under density-of-states error.

Each trial draws a fresh instance, perturbs the exact partition by random
integer size offsets, and measures the probability of ending on the true
minimum. Plain mode runs the ordinary step unitaries on the perturbed
schedule; deterministic mode runs the phase-matched iterate with exact set
cardinalities and recovers certainty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import full_mask, oracle_mask, uniform_state
from .problem import (
    PartitionSchedule,
    PerturbationError,
    ProblemInstance,
    build_partition,
    generate_rayleigh_instance,
    perturb_partition,
)
from .search import apply_deterministic_amplify, apply_step_unitary, brute_force_argmin

MODES = ("plain", "deterministic")

# Infeasible perturbation draws are retried with fresh sub-seeds up to this cap.
MAX_REDRAWS = 100

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class RobustnessConfig:
    m_levels: int
    max_offset: int
    trials: int
    mode: str = "plain"
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.max_offset < 0:
            raise ValueError(f"max_offset must be >= 0, got {self.max_offset}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class RobustnessSummary:
    successes: np.ndarray
    offsets: tuple[tuple[int, ...], ...]
    redraws: int

    @property
    def mean(self) -> float:
        return float(np.mean(self.successes))

    @property
    def min(self) -> float:
        return float(np.min(self.successes))

    @property
    def frac_ge_99(self) -> float:
        return float(np.mean(self.successes >= 0.99))


def _trial_seeds(base_seed: int, trial: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=(base_seed & _U64, trial))
    return ss.generate_state(2 + MAX_REDRAWS, np.uint64)


def _run_trial(
    instance: ProblemInstance,
    exact: PartitionSchedule,
    perturbed: PartitionSchedule,
    mode: str,
) -> float:
    n = instance.n_states
    masks = [full_mask(n)]
    masks.extend(oracle_mask(instance, c) for c in perturbed.thresholds)
    if mode == "deterministic":
        # Exact counting makes the final threshold correctable to the true
        # minimal sublevel set; without that the walk can only certify the
        # perturbed final set, not the optimum.
        masks[-1] = oracle_mask(instance, exact.thresholds[-1])
    state = uniform_state(n)
    for prev, good in zip(masks, masks[1:]):
        if mode == "plain":
            state = apply_step_unitary(state, prev, good)
        else:
            state = apply_deterministic_amplify(state, prev, good)
    return float(abs(state[brute_force_argmin(instance)]) ** 2)


def run_robustness(config: RobustnessConfig) -> RobustnessSummary:
    """Run the configured trials; deterministic for a fixed config.

    Trial seeds are pure functions of (base_seed, trial index), so trials are
    order-independent and identical configs give bitwise-identical summaries.
    """
    successes = np.empty(config.trials, dtype=np.float64)
    offsets: list[tuple[int, ...]] = []
    redraws = 0
    for trial in range(config.trials):
        seeds = _trial_seeds(config.base_seed, trial)
        instance = generate_rayleigh_instance(config.m_levels, int(seeds[0]))
        exact = build_partition(instance)
        perturbed = None
        for attempt in range(MAX_REDRAWS):
            try:
                perturbed = perturb_partition(
                    exact, instance, config.max_offset, int(seeds[1 + attempt])
                )
                break
            except PerturbationError:
                redraws += 1
        if perturbed is None:
            raise ValueError(
                f"no feasible perturbation for trial {trial} after {MAX_REDRAWS} "
                f"redraws; lower max_offset (= {config.max_offset})"
            )
        successes[trial] = _run_trial(instance, exact, perturbed, config.mode)
        offsets.append(tuple(int(d) for d in perturbed.sizes - exact.sizes))
    successes.setflags(write=False)
    return RobustnessSummary(successes=successes, offsets=tuple(offsets), redraws=redraws)
