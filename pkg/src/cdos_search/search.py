"""Top-level searches: the structured M-step walk, the Grover baseline, and
the phase-matched deterministic iterate for good/bad ratios away from 1/4."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import (
    NestingError,
    OracleMask,
    StateVector,
    apply_grover_iterate,
    apply_step_unitary,
    full_mask,
    oracle_mask,
    phase_factor,
    uniform_state,
)
from .problem import PartitionSchedule, ProblemInstance, target_sizes

# Amplitudes above this count toward a step's support; well above accumulated
# roundoff, well below the smallest surviving modulus at practical depths.
SUPPORT_EPSILON = 1e-9


class InexactScheduleError(ValueError):
    """The schedule's sublevel counts are not exactly 4**(M-i)."""


@dataclass(frozen=True)
class StepReport:
    step_index: int
    support_size: int
    mass_on_good: float
    max_amp_index: int


@dataclass(frozen=True)
class SearchResult:
    final_state: StateVector
    reports: tuple[StepReport, ...]
    winner_index: int
    success_probability: float


@dataclass(frozen=True)
class DeterministicIterateParams:
    """Phase-matched iterate parameters for a good/bad ratio t in (0, 1)."""

    beta: float
    j_rounds: int
    phi: float


def brute_force_argmin(instance: ProblemInstance) -> int:
    """Classical linear scan for the minimum cost, the verification oracle."""
    return int(np.argmin(instance.costs))


def schedule_masks(instance: ProblemInstance, schedule: PartitionSchedule) -> list[OracleMask]:
    """Oracle masks for the step sequence: all-ones first, then one per threshold."""
    masks = [full_mask(instance.n_states)]
    masks.extend(oracle_mask(instance, c) for c in schedule.thresholds)
    return masks


def _validated_masks(instance: ProblemInstance, schedule: PartitionSchedule) -> list[OracleMask]:
    if schedule.m_levels != instance.m_levels:
        raise ValueError("schedule and instance disagree on the level count")
    masks = schedule_masks(instance, schedule)
    expected = target_sizes(instance.m_levels)
    for mask, want in zip(masks[1:], expected):
        if mask.cardinality != want:
            raise InexactScheduleError(
                f"sublevel count {mask.cardinality} != {want}; exact counts are "
                "required here (run the robustness module's deterministic mode "
                "for approximate schedules)"
            )
    return masks


def _report(step: int, state: StateVector, good: OracleMask) -> StepReport:
    amps = np.abs(state)
    return StepReport(
        step_index=step,
        support_size=int(np.count_nonzero(amps > SUPPORT_EPSILON)),
        mass_on_good=float(np.sum(amps[good.bits] ** 2)),
        max_amp_index=int(np.argmax(amps)),
    )


def run_structured_search(instance: ProblemInstance, schedule: PartitionSchedule) -> SearchResult:
    """Run the M-step structured search on an exact schedule.

    Starts from the uniform superposition and applies one step unitary per
    threshold. With exact counts every step quarters the support and doubles
    the surviving amplitude, ending with all probability on the minimum-cost
    state.
    """
    masks = _validated_masks(instance, schedule)
    state = uniform_state(instance.n_states)
    reports = []
    for i in range(1, len(masks)):
        state = apply_step_unitary(state, masks[i - 1], masks[i])
        reports.append(_report(i, state, masks[i]))
    winner = int(np.argmax(np.abs(state)))
    best = brute_force_argmin(instance)
    return SearchResult(
        final_state=state,
        reports=tuple(reports),
        winner_index=winner,
        success_probability=float(abs(state[best]) ** 2),
    )


def structured_search_states(
    instance: ProblemInstance, schedule: PartitionSchedule
) -> list[StateVector]:
    """Per-step state trajectory [psi_0, ..., psi_M] for tracing and plots."""
    masks = _validated_masks(instance, schedule)
    states = [uniform_state(instance.n_states)]
    for i in range(1, len(masks)):
        states.append(apply_step_unitary(states[-1], masks[i - 1], masks[i]))
    return states


def grover_iteration_count(n_states: int, n_targets: int) -> int:
    """floor((pi/4) sqrt(N/T)), the near-optimal iterate count."""
    return int(math.floor((math.pi / 4.0) * math.sqrt(n_states / n_targets)))


def grover_success_probability(n_states: int, n_targets: int, iterations: int) -> float:
    """Closed form sin^2((2m+1) asin(sqrt(T/N))) for m iterations."""
    theta = math.asin(math.sqrt(n_targets / n_states))
    return math.sin((2 * iterations + 1) * theta) ** 2


def run_multitarget_grover(
    n_states: int, mask: OracleMask, iterations: int | None = None
) -> float:
    """Simulate plain Grover search and return the mass on the masked states.

    ``iterations=None`` uses grover_iteration_count. The result matches
    grover_success_probability to near machine precision.
    """
    if len(mask) != n_states:
        raise ValueError("mask length must equal n_states")
    n_targets = mask.cardinality
    if n_targets == 0:
        raise ValueError("no target states: the oracle marks nothing")
    if iterations is None:
        iterations = grover_iteration_count(n_states, n_targets)
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    state = np.full(n_states, 1.0 / math.sqrt(n_states), dtype=complex)
    for _ in range(iterations):
        state = apply_grover_iterate(state, mask)
    return float(np.sum(np.abs(state[mask.bits]) ** 2))


def plan_deterministic_iterate(t_ratio: float) -> DeterministicIterateParams:
    """Choose rounds and phase so amplification at ratio t succeeds exactly.

    With beta = asin(sqrt(t)), J = ceil((pi/2 - beta) / (2 beta)) rounds of
    the usual iterate overshoot; running J + 1 rounds with both phases set to
    phi = 2 asin(sin(pi / (4J + 6)) / sin(beta)) lands exactly on the good
    subspace. The arcsine argument is <= 1 by the choice of J; if roundoff at
    a J boundary pushes it above 1, J is incremented (always valid).
    """
    if not 0.0 < t_ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {t_ratio}")
    beta = math.asin(math.sqrt(t_ratio))
    j_full = math.ceil((math.pi / 2.0 - beta) / (2.0 * beta))
    arg = math.sin(math.pi / (4.0 * j_full + 6.0)) / math.sin(beta)
    if arg > 1.0:
        j_full += 1
        arg = math.sin(math.pi / (4.0 * j_full + 6.0)) / math.sin(beta)
    phi = 2.0 * math.asin(arg)
    return DeterministicIterateParams(beta=beta, j_rounds=j_full + 1, phi=phi)


def apply_generalized_iterate(
    state: StateVector, prev_mask: OracleMask, good_mask: OracleMask, phase: float
) -> StateVector:
    """One phase-matched round on the active subspace.

    Applies the phase oracle on the good set, then a phase reflection about
    the uniform direction of the previous mask, then a sign flip of the
    active block. At phase = pi this reproduces apply_step_unitary exactly;
    amplitudes outside the previous mask are returned bit-identical.
    """
    if not (len(state) == len(prev_mask) == len(good_mask)):
        raise ValueError("state and masks must have equal lengths")
    t_prev = prev_mask.cardinality
    if t_prev == 0:
        raise ValueError("previous mask is empty")
    if not good_mask.is_subset_of(prev_mask):
        raise NestingError("good mask must be nested inside the previous mask")
    w = phase_factor(phase)
    out = np.array(state, dtype=complex)
    a = out[prev_mask.bits]
    a = np.where(good_mask.bits[prev_mask.bits], w * a, a)
    shift = (w - 1.0) * (np.sum(a) / t_prev)
    out[prev_mask.bits] = -(a + shift)
    return out


def apply_deterministic_amplify(
    state: StateVector, prev_mask: OracleMask, good_mask: OracleMask
) -> StateVector:
    """Concentrate all active-subspace mass onto the good set with certainty.

    Plans the phase-matched iterate for t = T_good / T_prev and applies it
    j_rounds times. Requires a strict nesting (0 < t < 1); amplitudes outside
    the previous mask are untouched.
    """
    t_prev = prev_mask.cardinality
    t_good = good_mask.cardinality
    if t_good == 0:
        raise ValueError("no target states: the good mask is empty")
    if not good_mask.is_subset_of(prev_mask):
        raise NestingError("good mask must be nested inside the previous mask")
    if t_good == t_prev:
        raise ValueError("good set equals the active set (ratio 1); nothing to amplify")
    params = plan_deterministic_iterate(t_good / t_prev)
    out = state
    for _ in range(params.j_rounds):
        out = apply_generalized_iterate(out, prev_mask, good_mask, params.phi)
    return out
