"""Cost instances, the cumulative density of states, and partition schedules."""

from __future__ import annotations

import operator
from dataclasses import dataclass

import numpy as np

# 4**32 states no longer fit a signed 64-bit index.
MAX_M_LEVELS = 31


class SizeError(ValueError):
    """Requested level count is zero, negative, or too large to index."""


class TieError(ValueError):
    """Duplicate costs make an exact sublevel-set count impossible."""


class PerturbationError(ValueError):
    """Drawn size offsets cannot produce a strictly nested schedule."""


def is_power_of_four(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0 and (n.bit_length() - 1) % 2 == 0


def _validate_m_levels(m_levels: int) -> int:
    try:
        m = operator.index(m_levels)
    except TypeError as exc:
        raise SizeError(f"m_levels must be an integer, got {m_levels!r}") from exc
    if m < 1:
        raise SizeError(f"m_levels must be >= 1, got {m}")
    if m > MAX_M_LEVELS:
        raise SizeError(f"m_levels={m} overflows a 64-bit state index (max {MAX_M_LEVELS})")
    return m


def _break_ties(costs: np.ndarray) -> np.ndarray:
    """Nudge bitwise-equal costs apart (later index upward) until all distinct."""
    if np.unique(costs).size == costs.size:
        return costs
    costs = costs.copy()
    for _ in range(costs.size + 64):
        order = np.lexsort((np.arange(costs.size), costs))
        ranked = costs[order]
        dup = ranked[1:] == ranked[:-1]
        if not dup.any():
            return costs
        bump = order[1:][dup]
        costs[bump] = np.nextafter(costs[bump], np.inf)
        if not np.all(np.isfinite(costs)):
            raise TieError("cannot separate duplicate costs without overflowing")
    raise TieError("cannot separate duplicate costs")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ProblemInstance:
    """A combinatorial cost instance over N = 4**m_levels states.

    Costs are finite and pairwise distinct. Bitwise-equal entries are nudged
    apart at construction (smallest representable increment, applied to the
    later index) because the search relies on exact sublevel-set counts.
    """

    m_levels: int
    costs: np.ndarray

    def __post_init__(self) -> None:
        m = _validate_m_levels(self.m_levels)
        object.__setattr__(self, "m_levels", m)
        costs = np.array(self.costs, dtype=np.float64)
        n = 4**m
        if costs.shape != (n,):
            raise ValueError(
                f"expected {n} costs for m_levels={m}, got shape {costs.shape}"
            )
        if not np.all(np.isfinite(costs)):
            raise ValueError("costs must all be finite")
        object.__setattr__(self, "costs", _readonly(_break_ties(costs)))

    @property
    def n_states(self) -> int:
        return 4**self.m_levels


@dataclass(frozen=True)
class CumulativeDensity:
    """Empirical cumulative density of states: nu(c) = #{j : cost_j <= c}."""

    sorted_costs: np.ndarray

    def __post_init__(self) -> None:
        s = np.array(self.sorted_costs, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("sorted_costs must be a nonempty 1-d array")
        if not np.all(np.diff(s) > 0):
            raise ValueError("sorted_costs must be strictly increasing")
        object.__setattr__(self, "sorted_costs", _readonly(s))

    @property
    def n_states(self) -> int:
        return self.sorted_costs.size

    def nu(self, c):
        """Count of costs <= c (inclusive), by binary search; scalar or array."""
        out = np.searchsorted(self.sorted_costs, c, side="right")
        return int(out) if np.ndim(c) == 0 else out


def target_sizes(m_levels: int) -> np.ndarray:
    """The exact sublevel ladder (4**(M-1), ..., 4, 1)."""
    m = _validate_m_levels(m_levels)
    return 4 ** np.arange(m - 1, -1, -1, dtype=np.int64)


@dataclass(frozen=True)
class PartitionSchedule:
    """Strictly decreasing thresholds c_1 > ... > c_M with realized set sizes.

    ``sizes[i]`` is the realized count of costs <= thresholds[i]. An exact
    schedule has sizes equal to ``target_sizes(M)``; perturbed schedules keep
    strict nesting but relax the counts.
    """

    thresholds: np.ndarray
    sizes: np.ndarray

    def __post_init__(self) -> None:
        th = np.array(self.thresholds, dtype=np.float64)
        sz = np.array(self.sizes, dtype=np.int64)
        if th.ndim != 1 or th.size == 0 or th.shape != sz.shape:
            raise ValueError("thresholds and sizes must be matching nonempty 1-d arrays")
        if not np.all(np.diff(th) < 0):
            raise ValueError("thresholds must be strictly decreasing")
        if not np.all(np.diff(sz) < 0):
            raise ValueError("sizes must be strictly decreasing")
        if sz[-1] < 1:
            raise ValueError("every sublevel set must be nonempty")
        object.__setattr__(self, "thresholds", _readonly(th))
        object.__setattr__(self, "sizes", _readonly(sz))

    @property
    def m_levels(self) -> int:
        return self.thresholds.size

    def is_exact(self) -> bool:
        return bool(np.array_equal(self.sizes, target_sizes(self.m_levels)))


def rayleigh_quantile(u):
    """Inverse CDF of the unit-scale Rayleigh law: c = sqrt(-2 ln(1 - u))."""
    return np.sqrt(-2.0 * np.log1p(-np.asarray(u, dtype=np.float64)))


def generate_rayleigh_instance(m_levels: int, seed: int) -> ProblemInstance:
    """Draw 4**m_levels costs from the unit-scale Rayleigh law.

    Sampling is by inverse transform of uniforms on [0, 1) from a PCG64
    stream, so an instance is reproducible from its seed alone.
    """
    m = _validate_m_levels(m_levels)
    rng = np.random.Generator(np.random.PCG64(seed))
    return ProblemInstance(m, rayleigh_quantile(rng.random(4**m)))


def empirical_cdos(instance: ProblemInstance) -> CumulativeDensity:
    """Cumulative density of states realized by an instance's costs."""
    return CumulativeDensity(np.sort(instance.costs))


def ideal_cdos(c, n_states: int):
    """Population cumulative density N * (1 - exp(-c**2 / 2)) for c >= 0."""
    c = np.asarray(c, dtype=np.float64)
    out = n_states * -np.expm1(-0.5 * c * c)
    return float(out) if out.ndim == 0 else out


def build_partition(instance: ProblemInstance) -> PartitionSchedule:
    """Thresholds at the 4**(M-i)-th smallest costs, so every count is exact."""
    s = np.sort(instance.costs)
    sizes = target_sizes(instance.m_levels)
    thresholds = s[sizes - 1]
    realized = np.searchsorted(s, thresholds, side="right")
    if not np.array_equal(realized, sizes):
        raise TieError("duplicate costs at a partition boundary break the exact counts")
    return PartitionSchedule(thresholds, sizes)


def perturb_partition(
    schedule: PartitionSchedule,
    instance: ProblemInstance,
    max_offset: int,
    seed: int,
) -> PartitionSchedule:
    """Shift thresholds so each realized size picks up a random integer offset.

    Sizes become ``schedule.sizes[i] + e_i`` with e_i uniform on
    [-max_offset, +max_offset] (the final size is clamped to stay >= 1).
    Draws that break strict nesting raise PerturbationError; callers are
    expected to redraw with a fresh seed. max_offset = 0 returns a schedule
    identical to the input.
    """
    if max_offset < 0:
        raise ValueError(f"max_offset must be >= 0, got {max_offset}")
    if schedule.m_levels != instance.m_levels:
        raise ValueError("schedule and instance disagree on the level count")
    rng = np.random.Generator(np.random.PCG64(seed))
    offsets = rng.integers(-max_offset, max_offset + 1, size=schedule.m_levels)
    sizes = schedule.sizes + offsets
    sizes[-1] = max(1, sizes[-1])
    if sizes[0] >= instance.n_states or np.any(sizes < 1) or np.any(np.diff(sizes) >= 0):
        raise PerturbationError(
            f"offsets {offsets.tolist()} do not leave a strictly nested schedule"
        )
    s = np.sort(instance.costs)
    return PartitionSchedule(s[sizes - 1], sizes)
