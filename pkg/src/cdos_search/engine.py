"""State vectors, oracle masks, and step unitaries (matrix-free and dense).

The matrix-free appliers are the production path; dense operators are built
literally from projectors for verification and are capped at DENSE_CAP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import ProblemInstance, SizeError, is_power_of_four

# Dense operators need N**2 memory; anything larger must use the matrix-free path.
DENSE_CAP = 1024

# A state vector is an ndarray of N complex amplitudes with unit norm; a dense
# operator is an N x N complex ndarray.
StateVector = np.ndarray
DenseOperator = np.ndarray


class NestingError(ValueError):
    """A step's good mask is not contained in the previous mask."""


@dataclass(frozen=True)
class OracleMask:
    """0/1 indicator of the basis states an oracle marks as good."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 1:
            raise ValueError("mask bits must be a 1-d array")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return self.bits.size

    @property
    def cardinality(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_subset_of(self, other: OracleMask) -> bool:
        return len(self) == len(other) and bool(np.all(other.bits[self.bits]))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)


def full_mask(n_states: int) -> OracleMask:
    return OracleMask(np.ones(n_states, dtype=bool))


def oracle_mask(instance: ProblemInstance, threshold: float) -> OracleMask:
    """Mark states with cost <= threshold (the step-function threshold oracle)."""
    return OracleMask(instance.costs <= threshold)


def uniform_state(n_states: int) -> StateVector:
    """The equal superposition with real amplitudes 1/2**M, N = 4**M."""
    if not is_power_of_four(n_states):
        raise SizeError(f"state length must be a power of 4, got {n_states}")
    m = (n_states.bit_length() - 1) // 2
    return np.full(n_states, 1.0 / 2**m, dtype=complex)


def state_norm(state: StateVector) -> float:
    return float(np.sqrt(np.sum(np.abs(state) ** 2)))


def phase_factor(phase: float) -> complex:
    # exp(i*pi) is applied as an exact -1 so the all-real pipeline stays real.
    if phase == math.pi:
        return -1.0 + 0.0j
    return complex(math.cos(phase), math.sin(phase))


def apply_phase_oracle(state: StateVector, mask: OracleMask, phase: float) -> StateVector:
    """Multiply amplitudes at masked indices by exp(i * phase)."""
    if len(state) != len(mask):
        raise ValueError(f"state length {len(state)} != mask length {len(mask)}")
    out = np.array(state, dtype=complex)
    out[mask.bits] *= phase_factor(phase)
    return out


def apply_step_unitary(
    state: StateVector, prev_mask: OracleMask, good_mask: OracleMask
) -> StateVector:
    """One structured-search step, matrix-free.

    Within the previous mask the state is phase-flipped on the good set and
    then reflected about its mean; amplitudes outside the previous mask are
    returned untouched (bit-identical). Cost is O(N).
    """
    if not (len(state) == len(prev_mask) == len(good_mask)):
        raise ValueError("state and masks must have equal lengths")
    t_prev = prev_mask.cardinality
    if t_prev == 0:
        raise ValueError("previous mask is empty; the step has no active subspace")
    if not good_mask.is_subset_of(prev_mask):
        raise NestingError("good mask must be nested inside the previous mask")
    a = state[prev_mask.bits]
    sigma = np.where(good_mask.bits[prev_mask.bits], -1.0, 1.0)
    flipped = sigma * a
    # np.sum reduces pairwise, which both bounds roundoff growth and fixes
    # the reduction tree for deterministic output.
    total = np.sum(flipped)
    out = np.array(state, dtype=complex)
    out[prev_mask.bits] = 2.0 * (total / t_prev) - flipped
    return out


def apply_grover_iterate(state: StateVector, mask: OracleMask) -> StateVector:
    """Oracle sign flip, then inversion about the mean, matrix-free."""
    if len(state) != len(mask):
        raise ValueError(f"state length {len(state)} != mask length {len(mask)}")
    out = np.array(state, dtype=complex)
    out[mask.bits] = -out[mask.bits]
    return 2.0 * (np.sum(out) / len(out)) - out


def _check_dense_size(n_states: int) -> None:
    if n_states > DENSE_CAP:
        raise SizeError(
            f"dense operators are capped at N={DENSE_CAP}; use the matrix-free path"
        )


def dense_step_unitary(
    prev_mask: OracleMask, good_mask: OracleMask, n_states: int
) -> DenseOperator:
    """The step unitary as an explicit matrix, for verification only.

    Built literally from the all-ones operator and the two mask projectors:
    diffusion restricted to the previous subspace, composed with the sign
    flip on the good set, plus identity on the complement.
    """
    _check_dense_size(n_states)
    if not (len(prev_mask) == len(good_mask) == n_states):
        raise ValueError("mask lengths must equal n_states")
    if not good_mask.is_subset_of(prev_mask):
        raise NestingError("good mask must be nested inside the previous mask")
    t_prev = prev_mask.cardinality
    if t_prev == 0:
        raise ValueError("previous mask is empty")
    eye = np.eye(n_states, dtype=complex)
    ones = np.ones((n_states, n_states), dtype=complex)
    f_prev = np.diag(prev_mask.bits.astype(complex))
    p_prev = f_prev @ ones @ f_prev
    diffusion = (2.0 / t_prev) * p_prev - eye
    flip = eye - 2.0 * np.diag(good_mask.bits.astype(complex))
    return f_prev @ diffusion @ flip @ f_prev + (eye - f_prev)


def dense_grover_iterate(mask: OracleMask, n_states: int) -> DenseOperator:
    """The Grover iterate (2 ones/N - I) composed with the oracle sign flip."""
    _check_dense_size(n_states)
    if len(mask) != n_states:
        raise ValueError("mask length must equal n_states")
    eye = np.eye(n_states, dtype=complex)
    ones = np.ones((n_states, n_states), dtype=complex)
    flip = eye - 2.0 * np.diag(mask.bits.astype(complex))
    return ((2.0 / n_states) * ones - eye) @ flip


def unitarity_defect(op: DenseOperator) -> float:
    """max |U^dag U - I|, zero for an exactly unitary matrix."""
    op = np.asarray(op)
    return float(np.max(np.abs(op.conj().T @ op - np.eye(op.shape[0]))))
