"""Factor unitaries into two-level rotations plus diagonal phases.

Triangularization in the style of Reck et al.: the matrix is reduced to a
diagonal of unit-modulus phases by two-level rotations applied on the left,
working column by column from the last column and nulling entries upward.
The conjugated rotations, multiplied back in order and followed by the
diagonal, reconstruct the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .engine import DenseOperator, unitarity_defect

DEFAULT_TOL = 1e-10

_BLOCK_TOL = 1e-12


@dataclass(frozen=True)
class TwoLevelFactor:
    """A unitary differing from the identity only on the (p, q) plane."""

    p: int
    q: int
    block: np.ndarray

    def __post_init__(self) -> None:
        if not (0 <= self.p < self.q):
            raise ValueError(f"need 0 <= p < q, got p={self.p}, q={self.q}")
        block = np.array(self.block, dtype=complex)
        if block.shape != (2, 2):
            raise ValueError(f"block must be 2x2, got shape {block.shape}")
        if unitarity_defect(block) > _BLOCK_TOL:
            raise ValueError("factor block is not unitary")
        block.setflags(write=False)
        object.__setattr__(self, "block", block)

    def embed(self, dim: int) -> DenseOperator:
        """The factor as an explicit dim x dim matrix."""
        if self.q >= dim:
            raise ValueError(f"factor indices ({self.p}, {self.q}) exceed dim {dim}")
        out = np.eye(dim, dtype=complex)
        out[self.p, self.p] = self.block[0, 0]
        out[self.p, self.q] = self.block[0, 1]
        out[self.q, self.p] = self.block[1, 0]
        out[self.q, self.q] = self.block[1, 1]
        return out


@dataclass(frozen=True)
class Factorization:
    """Ordered two-level factors and the trailing diagonal of phases."""

    factors: tuple[TwoLevelFactor, ...]
    diagonal: np.ndarray

    def __post_init__(self) -> None:
        diag = np.array(self.diagonal, dtype=complex)
        if diag.ndim != 1 or diag.size == 0:
            raise ValueError("diagonal must be a nonempty 1-d array")
        if np.max(np.abs(np.abs(diag) - 1.0)) > _BLOCK_TOL:
            raise ValueError("diagonal entries must have unit modulus")
        diag.setflags(write=False)
        object.__setattr__(self, "diagonal", diag)
        object.__setattr__(self, "factors", tuple(self.factors))


def reck_factorize(op: DenseOperator, tol: float = DEFAULT_TOL) -> Factorization:
    """Factor a unitary into two-level rotations and a diagonal of phases.

    The product of the returned factors (in order) times the diagonal
    reconstructs ``op`` within 10 * tol elementwise. At most n(n-1)/2 factors
    are emitted; entries already below tol/10 are skipped, so structured
    matrices factor sparsely and the identity yields no factors at all.
    """
    u = np.array(op, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"operator must be square, got shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"operator is not unitary within {tol:g} (defect {defect:.3e})")
    n = u.shape[0]
    skip = tol / 10.0
    rotations: list[tuple[int, int, np.ndarray]] = []
    for col in range(n - 1, 0, -1):
        for row in range(col - 1, -1, -1):
            a = u[row, col]
            if abs(a) <= skip:
                continue
            b = u[col, col]
            h = math.hypot(abs(a), abs(b))
            g = np.array([[b, -a], [np.conj(a), np.conj(b)]], dtype=complex) / h
            u[[row, col], :] = g @ u[[row, col], :]
            rotations.append((row, col, g))
    diag = np.diagonal(u).copy()
    diag /= np.abs(diag)
    factors = tuple(TwoLevelFactor(p, q, g.conj().T) for p, q, g in rotations)
    return Factorization(factors=factors, diagonal=diag)


def reconstruct(factorization: Factorization, dim: int) -> DenseOperator:
    """Multiply the stored factors back together, in order, then the diagonal."""
    if factorization.diagonal.size != dim:
        raise ValueError(
            f"diagonal has {factorization.diagonal.size} entries, expected {dim}"
        )
    out = np.eye(dim, dtype=complex)
    for f in factorization.factors:
        if f.q >= dim:
            raise ValueError(f"factor indices ({f.p}, {f.q}) exceed dim {dim}")
        out[:, [f.p, f.q]] = out[:, [f.p, f.q]] @ f.block
    return out * factorization.diagonal
