"""Dense complex matrix kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The canonical
generators use 1-based indices, so ``X(1, 2, n)`` is the matrix written
``X_12`` in the usual notation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConstraintError, SingularMatrixError

SQRT2 = np.sqrt(2.0)

GENERATOR_KINDS = ("E", "D", "X", "Y", "Drs", "J")


def cmat(entries, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Build a finite complex matrix, optionally from a flat row-major list."""
    M = np.array(entries, dtype=np.complex128)
    if rows is not None:
        cols = cols if cols is not None else M.size // rows
        if M.size != rows * cols:
            raise ConstraintError(f"expected {rows * cols} entries, got {M.size}")
        M = M.reshape(rows, cols)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ConstraintError(f"not a matrix: shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ConstraintError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class GeneratorId:
    """Names one canonical matrix, e.g. ``GeneratorId("Y", (1, 2), 3)``.

    ``J`` takes no indices and its ``size`` is the half-dimension, so
    ``GeneratorId("J", (), 2)`` is a 4x4 matrix.
    """

    kind: str
    indices: tuple[int, ...]
    size: int

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ConstraintError(f"unknown generator kind {self.kind!r}")
        if self.size < 1:
            raise ConstraintError("generator size must be positive")
        idx = self.indices
        if self.kind == "J":
            if idx:
                raise ConstraintError("J takes no indices")
        elif self.kind == "D":
            if len(idx) != 1 or not 1 <= idx[0] <= self.size:
                raise ConstraintError(f"D(t) needs 1 <= t <= {self.size}, got {idx}")
        elif self.kind == "E":
            if len(idx) != 2 or not all(1 <= i <= self.size for i in idx):
                raise ConstraintError(f"E(i,j) indices out of range: {idx}")
        else:
            if len(idx) != 2 or not 1 <= idx[0] < idx[1] <= self.size:
                raise ConstraintError(
                    f"{self.kind}(r,s) needs 1 <= r < s <= {self.size}, got {idx}"
                )


def _unit(i: int, j: int, n: int) -> np.ndarray:
    M = np.zeros((n, n), dtype=np.complex128)
    M[i - 1, j - 1] = 1.0
    return M


def generator(gid: GeneratorId) -> np.ndarray:
    n = gid.size
    if gid.kind == "E":
        return _unit(*gid.indices, n)
    if gid.kind == "D":
        t = gid.indices[0]
        return _unit(t, t, n)
    if gid.kind == "J":
        I = np.eye(n, dtype=np.complex128)
        Z = np.zeros((n, n), dtype=np.complex128)
        return np.block([[Z, I], [-I, Z]])
    r, s = gid.indices
    if gid.kind == "X":
        return (_unit(r, s, n) + _unit(s, r, n)) / SQRT2
    if gid.kind == "Y":
        return (_unit(r, s, n) - _unit(s, r, n)) / SQRT2
    return (_unit(r, r, n) - _unit(s, s, n)) / SQRT2  # Drs


# Shorthands used throughout the package.
def E(i, j, n):
    return generator(GeneratorId("E", (i, j), n))


def D(t, n):
    return generator(GeneratorId("D", (t,), n))


def X(r, s, n):
    return generator(GeneratorId("X", (r, s), n))


def Y(r, s, n):
    return generator(GeneratorId("Y", (r, s), n))


def Drs(r, s, n):
    return generator(GeneratorId("Drs", (r, s), n))


def J(n):
    return generator(GeneratorId("J", (), n))


def inner(Z: np.ndarray, W: np.ndarray) -> float:
    """The real inner product ``Re tr(Z conj(W)^t)``."""
    Z = np.asarray(Z)
    W = np.asarray(W)
    if Z.shape != W.shape:
        raise ConstraintError(f"shape mismatch {Z.shape} vs {W.shape}")
    return float(np.real(np.vdot(W, Z)))


def mat_exp(Z: np.ndarray) -> np.ndarray:
    Z = np.asarray(Z, dtype=np.complex128)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ConstraintError(f"mat_exp needs a square matrix, got {Z.shape}")
    # Al-Mohy/Higham scaling-and-squaring with degree-13 Pade approximant.
    return scipy.linalg.expm(Z)


def det(Z: np.ndarray) -> complex:
    Z = np.asarray(Z)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ConstraintError(f"det needs a square matrix, got {Z.shape}")
    return complex(np.linalg.det(Z))


def solve(A: np.ndarray, b: np.ndarray, cond_max: float = 1e12) -> np.ndarray:
    """Solve ``A x = b``, refusing systems whose condition number exceeds ``cond_max``."""
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise ConstraintError(f"incompatible shapes {A.shape} and {b.shape}")
    c = np.linalg.cond(A)
    if not np.isfinite(c) or c > cond_max:
        raise SingularMatrixError(f"condition number {c:.3g} exceeds {cond_max:.3g}")
    return np.linalg.solve(A, b)


def trace(Z: np.ndarray) -> complex:
    return complex(np.trace(Z))


def transpose(Z: np.ndarray) -> np.ndarray:
    return np.asarray(Z).T


def conj_transpose(Z: np.ndarray) -> np.ndarray:
    return np.asarray(Z).conj().T


def mul(*mats: np.ndarray) -> np.ndarray:
    return np.linalg.multi_dot(mats) if len(mats) > 2 else mats[0] @ mats[1]
