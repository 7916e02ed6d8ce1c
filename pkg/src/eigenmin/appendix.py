"""The linear system behind regularity of the SO(2n)/U(n) fibres.

Unknowns are ``w_k = (b, x_k)`` for an orthonormal frame ``x_1..x_2n``.
Entries of ``M_n`` are kept symbolic as ``sign * (u, x_index)`` so that the
column reduction to ``(u, x_1) I + S`` with ``S`` skew can be checked exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError
from .linalg import det


@dataclass(frozen=True)
class CoeffEntry:
    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ConstraintError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.index == 0):
            raise ConstraintError("index present iff sign is non-zero")

    @classmethod
    def from_code(cls, code: int) -> "CoeffEntry":
        """``+k``, ``-k`` or ``0`` as in ``+(u, x_k)``, ``-(u, x_k)``, zero."""
        return cls(int(np.sign(code)), abs(int(code)))

    @property
    def code(self) -> int:
        return self.sign * self.index


@dataclass(frozen=True)
class AppendixSystem:
    """``codes[i, j] = +-k`` encodes the entry ``+-(u, x_k)``; 0 is a zero entry."""

    n: int
    codes: np.ndarray
    u: np.ndarray | None = None
    frame: np.ndarray | None = None

    @property
    def M(self) -> list[list[CoeffEntry]]:
        return [[CoeffEntry.from_code(c) for c in row] for row in self.codes]

    @property
    def components(self) -> np.ndarray:
        """``(u, x_k)`` for k = 1..2n; rows of ``frame`` are the ``x_k``."""
        if self.u is None:
            raise ConstraintError("system has no numeric u")
        return self.frame @ self.u

    def realize(self, codes: np.ndarray | None = None) -> np.ndarray:
        codes = self.codes if codes is None else codes
        w = np.concatenate([[0.0], self.components])
        return np.sign(codes) * w[np.abs(codes)]


def system_codes(n: int) -> np.ndarray:
    """Coefficient pattern of ``M_n`` (with ``r = 1``)."""
    if n < 2:
        raise ConstraintError(f"appendix system needs n >= 2, got {n}")
    r = 1
    rows = []
    for s in range(2, n + 1):
        row = np.zeros(2 * n, dtype=int)
        # (u,x_r)(b,x_{n+s}) + (u,x_{n+r})(b,x_s) - (u,x_s)(b,x_{n+r}) - (u,x_{n+s})(b,x_r)
        row[n + s - 1] = r
        row[s - 1] = n + r
        row[n + r - 1] = -s
        row[r - 1] = -(n + s)
        rows.append(row)
        row = np.zeros(2 * n, dtype=int)
        # (u,x_r)(b,x_s) + (u,x_{n+s})(b,x_{n+r}) - (u,x_s)(b,x_r) - (u,x_{n+r})(b,x_{n+s})
        row[s - 1] = r
        row[n + r - 1] = n + s
        row[r - 1] = -s
        row[n + s - 1] = -(n + r)
        rows.append(row)
    rows.append(np.arange(1, 2 * n + 1))
    # negated Re(phi) equation: +(u,x_{n+k}) at column k, -(u,x_k) at column n+k
    last = np.zeros(2 * n, dtype=int)
    for k in range(1, n + 1):
        last[k - 1] = n + k
        last[n + k - 1] = -k
    rows.append(last)
    return np.array(rows)


def build_system(n: int, u=None, frame=None, tol: float = 1e-12) -> AppendixSystem:
    """``M_n`` for the frame ``x_k`` (rows of ``frame``, default the standard basis)."""
    codes = system_codes(n)
    if u is None:
        return AppendixSystem(n, codes)
    u = np.asarray(u, dtype=float)
    frame = np.eye(2 * n) if frame is None else np.asarray(frame, dtype=float)
    if u.shape != (2 * n,) or frame.shape != (2 * n, 2 * n):
        raise ConstraintError("u must have length 2n and frame shape (2n, 2n)")
    if np.max(np.abs(frame @ frame.T - np.eye(2 * n))) > 1e-12:
        raise ConstraintError("frame is not orthonormal")
    if abs(frame[0] @ u) <= tol * max(np.linalg.norm(u), 1.0):
        raise ConstraintError("(u, x_1) = 0: the reduction needs (u, x_1) != 0")
    return AppendixSystem(n, codes, u, frame)


def skew_reduce(sys: AppendixSystem) -> tuple[list[int], np.ndarray]:
    """Signed column permutation ``P`` with ``M P = (u,x_1) I + S``, ``S`` skew.

    ``P`` is returned as signed 1-based column numbers: entry ``j`` says new
    column ``j`` is ``sign * (old column |P[j]|)``.  ``S`` is the symbolic
    code matrix of the off-diagonal part.
    """
    codes = sys.codes
    N = codes.shape[0]
    perm = []
    for j in range(N):
        hits = np.flatnonzero(np.abs(codes[j]) == 1)
        if len(hits) != 1:
            raise ConstraintError(f"row {j + 1} carries (u,x_1) {len(hits)} times")
        c = hits[0]
        perm.append(int(np.sign(codes[j, c])) * int(c + 1))
    if sorted(abs(c) for c in perm) != list(range(1, N + 1)):
        raise ConstraintError("no column permutation puts (u,x_1) on the diagonal")
    reduced = apply_permutation(codes, perm)
    S = reduced.copy()
    np.fill_diagonal(S, 0)
    if not np.array_equal(S, -S.T):
        raise ConstraintError("reduced matrix is not (u,x_1) I + skew")
    return perm, S


def apply_permutation(codes: np.ndarray, perm) -> np.ndarray:
    cols = [np.sign(c) * codes[:, abs(c) - 1] for c in perm]
    return np.column_stack(cols)


def det_identities(sys: AppendixSystem) -> tuple[float, float, str]:
    """``|det M_n|`` and its predicted value.

    For n = 2 the prediction is ``|u|^4``, for n = 3 it is
    ``((u,x_1)^2 + (u,x_4)^2) |u|^4`` (``kind = "identity"``); otherwise the
    lower bound ``(u,x_1)^{2n}`` (``kind = "lower_bound"``), which holds
    because every eigenvalue of ``alpha I + S`` has real part ``alpha``.
    """
    w = sys.components
    det_abs = abs(det(sys.realize()))
    u2 = float(w @ w)
    if sys.n == 2:
        return det_abs, u2**2, "identity"
    if sys.n == 3:
        return det_abs, (w[0] ** 2 + w[3] ** 2) * u2**2, "identity"
    return det_abs, abs(w[0]) ** (2 * sys.n), "lower_bound"


# Reference tables in code form (+k is +(u,x_k)), n = 2 and 3.
REFERENCE_MATRICES = {
    "M2": [[-4, 3, -2, 1], [-2, 1, 4, -3], [1, 2, 3, 4], [3, 4, -1, -2]],
    "M2_reduced": [[1, 3, -4, 2], [-3, 1, -2, -4], [4, 2, 1, -3], [-2, 4, 3, 1]],
    "M3": [
        [-5, 4, 0, -2, 1, 0],
        [-2, 1, 0, 5, -4, 0],
        [-6, 0, 4, -3, 0, 1],
        [-3, 0, 1, 6, 0, -4],
        [1, 2, 3, 4, 5, 6],
        [4, 5, 6, -1, -2, -3],
    ],
    "M3_reduced": [
        [1, 4, 0, 0, -5, 2],
        [-4, 1, 0, 0, -2, -5],
        [0, 0, 1, 4, -6, 3],
        [0, 0, -4, 1, -3, -6],
        [5, 2, 6, 3, 1, -4],
        [-2, 5, -3, 6, 4, 1],
    ],
}


def reference_mismatches() -> dict[str, int]:
    """Number of entries where the built matrices differ from the reference tables."""
    out = {}
    for n in (2, 3):
        sys = build_system(n)
        perm, _ = skew_reduce(sys)
        built = {f"M{n}": sys.codes, f"M{n}_reduced": apply_permutation(sys.codes, perm)}
        for name, codes in built.items():
            out[name] = int(np.sum(codes != np.array(REFERENCE_MATRICES[name])))
    return out
