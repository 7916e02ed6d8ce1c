"""Compact matrix groups, their Lie algebras and the four symmetric spaces.

Group elements are complex matrices in the standard representations:
``SO(n)``, ``U(n)``, ``SU(n)`` act on ``C^n`` and ``Sp(n)`` is realised in
``C^{2n x 2n}`` by ``z + jw -> [[z, w], [-conj(w), conj(z)]]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConstraintError, MembershipError
from .linalg import SQRT2, D, Drs, J, X, Y, inner, mat_exp

FAMILIES = ("SO", "U", "SU", "Sp")
SPACES = ("SUSO", "SPU", "SOU", "SUSP")
SPACE_MIN_N = {"SUSO": 2, "SPU": 1, "SOU": 2, "SUSP": 2}


@dataclass(frozen=True)
class GroupSpec:
    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConstraintError(f"unknown group family {self.family!r}")
        if self.n < 1:
            raise ConstraintError("group parameter n must be positive")

    @property
    def ambient_dim(self) -> int:
        return 2 * self.n if self.family == "Sp" else self.n

    @property
    def dim(self) -> int:
        n = self.n
        return {"SO": n * (n - 1) // 2, "U": n * n, "SU": n * n - 1, "Sp": n * (2 * n + 1)}[
            self.family
        ]

    def __str__(self):
        return f"{self.family}({self.n})"


@dataclass(frozen=True)
class AlgebraBasis:
    """Ordered orthonormal basis, stored as an ``(m, N, N)`` complex array."""

    elements: np.ndarray
    label: str

    def __post_init__(self):
        self.elements.flags.writeable = False

    def __len__(self):
        return self.elements.shape[0]

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def count(self) -> int:
        return len(self)

    def _flat(self) -> np.ndarray:
        return self.elements.reshape(len(self), self.elements[0].size if len(self) else 0)

    def gram(self) -> np.ndarray:
        flat = self._flat()
        return np.real(flat.conj() @ flat.T)

    def combine(self, coeffs) -> np.ndarray:
        """The algebra element ``sum_i coeffs[i] * B_i``."""
        return np.tensordot(np.asarray(coeffs), self.elements, axes=1)

    def coordinates(self, Z: np.ndarray) -> np.ndarray:
        """Real coordinates of ``Z`` along the basis (orthogonal projection)."""
        if not len(self):
            return np.zeros(0)
        return np.real(self._flat().conj() @ np.asarray(Z).ravel())

    def mixed(self, Q: np.ndarray, label: str | None = None) -> "AlgebraBasis":
        """Re-mix by a real orthogonal matrix; the result spans the same subspace."""
        return AlgebraBasis(np.tensordot(Q, self.elements, axes=1), label or self.label + "*Q")

    def __add__(self, other: "AlgebraBasis") -> "AlgebraBasis":
        return AlgebraBasis(
            np.concatenate([self.elements, other.elements]), f"{self.label}+{other.label}"
        )


def _pairs(n):
    return [(r, s) for r in range(1, n + 1) for s in range(r + 1, n + 1)]


def _block(a, b, c, d):
    return np.block([[a, b], [c, d]])


def orthonormalize(generators, label: str, tol: float = 1e-10) -> AlgebraBasis:
    """Rank-revealing modified Gram-Schmidt under ``inner``.

    Generators that fall inside the span of their predecessors (norm below
    ``tol`` after projection) are dropped; independent ones are kept in
    order, so an already orthonormal prefix comes through unchanged.
    """
    kept: list[np.ndarray] = []
    for G in generators:
        V = np.array(G, dtype=np.complex128)
        norm0 = np.sqrt(inner(V, V))
        if norm0 == 0:
            continue
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for B in kept:
                V = V - inner(V, B) * B
        nv = np.sqrt(inner(V, V))
        if nv > tol * max(norm0, 1.0):
            kept.append(V / nv)
    shape = np.asarray(generators[0]).shape
    arr = np.array(kept) if kept else np.zeros((0,) + shape, dtype=np.complex128)
    return AlgebraBasis(arr, label)


def _su_diagonals(n):
    E = 1j * np.eye(n) / np.sqrt(n)
    diag = orthonormalize([E] + [1j * D(t, n) for t in range(1, n + 1)], "diag")
    return list(diag.elements[1:])


@lru_cache(maxsize=None)
def algebra_basis(G: GroupSpec) -> AlgebraBasis:
    n = G.n
    pairs = _pairs(n)
    if G.family == "SO":
        return AlgebraBasis(_stack([Y(r, s, n) for r, s in pairs], n), f"so({n})")
    if G.family == "U":
        elems = (
            [Y(r, s, n) for r, s in pairs]
            + [1j * X(r, s, n) for r, s in pairs]
            + [1j * D(t, n) for t in range(1, n + 1)]
        )
        return AlgebraBasis(_stack(elems, n), f"u({n})")
    if G.family == "SU":
        elems = [Y(r, s, n) for r, s in pairs] + [1j * X(r, s, n) for r, s in pairs]
        return AlgebraBasis(_stack(elems + _su_diagonals(n), n), f"su({n})")
    # Sp(n) inside C^{2n x 2n}
    z = np.zeros((n, n), dtype=np.complex128)
    elems = []
    for r, s in pairs:
        y, x = Y(r, s, n), X(r, s, n)
        elems += [
            _block(y, z, z, y) / SQRT2,
            _block(1j * x, z, z, -1j * x) / SQRT2,
            _block(z, 1j * x, 1j * x, z) / SQRT2,
            _block(z, x, -x, z) / SQRT2,
        ]
    for t in range(1, n + 1):
        d = D(t, n)
        elems += [
            _block(1j * d, z, z, -1j * d) / SQRT2,
            _block(z, 1j * d, 1j * d, z) / SQRT2,
            _block(z, d, -d, z) / SQRT2,
        ]
    return AlgebraBasis(np.array(elems), f"sp({n})")


def _stack(elems, n):
    if not elems:
        return np.zeros((0, n, n), dtype=np.complex128)
    return np.array(elems, dtype=np.complex128)


def membership_residual(G: GroupSpec, M: np.ndarray) -> float:
    """Largest violation of the defining relations of ``G``; zero iff ``M`` is in ``G``."""
    M = np.asarray(M, dtype=np.complex128)
    N = G.ambient_dim
    if M.shape != (N, N):
        raise ConstraintError(f"{G} elements are {N}x{N}, got {M.shape}")
    unitary = np.linalg.norm(M @ M.conj().T - np.eye(N))
    res = [unitary]
    if G.family == "SO":
        res += [np.linalg.norm(M.imag), abs(np.linalg.det(M) - 1)]
    elif G.family == "SU":
        res.append(abs(np.linalg.det(M) - 1))
    elif G.family == "Sp":
        Jn = J(G.n)
        res.append(np.linalg.norm(Jn @ M - M.conj() @ Jn))
    return float(max(res))


def random_element(G: GroupSpec, seed, scale: float = 1.0) -> np.ndarray:
    """``exp`` of a Gaussian algebra element with coefficient std ``scale``."""
    if scale < 0:
        raise ConstraintError("scale must be non-negative")
    basis = algebra_basis(G)
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(0.0, 1.0, size=len(basis)) * scale
    return mat_exp(basis.combine(coeffs))


def embed_U_in_SO2n(z: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``x + iy -> [[x, -y], [y, x]]``."""
    z = np.asarray(z, dtype=np.complex128)
    n = z.shape[0]
    r = membership_residual(GroupSpec("U", n), z)
    if r > tol:
        raise MembershipError(f"not in U({n}): residual {r:.3e}")
    x, y = z.real, z.imag
    return _block(x, -y, y, x).astype(np.complex128)


def embed_U_in_Spn(z: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``x + iy -> [[x, y], [-y, x]]``: the real points of ``Sp(n)``."""
    z = np.asarray(z, dtype=np.complex128)
    n = z.shape[0]
    r = membership_residual(GroupSpec("U", n), z)
    if r > tol:
        raise MembershipError(f"not in U({n}): residual {r:.3e}")
    x, y = z.real, z.imag
    return _block(x, y, -y, x).astype(np.complex128)


def embed_Sp_in_SU2n(z: np.ndarray, w: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Quaternionic matrix ``q = z + jw`` to ``[[z, -conj(w)], [w, conj(z)]]``.

    With ``j c = conj(c) j`` this is multiplicative, and ``q`` is
    quaternionic-unitary exactly when its image is unitary.
    """
    z = np.asarray(z, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    n = z.shape[0]
    M = _block(z, -w.conj(), w, z.conj())
    r = np.linalg.norm(M @ M.conj().T - np.eye(2 * n))
    if r > tol:
        raise MembershipError(f"q = z + jw is not in Sp({n}): residual {r:.3e}")
    return M


def quaternion_blocks(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`embed_Sp_in_SU2n` on its image."""
    n = M.shape[0] // 2
    return M[:n, :n].copy(), M[n:, :n].copy()


def quaternion_product(q1, q2):
    """``(z1 + j w1)(z2 + j w2)`` as a pair of complex blocks."""
    z1, w1 = q1
    z2, w2 = q2
    return z1 @ z2 - w1.conj() @ w2, z1.conj() @ w2 + w1 @ z2


@dataclass(frozen=True)
class SymmetricSpaceModel:
    id: str
    n: int
    G: GroupSpec
    K: GroupSpec
    p_basis: AlgebraBasis
    k_basis: AlgebraBasis
    embed_K: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    @property
    def g_basis(self) -> AlgebraBasis:
        return algebra_basis(self.G)

    def random_point(self, seed, scale: float = 1.0) -> np.ndarray:
        return random_element(self.G, seed, scale)

    def random_k(self, seed, scale: float = 1.0) -> np.ndarray:
        """A random element of the embedded subgroup ``K``."""
        k = random_element(self.K, seed, scale)
        if self.K.family == "Sp":
            return self.embed_K(*quaternion_blocks(k))
        return self.embed_K(k)


def p_dimension(space_id: str, n: int) -> int:
    return {
        "SUSO": (n - 1) * (n + 2) // 2,
        "SPU": n * (n + 1),
        "SOU": n * (n - 1),
        "SUSP": (n - 1) * (2 * n + 1),
    }[space_id]


def _p_generators(space_id, n):
    pairs = _pairs(n)
    z = np.zeros((n, n), dtype=np.complex128)
    if space_id == "SUSO":
        return [1j * X(r, s, n) for r, s in pairs] + [1j * Drs(r, s, n) for r, s in pairs]
    if space_id == "SPU":
        gens = []
        for r, s in pairs:
            x = X(r, s, n)
            gens += [0.5j * _block(x, z, z, -x), 0.5j * _block(z, x, x, z)]
        for t in range(1, n + 1):
            d = D(t, n)
            gens += [1j / SQRT2 * _block(d, z, z, -d), 1j / SQRT2 * _block(z, d, d, z)]
        return gens
    if space_id == "SOU":
        gens = []
        for r, s in pairs:
            y = Y(r, s, n)
            gens += [_block(y, z, z, -y) / SQRT2, _block(z, y, y, z) / SQRT2]
        return gens
    gens = []
    for r, s in pairs:
        y, x = Y(r, s, n), X(r, s, n)
        gens += [
            0.5 * _block(y, z, z, -y),
            0.5 * _block(1j * x, z, z, 1j * x),
            0.5 * _block(z, y, y, z),
            0.5 * _block(z, 1j * y, -1j * y, z),
        ]
    gens += [0.5 * _block(1j * Drs(r, s, n), z, z, 1j * Drs(r, s, n)) for r, s in pairs]
    return gens


def _k_basis(space_id, n):
    if space_id == "SUSO":
        return algebra_basis(GroupSpec("SO", n))
    if space_id == "SUSP":
        return algebra_basis(GroupSpec("Sp", n))
    u = algebra_basis(GroupSpec("U", n))
    embed = (lambda a, b: _block(a, -b, b, a)) if space_id == "SOU" else (
        lambda a, b: _block(a, b, -b, a)
    )
    elems = [embed(Z.real, Z.imag).astype(np.complex128) / SQRT2 for Z in u]
    return AlgebraBasis(np.array(elems), f"u({n})")


@lru_cache(maxsize=None)
def symmetric_space(space_id: str, n: int, tol: float = 1e-12) -> SymmetricSpaceModel:
    """Build ``G``, ``K``, the embedding of ``K`` and orthonormal bases of ``k`` and ``p``."""
    space_id = space_id.upper()
    if space_id not in SPACES:
        raise ConstraintError(f"unknown symmetric space {space_id!r}")
    if n < SPACE_MIN_N[space_id]:
        raise ConstraintError(f"{space_id} needs n >= {SPACE_MIN_N[space_id]}, got {n}")
    G, K, embed = {
        "SUSO": (GroupSpec("SU", n), GroupSpec("SO", n), lambda k: np.asarray(k, complex)),
        "SPU": (GroupSpec("Sp", n), GroupSpec("U", n), embed_U_in_Spn),
        "SOU": (GroupSpec("SO", 2 * n), GroupSpec("U", n), embed_U_in_SO2n),
        "SUSP": (GroupSpec("SU", 2 * n), GroupSpec("Sp", n), embed_Sp_in_SU2n),
    }[space_id]
    p_basis = orthonormalize(_p_generators(space_id, n), f"p[{space_id}({n})]")
    k_basis = _k_basis(space_id, n)

    if len(p_basis) != p_dimension(space_id, n) or len(p_basis) + len(k_basis) != G.dim:
        raise ConstraintError(
            f"{space_id}({n}): dim p = {len(p_basis)}, dim k = {len(k_basis)}, dim g = {G.dim}"
        )
    cross = p_basis.elements.reshape(len(p_basis), -1).conj() @ k_basis.elements.reshape(
        len(k_basis), -1
    ).T
    if cross.size and np.max(np.abs(np.real(cross))) > tol:
        raise ConstraintError(f"{space_id}({n}): p is not orthogonal to k")
    return SymmetricSpaceModel(space_id, n, G, K, p_basis, k_basis, embed)
