"""Eigenfunction families on the four symmetric spaces, lifted to the groups.

All four lifts have the form ``p -> tr(A p C p^t)`` where ``C`` is the
identity (``SUSO``, ``SPU``) or the complex structure ``J_n`` (``SOU``,
``SUSP``).  With ``(a, b) = sum_k a_k b_k`` the complex-bilinear pairing:

==========  ======================  ========================  ==================
space       A                       lambda                    mu
==========  ======================  ========================  ==================
SUSO        a^t a                   -2(n^2+n-2)/n             -4(n-1)/n
SPU         a^t a                   -2(n+1)                   -2
SOU         (a^t b - b^t a)/sqrt2   -2(n-1)                   -1
SUSP        (a^t b - b^t a)/sqrt2   -2(2n^2-n-1)/n            -2(n-1)/n
==========  ======================  ========================  ==================
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .diffops import ScalarField, fd_derivative
from .errors import ConstraintError, MembershipError
from .groups import SPACE_MIN_N, SPACES, SymmetricSpaceModel, membership_residual, symmetric_space
from .linalg import SQRT2, J

PARAM_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8


def pairing(a, b) -> complex:
    """Complex-bilinear ``(a, b) = sum_k a_k b_k`` (no conjugation)."""
    return complex(np.sum(np.asarray(a) * np.asarray(b)))


def table_eigenvalues(space_id: str, n: int) -> tuple[Fraction, Fraction]:
    n = Fraction(n)
    return {
        "SUSO": (-2 * (n * n + n - 2) / n, -4 * (n - 1) / n),
        "SPU": (-2 * (n + 1), Fraction(-2)),
        "SOU": (-2 * (n - 1), Fraction(-1)),
        "SUSP": (-2 * (2 * n * n - n - 1) / n, -2 * (n - 1) / n),
    }[space_id]


@dataclass(frozen=True)
class EigenFamilyInstance:
    space: str
    n: int
    a: np.ndarray
    b: Optional[np.ndarray]
    A: np.ndarray
    lam: Fraction
    mu: Fraction
    mode: str = "strict"

    @property
    def lambda_(self) -> float:
        return float(self.lam)

    @property
    def model(self) -> SymmetricSpaceModel:
        return symmetric_space(self.space, self.n)

    @property
    def middle(self) -> np.ndarray:
        N = self.A.shape[0]
        return np.eye(N, dtype=np.complex128) if self.space in ("SUSO", "SPU") else J(self.n)

    @property
    def field(self) -> ScalarField:
        return exact_derivatives(self)

    def scaled(self, c: complex) -> "EigenFamilyInstance":
        """The same family with ``a`` replaced by ``c a`` (so ``A`` scales by ``c^2`` or ``c``)."""
        if self.b is None:
            return make_family(self.space, self.n, c * self.a)
        return make_family(self.space, self.n, c * self.a, self.b, mode=self.mode)


def _rank2(a, b, tol=1e-8) -> bool:
    s = np.linalg.svd(np.vstack([a, b]), compute_uv=False)
    return s[1] > tol * max(s[0], 1e-300)


def make_family(space_id: str, n: int, a, b=None, mode: str = "strict") -> EigenFamilyInstance:
    """Validate parameters and build the family member with its ``(lambda, mu)``.

    ``mode`` only matters for ``SOU``: ``"strict"`` requires ``b`` real with
    ``(a,a) = (a,b) = 0``; ``"quadric"`` only ``(a,a)(b,b) = (a,b)^2``.
    """
    space_id = space_id.upper()
    if space_id not in SPACES:
        raise ConstraintError(f"unknown space {space_id!r}")
    if n < SPACE_MIN_N[space_id]:
        raise ConstraintError(f"{space_id} needs n >= {SPACE_MIN_N[space_id]}, got {n}")
    N = n if space_id == "SUSO" else 2 * n
    a = np.asarray(a, dtype=np.complex128).ravel()
    if a.shape != (N,):
        raise ConstraintError(f"{space_id}({n}) needs a of length {N}, got {a.shape[0]}")
    if not np.any(a):
        raise ConstraintError("a must be non-zero")
    lam, mu = table_eigenvalues(space_id, n)

    if space_id in ("SUSO", "SPU"):
        if b is not None:
            raise ConstraintError(f"{space_id} takes no b parameter")
        return EigenFamilyInstance(space_id, n, a, None, np.outer(a, a), lam, mu)

    if b is None:
        raise ConstraintError(f"{space_id} needs a second parameter b")
    b = np.asarray(b, dtype=np.complex128).ravel()
    if b.shape != (N,):
        raise ConstraintError(f"{space_id}({n}) needs b of length {N}, got {b.shape[0]}")
    if not _rank2(a, b):
        raise ConstraintError("a and b must be linearly independent")
    scale = np.linalg.norm(a) ** 2 * np.linalg.norm(b) ** 2
    if space_id == "SOU":
        if mode == "strict":
            if np.max(np.abs(b.imag)) > PARAM_TOL * np.linalg.norm(b):
                raise ConstraintError("SOU: b must be real")
            aa, ab = pairing(a, a), pairing(a, b)
            if abs(aa) > PARAM_TOL * np.linalg.norm(a) ** 2:
                raise ConstraintError(f"SOU: (a,a) = 0 violated, |(a,a)| = {abs(aa):.3e}")
            if abs(ab) > PARAM_TOL * np.sqrt(scale):
                raise ConstraintError(f"SOU: (a,b) = 0 violated, |(a,b)| = {abs(ab):.3e}")
            b = b.real.astype(np.complex128)
        elif mode == "quadric":
            q = pairing(a, a) * pairing(b, b) - pairing(a, b) ** 2
            if abs(q) > PARAM_TOL * scale:
                raise ConstraintError(f"SOU: (a,a)(b,b) - (a,b)^2 = 0 violated, |.| = {abs(q):.3e}")
        else:
            raise ConstraintError(f"unknown SOU mode {mode!r}")
    A = (np.outer(a, b) - np.outer(b, a)) / SQRT2
    return EigenFamilyInstance(space_id, n, a, b, A, lam, mu, mode)


def _lift(fam: EigenFamilyInstance, p) -> complex:
    return complex(np.trace(fam.A @ p @ fam.middle @ p.T))


def evaluate(fam: EigenFamilyInstance, p, check: bool = True) -> complex:
    p = np.asarray(p, dtype=np.complex128)
    if check:
        G = fam.model.G
        r = membership_residual(G, p)
        if r > MEMBERSHIP_TOL:
            raise MembershipError(f"point not in {G}: residual {r:.3e}")
    return _lift(fam, p)


def exact_derivatives(fam: EigenFamilyInstance) -> ScalarField:
    """The lift as a :class:`ScalarField` with closed-form curve derivatives.

    For ``f(p) = tr(A p C p^t)`` and ``gamma(s) = p exp(sZ)``::

        f'  = tr(A p (Z C + C Z^t) p^t)
        f'' = tr(A p (Z^2 C + 2 Z C Z^t + C (Z^t)^2) p^t)
    """
    A, C = fam.A, fam.middle

    def value(p):
        return complex(np.trace(A @ p @ C @ p.T))

    def d1(p, Z):
        M = Z @ C + C @ Z.T
        return complex(np.sum((p.T @ A @ p) * M.T))

    def d2(p, Z):
        ZC = Z @ C
        M = Z @ ZC + 2 * ZC @ Z.T + C @ Z.T @ Z.T
        return complex(np.sum((p.T @ A @ p) * M.T))

    return ScalarField(value, d1, d2)


def sample_parameters(space_id: str, n: int, seed):
    """Unit-norm random parameters ``(a, b)`` valid for ``space_id`` (``b`` is None for SUSO/SPU)."""
    space_id = space_id.upper()
    rng = np.random.default_rng(seed)
    N = n if space_id == "SUSO" else 2 * n
    if space_id == "SOU":
        while True:
            Q, R = np.linalg.qr(rng.normal(size=(N, 3)))
            if np.min(np.abs(np.diag(R))) > 1e-6:
                break
        u, v, b = Q[:, 0], Q[:, 1], Q[:, 2]
        return (u + 1j * v) / SQRT2, b.astype(np.complex128)

    def draw():
        z = rng.normal(size=N) + 1j * rng.normal(size=N)
        return z / np.linalg.norm(z)

    if space_id in ("SUSO", "SPU"):
        return draw(), None
    while True:
        a, b = draw(), draw()
        if _rank2(a, b, 1e-6):
            return a, b


def random_family(space_id: str, n: int, seed) -> EigenFamilyInstance:
    a, b = sample_parameters(space_id, n, seed)
    return make_family(space_id, n, a, b)


def load_parameters(path) -> dict:
    """Read ``{"space", "n", "a_re", "a_im", "b_re", "b_im"}``; imaginary parts and b optional."""
    data = json.loads(Path(path).read_text())
    return parse_parameters(data)


def parse_parameters(data: dict) -> dict:
    try:
        space = str(data["space"]).upper()
        n = int(data["n"])
        a = np.asarray(data["a_re"], float) + 1j * np.asarray(data.get("a_im", np.zeros(len(data["a_re"]))), float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConstraintError(f"malformed parameter file: {exc}") from exc
    b = None
    if "b_re" in data:
        b = np.asarray(data["b_re"], float) + 1j * np.asarray(
            data.get("b_im", np.zeros(len(data["b_re"]))), float
        )
    return {"space": space, "n": n, "a": a, "b": b}


def dump_parameters(fam: EigenFamilyInstance) -> dict:
    out = {"space": fam.space, "n": fam.n, "a_re": fam.a.real.tolist(), "a_im": fam.a.imag.tolist()}
    if fam.b is not None:
        out["b_re"] = fam.b.real.tolist()
        out["b_im"] = fam.b.imag.tolist()
    return out


# --- round spheres and complex projective space ---------------------------


@dataclass(frozen=True)
class SphereExample:
    """``sphere_phi_j``: ``z_j / |z|`` on ``S^{2n-1}``.

    ``cp_phi_jk``: ``z_j conj(z_k) / |z|^2`` on ``CP^n``, checked on its lift to
    ``S^{2n+1}``; requires ``j < k <= n + 1``.  For ``sphere_phi_j`` a different
    ``k`` pairs ``phi_j`` with ``phi_k`` in the conformality check.
    """

    kind: str
    j: int
    k: int
    n: int

    def __post_init__(self):
        if self.kind == "sphere_phi_j":
            if not (1 <= self.j <= self.n and 1 <= self.k <= self.n):
                raise ConstraintError(f"indices must lie in 1..{self.n}")
        elif self.kind == "cp_phi_jk":
            if not 1 <= self.j < self.k <= self.n + 1:
                raise ConstraintError(f"cp_phi_jk needs 1 <= j < k <= {self.n + 1}")
        elif self.kind != "constant":
            raise ConstraintError(f"unknown example kind {self.kind!r}")

    @property
    def complex_dim(self) -> int:
        return self.n + 1 if self.kind == "cp_phi_jk" else self.n

    def functions(self):
        m = self.complex_dim

        def coords(x):
            return x[:m] + 1j * x[m:]

        if self.kind == "constant":
            one = lambda x: 1.0 + 0j  # noqa: E731
            return one, one
        if self.kind == "sphere_phi_j":
            def f(x, i):
                return coords(x)[i - 1] / np.linalg.norm(x)
            return (lambda x: f(x, self.j)), (lambda x: f(x, self.k))

        def g(x):
            z = coords(x)
            return z[self.j - 1] * np.conj(z[self.k - 1]) / np.dot(x, x)
        return g, g

    @property
    def expected(self) -> tuple[float, float]:
        if self.kind == "constant":
            return 0.0, 0.0
        if self.kind == "sphere_phi_j":
            return -(2.0 * self.n - 1), -1.0
        return -4.0 * (self.n + 1), -4.0


def sphere_operators(f, g, x: np.ndarray, rng) -> tuple[complex, complex]:
    """``tau(f)`` and ``kappa(f, g)`` at ``x`` on the unit sphere of ``R^{len(x)}``.

    Uses second derivatives along the great circles ``cos(s) x + sin(s) e``
    through a random orthonormal tangent frame ``e``.
    """
    dim = len(x)
    M = np.column_stack([x, rng.normal(size=(dim, dim - 1))])
    Q, _ = np.linalg.qr(M)
    frame = Q[:, 1:].T
    tau = 0j
    kappa = 0j
    for e in frame:
        def curve(func, e=e):
            return lambda s: func(np.cos(s) * x + np.sin(s) * e)

        tau += fd_derivative(curve(f), 2)
        kappa += fd_derivative(curve(f), 1) * fd_derivative(curve(g), 1)
    return tau, kappa


def sphere_example_check(ex: SphereExample, points: int = 8, seed=0) -> tuple[complex, complex]:
    """Measured ``(lambda, mu)`` by least squares over random sphere points."""
    rng = np.random.default_rng(seed)
    f, g = ex.functions()
    dim = 2 * ex.complex_dim
    num_l = num_m = 0j
    den_l = den_m = 0.0
    for _ in range(points):
        x = rng.normal(size=dim)
        x /= np.linalg.norm(x)
        tau, kappa = sphere_operators(f, g, x, rng)
        fx, gx = f(x), g(x)
        num_l += np.conj(fx) * tau
        den_l += abs(fx) ** 2
        num_m += np.conj(fx * gx) * kappa
        den_m += abs(fx * gx) ** 2
    return complex(num_l / den_l), complex(num_m / den_m)
