"""Zero fibres of the lifted eigenfunctions: search, projection, regularity, curvature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffops import gradient_coeffs
from .errors import ConstraintError, ConvergenceError, DegenerateJacobianError
from .families import EigenFamilyInstance
from .groups import AlgebraBasis, membership_residual
from .linalg import mat_exp
from .parallel import parallel_map, task_seed

TOL_ZERO = 1e-10
MARGIN_GATE = 1e-3
ARMIJO_C = 1e-4
ETA0 = 0.5


@dataclass(frozen=True)
class FiberPoint:
    p: np.ndarray
    value_residual: float
    gradient_margin: float
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "re": self.p.real.tolist(),
            "im": self.p.imag.tolist(),
            "value_residual": self.value_residual,
            "gradient_margin": self.gradient_margin,
        }


@dataclass(frozen=True)
class MinimalityReport:
    H_components: tuple[float, float]
    H_norm: float
    tangent_dim: int
    control_H_norm: float
    control_level: complex
    frame_trace: float


def real_jacobian(fam: EigenFamilyInstance, p, basis: AlgebraBasis) -> np.ndarray:
    """The ``2 x len(basis)`` differential of ``(Re phi, Im phi)``."""
    g = gradient_coeffs(fam.field, p, basis)
    return np.vstack([g.real, g.imag])


def horizontal_margin(fam: EigenFamilyInstance, p, basis: AlgebraBasis | None = None) -> float:
    """Smallest singular value of the real differential restricted to ``p``-directions."""
    basis = fam.model.p_basis if basis is None else basis
    return float(np.linalg.svd(real_jacobian(fam, p, basis), compute_uv=False)[-1])


def _fiber_point(fam, p, iterations=0) -> FiberPoint:
    return FiberPoint(p, abs(fam.field(p)), horizontal_margin(fam, p), iterations)


def project_to_fiber(
    fam: EigenFamilyInstance, p0, tol_zero: float = TOL_ZERO, max_iter: int = 50
) -> FiberPoint:
    """Gauss-Newton on ``F = (Re phi, Im phi)`` using horizontal corrections.

    Each step is the minimum-norm solution of the linearised equation,
    ``delta = -Jr^t (Jr Jr^t)^{-1} F``, retracted by ``p exp(sum delta_i B_i)``
    and halved until ``|phi|`` decreases.
    """
    model = fam.model
    basis = model.p_basis
    f = fam.field
    p = np.asarray(p0, dtype=np.complex128)
    val = f(p)
    for it in range(max_iter + 1):
        if abs(val) <= tol_zero:
            return _fiber_point(fam, p, it)
        if it == max_iter:
            break
        Jr = real_jacobian(fam, p, basis)
        gram = Jr @ Jr.T
        s = np.linalg.svd(Jr, compute_uv=False)
        if s[-1] <= 1e-12 * max(s[0], 1.0):
            raise DegenerateJacobianError(
                f"rank < 2 at Gauss-Newton iterate {it} (sigma_min = {s[-1]:.3e})"
            )
        F = np.array([val.real, val.imag])
        delta = -Jr.T @ np.linalg.solve(gram, F)
        step = basis.combine(delta)
        t = 1.0
        for _ in range(40):
            q = p @ mat_exp(t * step)
            qv = f(q)
            if abs(qv) < abs(val):
                break
            t *= 0.5
        else:
            break
        p, val = q, qv
    raise ConvergenceError("Gauss-Newton projection did not reach the fibre", abs(val))


def _descend(fam, p, switch=1e-3, max_iter=400):
    """Armijo steepest descent of ``|phi|^2`` over the full algebra basis."""
    basis = fam.model.g_basis
    f = fam.field
    val = f(p)
    for _ in range(max_iter):
        obj = abs(val) ** 2
        if abs(val) <= switch:
            break
        g = gradient_coeffs(f, p, basis)
        c = 2 * np.real(np.conj(val) * g)
        gnorm2 = float(c @ c)
        if gnorm2 < 1e-24:
            break
        step = basis.combine(-c)
        eta = ETA0
        while eta > 1e-12:
            q = p @ mat_exp(eta * step)
            qv = f(q)
            if abs(qv) ** 2 <= obj - ARMIJO_C * eta * gnorm2:
                break
            eta *= 0.5
        else:
            break
        p, val = q, qv
    return p


def find_zero(
    fam: EigenFamilyInstance,
    seed,
    tol_zero: float = TOL_ZERO,
    max_restarts: int = 50,
    start=None,
) -> FiberPoint:
    """A point of the zero fibre, by descent on ``|phi|^2`` then Gauss-Newton polishing.

    The first attempt starts at ``start`` when given; every restart draws a
    fresh random group element from ``(seed, restart)``.
    """
    model = fam.model
    best = np.inf
    for r in range(max_restarts):
        if r == 0 and start is not None:
            p = np.asarray(start, dtype=np.complex128)
        else:
            p = model.random_point(task_seed(seed, r))
        if abs(fam.field(p)) <= tol_zero:
            return _fiber_point(fam, p)
        p = _descend(fam, p)
        try:
            fp = project_to_fiber(fam, p, tol_zero)
        except (ConvergenceError, DegenerateJacobianError) as exc:
            best = min(best, getattr(exc, "best_residual", abs(fam.field(p))))
            continue
        if membership_residual(model.G, fp.p) <= 1e-8:
            return fp
    raise ConvergenceError(f"no zero found after {max_restarts} restarts", best)


def sample_fiber(fam: EigenFamilyInstance, count: int, seed, tol_zero: float = TOL_ZERO):
    """``count`` fibre points, each projected from a random group element."""
    model = fam.model

    def one(i):
        for attempt in range(20):
            p0 = model.random_point(task_seed(seed, 1000 * i + attempt))
            try:
                return project_to_fiber(fam, p0, tol_zero)
            except (ConvergenceError, DegenerateJacobianError):
                continue
        return find_zero(fam, task_seed(seed, 10**6 + i), tol_zero)

    return parallel_map(one, range(count))


def regularity_margin(fam: EigenFamilyInstance, points) -> float:
    points = list(points)
    if not points:
        raise ConstraintError("regularity_margin needs at least one fibre point")
    return min(horizontal_margin(fam, fp.p) for fp in points)


def critical_point_scan(fam: EigenFamilyInstance, count: int, seed) -> float:
    """Minimum horizontal margin over ``count`` random group points (SUSO and SPU only)."""
    if fam.space not in ("SUSO", "SPU"):
        raise ConstraintError("critical-point scan is defined for SUSO and SPU only")
    model = fam.model
    margins = parallel_map(
        lambda i: horizontal_margin(fam, model.random_point(task_seed(seed, i))), range(count)
    )
    return float(min(margins))


def _mean_curvature(fam: EigenFamilyInstance, p, basis: AlgebraBasis):
    f = fam.field
    Dm = real_jacobian(fam, p, basis)
    gram = Dm @ Dm.T
    _, s, Vt = np.linalg.svd(Dm)
    if s[-1] <= 1e-10 * max(s[0], 1.0):
        raise DegenerateJacobianError(f"gradients are collinear (sigma_min = {s[-1]:.3e})")
    tangent, normal = Vt[2:], Vt[:2]
    hess_t = np.array([f.exact_d2(p, basis.combine(e)) for e in tangent])
    hess_n = np.array([f.exact_d2(p, basis.combine(e)) for e in normal])
    T = np.array([hess_t.real.sum(), hess_t.imag.sum()])
    Hc = np.linalg.solve(gram, -T)
    H_vec = Dm.T @ Hc
    comps = normal @ H_vec
    frame_trace = float(hess_t.real.sum() + hess_n.real.sum())
    return comps, float(np.linalg.norm(H_vec)), len(tangent), frame_trace


def mean_curvature_estimate(
    fam: EigenFamilyInstance, fp: FiberPoint, control_seed=0
) -> MinimalityReport:
    """Mean curvature vector of the level set through ``fp`` in ``G``.

    With ``f`` a component of ``(Re phi, Im phi)`` vanishing on the level set,
    ``0 = sum_i Hess f(e_i, e_i) + df(H)`` over a tangent frame ``e_i``; the two
    components give a 2x2 Gram system for ``H``.  The same estimate at a random
    point (a nonzero level) is the control.
    """
    model = fam.model
    basis = model.g_basis
    comps, H_norm, tdim, trace = _mean_curvature(fam, fp.p, basis)
    q = model.random_point(control_seed)
    _, control, _, _ = _mean_curvature(fam, q, basis)
    return MinimalityReport(
        (float(comps[0]), float(comps[1])), H_norm, tdim, control, fam.field(q), trace
    )
