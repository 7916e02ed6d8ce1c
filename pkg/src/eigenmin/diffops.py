"""Derivatives along one-parameter subgroups and the operators built from them.

For a function ``f`` on a matrix group with the bi-invariant metric and an
orthonormal algebra basis ``B``::

    Z^k(f)(p) = d^k/ds^k f(p exp(sZ)) at s = 0
    tau(f)    = sum_{Z in B} Z^2(f)
    kappa(f, g) = sum_{Z in B} Z(f) Z(g)

Curves are always right-translated, ``p exp(sZ)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BackendUnavailableError, ConstraintError
from .groups import AlgebraBasis
from .linalg import mat_exp

H1_DEFAULT = 1e-4
H2_DEFAULT = 1e-3
BACKENDS = ("exact", "fd")


@dataclass(frozen=True)
class ScalarField:
    """A complex function on a matrix group, optionally with closed-form derivatives.

    ``exact_d1(p, Z)`` and ``exact_d2(p, Z)`` must return the first and second
    derivative of ``evaluate`` along ``s -> p exp(sZ)`` at ``s = 0``.
    """

    evaluate: Callable[[np.ndarray], complex]
    exact_d1: Optional[Callable[[np.ndarray, np.ndarray], complex]] = None
    exact_d2: Optional[Callable[[np.ndarray, np.ndarray], complex]] = None

    def __call__(self, p):
        return self.evaluate(p)

    @property
    def real(self) -> "ScalarField":
        return _map_field(self, np.real)

    @property
    def imag(self) -> "ScalarField":
        return _map_field(self, np.imag)


def _map_field(f: ScalarField, op) -> ScalarField:
    def wrap(fn):
        return None if fn is None else (lambda *args: complex(op(fn(*args))))

    return ScalarField(wrap(f.evaluate), wrap(f.exact_d1), wrap(f.exact_d2))


def constant_field(c: complex) -> ScalarField:
    return ScalarField(lambda p: complex(c), lambda p, Z: 0j, lambda p, Z: 0j)


def fd_derivative(curve: Callable[[float], complex], order: int, h: float | None = None) -> complex:
    """Fourth-order central difference of ``curve`` at 0."""
    if order == 1:
        h = H1_DEFAULT if h is None else h
        return (-curve(2 * h) + 8 * curve(h) - 8 * curve(-h) + curve(-2 * h)) / (12 * h)
    if order == 2:
        h = H2_DEFAULT if h is None else h
        return (
            -curve(2 * h) + 16 * curve(h) - 30 * curve(0.0) + 16 * curve(-h) - curve(-2 * h)
        ) / (12 * h * h)
    raise ConstraintError(f"order must be 1 or 2, got {order}")


def directional_derivative(
    f: ScalarField,
    p: np.ndarray,
    Z: np.ndarray,
    order: int = 1,
    backend: str = "exact",
    h: float | None = None,
) -> complex:
    if order not in (1, 2):
        raise ConstraintError(f"order must be 1 or 2, got {order}")
    if backend == "exact":
        fn = f.exact_d1 if order == 1 else f.exact_d2
        if fn is None:
            raise BackendUnavailableError(f"field has no exact order-{order} derivative")
        return complex(fn(p, Z))
    if backend == "fd":
        return complex(fd_derivative(lambda s: f.evaluate(p @ mat_exp(s * Z)), order, h))
    raise BackendUnavailableError(f"unknown backend {backend!r}")


def tension(f: ScalarField, p, basis: AlgebraBasis, backend: str = "exact") -> complex:
    return sum((directional_derivative(f, p, Z, 2, backend) for Z in basis), 0j)


def gradient_coeffs(f: ScalarField, p, basis: AlgebraBasis, backend: str = "exact") -> np.ndarray:
    """Components ``Z(f)`` of the gradient of ``f`` in the orthonormal ``basis``."""
    return np.array(
        [directional_derivative(f, p, Z, 1, backend) for Z in basis], dtype=np.complex128
    )


def conformality(
    f: ScalarField, g: ScalarField, p, basis: AlgebraBasis, backend: str = "exact"
) -> complex:
    df = gradient_coeffs(f, p, basis, backend)
    dg = df if g is f else gradient_coeffs(g, p, basis, backend)
    return complex(np.sum(df * dg))


def hessian_quadratic(f: ScalarField, p, X: np.ndarray, backend: str = "exact") -> complex:
    """``Hess f(X, X)`` at ``p`` for a left-invariant ``X``.

    One-parameter subgroups are geodesics of a bi-invariant metric, so the
    covariant correction vanishes and this is a plain second derivative.
    """
    return directional_derivative(f, p, X, 2, backend)
