"""Numerical certification of complex eigenfunctions and their minimal zero fibres
on SU(n)/SO(n), Sp(n)/U(n), SO(2n)/U(n) and SU(2n)/Sp(n)."""

from .diffops import ScalarField, conformality, directional_derivative, gradient_coeffs, hessian_quadratic, tension
from .errors import (
    BackendUnavailableError,
    ConstraintError,
    ConvergenceError,
    DegenerateJacobianError,
    EigenminError,
    MembershipError,
    SingularMatrixError,
)
from .families import (
    EigenFamilyInstance,
    SphereExample,
    evaluate,
    make_family,
    random_family,
    sample_parameters,
    sphere_example_check,
    table_eigenvalues,
)
from .fibers import (
    FiberPoint,
    MinimalityReport,
    critical_point_scan,
    find_zero,
    mean_curvature_estimate,
    project_to_fiber,
    regularity_margin,
    sample_fiber,
)
from .groups import AlgebraBasis, GroupSpec, SymmetricSpaceModel, algebra_basis, membership_residual, symmetric_space
from .linalg import GeneratorId, generator, inner, mat_exp

__version__ = "0.1.0"
