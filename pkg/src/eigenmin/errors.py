import numpy as np


class EigenminError(Exception):
    pass


class ConstraintError(EigenminError, ValueError):
    """An argument violates a documented precondition."""


class SingularMatrixError(EigenminError, np.linalg.LinAlgError):
    pass


class MembershipError(ConstraintError):
    """A matrix is not (numerically) an element of the expected group."""


class BackendUnavailableError(EigenminError):
    pass


class ConvergenceError(EigenminError, RuntimeError):
    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class DegenerateJacobianError(EigenminError, ArithmeticError):
    """The real differential of a complex function has rank < 2."""
