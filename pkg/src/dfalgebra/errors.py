"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An input breaks a documented precondition (e.g. non-Hermitian generator)."""


class PositivityError(ValueError):
    """A would-be state functional is not positive."""


class LeakageError(ValueError):
    """A density matrix carries too much weight outside the working subspace."""

    def __init__(self, message, weight_outside):
        super().__init__(message)
        self.weight_outside = weight_outside


class NotDFCompatibleError(ValueError):
    """A system Hamiltonian is not a sum of a DF-algebra term and a commutant term."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual
