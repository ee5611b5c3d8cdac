"""Exception types shared across the package."""


class CatentError(Exception):
    """Base class for all errors raised by catent."""


class ValidationError(CatentError, ValueError):
    """An argument is outside the domain of the operation."""


class NonHermitianError(ValidationError):
    """A matrix that must be Hermitian is not, beyond tolerance."""

    def __init__(self, deviation, tol):
        self.deviation = float(deviation)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: max|M - M^dagger| = {self.deviation:.3e} > {self.tol:.1e}"
        )


class ConvergenceError(CatentError, ArithmeticError):
    """A numerical procedure did not reach the requested tolerance."""

    def __init__(self, message, estimates=None):
        self.estimates = estimates
        super().__init__(message)


class TruncationError(CatentError, ArithmeticError):
    """A Fock-space truncation is too small for the requested state."""

    def __init__(self, message, leaked=None):
        self.leaked = leaked
        super().__init__(message)


class ImpossibleOutcomeError(CatentError):
    """A projective measurement outcome has exactly zero probability."""


class UnderflowError(CatentError, ArithmeticError):
    """A probability underflowed although the outcome is not forbidden."""
