"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input does not satisfy the structural contract of an operation."""


class NotAStateError(ValidationError):
    """Matrix is Hermitian but not positive semidefinite / unit trace."""


class InfeasibleError(ValueError):
    """No admissible decomposition reaches the requested entropy reduction.

    ``max_delta_h`` carries the largest reduction the search space can reach.
    """

    def __init__(self, requested, max_delta_h, message=None):
        self.requested = float(requested)
        self.max_delta_h = float(max_delta_h)
        if message is None:
            message = (f"requested entropy reduction {self.requested:.6f} bits "
                       f"exceeds the maximum achievable {self.max_delta_h:.6f} bits")
        super().__init__(message)


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its accuracy target."""


class QuadratureError(NumericalError):
    pass
