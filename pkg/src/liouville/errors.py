"""Exception hierarchy.

Each class carries a stable ``code`` used by the CLI as its exit status.
"""


class LiouvilleError(Exception):
    code = 1


class DimensionMismatch(LiouvilleError, ValueError):
    code = 3


class ShapeMismatch(DimensionMismatch):
    """A named input field has the wrong shape."""

    code = 3

    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class NonFiniteInput(LiouvilleError, ValueError):
    code = 4


class InvalidDensityMatrix(LiouvilleError, ValueError):
    code = 5


class IncompleteMeasurementSet(LiouvilleError, ValueError):
    code = 6


class NonHermitianHamiltonian(LiouvilleError, ValueError):
    code = 7


class ChainConstructionFailed(LiouvilleError, ArithmeticError):
    code = 8


class Unstable(LiouvilleError, ArithmeticError):
    code = 9


class NonUniqueSteadyState(LiouvilleError, ArithmeticError):
    """Raised when the zero-real-part eigenspace is not one-dimensional.

    ``basis`` holds the right eigen-supervectors spanning that subspace as
    columns of a ``(d*d, k)`` array.
    """

    code = 10

    def __init__(self, message, basis=None, eigenvalues=None):
        super().__init__(message)
        self.basis = basis
        self.eigenvalues = eigenvalues


class NotCompletelyPositive(LiouvilleError, ValueError):
    code = 11


class NotHermitianChoi(LiouvilleError, ValueError):
    code = 12


class NonUnitaryGenerator(LiouvilleError, ValueError):
    code = 13


class SchemaError(LiouvilleError, ValueError):
    """Malformed model document; ``path`` names the offending field."""

    code = 2

    def __init__(self, path, reason):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
