"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class GAError(Exception):
    """Base class for all errors raised by bivector_spectra."""

    code = "ga_error"
    note = ""


class SignatureMismatch(GAError, ValueError):
    code = "signature_mismatch"


class ParseError(GAError, ValueError):
    """Malformed multivector expression.

    ``position`` is the 0-based character offset where parsing stopped.
    """

    code = "parse_error"

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NumericalFailure(GAError, ArithmeticError):
    """A numerical contract (residual, realness, convergence) was violated."""

    code = "numerical_failure"


class ConsistencyError(NumericalFailure):
    """An identity that must hold exactly came out above tolerance."""

    code = "internal_consistency"


class NonInvertible(GAError, ArithmeticError):
    """The element is (numerically) a zero divisor.

    ``residual`` is the best achieved ``|a x - 1|`` and ``condition`` an
    estimate of ``|a| |a^-1|``; either may be ``inf``.
    """

    code = "non_invertible"

    def __init__(self, message: str, residual: float = float("inf"),
                 condition: float = float("inf")):
        super().__init__(message)
        self.residual = residual
        self.condition = condition


class RequiresEigenPairing(GAError):
    """The outer-tangent formula cannot be applied; use eigenvector pairing."""

    code = "requires_eigen_pairing"
    note = ("repeated eigenvalues make the outer cosine a zero divisor; "
            "the eigenvector-pairing construction still applies")


class JordanesqueError(GAError):
    """Fewer eigenvectors than the effective dimension.

    Decomposing such bivectors is not supported. The exception carries the
    spectrum and the geometric eigenvector counts as evidence.
    """

    code = "jordanesque"
    note = ("bivector has fewer independent eigenvectors than its effective "
            "dimension (Jordan-type adjoint action); no pairing into commuting "
            "simple bivectors exists and such inputs are out of scope")

    def __init__(self, message: str, spectrum=None, eigenvector_counts=None):
        super().__init__(message)
        self.spectrum = spectrum
        self.eigenvector_counts = eigenvector_counts or {}


class Unsupported(GAError):
    code = "unsupported"


class Undefined(GAError, ArithmeticError):
    """Quantity does not exist for this input, e.g. a rotor with zero scalar part."""

    code = "undefined"


class GradeError(GAError, ValueError):
    """Input does not have the required grade (e.g. a bivector was expected)."""

    code = "grade_error"
