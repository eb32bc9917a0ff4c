"""This module implements the custom exceptions raised by the package"""

import typing as T


class ParamsError(ValueError):
    """Exception raised when functional parameters or a run configuration
    violate their invariants"""

    def __init__(self, message="Invalid functional parameters"):
        self.message = message
        super().__init__(self.message)


class KernelOverflowError(ArithmeticError):
    """Exception raised when a closed-form factorial ratio is not finite, or a
    kernel would exceed the supported degree range"""

    def __init__(self, message="Kernel coefficients are not finite"):
        self.message = message
        super().__init__(self.message)


class SeriesConvergenceError(ArithmeticError):
    """Exception raised when the V3 series has not reached the tail tolerance
    at the truncation index"""

    def __init__(self, last_term: float, partial_sum: float, j_max: int):
        self.last_term = last_term
        self.partial_sum = partial_sum
        self.j_max = j_max
        self.message = (
            f"Series not converged at j_max={j_max}: last term {last_term:.3e}, "
            f"partial sum {partial_sum:.3e}"
        )
        super().__init__(self.message)


class ZeroMollifierError(ArithmeticError):
    """Exception raised when the mean square U of the mollified product
    vanishes, so that h is undefined.

    It signals degenerate input polynomials rather than a numerical failure.
    """

    def __init__(self, message="The mollifier is identically zero (U <= 0)"):
        self.message = message
        super().__init__(self.message)


class NotPositiveDefiniteError(ArithmeticError):
    """Exception raised when the denominator form cannot be Cholesky factored"""

    def __init__(self, message="The denominator form D is not positive definite"):
        self.message = message
        super().__init__(self.message)


class BracketError(ValueError):
    """Exception raised when a certification bracket does not enclose the
    crossing h_min(c) = 1"""

    def __init__(self, c_lo: float, c_hi: float, h_lo: float, h_hi: float):
        self.c_lo = c_lo
        self.c_hi = c_hi
        self.h_lo = h_lo
        self.h_hi = h_hi
        self.message = (
            f"Bracket [{c_lo:.6g}, {c_hi:.6g}] does not enclose h_min = 1: "
            f"h_min(c_lo) = {h_lo:.9g}, h_min(c_hi) = {h_hi:.9g}"
        )
        super().__init__(self.message)


class CancellationFailure(ArithmeticError):
    """Exception raised when the small-eta expansion of the pole-cancelling
    combination disagrees with its direct evaluation.

    This is an implementation defect, not a mathematical failure.
    """

    def __init__(self, expansion: complex, direct: complex):
        self.expansion = expansion
        self.direct = direct
        self.message = (
            f"Small-eta expansion {expansion!r} disagrees with direct "
            f"evaluation {direct!r}"
        )
        super().__init__(self.message)


class SymmetryError(ArithmeticError):
    """Exception raised when odd powers of (i eta) leave a non-vanishing real
    part over the symmetric window"""

    def __init__(self, residual: float):
        self.residual = residual
        self.message = f"Odd-power contribution does not vanish: {residual:.3e}"
        super().__init__(self.message)


class ParseError(ValueError):
    """Exception raised when a zero table line cannot be parsed"""

    def __init__(self, line_number: int, line: str, path: T.Optional[str] = None):
        self.line_number = line_number
        self.line = line
        self.path = path
        where = f"{path}:{line_number}" if path else f"line {line_number}"
        self.message = f"Cannot parse ordinate at {where}: {line!r}"
        super().__init__(self.message)


class MonotonicityError(ValueError):
    """Exception raised when a zero table is not strictly increasing and
    positive"""

    def __init__(self, index: int, value: float, previous: T.Optional[float]):
        self.index = index
        self.value = value
        self.previous = previous
        if previous is None:
            self.message = f"Ordinate at index {index} is not positive: {value!r}"
        else:
            self.message = (
                f"Ordinates not strictly increasing at index {index}: "
                f"{previous!r} -> {value!r}"
            )
        super().__init__(self.message)


class SchemaValidationError(ValueError):
    """Exception raised when a document does not validate against its schema"""

    def __init__(self, message="Document does not match its schema"):
        self.message = message
        super().__init__(self.message)
