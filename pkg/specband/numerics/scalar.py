import enum
import math
from fractions import Fraction

from ..error import Error

# exact values are Fractions (or ints), Float64 values are floats
Scalar = Fraction | int | float

DEFAULT_TOL = 1e-10
# significant bits carried by approximations of irrational spectral data
PRECISION_BITS = 112
# relative zero test for quantities computed from those approximations
DYADIC_TOL = 1e-24


class ScalarMode(enum.Enum):
    """
    Arithmetic used for matrix entries.
    """

    RATIONAL = "rational"
    FLOAT = "float"

    @staticmethod
    def parse(name: str) -> "ScalarMode":
        for mode in ScalarMode:
            if mode.value == name:
                return mode

        Error.parse_error("scalar", f"unknown scalar mode \"{name}\"")

    def zero(self) -> Scalar:
        return Fraction(0) if self == ScalarMode.RATIONAL else 0.0

    def one(self) -> Scalar:
        return Fraction(1) if self == ScalarMode.RATIONAL else 1.0


def parse_scalar(value: str | int | float, mode: ScalarMode, source: str = "scalar") -> Scalar:
    """
    Parse a scalar from its JSON representation.

    Args:
        value: Rational literal "p/q" (optional sign), integer, decimal string or JSON number.
        mode: Target scalar mode. Floats are lifted exactly in rational mode.
        source: Name used in error messages.

    Returns:
        The parsed scalar.
    """

    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        Error.parse_error(source, f"not a scalar: {value!r}")

    try:
        if isinstance(value, str):
            exact = Fraction(value.strip())
        else:
            exact = Fraction(value)
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        Error.parse_error(source, f"bad rational literal {value!r} ({e})")

    if mode == ScalarMode.FLOAT:
        if isinstance(value, float):
            return value
        return float(exact)

    return exact


def format_scalar(value: Scalar) -> str | float:
    """
    Serialize a scalar: exact values become rational literals, floats stay numbers.

    Args:
        value: The scalar.

    Returns:
        "p/q" (or "p") for exact values, the float itself otherwise.
    """

    if isinstance(value, float):
        return value

    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)

    return f"{value.numerator}/{value.denominator}"


def convert(value: Scalar, mode: ScalarMode) -> Scalar:
    if mode == ScalarMode.FLOAT:
        return float(value)

    if isinstance(value, float):
        return Fraction(value)

    return Fraction(value)


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def is_zero(value: Scalar, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(value):
        return value == 0

    return abs(value) <= tol


def sign(value: Scalar, tol: float = DEFAULT_TOL) -> int:
    """
    Sign of a scalar, zero within tolerance for floats.

    Args:
        value: The scalar.
        tol: Absolute tolerance for floats.

    Returns:
        -1, 0 or 1.
    """

    if is_zero(value, tol):
        return 0

    return 1 if value > 0 else -1


def close(a: Scalar, b: Scalar, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b

    return abs(a - b) <= tol * max(1.0, abs(float(a)), abs(float(b)))


def magnitude(value: Scalar) -> float:
    """
    Absolute value as a float, saturating for huge exact values.
    """

    try:
        return abs(float(value))
    except OverflowError:
        return math.inf


def round_dyadic(value: Scalar, bits: int = PRECISION_BITS) -> Fraction:
    """
    Nearest rational m / 2^e with a mantissa m of at most the given number of bits.

    Args:
        value: The value, exact or float.
        bits: Significant bits kept.

    Returns:
        The rounded value, an exact Fraction.
    """

    value = Fraction(value)
    if value == 0:
        return value

    shift = bits - (abs(value.numerator).bit_length() - value.denominator.bit_length())
    scale = Fraction(2) ** shift
    return Fraction(round(value * scale)) / scale


def reported(value: Scalar, exact: bool) -> Scalar:
    """
    The value as published: itself when exact, a float when it only approximates.
    """

    return value if exact else float(value)
