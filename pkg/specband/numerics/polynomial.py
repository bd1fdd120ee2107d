import math
import numbers
from fractions import Fraction

from .scalar import Scalar, format_scalar, is_exact, close, DEFAULT_TOL


def _normalize(c) -> Scalar:
    if isinstance(c, bool):
        return Fraction(int(c))

    if isinstance(c, numbers.Integral):
        return Fraction(int(c))

    if isinstance(c, Fraction):
        return c

    if isinstance(c, numbers.Real):
        return float(c)

    raise TypeError(f"Unsupported polynomial coefficient [{c!r}]")


class Polynomial:
    """
    Dense univariate polynomial, coefficients in ascending powers.

    Trailing zero coefficients are trimmed, so the zero polynomial has no
    coefficients and degree -1.
    """

    # keep numpy from broadcasting over polynomials stored in object arrays
    __array_ufunc__ = None

    coeffs: tuple

    def __init__(self, coeffs=()):
        c = [_normalize(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()

        self.coeffs = tuple(c)
        self._scaled = None

    @staticmethod
    def constant(c: Scalar) -> "Polynomial":
        return Polynomial([c])

    @staticmethod
    def x() -> "Polynomial":
        return Polynomial([0, 1])

    @staticmethod
    def monomial(k: int, c: Scalar = 1) -> "Polynomial":
        return Polynomial([0] * k + [c])

    @staticmethod
    def from_roots(roots: list[Scalar]) -> "Polynomial":
        """
        Monic polynomial with the given roots.

        Args:
            roots: The roots, with multiplicity.

        Returns:
            The product of (x - root).
        """

        result = Polynomial([1])
        for r in roots:
            result = result * Polynomial([-r, 1])

        return result

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coefficient(self, k: int) -> Scalar:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def __call__(self, x: Scalar) -> Scalar:
        # Horner
        result = 0 * x
        for c in reversed(self.coeffs):
            result = result * x + c

        return result

    def sign_at(self, x: Scalar) -> int:
        """
        Exact sign of the polynomial at a rational point.

        Coefficients are scaled to integers once, so evaluation runs on integers only.

        Args:
            x: The point; floats are lifted exactly.

        Returns:
            -1, 0 or 1.
        """

        if not self.coeffs:
            return 0

        h, _ = self._scaled_value(x)
        return (h > 0) - (h < 0)

    def exact_at(self, x: Scalar) -> Fraction:
        """
        Exact value at a rational point, float coefficients and points lifted exactly.
        """

        if not self.coeffs:
            return Fraction(0)

        h, den = self._scaled_value(x)
        return Fraction(h, den)

    def _scaled_value(self, x: Scalar) -> tuple[int, int]:
        # P(u / v) = h / (lcm * v^deg), evaluated on integers
        if self._scaled is None:
            exact = [Fraction(c) for c in self.coeffs]
            den = math.lcm(*(c.denominator for c in exact))
            self._scaled = ([c.numerator * (den // c.denominator) for c in exact], den)

        scaled, den = self._scaled
        x = Fraction(x)
        u, v = x.numerator, x.denominator

        h = scaled[-1]
        vp = 1
        for c in reversed(scaled[:-1]):
            vp *= v
            h = h * u + c * vp

        return h, den * vp

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def divided_difference(self, x0: Scalar) -> "Polynomial":
        """
        Quotient (P(z) - P(x0)) / (z - x0) by synthetic division.

        Args:
            x0: The point.

        Returns:
            The quotient, of degree deg P - 1.
        """

        n = len(self.coeffs)
        if n <= 1:
            return Polynomial()

        q = [None] * (n - 1)
        q[-1] = self.coeffs[-1]
        for k in range(n - 2, 0, -1):
            q[k - 1] = self.coeffs[k] + x0 * q[k]

        return Polynomial(q)

    def to_float(self) -> "Polynomial":
        return Polynomial([float(c) for c in self.coeffs])

    def to_exact(self) -> "Polynomial":
        return Polynomial([Fraction(c) for c in self.coeffs])

    def close_to(self, other: "Polynomial", tol: float = DEFAULT_TOL) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        return all(close(self.coefficient(k), other.coefficient(k), tol) for k in range(n))

    @staticmethod
    def _lift(other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            return other

        if isinstance(other, numbers.Number):
            return Polynomial([other])

        return None

    def __add__(self, other) -> "Polynomial":
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented

        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial([self.coefficient(k) + other.coefficient(k) for k in range(n)])

    def __radd__(self, other) -> "Polynomial":
        return self.__add__(other)

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "Polynomial":
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented

        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented

        return other + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, numbers.Number):
            return Polynomial([c * other for c in self.coeffs])

        if not isinstance(other, Polynomial):
            return NotImplemented

        if not self.coeffs or not other.coeffs:
            return Polynomial()

        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b

        return Polynomial(out)

    def __rmul__(self, other) -> "Polynomial":
        return self.__mul__(other)

    def __truediv__(self, other) -> "Polynomial":
        if not isinstance(other, numbers.Number):
            return NotImplemented

        if is_exact(other):
            other = Fraction(other)

        return Polynomial([c / other for c in self.coeffs])

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial([1])
        for _ in range(n):
            result = result * self

        return result

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")

        r = list(self.coeffs)
        d = other.degree
        lead = other.leading
        if is_exact(lead):
            lead = Fraction(lead)

        if len(r) - 1 < d:
            return Polynomial(), Polynomial(r)

        q = [0] * (len(r) - d)
        for k in range(len(r) - 1 - d, -1, -1):
            c = r[k + d] / lead
            q[k] = c
            for j, oc in enumerate(other.coeffs):
                r[k + j] -= c * oc

        return Polynomial(q), Polynomial(r[:d])

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def __eq__(self, other) -> bool:
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented

        return self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self) -> str:
        return f"Polynomial([{', '.join(str(format_scalar(c)) for c in self.coeffs)}])"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"

        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue

            s = format_scalar(c)
            power = "" if k == 0 else "x" if k == 1 else f"x^{k}"
            if power and c == 1:
                terms.append(power)
            elif power and c == -1:
                terms.append(f"-{power}")
            else:
                terms.append(f"{s}{'*' if power else ''}{power}")

        return " + ".join(terms).replace("+ -", "- ")


def poly_divided_difference(p: Polynomial, x0: Scalar) -> Polynomial:
    """
    (P(z) - P(x0)) / (z - x0) as a polynomial in z.
    """

    return p.divided_difference(x0)


def interpolate(values: list[Scalar], start: int = 0) -> Polynomial:
    """
    Exact polynomial through (start + j, values[j]) by Newton forward differences.

    Args:
        values: Values at consecutive integer points.
        start: The first point.

    Returns:
        The interpolating polynomial, of degree below len(values).
    """

    diffs = [Fraction(v) for v in values]

    result = Polynomial()
    basis = Polynomial([1])
    for k in range(len(values)):
        result = result + basis * (diffs[0] / math.factorial(k))
        basis = basis * Polynomial([-(start + k), 1])
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]

    return result
