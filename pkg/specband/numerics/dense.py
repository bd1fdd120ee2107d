import math
from fractions import Fraction

import numpy as np

from .scalar import Scalar, ScalarMode, is_exact
from .polynomial import Polynomial, interpolate
from ..error import Error

MAX_DET_SIZE = 64


def matrix(rows: list[list], dtype=object) -> np.ndarray:
    """
    Build a dense matrix without letting numpy look inside the entries.

    Args:
        rows: Nested lists of entries (scalars or polynomials).
        dtype: object for exact or polynomial entries, float for Float64.

    Returns:
        The matrix.
    """

    n = len(rows)
    m = len(rows[0]) if n else 0
    out = np.empty((n, m), dtype=dtype)
    for i, row in enumerate(rows):
        if len(row) != m:
            Error.shape_violation("matrix", "has ragged rows")
        for j, v in enumerate(row):
            out[i, j] = v

    return out


def zeros(n: int, m: int, mode: ScalarMode = ScalarMode.RATIONAL) -> np.ndarray:
    if mode == ScalarMode.FLOAT:
        return np.zeros((n, m), dtype=float)

    out = np.empty((n, m), dtype=object)
    out.fill(Fraction(0))
    return out


def identity(n: int, mode: ScalarMode = ScalarMode.RATIONAL) -> np.ndarray:
    out = zeros(n, n, mode)
    for i in range(n):
        out[i, i] = mode.one()

    return out


def vector(values: list, dtype=object) -> np.ndarray:
    out = np.empty(len(values), dtype=dtype)
    for i, v in enumerate(values):
        out[i] = v

    return out


def unit_vector(n: int, k: int, mode: ScalarMode = ScalarMode.RATIONAL) -> np.ndarray:
    out = zeros(n, 1, mode)[:, 0]
    out[k] = mode.one()
    return out


def mode_of(m: np.ndarray) -> ScalarMode:
    """
    Scalar mode of a matrix: rational only when every entry is exact.
    """

    if m.dtype != object:
        return ScalarMode.FLOAT

    for v in m.flat:
        if isinstance(v, Polynomial):
            if not v.is_exact():
                return ScalarMode.FLOAT
        elif not is_exact(v):
            return ScalarMode.FLOAT

    return ScalarMode.RATIONAL


def has_polynomials(m: np.ndarray) -> bool:
    return m.dtype == object and any(isinstance(v, Polynomial) for v in m.flat)


def to_float(m: np.ndarray) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in m], dtype=float).reshape(m.shape)


def max_abs(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0

    return max(abs(float(v)) for v in m.flat)


def _check_square(m: np.ndarray) -> int:
    rows, cols = m.shape
    if rows != cols:
        Error.non_square(rows, cols)

    return rows


def _integer_rows(m) -> tuple[list[list[int]], list[int]]:
    # scale each row by the lcm of its denominators
    rows = []
    scales = []
    for row in m:
        exact = [Fraction(v) for v in row]
        d = math.lcm(*(v.denominator for v in exact)) if exact else 1
        rows.append([v.numerator * (d // v.denominator) for v in exact])
        scales.append(d)

    return rows, scales


def _bareiss(a: list[list[int]]) -> int:
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0

        pivot = a[k][k]
        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
        prev = pivot

    return sign * a[n - 1][n - 1]


def bareiss_det(m) -> Fraction:
    """
    Exact fraction-free determinant of a rational matrix.

    Args:
        m: Square matrix of exact scalars.

    Returns:
        The determinant.
    """

    n = len(m)
    if n == 0:
        return Fraction(1)

    rows, scales = _integer_rows(m)
    return Fraction(_bareiss(rows), math.prod(scales))


def leading_minors(m: np.ndarray) -> list[Fraction]:
    """
    All leading principal minors of an exact matrix from one Bareiss sweep without pivoting.

    Args:
        m: Square exact matrix whose leading minors (except possibly the last) are nonzero.

    Returns:
        Minors of orders 1..n.
    """

    n = _check_square(m)
    a, scales = _integer_rows(m)

    minors = []
    prev = 1
    prefix = 1
    for k in range(n):
        prefix *= scales[k]
        pivot = a[k][k]
        minors.append(Fraction(pivot, prefix))

        if k == n - 1:
            break
        if pivot == 0:
            Error.singular_leading_minor(k + 1)

        row_k = a[k]
        for i in range(k + 1, n):
            row_i = a[i]
            aik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
        prev = pivot

    return minors


def leading_minors_at(m: np.ndarray, x0: Scalar) -> list[Fraction]:
    """
    Leading principal minors of x0 I - m, entries lifted exactly.
    """

    n = _check_square(m)
    shifted = [[(Fraction(x0) if i == j else 0) - Fraction(m[i, j]) for j in range(n)] for i in range(n)]
    return leading_minors(matrix(shifted))


def poly_det(m: np.ndarray) -> Polynomial:
    """
    Determinant of a polynomial matrix by exact interpolation.

    The matrix is evaluated at deg+1 integer points, each scalar determinant
    is taken with the Bareiss kernel, and the values are fitted exactly.
    Float coefficients are lifted exactly and the result is converted back.

    Args:
        m: Square matrix with Polynomial (or scalar) entries.

    Returns:
        The determinant polynomial.
    """

    n = _check_square(m)
    if n == 0:
        return Polynomial([1])

    exact = mode_of(m) == ScalarMode.RATIONAL
    entries = [[v.to_exact() if isinstance(v, Polynomial) else Polynomial([Fraction(v)]) for v in row] for row in m]

    bound = 0
    for row in entries:
        top = max(v.degree for v in row)
        if top < 0:
            return Polynomial()
        bound += top

    values = []
    for x0 in range(bound + 1):
        values.append(bareiss_det([[v(Fraction(x0)) for v in row] for row in entries]))

    result = interpolate(values)
    return result if exact else result.to_float()


def det(m: np.ndarray) -> Scalar | Polynomial:
    """
    Determinant of a scalar or polynomial matrix.

    Args:
        m: Square matrix, at most MAX_DET_SIZE rows.

    Returns:
        Exact determinant for exact entries, LU-with-pivoting value in Float64.
    """

    n = _check_square(m)
    if n > MAX_DET_SIZE:
        Error.size_too_large(n, MAX_DET_SIZE)

    if has_polynomials(m):
        return poly_det(m)

    if mode_of(m) == ScalarMode.FLOAT:
        if n == 0:
            return 1.0
        return float(np.linalg.det(to_float(m)))

    return bareiss_det(m)


def minor(m: np.ndarray, row: int, col: int) -> np.ndarray:
    return np.delete(np.delete(m, row, axis=0), col, axis=1)


def adjugate_entry(m: np.ndarray, i: int, j: int) -> Scalar | Polynomial:
    """
    Entry (i, j) of the adjugate, the signed cofactor of (j, i).
    """

    n = _check_square(m)
    if n == 1:
        return Polynomial([1]) if has_polynomials(m) else (1.0 if mode_of(m) == ScalarMode.FLOAT else Fraction(1))

    c = det(minor(m, j, i))
    return c if (i + j) % 2 == 0 else -c


def adjugate(m: np.ndarray) -> np.ndarray:
    """
    Transpose of the matrix of cofactors.

    Args:
        m: Square matrix.

    Returns:
        adj(m), so that m @ adj(m) = det(m) I.
    """

    n = _check_square(m)
    dtype = float if mode_of(m) == ScalarMode.FLOAT and not has_polynomials(m) else object
    out = np.empty((n, n), dtype=dtype)
    for i in range(n):
        for j in range(n):
            out[i, j] = adjugate_entry(m, i, j)

    return out


def solve(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Solve m x = b with partial pivoting, exactly for exact input.

    Args:
        m: Nonsingular square matrix.
        b: Right-hand side vector.

    Returns:
        The solution vector.
    """

    n = _check_square(m)
    if mode_of(m) == ScalarMode.FLOAT or mode_of(b.reshape(-1, 1)) == ScalarMode.FLOAT:
        return np.linalg.solve(to_float(m), np.array([float(v) for v in b]))

    a = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(m)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            Error.singular_leading_minor(k + 1)
        a[k], a[p] = a[p], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f == 0:
                continue
            for j in range(k, n + 1):
                a[i][j] -= f * a[k][j]

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s / a[i][i]

    return vector(x)


def inverse(m: np.ndarray) -> np.ndarray:
    n = _check_square(m)
    if mode_of(m) == ScalarMode.FLOAT:
        return np.linalg.inv(to_float(m))

    cols = [solve(m, unit_vector(n, k)) for k in range(n)]
    return matrix([[cols[j][i] for j in range(n)] for i in range(n)])


def solve_unit_lower(lower: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Forward substitution with a unit lower triangular matrix.
    """

    n = len(b)
    x = np.empty(n, dtype=object)
    for i in range(n):
        s = b[i]
        for j in range(i):
            s = s - lower[i, j] * x[j]
        x[i] = s

    return x


def solve_unit_upper(upper: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Back substitution with a unit upper triangular matrix.
    """

    n = len(b)
    x = np.empty(n, dtype=object)
    for i in range(n - 1, -1, -1):
        s = b[i]
        for j in range(i + 1, n):
            s = s - upper[i, j] * x[j]
        x[i] = s

    return x


def evaluate(m: np.ndarray, x: Scalar) -> np.ndarray:
    """
    Evaluate every polynomial entry of a matrix at x.
    """

    out = np.empty(m.shape, dtype=object)
    for idx, v in np.ndenumerate(m):
        out[idx] = v(x) if isinstance(v, Polynomial) else v

    return out


def is_unit_lower(m: np.ndarray) -> bool:
    n = _check_square(m)
    return all(m[i, i] == 1 and all(m[i, j] == 0 for j in range(i + 1, n)) for i in range(n))
