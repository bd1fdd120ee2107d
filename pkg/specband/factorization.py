import enum
import itertools
from fractions import Fraction

import numpy as np

from .error import Error, ErrorKind, InternalError
from .banded import BandedMatrix, Truncation
from .numerics.scalar import Scalar, ScalarMode, convert, is_exact, close
from .numerics.dense import zeros, identity, det, mode_of
from .numerics.polynomial import Polynomial

# pivots at or below this value count as nonpositive in Float64 mode
FLOAT_PIVOT_TOL = 1e-12


def _positive(value: Scalar) -> bool:
    if is_exact(value):
        return value > 0

    return value > FLOAT_PIVOT_TOL


class BidiagonalFactorization:
    """
    Positive bidiagonal factorization T = L_1...L_p D U_q...U_1.

    lower[k-1][i] is L_{k|i}, the (i+1, i) entry of L_k; upper[k-1][i] is
    U_{k|i}, the (i, i+1) entry of U_k; delta[i] is D_i. The horizon H is the
    number of stored D entries, factor sequences hold at least H - 1 values.
    """

    p: int
    q: int
    lower: list[list[Scalar]]
    delta: list[Scalar]
    upper: list[list[Scalar]]
    horizon: int
    mode: ScalarMode

    def __init__(self, lower: list[list[Scalar]], delta: list[Scalar], upper: list[list[Scalar]],
                 mode: ScalarMode = ScalarMode.RATIONAL):
        if not lower or not upper:
            Error.shape_violation("factorization", "needs at least one lower and one upper factor")

        self.p = len(lower)
        self.q = len(upper)
        self.mode = mode
        self.delta = [convert(v, mode) for v in delta]
        self.horizon = len(self.delta)
        self.lower = [[convert(v, mode) for v in seq] for seq in lower]
        self.upper = [[convert(v, mode) for v in seq] for seq in upper]

        for name, seqs in (("L", self.lower), ("U", self.upper)):
            for k, seq in enumerate(seqs):
                if len(seq) < self.horizon - 1:
                    Error.shape_violation(f"{name}_{k + 1}", f"has {len(seq)} parameters, needs {self.horizon - 1}")

        self._check_positive()

    def _check_positive(self):
        for i, v in enumerate(self.delta):
            if not _positive(v):
                Error.non_positive_parameter("delta", i, v)

        for name, seqs in (("L", self.lower), ("U", self.upper)):
            for k, seq in enumerate(seqs):
                for i, v in enumerate(seq[:self.horizon - 1]):
                    if not _positive(v):
                        Error.non_positive_parameter(f"{name}_{k + 1}", i, v)

    def restrict(self, N: int) -> "BidiagonalFactorization":
        """
        Parameters that act on the truncation of index N.
        """

        if N + 1 > self.horizon:
            Error.horizon_exceeded(N, self.horizon - 1)

        return BidiagonalFactorization([seq[:N] for seq in self.lower], self.delta[:N + 1],
                                       [seq[:N] for seq in self.upper], self.mode)

    def gauge(self) -> dict[str, list[list[Scalar]]]:
        """
        Corner parameters not determined by a finite truncation.

        Returns:
            {"L": [L_{k|0..p-k-1} for k < p], "U": [U_{k|0..q-k-1} for k < q]}.
        """

        return {
            "L": [self.lower[k - 1][:self.p - k] for k in range(1, self.p)],
            "U": [self.upper[k - 1][:self.q - k] for k in range(1, self.q)]
        }

    def factor_matrices(self, N: int) -> list[np.ndarray]:
        """
        Truncated factors [L_1, ..., L_p, D, U_q, ..., U_1] of size N+1.
        """

        if N + 1 > self.horizon:
            Error.horizon_exceeded(N, self.horizon - 1)

        factors = []
        for seq in self.lower:
            m = identity(N + 1, self.mode)
            for i in range(N):
                m[i + 1, i] = seq[i]
            factors.append(m)

        d = zeros(N + 1, N + 1, self.mode)
        for i in range(N + 1):
            d[i, i] = self.delta[i]
        factors.append(d)

        for seq in reversed(self.upper):
            m = identity(N + 1, self.mode)
            for i in range(N):
                m[i, i + 1] = seq[i]
            factors.append(m)

        return factors

    def truncation(self, N: int) -> np.ndarray:
        """
        Dense product of the truncated factors, equal to T^[N].

        The factors are applied one column operation at a time.
        """

        if N + 1 > self.horizon:
            Error.horizon_exceeded(N, self.horizon - 1)

        m = identity(N + 1, self.mode)
        for seq in self.lower:
            for j in range(N):
                m[:, j] = m[:, j] + seq[j] * m[:, j + 1]

        for j in range(N + 1):
            m[:, j] = m[:, j] * self.delta[j]

        # right to left so column j is read before it is updated
        for seq in reversed(self.upper):
            for j in reversed(range(N)):
                m[:, j + 1] = m[:, j + 1] + seq[j] * m[:, j]

        return m

    def parameters_equal(self, other: "BidiagonalFactorization", tol: float = 0.0) -> bool:
        if (self.p, self.q, self.horizon) != (other.p, other.q, other.horizon):
            return False

        pairs = list(zip(self.delta, other.delta))
        for a, b in zip(self.lower + self.upper, other.lower + other.upper):
            pairs.extend(zip(a[:self.horizon - 1], b[:self.horizon - 1]))

        return all(close(x, y, tol) if tol else x == y for x, y in pairs)

    def __repr__(self) -> str:
        return f"BidiagonalFactorization(p={self.p}, q={self.q}, horizon={self.horizon})"


def uniform_factorization(p: int, q: int, value: Scalar = 1, horizon: int = 64,
                          mode: ScalarMode = ScalarMode.RATIONAL) -> BidiagonalFactorization:
    """
    Factorization with every parameter equal to value.
    """

    return BidiagonalFactorization([[value] * (horizon - 1) for _ in range(p)], [value] * horizon,
                                   [[value] * (horizon - 1) for _ in range(q)], mode)


def assemble(f: BidiagonalFactorization) -> BandedMatrix:
    """
    Banded matrix generated by a positive bidiagonal factorization.
    """

    f._check_positive()
    return BandedMatrix.from_factors(f)


def _split_lower(m: np.ndarray, r: int, gauge: list[list[Scalar]] | None, name: str) -> list[list[Scalar]]:
    # peel L_1, L_2, ... from the left of a unit lower matrix with r subdiagonals
    n = m.shape[0]
    m = m.copy()
    params = []

    for k in range(1, r + 1):
        width = r - k + 1
        free = width - 1
        ell = [None] * (n - 1)
        peeled = m.copy()

        for j in range(1, n):
            if j - 1 < free:
                if gauge is not None:
                    ell[j - 1] = gauge[k - 1][j - 1]
                else:
                    ell[j - 1] = m[j, j - 1] / width
            else:
                pivot = peeled[j - 1, j - width]
                if pivot == 0:
                    Error.factorization_failure(f"{name}_{k}", j - 1, pivot)
                ell[j - 1] = m[j, j - width] / pivot

            if not _positive(ell[j - 1]):
                Error.factorization_failure(f"{name}_{k}", j - 1, ell[j - 1])

            peeled[j, :] = m[j, :] - ell[j - 1] * peeled[j - 1, :]
            if j - width >= 0:
                peeled[j, j - width] = 0 * peeled[j, j - width]

        params.append(ell)
        m = peeled

    return params


def neville_factorize(t: Truncation, p: int, q: int,
                      gauge: dict[str, list[list[Scalar]]] | None = None) -> BidiagonalFactorization:
    """
    Positive bidiagonal factorization of a banded truncation.

    The truncation is split as L D U without pivoting, then the banded unit
    triangular factors are peeled into bidiagonals from the outside in: L_1
    first from the left of L, U_1 first from the right of U. A finite
    truncation leaves the corner parameters L_{k|i}, i < p - k (and the U
    analogue) free; they come from gauge, or are split evenly among the
    remaining factors when no gauge is given.

    Args:
        t: The truncation, (p, q)-banded.
        p: Number of subdiagonals.
        q: Number of superdiagonals.
        gauge: Corner parameters as returned by BidiagonalFactorization.gauge().

    Returns:
        The factorization with horizon N + 1.
    """

    if t.entries.shape[0] != t.entries.shape[1]:
        Error.non_square(*t.entries.shape)
    if not Truncation(t.entries, p, q).is_banded():
        Error.shape_violation("truncation", f"is not ({p}, {q})-banded")

    n = t.size
    a = t.entries.copy()
    mode = mode_of(a)
    lower = identity(n, mode)
    upper = identity(n, mode)
    delta = []

    for k in range(n):
        pivot = a[k, k]
        if not _positive(pivot):
            Error.factorization_failure("delta", k, pivot)
        delta.append(pivot)

        for i in range(k + 1, min(k + p, n - 1) + 1):
            lower[i, k] = a[i, k] / pivot
        for j in range(k + 1, min(k + q, n - 1) + 1):
            upper[k, j] = a[k, j] / pivot

        for i in range(k + 1, min(k + p, n - 1) + 1):
            for j in range(k + 1, min(k + q, n - 1) + 1):
                a[i, j] = a[i, j] - lower[i, k] * a[k, j]

    gauge_l = gauge["L"] if gauge is not None else None
    gauge_u = gauge["U"] if gauge is not None else None

    lower_params = _split_lower(lower, p, gauge_l, "L")
    upper_params = _split_lower(upper.T.copy(), q, gauge_u, "U")

    return BidiagonalFactorization(lower_params, delta, upper_params, mode)


def shift_to_pbf(T: BandedMatrix, N_screen: int, s_max: Scalar) -> Scalar:
    """
    Smallest grid shift s <= s_max such that T + sI has a PBF at size N_screen.

    The grid resolution is s_max / 2^20; the search is a bisection that
    assumes success is monotone in s.

    Args:
        T: The banded matrix (its own shift is kept, s is added on top).
        N_screen: Truncation index used as the screen.
        s_max: Largest shift tried.

    Returns:
        The shift.
    """

    s_max = convert(s_max, T.mode)

    def succeeds(s: Scalar) -> bool:
        try:
            neville_factorize(T.with_shift(T.shift + s).truncate(N_screen), T.p, T.q)
        except Error as e:
            if e.kind != ErrorKind.FACTORIZATION_FAILURE:
                raise
            return False

        return True

    zero = T.mode.zero()
    if succeeds(zero):
        return zero
    if not succeeds(s_max):
        Error.shift_failure(s_max)

    resolution = s_max / 2 ** 20
    lo, hi = zero, s_max
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if succeeds(mid):
            hi = mid
        else:
            lo = mid

    return hi


def characteristic_polynomial(m: np.ndarray) -> Polynomial:
    """
    det(xI - m) by exact interpolation.
    """

    n = m.shape[0]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Polynomial([-m[i, j], 1] if i == j else [-m[i, j]])

    return det(out)


def _product(factors: list[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = out @ f

    return out


class DarbouxChain:
    """
    Darboux transformations of a truncation by cyclic permutation of its bidiagonal factors.
    """

    base: Truncation
    factors: list[np.ndarray]
    plus_transforms: list[np.ndarray]
    minus_transforms: list[np.ndarray]
    characteristic: Polynomial

    def __init__(self, base: Truncation, factors: list[np.ndarray], characteristic: Polynomial):
        self.base = base
        self.factors = factors
        self.characteristic = characteristic

        p, q = base.p, base.q
        self.plus_transforms = [_product(factors[a:] + factors[:a]) for a in range(1, p + 1)]
        self.minus_transforms = [_product(factors[-b:] + factors[:-b]) for b in range(1, q + 1)]

    def members(self) -> list[np.ndarray]:
        return self.plus_transforms + self.minus_transforms

    def left_map(self, a: int) -> np.ndarray:
        """
        L_1...L_a, mapping left eigenvectors of the base to those of the a-th plus transform.
        """

        return _product(self.factors[:a])

    def right_map(self, b: int) -> np.ndarray:
        """
        U_b...U_1, mapping right eigenvectors of the base to those of the b-th minus transform.
        """

        return _product(self.factors[-b:])

    def bands_positive(self) -> bool:
        p, q = self.base.p, self.base.q
        tol = 0.0 if self.base.mode == ScalarMode.RATIONAL else FLOAT_PIVOT_TOL
        return all(Truncation(m, p, q).is_banded() and Truncation(m, p, q).band_positive(tol)
                   for m in self.members())


def darboux_chain(t: Truncation, f: BidiagonalFactorization) -> DarbouxChain:
    """
    Darboux chain of a truncation with a matching factorization.

    Args:
        t: The truncation T^[N].
        f: A PBF whose product reproduces t.

    Returns:
        The chain; every member shares the characteristic polynomial of t.
    """

    N = t.N
    if f.horizon < N + 1 or (f.p, f.q) != (t.p, t.q):
        Error.mismatched_factorization(N, N)

    product = f.truncation(N)
    exact = t.mode == ScalarMode.RATIONAL and f.mode == ScalarMode.RATIONAL
    for i in range(N + 1):
        for j in range(N + 1):
            if not (product[i, j] == t[i, j] if exact else close(product[i, j], t[i, j], 1e-9)):
                Error.mismatched_factorization(i, j)

    characteristic = characteristic_polynomial(t.entries)
    chain = DarbouxChain(t, f.factor_matrices(N), characteristic)

    for member in chain.members():
        other = characteristic_polynomial(member)
        if exact and other != characteristic:
            InternalError.identity_failed("darboux characteristic polynomial", other - characteristic)
        if not exact and not other.close_to(characteristic, 1e-8):
            InternalError.identity_failed("darboux characteristic polynomial", other - characteristic)

    return chain


class Verdict(enum.Enum):
    TOTALLY_NONNEGATIVE = "TotallyNonnegative"
    OSCILLATORY = "Oscillatory"
    NOT_TN = "NotTN"


class CertificateMode(enum.Enum):
    EXHAUSTIVE = "exhaustive"
    CRITERION = "criterion"


class TNCertificate:
    """
    Total nonnegativity verdict with a witness for failures.
    """

    verdict: Verdict
    witness: dict | None

    def __init__(self, verdict: Verdict, witness: dict | None = None):
        self.verdict = verdict
        self.witness = witness

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "witness": self.witness}


EXHAUSTIVE_MAX_SIZE = 8


def tn_certify(t: Truncation, mode: CertificateMode = CertificateMode.CRITERION) -> TNCertificate:
    """
    Certify a truncation as totally nonnegative or oscillatory.

    Exhaustive mode enumerates every minor, which limits it to N <= 7. A
    singular truncation is NotTN with the full determinant as witness. With
    every minor nonnegative and both off-diagonals positive it is oscillatory,
    otherwise TotallyNonnegative.

    Criterion mode accepts a successful positive bidiagonal factorization as
    a sufficient certificate; a failed factorization is reported as NotTN with
    the failing pivot as witness, meaning "not certified".

    Args:
        t: The truncation.
        mode: Certification mode.

    Returns:
        The certificate.
    """

    if mode == CertificateMode.CRITERION:
        try:
            neville_factorize(t, t.p, t.q)
        except Error as e:
            if e.kind != ErrorKind.FACTORIZATION_FAILURE:
                raise
            return TNCertificate(Verdict.NOT_TN, dict(e.details))

        return TNCertificate(Verdict.OSCILLATORY)

    n = t.size
    if n > EXHAUSTIVE_MAX_SIZE:
        Error.size_too_large(n, EXHAUSTIVE_MAX_SIZE)

    exact = t.mode == ScalarMode.RATIONAL
    for k in range(1, n + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                value = det(t.entries[np.ix_(rows, cols)])
                if value < 0 if exact else value < -FLOAT_PIVOT_TOL:
                    return TNCertificate(Verdict.NOT_TN, {
                        "rows": [r + 1 for r in rows],
                        "cols": [c + 1 for c in cols],
                        "value": str(value)
                    })

    full = det(t.entries)
    if full == 0 if exact else abs(full) <= FLOAT_PIVOT_TOL:
        return TNCertificate(Verdict.NOT_TN, {
            "rows": list(range(1, n + 1)),
            "cols": list(range(1, n + 1)),
            "value": "0",
            "reason": "singular"
        })

    if all(t[i + 1, i] > 0 and t[i, i + 1] > 0 for i in range(n - 1)):
        return TNCertificate(Verdict.OSCILLATORY)

    return TNCertificate(Verdict.TOTALLY_NONNEGATIVE)
