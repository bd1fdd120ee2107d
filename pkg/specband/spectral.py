import math
from fractions import Fraction

import numpy as np

from .error import Error
from .banded import BandedMatrix, Truncation
from .factorization import BidiagonalFactorization
from .recursion import InitialConditions, RecursionFamilies, DeterminantalBlocks, characteristic_polys, \
    determinantal_cofactors
from .numerics.scalar import Scalar, ScalarMode, is_exact, format_scalar, round_dyadic, reported, DEFAULT_TOL, \
    DYADIC_TOL, PRECISION_BITS
from .numerics.polynomial import Polynomial
from .numerics.dense import matrix, identity, inverse, solve_unit_lower, max_abs, mode_of, vector

# bracket width of the interlacing levels below the last, relative to the outer bound
CUT_BITS = 40
# refinements allowed when a cut point sits too close to a root of the next level
MAX_CUT_REFINEMENTS = 64
RATIONAL_ROOT_DENOMINATOR = 10 ** 6


class RootBracket:
    """
    Certified isolating interval [lo, hi] of a simple real root.

    exact holds the root itself when it was detected to be rational.
    """

    lo: Fraction
    hi: Fraction
    exact: Fraction | None

    def __init__(self, lo: Fraction, hi: Fraction, exact: Fraction | None = None):
        self.lo = lo
        self.hi = hi
        self.exact = exact

    @property
    def point(self) -> Fraction:
        return self.exact if self.exact is not None else (self.lo + self.hi) / 2

    @property
    def value(self) -> Scalar:
        return self.exact if self.exact is not None else float(self.point)

    @property
    def width(self) -> Fraction:
        return Fraction(0) if self.exact is not None else self.hi - self.lo

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"RootBracket({format_scalar(self.exact)})"

        return f"RootBracket([{float(self.lo)}, {float(self.hi)}])"


def cauchy_bound(poly: Polynomial) -> Fraction:
    """
    Integer bound, strictly above the modulus of every root.
    """

    c = [Fraction(v) for v in poly.coeffs]
    lead = abs(c[-1])
    ratio = max((abs(v) / lead for v in c[:-1]), default=Fraction(0))
    return Fraction(math.ceil(1 + ratio) + 1)


def fujiwara_bound(poly: Polynomial) -> Fraction:
    """
    Integer bound 2 max |a_{n-i} / a_n|^(1/i), with a_0 halved, plus one.

    Far tighter than the Cauchy bound when the coefficients grow geometrically.
    Falls back to the Cauchy bound when the float powers overflow.
    """

    n = poly.degree
    if n < 1:
        return Fraction(1)

    c = [Fraction(v) for v in poly.coeffs]
    lead = abs(c[-1])
    try:
        terms = [float(abs(c[n - i]) / lead) ** (1 / i) for i in range(1, n)]
        terms.append(float(abs(c[0]) / (2 * lead)) ** (1 / n))
    except OverflowError:
        return cauchy_bound(poly)

    return Fraction(math.ceil(2 * max(terms)) + 1)


def root_bound(poly: Polynomial) -> Fraction:
    return min(fujiwara_bound(poly), cauchy_bound(poly))


def isolation_bound(T: BandedMatrix) -> Fraction:
    """
    Integer strictly above every truncation eigenvalue modulus, from the row-sum bound.
    """

    return Fraction(math.ceil(T.band_bound()) + 1)


def _bisect(poly: Polynomial, lo: Fraction, hi: Fraction, sign_hi: int, width: Fraction) -> RootBracket:
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = poly.sign_at(mid)
        if s == 0:
            return RootBracket(mid, mid, mid)
        if s == sign_hi:
            hi = mid
        else:
            lo = mid

    guess = ((lo + hi) / 2).limit_denominator(RATIONAL_ROOT_DENOMINATOR)
    if lo <= guess <= hi and poly.sign_at(guess) == 0:
        return RootBracket(guess, guess, guess)

    return RootBracket(lo, hi)


def _cut(lower: Polynomial, bracket: RootBracket, upper: Polynomial, expected: int, level: int,
         interval: int) -> tuple[Fraction, RootBracket]:
    # a point inside the bracket of a root of the lower level where the upper level has the expected sign
    for _ in range(MAX_CUT_REFINEMENTS):
        x = bracket.point
        if upper.sign_at(x) == expected:
            return x, bracket

        if bracket.exact is not None:
            Error.interlacing_violated(level, interval)

        bracket = _bisect(lower, bracket.lo, bracket.hi, lower.sign_at(bracket.hi), bracket.width / 4)

    Error.interlacing_violated(level, interval)


def isolate_levels(Ps: list[Polynomial], N: int, bound: Fraction | None = None) -> list[list[RootBracket]]:
    """
    Certified root brackets of P_1, ..., P_{N+1}, each level descending.

    Roots of P_{k+1} are sought in the k+1 intervals cut by the roots of P_k
    and the outer bound. P_{k+1} must take the sign (-1)^i at the i-th
    largest root of P_k and be positive beyond the bound; those sign checks
    prove that every interval holds exactly one root, so the brackets are
    certified without a general eigensolver.

    Lower levels are bisected to a width of bound / 2^CUT_BITS, refined further
    only where a cut needs it. The last level is bisected to bound / 2^PRECISION_BITS,
    so its midpoints carry the precision of the spectral data.

    Args:
        Ps: Characteristic polynomials P_0, ..., P_{N+1} (or longer).
        N: Truncation index.
        bound: Integer strictly above every root modulus, from the coefficients when omitted.

    Returns:
        levels[k - 1] holds the k brackets of P_k.
    """

    if len(Ps) < N + 2:
        Error.insufficient_length(len(Ps) - 1, N + 1)

    if bound is None:
        bound = max(root_bound(Ps[k]) for k in range(1, N + 2))

    levels = []
    for k in range(1, N + 2):
        poly = Ps[k]
        if poly.degree != k:
            Error.shape_violation(f"P_{k}", f"has degree {poly.degree}")
        if poly.sign_at(bound) != 1:
            Error.not_bracketed(k, 0)
        if poly.sign_at(-bound) != (-1) ** k:
            Error.not_bracketed(k, k)

        cuts = [bound]
        if k > 1:
            refined = []
            for i, bracket in enumerate(levels[-1], start=1):
                x, bracket = _cut(Ps[k - 1], bracket, poly, (-1) ** i, k, i)
                cuts.append(x)
                refined.append(bracket)
            levels[-1] = refined
        cuts.append(-bound)

        width = bound / 2 ** (PRECISION_BITS if k == N + 1 else CUT_BITS)
        level = []
        for i in range(k):
            hi, lo = cuts[i], cuts[i + 1]
            level.append(_bisect(poly, lo, hi, (-1) ** i, width))
        levels.append(level)

    return levels


def isolate_roots(Ps: list[Polynomial], N: int, bound: Fraction | None = None) -> list[RootBracket]:
    """
    Certified brackets of the roots of P_{N+1}, descending.
    """

    return isolate_levels(Ps, N, bound)[-1]


def eigenvalues(Ps: list[Polynomial], N: int, bound: Fraction | None = None) -> list[Scalar]:
    """
    Eigenvalues of T^[N], largest first.

    Args:
        Ps: Characteristic polynomials up to P_{N+1}.
        N: Truncation index.
        bound: Integer strictly above every root modulus.

    Returns:
        Exact values for rational roots, Float64 midpoints of the certified brackets otherwise.
    """

    return [b.value for b in isolate_roots(Ps, N, bound)]


class SpectralData:
    """
    Eigenvalues, biorthogonal eigenvectors and Christoffel numbers of a truncation.

    W[k] is the left eigenvector w_k (a row), U[:, k] the right eigenvector
    u_k, so U W = W U = I. mu[k][a] and rho[k][b] are the Christoffel numbers
    of the node eigenvalues[k].

    Every entry is a Fraction. When exact is false the eigenvalues are the
    midpoints of the certified brackets and the rest is rounded to
    PRECISION_BITS significant bits.
    """

    N: int
    p: int
    q: int
    exact: bool
    eigenvalues: list[Fraction]
    brackets: list[RootBracket]
    mu: list[list[Fraction]]
    rho: list[list[Fraction]]
    W: np.ndarray
    U: np.ndarray
    truncation: Truncation
    ic: InitialConditions
    characteristic: Polynomial
    previous: Polynomial
    denominators: list[Fraction]

    def __init__(self, **kwargs):
        for k, v in kwargs.items():
            setattr(self, k, v)

    @property
    def mode(self) -> ScalarMode:
        return ScalarMode.RATIONAL if self.exact else ScalarMode.FLOAT

    def __repr__(self) -> str:
        return f"SpectralData(N={self.N}, p={self.p}, q={self.q}, exact={self.exact})"


def _lifted(m: np.ndarray) -> np.ndarray:
    return matrix([[Fraction(v) for v in row] for row in m])


def build_spectral_data(T: BandedMatrix, fam: RecursionFamilies, blocks: DeterminantalBlocks, N: int,
                        polys: list[Polynomial] | None = None) -> SpectralData:
    """
    Spectral data of T^[N] from the determinantal polynomials.

    Left eigenvector entries are alpha_N Q_{n-1,N}(lambda) / (P_N(lambda) P'_{N+1}(lambda)),
    right eigenvector entries beta_N R_{n-1,N}(lambda). The Christoffel numbers
    solve nu mu = w[0:p] and xi rho = u[0:q] by forward substitution.

    Everything is evaluated exactly at the bracket point, float entries lifted.
    At rational eigenvalues of a rational matrix the result is exact; otherwise
    the point is the midpoint of a bracket of relative width 2^-PRECISION_BITS
    and the results are rounded to that many bits.

    Args:
        T: The banded matrix.
        fam: Families generated to at least N + max(p, q).
        blocks: Determinantal blocks of index N.
        N: Truncation index.
        polys: Characteristic polynomials, computed when omitted.

    Returns:
        The spectral data.
    """

    if blocks.N != N:
        Error.shape_violation("determinantal blocks", f"have index {blocks.N}, need {N}")

    p, q = T.p, T.q
    fam.require(N + max(p, q))
    Ps = polys if polys is not None else characteristic_polys(T, N)
    brackets = isolate_roots(Ps, N, isolation_bound(T))
    exact = T.mode == ScalarMode.RATIONAL and all(b.exact is not None for b in brackets)
    settle = (lambda v: v) if exact else round_dyadic

    alpha, beta = Fraction(blocks.alpha), Fraction(blocks.beta)
    nu, xi = _lifted(fam.ic.nu), _lifted(fam.ic.xi)
    derivative = Ps[N + 1].derivative()

    size = N + 1
    W_rows, U_cols, mu, rho, denominators = [], [], [], [], []
    for k, bracket in enumerate(brackets):
        x = bracket.point

        denominator = Ps[N].exact_at(x) * derivative.exact_at(x)
        if denominator == 0:
            Error.degenerate_eigenvalue(k + 1)
        denominators.append(settle(denominator))

        values = fam.evaluate(x, N + max(p, q))
        A_rows = [[values.A[a][n] for a in range(p)] for n in range(N + 1, N + p)]
        B_rows = [[values.B[b][n] for b in range(q)] for n in range(N + 1, N + q)]
        cof_A, cof_B = determinantal_cofactors(A_rows, B_rows)

        w = [alpha * _bordered(values.A, n, cof_A) / denominator for n in range(size)]
        u = [beta * _bordered(values.B, n, cof_B) for n in range(size)]
        if all(v == 0 for v in u):
            Error.zero_vector()

        mu.append([settle(v) for v in solve_unit_lower(nu, vector(w[:p]))])
        rho.append([settle(v) for v in solve_unit_lower(xi, vector(u[:q]))])
        W_rows.append([settle(v) for v in w])
        U_cols.append([settle(v) for v in u])

    W = matrix(W_rows)
    U = matrix([[U_cols[k][n] for k in range(size)] for n in range(size)])

    return SpectralData(N=N, p=p, q=q, exact=exact, eigenvalues=[b.point for b in brackets], brackets=brackets,
                        mu=mu, rho=rho, W=W, U=U, truncation=T.truncate(N), ic=fam.ic, characteristic=Ps[N + 1],
                        previous=Ps[N], denominators=denominators)


def _bordered(seqs: list[list], n: int, cofactors: list) -> Scalar:
    if cofactors == [None]:
        return seqs[0][n]

    return sum(seqs[a][n] * c for a, c in enumerate(cofactors))


def christoffel_by_cofactors(sd: SpectralData, fam: RecursionFamilies,
                             blocks: DeterminantalBlocks) -> tuple[list[list[Scalar]], list[list[Scalar]]]:
    """
    Christoffel numbers from the first-row cofactors of the determinantal polynomials.

    mu_{k,a} = alpha_N C_a(lambda_k) / (P_N P'_{N+1})(lambda_k) and rho_{k,b} = beta_N C^B_b(lambda_k).

    Returns:
        (mu, rho) in the layout of SpectralData.
    """

    settle = (lambda v: v) if sd.exact else round_dyadic
    alpha, beta = Fraction(blocks.alpha), Fraction(blocks.beta)

    mu, rho = [], []
    for k, x in enumerate(sd.eigenvalues):
        mu.append([settle(alpha * c.exact_at(x) / sd.denominators[k]) for c in blocks.cofactors_A])
        rho.append([settle(beta * c.exact_at(x)) for c in blocks.cofactors_B])

    return mu, rho


def christoffel_deviation(sd: SpectralData, other: tuple[list[list[Scalar]], list[list[Scalar]]]) -> float:
    mu, rho = other
    pairs = [(x, y) for row, other_row in zip(sd.mu, mu) for x, y in zip(row, other_row)]
    pairs += [(x, y) for row, other_row in zip(sd.rho, rho) for x, y in zip(row, other_row)]
    return max((abs(float(x - y)) for x, y in pairs), default=0.0)


def biorthogonality_residual(sd: SpectralData) -> float:
    """
    max(|U W - I|, |W U - I|) entrywise.
    """

    eye = identity(sd.N + 1)
    return max(max_abs(sd.U @ sd.W - eye), max_abs(sd.W @ sd.U - eye))


def spectral_power_residual(sd: SpectralData, n: int) -> float:
    """
    Entrywise deviation of U D^n W from the n-th power of the truncation.
    """

    d = matrix([[v ** n if i == j else Fraction(0) for j, v in enumerate(sd.eigenvalues)]
                for i in range(sd.N + 1)])
    t = _lifted(sd.truncation.entries)

    power = identity(sd.N + 1)
    for _ in range(n):
        power = power @ t

    return max_abs(sd.U @ d @ sd.W - power)


def christoffel_minimum(sd: SpectralData) -> Scalar:
    return min(min(min(row) for row in sd.mu), min(min(row) for row in sd.rho))


def _exact_inverse(m: np.ndarray) -> np.ndarray:
    # unitriangular inverses keep an exact unit diagonal in both modes
    out = inverse(matrix([[Fraction(v) for v in row] for row in m]))
    if mode_of(m) == ScalarMode.FLOAT:
        return out.astype(float)

    return out


class AdmissibleIC:
    """
    Initial conditions nu = (Lambda Acal)^-T, xi = (Bcal Upsilon)^-1 built from a PBF.
    """

    Lambda: np.ndarray
    Upsilon: np.ndarray
    Acal: np.ndarray
    Bcal: np.ndarray
    nu: np.ndarray
    xi: np.ndarray

    def __init__(self, Lambda: np.ndarray, Upsilon: np.ndarray, Acal: np.ndarray, Bcal: np.ndarray):
        self.Lambda = Lambda
        self.Upsilon = Upsilon
        self.Acal = Acal
        self.Bcal = Bcal
        self.nu = _exact_inverse(Lambda @ Acal).T
        self.xi = _exact_inverse(Bcal @ Upsilon)

    @property
    def ic(self) -> InitialConditions:
        return InitialConditions(self.nu, self.xi)


def _check_unitriangular(name: str, m: np.ndarray, size: int, upper: bool):
    if m.shape != (size, size):
        Error.shape_violation(name, f"is {m.shape[0]}x{m.shape[1]}, needs {size}x{size}")

    for i in range(size):
        for j in range(size):
            v = m[i, j]
            if i == j and v != 1:
                Error.shape_violation(name, "needs a unit diagonal")
            if (j < i if upper else j > i) and v != 0:
                Error.shape_violation(name, f"is not {'upper' if upper else 'lower'} triangular")
            if v < 0:
                Error.shape_violation(name, f"has negative entry [{format_scalar(v)}]")


def admissible_ic(f: BidiagonalFactorization, Acal: np.ndarray | None = None,
                  Bcal: np.ndarray | None = None) -> AdmissibleIC:
    """
    Initial conditions making every Christoffel number positive.

    Column k of Lambda is L_1...L_{k-1} e_1 divided by
    r_k = L_{k-1|0} L_{k-2|1} ... L_{1|k-2}, using the p x p truncated lower
    factors; row k of Upsilon is e_1^T U_{k-1}...U_1 divided by the matching s_k.

    Args:
        f: A positive bidiagonal factorization.
        Acal: Nonnegative upper unitriangular p x p matrix, identity when omitted.
        Bcal: Nonnegative lower unitriangular q x q matrix, identity when omitted.

    Returns:
        The admissible initial conditions.
    """

    p, q = f.p, f.q
    mode = f.mode
    Acal = identity(p, mode) if Acal is None else Acal
    Bcal = identity(q, mode) if Bcal is None else Bcal
    _check_unitriangular("Acal", Acal, p, upper=True)
    _check_unitriangular("Bcal", Bcal, q, upper=False)

    r = max(p, q)
    if f.horizon < r:
        Error.horizon_exceeded(r - 1, f.horizon - 1)

    lower = f.factor_matrices(p - 1)[:p] if p > 1 else []
    columns = []
    for k in range(1, p + 1):
        v = identity(p, mode)[:, 0]
        for m in reversed(lower[:k - 1]):
            v = m @ v
        scale = math.prod((f.lower[k - 1 - i - 1][i] for i in range(k - 1)), start=mode.one())
        columns.append([x / scale for x in v])
    Lambda = matrix([[columns[j][i] for j in range(p)] for i in range(p)])

    upper = list(reversed(f.factor_matrices(q - 1)[-q:])) if q > 1 else []
    rows = []
    for k in range(1, q + 1):
        v = identity(q, mode)[0, :]
        for m in reversed(upper[:k - 1]):
            v = v @ m
        scale = math.prod((f.upper[k - 1 - i - 1][i] for i in range(k - 1)), start=mode.one())
        rows.append([x / scale for x in v])
    Upsilon = matrix(rows)

    out = AdmissibleIC(Lambda, Upsilon, Acal, Bcal)
    for name, m in (("nu", out.nu), ("xi", out.xi)):
        if not all(m[i, i] == 1 if mode == ScalarMode.RATIONAL else abs(m[i, i] - 1) < DEFAULT_TOL
                   for i in range(m.shape[0])):
            Error.shape_violation(name, "is not lower unitriangular")

    return out


class SignProfile:
    """
    Sign variation counts of a vector.

    minimum ignores zero entries, maximum assigns zeros the signs that
    maximize the count.
    """

    minimum: int
    maximum: int
    ends_nonzero: bool
    expected: int

    def __init__(self, minimum: int, maximum: int, ends_nonzero: bool, expected: int):
        self.minimum = minimum
        self.maximum = maximum
        self.ends_nonzero = ends_nonzero
        self.expected = expected

    @property
    def passed(self) -> bool:
        return self.minimum == self.maximum == self.expected and self.ends_nonzero

    def to_json(self) -> dict:
        return {
            "minimum": self.minimum,
            "maximum": self.maximum,
            "ends_nonzero": self.ends_nonzero,
            "expected": self.expected,
            "status": "pass" if self.passed else "fail"
        }


def eigenvector_sign_profile(v, k: int, exact: bool | None = None) -> SignProfile:
    """
    Sign variations of an eigenvector for the k-th largest eigenvalue.

    Args:
        v: The eigenvector.
        k: 1-based eigenvalue rank.
        exact: Whether only exact zeros count as zero; otherwise entries tiny relative to the
            largest do too. Inferred from the entry types when omitted.

    Returns:
        The profile; it passes when both counts equal k - 1 and both end entries are nonzero.
    """

    values = list(v)
    if exact is None:
        exact = all(is_exact(x) for x in values)

    tol = 0.0
    if not exact:
        relative = DYADIC_TOL if all(is_exact(x) for x in values) else DEFAULT_TOL
        tol = relative * max((abs(float(x)) for x in values), default=0.0)
    signs = [0 if abs(x) <= tol else (1 if x > 0 else -1) for x in values]
    if not any(signs):
        Error.zero_vector()

    nonzero = [s for s in signs if s != 0]
    minimum = sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)

    # best[s]: most variations of a completed prefix ending with sign s
    best = {1: None, -1: None}
    for s in signs:
        options = [s] if s != 0 else [1, -1]
        step = {}
        for t in options:
            prev = [best[u] + (u != t) for u in (1, -1) if best[u] is not None]
            step[t] = max(prev) if prev else 0
        best = {u: step.get(u) for u in (1, -1)}
    maximum = max(x for x in best.values() if x is not None)

    return SignProfile(minimum, maximum, signs[0] != 0 and signs[-1] != 0, k - 1)


def orthogonality_interval(spectra: list[SpectralData]) -> tuple[Scalar, Scalar]:
    """
    Smallest interval holding every eigenvalue of the given truncations.
    """

    values = [v for sd in spectra for v in sd.eigenvalues]
    return min(values), max(values)


def jacobi_shift(T: BandedMatrix, N: int) -> Scalar:
    """
    Shift making the tridiagonal truncation T^[N] + sI positive semidefinite.

    Args:
        T: A (1, 1)-banded matrix.
        N: Truncation index.

    Returns:
        max(0, -lambda_min), rounded up to the certified bracket.
    """

    if (T.p, T.q) != (1, 1):
        Error.shape_violation("jacobi shift", f"needs a tridiagonal matrix, got ({T.p}, {T.q})")

    smallest = isolate_roots(characteristic_polys(T, N), N, isolation_bound(T))[-1]
    s = -(smallest.exact if smallest.exact is not None else smallest.lo)
    s = max(s, Fraction(0))
    return s if T.mode == ScalarMode.RATIONAL else float(s)


def spectral_csv(sd: SpectralData) -> list[list]:
    """
    Rows k, lambda_k, mu_{k,1..p}, rho_{k,1..q} with a header row.
    """

    header = ["k", "lambda"] + [f"mu_{a + 1}" for a in range(sd.p)] + [f"rho_{b + 1}" for b in range(sd.q)]
    rows = [header]
    for k, x in enumerate(sd.eigenvalues):
        values = [x] + sd.mu[k] + sd.rho[k]
        rows.append([k + 1] + [format_scalar(reported(v, sd.exact)) for v in values])

    return rows
