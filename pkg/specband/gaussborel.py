import numpy as np

from .error import Error
from .banded import BandedMatrix, Truncation, monic_normalization, monic_scales
from .measures import DiscreteMeasureMatrix
from .recursion import InitialConditions
from .pipeline import analyze
from .numerics.scalar import Scalar, ScalarMode, is_exact, format_scalar, reported
from .numerics.polynomial import Polynomial
from .numerics.dense import matrix, zeros, identity, solve_unit_lower, solve_unit_upper, max_abs, mode_of

# relative size below which a Float64 pivot counts as zero
FLOAT_PIVOT_RTOL = 1e-14


class MomentMatrix:
    """
    Window S x S of the block Hankel moment matrix in scalar indexing.

    entries[i, j] is the moment of order i // q + j // p of psi_{i % q, j % p}.
    The entries are exact sums over the atoms; exact is false when the atoms
    only approximate irrational spectral data.
    """

    S: int
    p: int
    q: int
    entries: np.ndarray
    measures: DiscreteMeasureMatrix
    exact: bool

    def __init__(self, entries: np.ndarray, p: int, q: int, measures: DiscreteMeasureMatrix, exact: bool = True):
        self.entries = entries
        self.exact = exact
        self.S = entries.shape[0]
        self.p = p
        self.q = q
        self.measures = measures

    @property
    def mode(self) -> ScalarMode:
        return mode_of(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]


def moment_entry(dm: DiscreteMeasureMatrix, i: int, j: int) -> Scalar:
    return dm.moment(i % dm.q, j % dm.p, i // dm.q + j // dm.p)


def moment_matrix(dm: DiscreteMeasureMatrix, S: int) -> MomentMatrix:
    """
    Moment matrix of the measures, S x S.

    Args:
        dm: The measures; their rank makes windows beyond N + 1 singular, exactly, since
            the moments are exact sums of N + 1 rank one atoms.
        S: Window size.

    Returns:
        The moment matrix.
    """

    entries = matrix([[moment_entry(dm, i, j) for j in range(S)] for i in range(S)])
    return MomentMatrix(entries, dm.p, dm.q, dm, dm.exact)


def hankel_residual(mm: MomentMatrix) -> float:
    """
    Largest deviation between the q x p blocks (n + 1, m) and (n, m + 1).
    """

    p, q = mm.p, mm.q
    rows, cols = mm.S // q, mm.S // p

    worst = 0.0
    for n in range(rows - 1):
        for m in range(cols - 1):
            lower = mm.entries[(n + 1) * q:(n + 2) * q, m * p:(m + 1) * p]
            right = mm.entries[n * q:(n + 1) * q, (m + 1) * p:(m + 2) * p]
            worst = max(worst, max_abs(lower - right))

    return worst


def _shift(S: int, r: int, mode: ScalarMode) -> np.ndarray:
    # ones on the r-th superdiagonal
    out = zeros(S, S, mode)
    for i in range(S - r):
        out[i, i + r] = mode.one()

    return out


def shift_symmetry_residual(mm: MomentMatrix) -> float:
    """
    Deviation of l_q M from M l_p^T, away from the trailing rows and columns the window cuts.
    """

    S, p, q = mm.S, mm.p, mm.q
    lhs = _shift(S, q, mm.mode) @ mm.entries
    rhs = mm.entries @ _shift(S, p, mm.mode).T
    return max_abs((lhs - rhs)[:S - q, :S - p])


class GaussBorelFactors:
    """
    Gauss-Borel factorization M = L^-1 U^-1 of a moment window.

    L_inv is unit lower triangular, U_inv upper triangular, L and U their inverses.
    """

    S: int
    p: int
    q: int
    L: np.ndarray
    U: np.ndarray
    L_inv: np.ndarray
    U_inv: np.ndarray
    moments: MomentMatrix

    def __init__(self, L: np.ndarray, U: np.ndarray, L_inv: np.ndarray, U_inv: np.ndarray, moments: MomentMatrix):
        self.L = L
        self.U = U
        self.L_inv = L_inv
        self.U_inv = U_inv
        self.moments = moments
        self.S = moments.S
        self.p = moments.p
        self.q = moments.q

    @property
    def mode(self) -> ScalarMode:
        return self.moments.mode


def _invert_lower(m: np.ndarray, mode: ScalarMode) -> np.ndarray:
    n = m.shape[0]
    columns = [solve_unit_lower(m, identity(n, mode)[:, k]) for k in range(n)]
    return matrix([[columns[j][i] for j in range(n)] for i in range(n)], object if mode == ScalarMode.RATIONAL else float)


def _invert_upper(m: np.ndarray, mode: ScalarMode) -> np.ndarray:
    n = m.shape[0]
    d = [m[i, i] for i in range(n)]
    unit = matrix([[m[i, j] / d[i] for j in range(n)] for i in range(n)], m.dtype)
    columns = [solve_unit_upper(unit, identity(n, mode)[:, k]) for k in range(n)]
    # (D V)^-1 = V^-1 D^-1
    return matrix([[columns[j][i] / d[j] for j in range(n)] for i in range(n)],
                  object if mode == ScalarMode.RATIONAL else float)


def gauss_borel(m: MomentMatrix) -> GaussBorelFactors:
    """
    Doolittle factorization without pivoting, M = L_inv U_inv.

    Args:
        m: The moment window.

    Returns:
        The factors.
    """

    S = m.S
    mode = m.mode
    a = m.entries.copy()
    lower = identity(S, mode)
    upper = zeros(S, S, mode)
    scale = max(max_abs(a), 1.0)

    for k in range(S):
        for j in range(k, S):
            upper[k, j] = a[k, j] - sum((lower[k, s] * upper[s, j] for s in range(k)), 0 * a[k, j])

        pivot = upper[k, k]
        if pivot == 0 if is_exact(pivot) else abs(pivot) <= FLOAT_PIVOT_RTOL * scale:
            Error.singular_leading_minor(k + 1)

        for i in range(k + 1, S):
            lower[i, k] = (a[i, k] - sum((lower[i, s] * upper[s, k] for s in range(k)), 0 * a[i, k])) / pivot

    return GaussBorelFactors(_invert_lower(lower, mode), _invert_upper(upper, mode), lower, upper, m)


def _left_recursion(f: GaussBorelFactors) -> np.ndarray:
    return f.L @ _shift(f.S, f.q, f.mode) @ f.L_inv


def _right_recursion(f: GaussBorelFactors) -> np.ndarray:
    return f.U_inv @ _shift(f.S, f.p, f.mode).T @ f.U


def recover_recursion_matrix(f: GaussBorelFactors) -> Truncation:
    """
    Banded recursion matrix L l_q L^-1 read off the factors.

    Rows beyond S - q - 1 need moments outside the window, so the leading
    block of size S - q is returned.

    Args:
        f: Factors of a window S >= p + q + 2.

    Returns:
        The recovered truncation, in the monic normalization.
    """

    needed = f.p + f.q + 2
    if f.S < needed:
        Error.window_too_small(f.S, needed)

    size = f.S - f.q
    return Truncation(_left_recursion(f)[:size, :size].copy(), f.p, f.q)


def recovery_discrepancy(f: GaussBorelFactors) -> float:
    """
    Deviation between L l_q L^-1 and U^-1 l_p^T U on their common valid window.
    """

    needed = f.p + f.q + 2
    if f.S < needed:
        Error.window_too_small(f.S, needed)

    size = f.S - max(f.p, f.q)
    return max_abs(_left_recursion(f)[:size, :size] - _right_recursion(f)[:size, :size])


class RecoveredFamilies:
    """
    Polynomial families read off the Gauss-Borel factors.

    B[b][n] = sum_m L[n, mq + b] x^m, A[a][n] = sum_m U[mp + a, n] x^m; nu and
    xi are their values at the first p (resp. q) indices.
    """

    A: list[list[Polynomial]]
    B: list[list[Polynomial]]
    nu: np.ndarray
    xi: np.ndarray

    def __init__(self, A: list[list[Polynomial]], B: list[list[Polynomial]], nu: np.ndarray, xi: np.ndarray):
        self.A = A
        self.B = B
        self.nu = nu
        self.xi = xi

    def degree_table(self) -> dict[str, list[list[int]]]:
        return {
            "A": [[poly.degree for poly in seq] for seq in self.A],
            "B": [[poly.degree for poly in seq] for seq in self.B]
        }


def recovered_polynomials(f: GaussBorelFactors) -> RecoveredFamilies:
    """
    Biorthogonal families of the moment window.

    Args:
        f: Factors of a window holding at least max(p, q) indices.

    Returns:
        The families for n = 0..S-1.
    """

    p, q, S = f.p, f.q, f.S
    if S < max(p, q):
        Error.window_too_small(S, max(p, q))

    B = [[Polynomial([f.L[n, m * q + b] for m in range((S - b + q - 1) // q)]) for n in range(S)] for b in range(q)]
    A = [[Polynomial([f.U[m * p + a, n] for m in range((S - a + p - 1) // p)]) for n in range(S)] for a in range(p)]

    xi = f.L[:q, :q].copy()
    nu = f.U[:p, :p].T.copy()
    return RecoveredFamilies(A, B, nu, xi)


def cauchy_transform_residual(f: GaussBorelFactors, dm: DiscreteMeasureMatrix, z: Scalar, n: int,
                              terms: int = 60) -> float:
    """
    Compare the series of the Cauchy transforms with node sums.

    The transform of column n, sum_a of the integral of A'^(a)_n(x) / (z - x)
    against psi_{b,a}, has z^-(m+1) coefficient (M U)[mq + b, n]. Inside the
    window that is the entry of L^-1, beyond it the moments are summed directly.

    Args:
        f: The factors.
        dm: The measures the moments came from.
        z: Point well outside the spectrum.
        n: Column index inside the window.
        terms: Series terms.

    Returns:
        Largest deviation over b.
    """

    if not 0 <= n < f.S:
        Error.index_out_of_range(n, f.S - 1)

    families = recovered_polynomials(f)
    z = float(z)

    worst = 0.0
    for b in range(f.q):
        series = 0.0
        for m in range(terms):
            row = m * f.q + b
            if row < f.S:
                c = float(f.L_inv[row, n])
            else:
                c = sum(float(moment_entry(dm, row, k)) * float(f.U[k, n]) for k in range(n + 1))
            series += c / z ** (m + 1)

        nodes = sum(float(dm.mass(k, b, a)) * float(families.A[a][n](x)) / (z - float(x))
                    for k, x in enumerate(dm.nodes) for a in range(f.p))
        worst = max(worst, abs(series - nodes))

    return worst


class RoundTripResult:
    """
    Outcome of the Favard round trip at truncation index N.
    """

    N: int
    window: int
    recovered: Truncation
    expected: Truncation
    deviation: float
    exact: bool
    nu: np.ndarray
    xi: np.ndarray
    nu_expected: np.ndarray
    xi_expected: np.ndarray

    def __init__(self, **kwargs):
        for k, v in kwargs.items():
            setattr(self, k, v)

    @property
    def ic_deviation(self) -> float:
        return max(max_abs(self.nu - self.nu_expected), max_abs(self.xi - self.xi_expected))

    def passed(self, tol: float = 1e-8) -> bool:
        if self.exact:
            return self.deviation == 0 and self.ic_deviation == 0

        return self.deviation <= tol and self.ic_deviation <= tol

    def _published(self, m: np.ndarray) -> list[list]:
        return [[format_scalar(reported(v, self.exact)) for v in row] for row in m]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "window": self.window,
            "deviation": self.deviation,
            "ic_deviation": self.ic_deviation,
            "exact": self.exact,
            "recovered": self._published(self.recovered.entries[:self.window, :self.window]),
            "nu": self._published(self.nu),
            "xi": self._published(self.xi)
        }


def favard_round_trip(T: BandedMatrix, ic: InitialConditions, N: int) -> RoundTripResult:
    """
    Recover the recursion matrix from the spectral measures of its truncation.

    The chain runs families, determinantal blocks, spectral data, discrete
    measures, the moment window of size N + 1 and its Gauss-Borel factors.
    Moments are sums over the atoms, so the comparison is exact at rational
    eigenvalues and carries the approximation of the atoms elsewhere. The recovered
    matrix is compared with the monic normalization of T^[N] on the interior
    window of size N + 1 - max(p, q).

    Args:
        T: The banded matrix.
        ic: Initial conditions.
        N: Truncation index, at least p + q + 1.

    Returns:
        The result.
    """

    p, q = T.p, T.q
    r = max(p, q)

    dm = analyze(T, ic, N).dm

    factors = gauss_borel(moment_matrix(dm, N + 1))
    recovered = recover_recursion_matrix(factors)
    families = recovered_polynomials(factors)

    truncation = T.truncate(N)
    expected = monic_normalization(truncation)
    window = N + 1 - r
    deviation = max_abs(recovered.entries[:window, :window] - expected.entries[:window, :window])

    # B' = C B and A' = A C^-1 with C the monic scales
    c = monic_scales(truncation)
    nu_expected = matrix([[ic.nu[n, a] / c[n] for a in range(p)] for n in range(p)])
    xi_expected = matrix([[ic.xi[n, b] * c[n] for b in range(q)] for n in range(q)])

    return RoundTripResult(N=N, window=window, recovered=recovered, expected=expected, deviation=deviation,
                           exact=dm.exact, nu=families.nu, xi=families.xi,
                           nu_expected=nu_expected, xi_expected=xi_expected)
