import math
from fractions import Fraction

import numpy as np

from .error import Error, InternalError
from .banded import BandedMatrix, extreme_products
from .numerics.scalar import Scalar, ScalarMode, is_exact
from .numerics.polynomial import Polynomial, interpolate
from .numerics.dense import identity, inverse, is_unit_lower, leading_minors_at, det, matrix, zeros, mode_of
from .util import ceil_div


class InitialConditions:
    """
    Lower unitriangular initial condition matrices nu (p x p) and xi (q x q).

    Column a of nu holds the first p values of the left family A^(a), column b
    of xi the first q values of the right family B^(b).
    """

    nu: np.ndarray
    xi: np.ndarray

    def __init__(self, nu: np.ndarray, xi: np.ndarray):
        for name, m in (("nu", nu), ("xi", xi)):
            if m.shape[0] != m.shape[1]:
                Error.non_square(*m.shape)
            if not is_unit_lower(m):
                Error.shape_violation(name, "is not lower unitriangular")

        self.nu = nu
        self.xi = xi

    @staticmethod
    def identity(p: int, q: int, mode: ScalarMode = ScalarMode.RATIONAL) -> "InitialConditions":
        return InitialConditions(identity(p, mode), identity(q, mode))

    @property
    def p(self) -> int:
        return self.nu.shape[0]

    @property
    def q(self) -> int:
        return self.xi.shape[0]

    def left_weights(self) -> np.ndarray:
        """
        nu^-T, whose column a is the support of e_a^nu.
        """

        return inverse(self.nu).T

    def right_weights(self) -> np.ndarray:
        """
        xi^-1, whose row b is the support of e_b^xi.
        """

        return inverse(self.xi)

    def left_vector(self, a: int, size: int) -> np.ndarray:
        """
        e_a^nu padded with zeros to the given size (a is 0-based).
        """

        w = self.left_weights()
        out = zeros(size, 1, mode_of(w))[:, 0]
        for i in range(self.p):
            out[i] = w[i, a]

        return out

    def right_vector(self, b: int, size: int) -> np.ndarray:
        """
        e_b^xi padded with zeros to the given size (b is 0-based).
        """

        w = self.right_weights()
        out = zeros(size, 1, mode_of(w))[:, 0]
        for i in range(self.q):
            out[i] = w[b, i]

        return out

    def total_mass(self) -> np.ndarray:
        """
        xi^-1 I_{q,p} nu^-T, the total mass matrix of every discrete measure built on these conditions.
        """

        xi_inv = self.right_weights()
        nu_inv_t = self.left_weights()
        r = min(self.p, self.q)
        return xi_inv[:, :r] @ nu_inv_t[:r, :]

    def __repr__(self) -> str:
        return f"InitialConditions(p={self.p}, q={self.q})"


class FamilyValues:
    """
    Recursion polynomial values at a single abscissa, A[a][n] and B[b][n].
    """

    x: Scalar
    A: list[list[Scalar]]
    B: list[list[Scalar]]

    def __init__(self, x: Scalar, A: list[list[Scalar]], B: list[list[Scalar]]):
        self.x = x
        self.A = A
        self.B = B


class RecursionFamilies:
    """
    Left families A^(1..p) and right families B^(1..q) up to index length.

    A[a][n] is A^{(a+1)}_n, B[b][n] is B^{(b+1)}_n.
    """

    source: BandedMatrix
    ic: InitialConditions
    length: int
    A: list[list[Polynomial]]
    B: list[list[Polynomial]]

    def __init__(self, source: BandedMatrix, ic: InitialConditions, length: int,
                 A: list[list[Polynomial]], B: list[list[Polynomial]]):
        self.source = source
        self.ic = ic
        self.length = length
        self.A = A
        self.B = B

    @property
    def p(self) -> int:
        return self.source.p

    @property
    def q(self) -> int:
        return self.source.q

    @property
    def mode(self) -> ScalarMode:
        return self.source.mode

    def require(self, needed: int):
        if self.length < needed:
            Error.insufficient_length(self.length, needed)

    def evaluate(self, x: Scalar, length: int | None = None) -> FamilyValues:
        """
        Run both recurrences pointwise at x.

        An exact abscissa runs the recurrences in exact arithmetic, float entries
        and initial conditions lifted exactly. Float abscissae give the Float64
        path. Neither suffers the cancellation of large coefficients.

        Args:
            x: The abscissa.
            length: Largest index, defaults to the generated length.

        Returns:
            The values.
        """

        length = self.length if length is None else length
        self.require(length)

        lift = Fraction if is_exact(x) else None
        A = _run_left(self.source, self.ic, length, x, 0 * x, lift)
        B = _run_right(self.source, self.ic, length, x, 0 * x, lift)
        return FamilyValues(x, A, B)

    def __repr__(self) -> str:
        return f"RecursionFamilies(p={self.p}, q={self.q}, length={self.length})"


def _readers(T: BandedMatrix, lift):
    if lift is None:
        return T.entry, lambda v: v

    return lambda i, j: lift(T.entry(i, j)), lift


def _run_left(T: BandedMatrix, ic: InitialConditions, length: int, x, zero, lift=None) -> list[list]:
    # x A_n = sum_{j=n-q}^{n+p} A_j T_{j,n}, solved for A_{n+p}
    p, q = T.p, T.q
    entry, initial = _readers(T, lift)
    out = []
    for a in range(p):
        seq = [zero + initial(ic.nu[j, a]) for j in range(min(p, length + 1))]
        for n in range(0, length - p + 1):
            pivot = entry(n + p, n)
            if pivot == 0:
                Error.zero_extreme_diagonal("lower", n)

            acc = x * seq[n]
            for j in range(max(0, n - q), n + p):
                t = entry(j, n)
                if t != 0:
                    acc = acc - seq[j] * t
            seq.append(acc / pivot)
        out.append(seq)

    return out


def _run_right(T: BandedMatrix, ic: InitialConditions, length: int, x, zero, lift=None) -> list[list]:
    # x B_n = sum_{j=n-p}^{n+q} T_{n,j} B_j, solved for B_{n+q}
    p, q = T.p, T.q
    entry, initial = _readers(T, lift)
    out = []
    for b in range(q):
        seq = [zero + initial(ic.xi[j, b]) for j in range(min(q, length + 1))]
        for n in range(0, length - q + 1):
            pivot = entry(n, n + q)
            if pivot == 0:
                Error.zero_extreme_diagonal("upper", n)

            acc = x * seq[n]
            for j in range(max(0, n - p), n + q):
                t = entry(n, j)
                if t != 0:
                    acc = acc - t * seq[j]
            seq.append(acc / pivot)
        out.append(seq)

    return out


def generate_families(T: BandedMatrix, ic: InitialConditions, length: int) -> RecursionFamilies:
    """
    Left and right recursion polynomials from the initial conditions.

    Args:
        T: The banded matrix.
        ic: Initial conditions matching (p, q).
        length: Largest index generated.

    Returns:
        The families with coefficients in the matrix's scalar mode.
    """

    if (ic.p, ic.q) != (T.p, T.q):
        Error.shape_violation("initial conditions", f"are {ic.p}x{ic.q}, need {T.p}x{T.q}")

    x = Polynomial.x()
    zero = Polynomial()
    A = _run_left(T, ic, length, x, zero)
    B = _run_right(T, ic, length, x, zero)

    return RecursionFamilies(T, ic, length, A, B)


def characteristic_polys(T: BandedMatrix, N_max: int) -> list[Polynomial]:
    """
    Characteristic polynomials P_0, ..., P_{N_max+1}, P_{N+1}(x) = det(x I - T^[N]).

    Every leading minor of x I - T^[N_max] is read from one fraction-free
    sweep at each of N_max + 2 integer points beyond the band bound, where
    no minor vanishes, and each P_k is fitted exactly. Float entries are
    lifted exactly, so the coefficients are always exact.

    Args:
        T: The banded matrix.
        N_max: Largest truncation index.

    Returns:
        The polynomials, indexed by degree.
    """

    m = T.block(N_max)
    start = math.ceil(T.band_bound()) + 1

    rows = [leading_minors_at(m, start + j) for j in range(N_max + 2)]

    polys = [Polynomial([1])]
    for k in range(1, N_max + 2):
        polys.append(interpolate([rows[j][k - 1] for j in range(k + 1)], start))

    return polys


def characteristic_by_determinant(T: BandedMatrix, N: int) -> Polynomial:
    """
    P_{N+1} from the polynomial determinant of x I - T^[N].
    """

    t = T.block(N)
    n = N + 1
    entries = [[Polynomial([-Fraction(t[i, j]), 1] if i == j else [-Fraction(t[i, j])]) for j in range(n)]
               for i in range(n)]

    return det(matrix(entries))


class DeterminantalBlocks:
    """
    Recursion blocks A_N, B_N and the determinantal polynomials Q_{n,N}, R_{n,N}.

    Q[n] is Q_{n,N} for n = 0..N+p and R[n] is R_{n,N} for n = 0..N+q.
    cofactors_A[a] is the signed cofactor of the first row entry a in the
    determinant defining Q, so Q_{n,N} = sum_a A^(a)_n cofactors_A[a].
    """

    N: int
    p: int
    q: int
    A_N: np.ndarray
    B_N: np.ndarray
    alpha: Scalar
    beta: Scalar
    alpha_next: Scalar
    beta_next: Scalar
    P_N: Polynomial
    P_next: Polynomial
    Q: list[Polynomial]
    R: list[Polynomial]
    cofactors_A: list[Polynomial]
    cofactors_B: list[Polynomial]

    def __init__(self, **kwargs):
        for k, v in kwargs.items():
            setattr(self, k, v)


def _cofactors(rows: list[list]) -> list:
    """
    Signed cofactors of the first row of the square matrix [?; rows].
    """

    width = len(rows) + 1
    if width == 1:
        return [None]

    out = []
    for a in range(width):
        minor = matrix([[row[c] for c in range(width) if c != a] for row in rows])
        c = det(minor)
        out.append(c if a % 2 == 0 else -c)

    return out


def determinantal_cofactors(A_rows: list[list], B_rows: list[list]) -> tuple[list, list]:
    """
    First-row cofactors of the Q and R determinants.

    Args:
        A_rows: Rows [A^(1)_n, ..., A^(p)_n] for n = N+1..N+p-1.
        B_rows: Rows [B^(1)_n, ..., B^(q)_n] for n = N+1..N+q-1.

    Returns:
        (cofactors for Q, cofactors for R); a 1x1 determinant has the single cofactor 1.
    """

    return _cofactors(A_rows), _cofactors(B_rows)


def _combine(values: list, cofactors: list, one):
    if cofactors == [None]:
        return values[0]

    acc = 0 * one
    for v, c in zip(values, cofactors):
        acc = acc + v * c
    return acc


def determinantal_blocks(fam: RecursionFamilies, N: int) -> DeterminantalBlocks:
    """
    Determinantal data of the truncation of index N.

    Args:
        fam: Families generated to at least N + max(p, q).
        N: The truncation index.

    Returns:
        The blocks. P_N = alpha_N det A_N = beta_N det B_N is checked here.
    """

    p, q = fam.p, fam.q
    fam.require(N + max(p, q))

    A_N = matrix([[fam.A[a][N + j] for j in range(p)] for a in range(p)])
    B_N = matrix([[fam.B[b][N + i] for b in range(q)] for i in range(q)])

    ep = extreme_products(fam.source, N + 1)
    alpha, beta = ep.alpha[N], ep.beta[N]

    P_N = det(A_N) * alpha
    from_B = det(B_N) * beta
    exact = fam.mode == ScalarMode.RATIONAL
    if exact and P_N != from_B:
        InternalError.identity_failed("alpha det A = beta det B", P_N - from_B)

    A_rows = [[fam.A[a][n] for a in range(p)] for n in range(N + 1, N + p)]
    B_rows = [[fam.B[b][n] for b in range(q)] for n in range(N + 1, N + q)]
    cof_A, cof_B = determinantal_cofactors(A_rows, B_rows)

    one = Polynomial([1])
    Q = [_combine([fam.A[a][n] for a in range(p)], cof_A, one) for n in range(N + p + 1)]
    R = [_combine([fam.B[b][n] for b in range(q)], cof_B, one) for n in range(N + q + 1)]

    sign_p = -1 if (p - 1) % 2 else 1
    P_next = Q[N + p] * (sign_p * ep.alpha[N + 1])

    if cof_A == [None]:
        cof_A = [one]
    if cof_B == [None]:
        cof_B = [one]

    return DeterminantalBlocks(N=N, p=p, q=q, A_N=A_N, B_N=B_N, alpha=alpha, beta=beta,
                               alpha_next=ep.alpha[N + 1], beta_next=ep.beta[N + 1], P_N=P_N, P_next=P_next,
                               Q=Q, R=R, cofactors_A=cof_A, cofactors_B=cof_B)


def christoffel_darboux_check(blocks: DeterminantalBlocks, x: Scalar, y: Scalar | None = None) -> Scalar:
    """
    Residual of the Christoffel-Darboux identity for the determinantal polynomials.

    Without y the confluent form is used, with the Wronskian of P_N, P_{N+1}.

    Args:
        blocks: Determinantal blocks of index N.
        x: First point.
        y: Second point, distinct from x.

    Returns:
        sum_n Q_{n,N}(x) R_{n,N}(y) minus the closed form.
    """

    N = blocks.N
    P, P1 = blocks.P_N, blocks.P_next
    scale = blocks.alpha * blocks.beta

    if y is None:
        kernel = sum((blocks.Q[n](x) * blocks.R[n](x) for n in range(N + 1)), 0 * x)
        closed = (P1.derivative()(x) * P(x) - P.derivative()(x) * P1(x)) / scale
        return kernel - closed

    if x == y:
        Error.coincident_points(x)

    kernel = sum((blocks.Q[n](x) * blocks.R[n](y) for n in range(N + 1)), 0 * x)
    closed = (P1(x) * P(y) - P(x) * P1(y)) / (scale * (x - y))
    return kernel - closed


def wronskian(Ps: list[Polynomial], N: int, x: Scalar) -> Scalar:
    """
    P'_{N+1}(x) P_N(x) - P'_N(x) P_{N+1}(x).
    """

    P, P1 = Ps[N], Ps[N + 1]
    return P1.derivative()(x) * P(x) - P.derivative()(x) * P1(x)


def expected_degree(n: int, r: int, index: int) -> int:
    """
    Degree law ceil((n + 2 - index) / r) - 1 for the family of 1-based index.
    """

    return ceil_div(n + 2 - index, r) - 1


def degree_table(fam: RecursionFamilies) -> dict[str, list[list[int]]]:
    """
    Observed degrees, {"A": [[deg A^(a)_n for n] for a], "B": [...]}.
    """

    return {
        "A": [[poly.degree for poly in seq] for seq in fam.A],
        "B": [[poly.degree for poly in seq] for seq in fam.B]
    }


def degree_law_holds(fam: RecursionFamilies) -> bool:
    """
    Check the degree law on every generated polynomial.

    Initial values (n < p on the left, n < q on the right) are entries of nu
    or xi and may vanish below the diagonal, so there the law is an upper bound.
    """

    table = degree_table(fam)
    for key, r in (("A", fam.p), ("B", fam.q)):
        for i, seq in enumerate(table[key]):
            for n, d in enumerate(seq):
                expected = expected_degree(n, r, i + 1)
                if d > expected or (n >= r and d != expected):
                    return False

    return True


def ceiling_sum(n: int, r: int) -> int:
    """
    sum_{a=1}^r ceil((n + 1 - a) / r), equal to n for n >= r.
    """

    return sum(ceil_div(n + 1 - a, r) for a in range(1, r + 1))


def blocks_agree(blocks: DeterminantalBlocks, Ps: list[Polynomial], tol: float = 1e-8) -> bool:
    """
    Compare alpha_N det A_N and the (N+1)-th determinantal identity with the characteristic polynomials.
    """

    N = blocks.N
    if blocks.P_N.is_exact() and blocks.P_next.is_exact():
        return blocks.P_N == Ps[N] and blocks.P_next == Ps[N + 1]

    return blocks.P_N.close_to(Ps[N], tol) and blocks.P_next.close_to(Ps[N + 1], tol)
