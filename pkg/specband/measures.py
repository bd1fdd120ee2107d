from fractions import Fraction

import numpy as np

from .error import Error, ErrorKind, InternalError
from .banded import BandedMatrix, Truncation
from .spectral import SpectralData
from .recursion import InitialConditions, RecursionFamilies, DeterminantalBlocks, FamilyValues
from .numerics.scalar import Scalar, ScalarMode, is_exact, close, format_scalar, round_dyadic, reported, \
    DEFAULT_TOL, DYADIC_TOL
from .numerics.polynomial import Polynomial
from .numerics.dense import matrix, zeros, identity, solve, inverse, adjugate_entry, max_abs, mode_of
from .util import ceil_div, delta


class StepFunction:
    """
    Right-continuous distribution function of finitely many atoms.

    The value at x is the total jump at points <= x.
    """

    points: list[Scalar]
    jumps: list[Scalar]

    def __init__(self, points: list[Scalar], jumps: list[Scalar]):
        order = sorted(range(len(points)), key=lambda i: points[i])
        self.points = [points[i] for i in order]
        self.jumps = [jumps[i] for i in order]

    def __call__(self, x: Scalar) -> Scalar:
        return sum((j for pt, j in zip(self.points, self.jumps) if pt <= x), 0 * x)

    def values(self) -> list[Scalar]:
        """
        Value just right of each point, ascending.
        """

        out = []
        acc = 0
        for j in self.jumps:
            acc = acc + j
            out.append(acc)

        return out

    @property
    def total(self) -> Scalar:
        return sum(self.jumps, 0)

    def is_monotone(self) -> bool:
        return all(j >= 0 for j in self.jumps)

    def __repr__(self) -> str:
        return f"StepFunction({len(self.points)} atoms)"


class DiscreteMeasureMatrix:
    """
    Matrix of discrete measures psi_{b,a} = sum_k rho_{k,b} mu_{k,a} delta(x - lambda_k).

    Only the node vectors are stored; the q x p mass of a node is their
    outer product and has rank one. Every moment, integral and pairing is a
    sum over these atoms. When exact is false the atoms approximate
    irrational spectral data and results carry that approximation.
    """

    N: int
    p: int
    q: int
    nodes: list[Scalar]
    rho: list[list[Scalar]]
    mu: list[list[Scalar]]
    ic: InitialConditions
    truncation: Truncation
    exact: bool

    def __init__(self, nodes: list[Scalar], rho: list[list[Scalar]], mu: list[list[Scalar]], ic: InitialConditions,
                 truncation: Truncation, exact: bool = True):
        self.nodes = nodes
        self.rho = rho
        self.mu = mu
        self.ic = ic
        self.truncation = truncation
        self.exact = exact
        self.N = truncation.N
        self.p = ic.p
        self.q = ic.q

        self._powers = {}
        self._values = {}

    def mass(self, k: int, b: int, a: int) -> Scalar:
        return self.rho[k][b] * self.mu[k][a]

    def node_moment(self, b: int, a: int, n: int) -> Scalar:
        return sum((self.mass(k, b, a) * x ** n for k, x in enumerate(self.nodes)), 0 * self.mass(0, b, a))

    def _power_vector(self, a: int, n: int) -> np.ndarray:
        key = (a, n)
        if key not in self._powers:
            if n == 0:
                self._powers[key] = self.ic.left_vector(a, self.N + 1)
            else:
                self._powers[key] = self.truncation.entries @ self._power_vector(a, n - 1)

        return self._powers[key]

    def bracket_moment(self, b: int, a: int, n: int) -> Scalar:
        """
        (e_b^xi)^T (T^[N])^n e_a^nu, the reference the atoms are checked against.
        """

        v = self._power_vector(a, n)
        e = self.ic.right_vector(b, self.N + 1)
        return sum((e[i] * v[i] for i in range(self.q)), 0 * v[0])

    def moment(self, b: int, a: int, n: int) -> Scalar:
        """
        Moment of order n of psi_{b,a}, summed over the atoms.
        """

        if not (0 <= b < self.q and 0 <= a < self.p):
            Error.index_out_of_range(max(b, a), max(self.q, self.p) - 1)

        return self.node_moment(b, a, n)

    def integrate(self, b: int, a: int, poly: Polynomial) -> Scalar:
        """
        Integral of a polynomial against psi_{b,a}.
        """

        return sum((self.mass(k, b, a) * poly.exact_at(x) for k, x in enumerate(self.nodes)), Fraction(0))

    def total_mass(self) -> np.ndarray:
        return matrix([[self.moment(b, a, 0) for a in range(self.p)] for b in range(self.q)])

    def atoms(self, b: int, a: int) -> list[tuple[Scalar, Scalar]]:
        return [(x, self.mass(k, b, a)) for k, x in enumerate(self.nodes)]

    def step_function(self, b: int, a: int) -> StepFunction:
        return StepFunction(self.nodes, [self.mass(k, b, a) for k in range(len(self.nodes))])

    def node_values(self, fam: RecursionFamilies) -> list[FamilyValues]:
        """
        Recursion family values at every node, up to index N.

        Exact at the nodes, rounded to PRECISION_BITS when the nodes approximate.
        """

        key = id(fam)
        if key not in self._values:
            values = [fam.evaluate(x, self.N) for x in self.nodes]
            if not self.exact:
                values = [FamilyValues(v.x, [[round_dyadic(y) for y in seq] for seq in v.A],
                                       [[round_dyadic(y) for y in seq] for seq in v.B]) for v in values]
            self._values[key] = values

        return self._values[key]

    def left_weights(self, fam: RecursionFamilies, b: int, n: int) -> list[Scalar]:
        """
        rho_{k,b}-weighted values sum_a mu_{k,a} A^(a)_n(lambda_k), one per node.
        """

        values = self.node_values(fam)
        return [self.rho[k][b] * sum(self.mu[k][a] * values[k].A[a][n] for a in range(self.p))
                for k in range(len(self.nodes))]

    def right_weights(self, fam: RecursionFamilies, a: int, n: int) -> list[Scalar]:
        """
        mu_{k,a}-weighted values sum_b rho_{k,b} B^(b)_n(lambda_k), one per node.
        """

        values = self.node_values(fam)
        return [self.mu[k][a] * sum(self.rho[k][b] * values[k].B[b][n] for b in range(self.q))
                for k in range(len(self.nodes))]

    def power_sums(self, weights: list[Scalar], count: int) -> list[tuple[Scalar, Scalar]]:
        """
        (sum_k w_k lambda_k^j, sum_k |w_k lambda_k^j|) for j < count.
        """

        out = []
        terms = list(weights)
        for _ in range(count):
            out.append((sum(terms, Fraction(0)), sum((abs(t) for t in terms), Fraction(0))))
            terms = [t * x for t, x in zip(terms, self.nodes)]

        return out

    def __repr__(self) -> str:
        return f"DiscreteMeasureMatrix(N={self.N}, p={self.p}, q={self.q}, exact={self.exact})"


def build_measures(sd: SpectralData) -> DiscreteMeasureMatrix:
    return DiscreteMeasureMatrix(sd.eigenvalues, sd.rho, sd.mu, sd.ic, sd.truncation, sd.exact)


def mass_identity_residual(dm: DiscreteMeasureMatrix) -> float:
    """
    Deviation of the node-summed total mass from xi^-1 I_{q,p} nu^-T.
    """

    nodes = matrix([[dm.node_moment(b, a, 0) for a in range(dm.p)] for b in range(dm.q)])
    expected = matrix([[Fraction(v) for v in row] for row in dm.ic.total_mass()])
    return max_abs(nodes - expected)


def discrete_moment(dm: DiscreteMeasureMatrix, b: int, a: int, n: int) -> Scalar:
    """
    Moment of order n as a node sum, checked against the bracket with the truncation.

    Args:
        dm: The measures.
        b: Right index, 0-based.
        a: Left index, 0-based.
        n: The order.

    Returns:
        The node sum; exact when the measures are.
    """

    by_nodes = dm.moment(b, a, n)
    by_bracket = dm.bracket_moment(b, a, n)

    if dm.exact:
        if by_nodes != by_bracket:
            InternalError.identity_failed("discrete moment", by_nodes - by_bracket)
    elif not close(float(by_nodes), float(by_bracket), 1e-8):
        InternalError.identity_failed("discrete moment", float(by_nodes) - float(by_bracket))

    return by_nodes


def discrete_biorthogonality(dm: DiscreteMeasureMatrix, fam: RecursionFamilies, n: int, m: int) -> Scalar:
    """
    sum_a sum_b of the integral of B^(b)_n A^(a)_m against psi_{b,a}, minus delta_{n,m}.

    Summed over the atoms with the family values at the nodes.

    Args:
        dm: The measures of index N.
        fam: The families the measures were built from.
        n: Right index, at most N.
        m: Left index, at most N.

    Returns:
        The residual.
    """

    for index in (n, m):
        if not 0 <= index <= dm.N:
            Error.index_out_of_range(index, dm.N)

    total = Fraction(0)
    for k, values in enumerate(dm.node_values(fam)):
        right = sum(values.B[b][n] * dm.rho[k][b] for b in range(dm.q))
        left = sum(values.A[a][m] * dm.mu[k][a] for a in range(dm.p))
        total += right * left

    return total - delta(n, m)


def biorthogonality_table(dm: DiscreteMeasureMatrix, fam: RecursionFamilies) -> float:
    """
    Largest residual over every pair n, m <= N.
    """

    return max(abs(float(discrete_biorthogonality(dm, fam, n, m)))
               for n in range(dm.N + 1) for m in range(dm.N + 1))


def block_biorthogonality(dm: DiscreteMeasureMatrix, fam: RecursionFamilies, r: int, n: int, m: int) -> float:
    """
    Residual of the r x r block pairing of rows nr..nr+r-1 of B with columns mr..mr+r-1 of A.

    The block is delta_{n,m} I when both blocks lie inside the truncation.
    """

    last = max(n, m) * r + r - 1
    if last > dm.N:
        Error.index_out_of_range(last, dm.N)

    return max(abs(float(discrete_biorthogonality(dm, fam, n * r + i, m * r + j)))
               for i in range(r) for j in range(r))


class SecondKindPolys:
    """
    Second kind characteristic polynomials table[b][a] = P^(b,a)_{N+1}.
    """

    N: int
    table: list[list[Polynomial]]
    characteristic: Polynomial

    def __init__(self, N: int, table: list[list[Polynomial]], characteristic: Polynomial):
        self.N = N
        self.table = table
        self.characteristic = characteristic

    def __getitem__(self, idx: tuple[int, int]) -> Polynomial:
        b, a = idx
        return self.table[b][a]

    def degrees(self) -> list[list[int]]:
        return [[poly.degree for poly in row] for row in self.table]


def _transform(dm: DiscreteMeasureMatrix, b: int, a: int, poly: Polynomial) -> Polynomial:
    # integral of (poly(z) - poly(x)) / (z - x) against psi_{b,a}, as a polynomial in z
    c = poly.coeffs
    if len(c) <= 1:
        return Polynomial()

    moments = [dm.moment(b, a, j) for j in range(len(c) - 1)]
    return Polynomial([sum((c[j] * moments[j - 1 - i] for j in range(i + 1, len(c))), 0 * moments[0])
                       for i in range(len(c) - 1)])


def second_kind(dm: DiscreteMeasureMatrix, blocks: DeterminantalBlocks) -> SecondKindPolys:
    """
    Second kind characteristic polynomials from the moments of the measures.

    P^(b,a)_{N+1}(z) is the integral of (P_{N+1}(z) - P_{N+1}(x)) / (z - x)
    against psi_{b,a}; expanding P_{N+1} in powers turns it into moment sums,
    which are exact for an exact truncation even at irrational nodes.

    Args:
        dm: The measures of index N.
        blocks: Determinantal blocks of the same index.

    Returns:
        The q x p table.
    """

    if blocks.N != dm.N:
        Error.shape_violation("determinantal blocks", f"have index {blocks.N}, need {dm.N}")

    characteristic = blocks.P_next
    table = [[_transform(dm, b, a, characteristic) for a in range(dm.p)] for b in range(dm.q)]
    return SecondKindPolys(dm.N, table, characteristic)


def node_second_kind(dm: DiscreteMeasureMatrix, characteristic: Polynomial, b: int, a: int) -> Polynomial:
    """
    sum_k rho_{k,b} mu_{k,a} pi_k with pi_k = (P_{N+1}(z) - P_{N+1}(lambda_k)) / (z - lambda_k).
    """

    out = Polynomial()
    for k, x in enumerate(dm.nodes):
        out = out + characteristic.divided_difference(x) * dm.mass(k, b, a)

    return out


def adjugate_second_kind(dm: DiscreteMeasureMatrix, b: int, a: int) -> Polynomial:
    """
    (e_b^xi)^T adj(zI - T^[N]) e_a^nu as a polynomial in z.
    """

    t = dm.truncation.entries
    n = dm.N + 1
    shifted = matrix([[Polynomial([-t[i, j], 1] if i == j else [-t[i, j]]) for j in range(n)] for i in range(n)])

    left = dm.ic.left_vector(a, n)
    right = dm.ic.right_vector(b, n)

    out = Polynomial()
    for i in range(dm.q):
        for j in range(dm.p):
            if right[i] != 0 and left[j] != 0:
                out = out + adjugate_entry(shifted, i, j) * (right[i] * left[j])

    return out


def second_kind_interlacing(sk: SecondKindPolys, dm: DiscreteMeasureMatrix) -> list[list[bool]]:
    """
    Whether P_{N+1} interlaces each P^(b,a)_{N+1}: degree N and strict sign alternation at the nodes.
    """

    out = []
    for b in range(dm.q):
        row = []
        for a in range(dm.p):
            poly = sk[b, a]
            signs = []
            for x in dm.nodes:
                v = poly.exact_at(x)
                signs.append((v > 0) - (v < 0))
            row.append(poly.degree == dm.N and all(s != 0 for s in signs) and
                       all(s != t for s, t in zip(signs, signs[1:])))
        out.append(row)

    return out


class SecondKindRecursion:
    """
    Second kind recursion polynomials R[a] = R^(a)_n and Q[b] = Q^(b)_n.
    """

    n: int
    R: list[Polynomial]
    Q: list[Polynomial]

    def __init__(self, n: int, R: list[Polynomial], Q: list[Polynomial]):
        self.n = n
        self.R = R
        self.Q = Q


def second_kind_recursion(fam: RecursionFamilies, dm: DiscreteMeasureMatrix, n: int) -> SecondKindRecursion:
    """
    R^(a)_n = sum_b T_{b,a}[B^(b)_n] and Q^(b)_n = sum_a T_{b,a}[A^(a)_n],
    T_{b,a} the divided-difference transform against psi_{b,a}.
    """

    fam.require(n)
    R = [sum((_transform(dm, b, a, fam.B[b][n]) for b in range(dm.q)), Polynomial()) for a in range(dm.p)]
    Q = [sum((_transform(dm, b, a, fam.A[a][n]) for a in range(dm.p)), Polynomial()) for b in range(dm.q)]
    return SecondKindRecursion(n, R, Q)


def _check_off_spectrum(dm: DiscreteMeasureMatrix, z: Scalar):
    exact = dm.exact and is_exact(z)
    for x in dm.nodes:
        if x == z if exact else abs(float(z) - float(x)) <= DEFAULT_TOL * max(1.0, abs(float(z))):
            Error.evaluation_on_spectrum(z)


class WeylTable:
    """
    Weyl functions S_{b,a}(z) = P^(b,a)_{N+1}(z) / P_{N+1}(z), the Cauchy transforms of psi_{b,a}.
    """

    dm: DiscreteMeasureMatrix
    sk: SecondKindPolys

    def __init__(self, dm: DiscreteMeasureMatrix, sk: SecondKindPolys):
        self.dm = dm
        self.sk = sk

    def evaluate(self, b: int, a: int, z: Scalar) -> Scalar:
        """
        Partial fraction sum of the atoms, sum_k rho_{k,b} mu_{k,a} / (z - lambda_k).
        """

        _check_off_spectrum(self.dm, z)
        return sum((self.dm.mass(k, b, a) / (z - x) for k, x in enumerate(self.dm.nodes)), 0 * z)

    def ratio(self, b: int, a: int, z: Scalar) -> Scalar:
        _check_off_spectrum(self.dm, z)
        return self.sk[b, a](z) / self.sk.characteristic(z)

    def residue(self, b: int, a: int, k: int) -> Scalar:
        """
        Residue at the node lambda_k, P^(b,a)_{N+1} / P'_{N+1} there.
        """

        x = self.dm.nodes[k]
        return self.sk[b, a](x) / self.sk.characteristic.derivative()(x)

    def evaluate_all(self, z: Scalar) -> list[list[Scalar]]:
        return [[self.evaluate(b, a, z) for a in range(self.dm.p)] for b in range(self.dm.q)]


def weyl(dm: DiscreteMeasureMatrix, sk: SecondKindPolys) -> WeylTable:
    return WeylTable(dm, sk)


def weyl_grid(bound: float, count: int = 20) -> list[float]:
    """
    Sample points off the spectrum, half above bound + 1 and half below -1.
    """

    half = count // 2
    above = [bound + 1 + j for j in range(count - half)]
    below = [-1.0 - j for j in range(half)]
    return sorted(below) + above


def weyl_csv(table: WeylTable, points: list[Scalar]) -> list[list]:
    """
    Rows z, S_{b,a}(z) for every (b, a), with a header row.
    """

    dm = table.dm
    header = ["z"] + [f"S_{b + 1}_{a + 1}" for b in range(dm.q) for a in range(dm.p)]
    rows = [header]
    for z in points:
        values = table.evaluate_all(z)
        rows.append([format_scalar(z)] + [format_scalar(reported(values[b][a], dm.exact and is_exact(z)))
                                         for b in range(dm.q) for a in range(dm.p)])

    return rows


class HermitePadeOrders:
    """
    Decay orders at infinity of the simultaneous approximation residuals.

    left[a] is the order of sum_b B^(b)_n S_{b,a} - R^(a)_n, right[b] the
    order of the dual residual built from A. An order is the smallest k with
    a nonzero coefficient of z^-k; a residual that vanishes through the
    inspected terms reports one past the last inspected power.
    """

    n: int
    left: list[int]
    right: list[int]
    left_expected: list[int]
    right_expected: list[int]

    def __init__(self, n: int, left: list[int], right: list[int], left_expected: list[int],
                 right_expected: list[int]):
        self.n = n
        self.left = left
        self.right = right
        self.left_expected = left_expected
        self.right_expected = right_expected

    @property
    def passed(self) -> bool:
        return all(o >= e for o, e in zip(self.left, self.left_expected)) and \
            all(o >= e for o, e in zip(self.right, self.right_expected))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "left": self.left,
            "right": self.right,
            "left_expected": self.left_expected,
            "right_expected": self.right_expected
        }


def _decay_order(sums: list[tuple[Scalar, Scalar]], exact: bool) -> int:
    # a coefficient vanishes when it is zero, or tiny against the sum of its term magnitudes
    for k, (value, magnitude) in enumerate(sums):
        if value != 0 if exact else abs(value) > DYADIC_TOL * magnitude:
            return k + 1

    return len(sums) + 1


def hermite_pade_order(fam: RecursionFamilies, dm: DiscreteMeasureMatrix, n: int,
                       terms: int | None = None) -> HermitePadeOrders:
    """
    Decay orders of the Hermite-Pade residuals at infinity, from exact series.

    The residual sum_b B^(b)_n S_{b,a} - R^(a)_n equals
    sum_k z^-(k+1) sum_b of the integral of B^(b)_n x^k against psi_{b,a},
    so its coefficients are power sums over the atoms and its order is read
    off without sampling.

    Args:
        fam: The families.
        dm: Measures of index N >= n.
        n: Polynomial index.
        terms: Number of series terms inspected, 2(N + 1) + n by default.

    Returns:
        The orders and their lower bounds ceil((n + 1 - a) / p) + 1 and ceil((n + 1 - b) / q) + 1.
    """

    if not 0 <= n <= dm.N:
        Error.index_out_of_range(n, dm.N)

    terms = 2 * (dm.N + 1) + n if terms is None else terms

    left = [_decay_order(dm.power_sums(dm.right_weights(fam, a, n), terms), dm.exact) for a in range(dm.p)]
    right = [_decay_order(dm.power_sums(dm.left_weights(fam, b, n), terms), dm.exact) for b in range(dm.q)]

    left_expected = [ceil_div(n + 1 - a, dm.p) + 1 for a in range(1, dm.p + 1)]
    right_expected = [ceil_div(n + 1 - b, dm.q) + 1 for b in range(1, dm.q + 1)]
    return HermitePadeOrders(n, left, right, left_expected, right_expected)


def marginal_step_functions(sd: SpectralData) -> tuple[list[StepFunction], list[StepFunction]]:
    """
    Marginal step functions phi_b of rho_{., b} and phi~_a of mu_{., a}.

    Returns:
        (phi, phi_tilde); their totals are the observed marginal masses.
    """

    nodes = sd.eigenvalues
    phi = [StepFunction(nodes, [row[b] for row in sd.rho]) for b in range(sd.q)]
    phi_tilde = [StepFunction(nodes, [row[a] for row in sd.mu]) for a in range(sd.p)]
    return phi, phi_tilde


class OrthogonalitySummary:
    """
    Largest residual of a table of pairings expected to vanish.
    """

    max_residual: float
    count: int

    def __init__(self, max_residual: float, count: int):
        self.max_residual = max_residual
        self.count = count


def mixed_orthogonality_table(dm: DiscreteMeasureMatrix, fam: RecursionFamilies) -> OrthogonalitySummary:
    """
    Discrete mixed multiple orthogonality of both families.

    Checks sum_a of the integral of x^n A^(a)_m against psi_{b,a} for
    n <= deg B^(b)_{m-1}, and sum_b of the integral of B^(b)_m x^n against
    psi_{b,a} for n <= deg A^(a)_{m-1}, for 1 <= m <= N.
    """

    worst = 0.0
    count = 0
    for m in range(1, dm.N + 1):
        for b in range(dm.q):
            sums = dm.power_sums(dm.left_weights(fam, b, m), fam.B[b][m - 1].degree + 1)
            worst = max([worst] + [abs(float(value)) for value, _ in sums])
            count += len(sums)

        for a in range(dm.p):
            sums = dm.power_sums(dm.right_weights(fam, a, m), fam.A[a][m - 1].degree + 1)
            worst = max([worst] + [abs(float(value)) for value, _ in sums])
            count += len(sums)

    return OrthogonalitySummary(worst, count)


def _resolvent_solve(t: np.ndarray, z: Scalar, rhs: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    shifted = matrix([[(z if i == j else 0 * z) - t[i, j] for j in range(n)] for i in range(n)],
                     object if is_exact(z) and mode_of(t) == ScalarMode.RATIONAL else float)
    try:
        return solve(shifted, rhs)
    except np.linalg.LinAlgError:
        Error.evaluation_on_spectrum(z)
    except Error as e:
        if e.kind != ErrorKind.SINGULAR_LEADING_MINOR:
            raise
        Error.evaluation_on_spectrum(z)


def weyl_resolvent(t: Truncation, ic: InitialConditions, b: int, a: int, z: Scalar) -> Scalar:
    """
    S_{b,a}(z) = (e_b^xi)^T (zI - T^[N])^-1 e_a^nu by a linear solve.
    """

    n = t.size
    x = _resolvent_solve(t.entries, z, ic.left_vector(a, n))
    e = ic.right_vector(b, n)
    return sum((e[i] * x[i] for i in range(ic.q)), 0 * x[0])


class WeylConvergence:
    """
    Telescoping differences max |S^[2N] - S^[N]| over sample points and index pairs.
    """

    Ns: list[int]
    points: list[Scalar]
    differences: list[float]

    def __init__(self, Ns: list[int], points: list[Scalar], differences: list[float]):
        self.Ns = Ns
        self.points = points
        self.differences = differences

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.differences, self.differences[1:]))

    def to_json(self) -> dict:
        return {"N": self.Ns, "points": self.points, "differences": self.differences}


def weyl_convergence(T: BandedMatrix, ic: InitialConditions, Ns: list[int] = (4, 8, 16),
                     points: list[Scalar] | None = None) -> WeylConvergence:
    """
    Convergence diagnostic for the Weyl functions of growing truncations.

    Args:
        T: The banded matrix, its horizon covering 2 max(Ns).
        ic: Initial conditions.
        Ns: Truncation indices.
        points: Sample points, five points at distance >= 1 from [0, band bound] by default.

    Returns:
        The differences; a monotone non-increasing sequence is the expected outcome.
    """

    Ns = list(Ns)
    if points is None:
        bound = T.band_bound()
        points = [-1.0, -2.0, bound + 1, bound + 2, bound + 4]

    def table(N: int) -> list[float]:
        t = T.truncate(N)
        t = Truncation(t.entries.astype(float), t.p, t.q)
        return [weyl_resolvent(t, ic, b, a, float(z)) for z in points for b in range(T.q) for a in range(T.p)]

    differences = []
    for N in Ns:
        coarse, fine = table(N), table(2 * N)
        differences.append(max(abs(x - y) for x, y in zip(coarse, fine)))

    return WeylConvergence(Ns, list(points), differences)


def vectorial_second_type_residual(dm: DiscreteMeasureMatrix, fam: RecursionFamilies, z: Scalar, n: int) -> float:
    """
    Compare the node sums of the vectorial second type polynomials with resolvent entries.

    Checks sum_a sum_k rho_{k,b} mu_{k,a} A^(a)_{n-1}(lambda_k) / (z - lambda_k)
    against (e_b^xi)^T R(z) e_n, and the dual built from B against e_n^T R(z) e_a^nu,
    R(z) = (zI - T^[N])^-1.

    Args:
        dm: Measures of index N.
        fam: The families.
        z: A point off the spectrum.
        n: 1-based column index, 1 <= n <= N + 1.

    Returns:
        Largest deviation.
    """

    if not 1 <= n <= dm.N + 1:
        Error.index_out_of_range(n, dm.N + 1)
    _check_off_spectrum(dm, z)

    size = dm.N + 1
    t = dm.truncation.entries
    values = dm.node_values(fam)
    column = _resolvent_solve(t, z, identity(size, mode_of(t))[:, n - 1])
    row = _resolvent_solve(t.T.copy(), z, identity(size, mode_of(t))[:, n - 1])

    worst = 0.0
    for b in range(dm.q):
        nodes = sum((dm.mass(k, b, a) * values[k].A[a][n - 1] / (z - x)
                     for k, x in enumerate(dm.nodes) for a in range(dm.p)), 0 * z)
        e = dm.ic.right_vector(b, size)
        worst = max(worst, abs(float(nodes - sum(e[i] * column[i] for i in range(dm.q)))))

    for a in range(dm.p):
        nodes = sum((dm.mass(k, b, a) * values[k].B[b][n - 1] / (z - x)
                     for k, x in enumerate(dm.nodes) for b in range(dm.q)), 0 * z)
        e = dm.ic.left_vector(a, size)
        worst = max(worst, abs(float(nodes - sum(e[j] * row[j] for j in range(dm.p)))))

    return worst


def resolvent_spectral_residual(sd: SpectralData, z: Scalar) -> float:
    """
    Entrywise deviation of (zI - T^[N])^-1 from U (zI - D)^-1 W.
    """

    size = sd.N + 1
    for x in sd.eigenvalues:
        if abs(float(z) - float(x)) <= DEFAULT_TOL:
            Error.evaluation_on_spectrum(z)

    t = sd.truncation.entries
    exact = sd.exact and is_exact(z)
    shifted = matrix([[(z if i == j else 0 * z) - t[i, j] for j in range(size)] for i in range(size)],
                     object if exact else float)
    resolvent = inverse(shifted)

    d = zeros(size, size, ScalarMode.RATIONAL if exact else ScalarMode.FLOAT)
    for k, x in enumerate(sd.eigenvalues):
        d[k, k] = 1 / (z - x) if exact else 1.0 / (float(z) - float(x))

    return max_abs(resolvent - sd.U @ d @ sd.W)


def measures_csv(dm: DiscreteMeasureMatrix) -> list[list]:
    """
    Rows node, lambda, rho_{., 1..q}, mu_{., 1..p} with a header row.
    """

    header = ["node", "lambda"] + [f"rho_{b + 1}" for b in range(dm.q)] + [f"mu_{a + 1}" for a in range(dm.p)]
    rows = [header]
    for k, x in enumerate(dm.nodes):
        values = [x] + dm.rho[k] + dm.mu[k]
        rows.append([k + 1] + [format_scalar(reported(v, dm.exact)) for v in values])

    return rows


def measures_json(dm: DiscreteMeasureMatrix, orders: list[HermitePadeOrders]) -> dict:
    return {
        "N": dm.N,
        "total_mass": [[format_scalar(reported(v, dm.exact)) for v in row] for row in dm.total_mass()],
        "hermite_pade": [o.to_json() for o in orders]
    }
