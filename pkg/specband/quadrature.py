from .error import Error
from .banded import BandedMatrix, power_bracket
from .spectral import SpectralData
from .measures import DiscreteMeasureMatrix, build_measures, mass_identity_residual
from .recursion import RecursionFamilies
from .numerics.scalar import Scalar, is_exact, format_scalar, magnitude, reported
from .util import ceil_div

# relative residual accepted from a rule on approximate nodes
QUADRATURE_TOL = 1e-8
# an approximate remainder counts as genuine only this far above the residual noise
REMAINDER_MARGIN = 100


def precision_table(p: int, q: int, N: int) -> list[list[int]]:
    """
    d_{b,a}(N) = ceil((N + 2 - a) / p) + ceil((N + 2 - b) / q) - 1, indexed [b][a] from 0.
    """

    return [[ceil_div(N + 2 - a, p) + ceil_div(N + 2 - b, q) - 1 for a in range(1, p + 1)]
            for b in range(1, q + 1)]


def degrees_of_precision(p: int, q: int, N: int) -> list[list[int]]:
    """
    Degrees of precision of the mixed Gauss rules with N + 1 nodes.

    Args:
        p: Number of subdiagonals.
        q: Number of superdiagonals.
        N: Truncation index, at least max(p, q).

    Returns:
        The q x p table.
    """

    if N < max(p, q):
        Error.assumption_violated(N, p, q)

    return precision_table(p, q, N)


class QuadratureRule:
    """
    Mixed multiple Gauss quadrature rule of index N.

    weights[b][a][k] = rho_{k,b} mu_{k,a} is the weight of node k in the (b, a) rule.
    """

    N: int
    p: int
    q: int
    nodes: list[Scalar]
    weights: list[list[list[Scalar]]]
    degrees: list[list[int]]
    measures: DiscreteMeasureMatrix

    def __init__(self, measures: DiscreteMeasureMatrix, weights: list[list[list[Scalar]]], degrees: list[list[int]]):
        self.measures = measures
        self.N = measures.N
        self.p = measures.p
        self.q = measures.q
        self.nodes = measures.nodes
        self.weights = weights
        self.degrees = degrees

    def apply(self, b: int, a: int, n: int) -> Scalar:
        """
        The rule applied to x^n.
        """

        return sum((w * x ** n for w, x in zip(self.weights[b][a], self.nodes)), 0 * self.weights[b][a][0])

    def __repr__(self) -> str:
        return f"QuadratureRule(N={self.N}, p={self.p}, q={self.q})"


def build_rule(sd: SpectralData) -> QuadratureRule:
    """
    Gauss rule with the eigenvalues of T^[N] as nodes.

    Args:
        sd: Spectral data of a PBF truncation with admissible initial conditions.

    Returns:
        The rule; every weight is positive.
    """

    dm = build_measures(sd)
    weights = []
    for b in range(sd.q):
        row = []
        for a in range(sd.p):
            column = []
            for k in range(sd.N + 1):
                w = dm.mass(k, b, a)
                if w <= 0:
                    Error.non_positive_weight(b + 1, a + 1, k + 1, w)
                column.append(w)
            row.append(column)
        weights.append(row)

    return QuadratureRule(dm, weights, precision_table(sd.p, sd.q, sd.N))


class ExactnessReport:
    """
    Exactness of one (b, a) rule against the semi-infinite moments.

    residuals[n] is the semi-infinite moment minus the rule, n = 0..d; the
    remainder is the same difference at order d + 1. moments holds the
    semi-infinite moments n = 0..d+1, the scale of each difference.

    Approximate rules are judged on differences relative to max(1, |moment|).
    The tolerance widens to REMAINDER_MARGIN times the mass identity residual
    of the rule when that is the larger, and the remainder counts as genuine
    only REMAINDER_MARGIN times above the noise floor.
    """

    b: int
    a: int
    degree: int
    residuals: list[Scalar]
    remainder: Scalar
    moments: list[Scalar]
    exact: bool
    tol: float
    noise: float

    def __init__(self, b: int, a: int, degree: int, residuals: list[Scalar], remainder: Scalar, moments: list[Scalar],
                 exact: bool, tol: float = QUADRATURE_TOL, noise: float = 0.0):
        self.b = b
        self.a = a
        self.degree = degree
        self.residuals = residuals
        self.remainder = remainder
        self.moments = moments
        self.exact = exact
        self.tol = tol
        self.noise = noise

    def _relative(self, n: int, value: Scalar) -> float:
        return magnitude(value) / max(1.0, magnitude(self.moments[n]))

    @property
    def max_residual(self) -> float:
        return max(abs(float(r)) for r in self.residuals)

    @property
    def max_relative_residual(self) -> float:
        return max(self._relative(n, r) for n, r in enumerate(self.residuals))

    @property
    def relative_remainder(self) -> float:
        return self._relative(self.degree + 1, self.remainder)

    @property
    def tolerance(self) -> float:
        return max(self.tol, REMAINDER_MARGIN * self.noise)

    @property
    def noise_floor(self) -> float:
        return max(self.max_relative_residual, self.noise)

    @property
    def exact_through_degree(self) -> bool:
        if self.exact:
            return all(r == 0 for r in self.residuals)

        return self.max_relative_residual <= self.tolerance

    @property
    def optimal(self) -> bool:
        if self.exact:
            return self.remainder > 0

        return self.remainder > 0 and self.relative_remainder > REMAINDER_MARGIN * self.noise_floor

    @property
    def passed(self) -> bool:
        return self.exact_through_degree and self.optimal

    def to_json(self) -> dict:
        return {
            "b": self.b + 1,
            "a": self.a + 1,
            "degree": self.degree,
            "residuals": [format_scalar(reported(r, self.exact)) for r in self.residuals],
            "remainder": format_scalar(reported(self.remainder, self.exact)),
            "exact": self.exact,
            "max_relative_residual": self.max_relative_residual,
            "tolerance": self.tolerance,
            "status": "pass" if self.passed else "fail"
        }


def verify_exactness(rule: QuadratureRule, T: BandedMatrix, b: int, a: int,
                     tol: float = QUADRATURE_TOL) -> ExactnessReport:
    """
    Check the (b, a) rule against (e_b^xi)^T T^n e_a^nu for n = 0..d_{b,a}(N) + 1.

    The semi-infinite side is a bracket on a truncation past the reach
    bound. The rule side is always the weighted node sum, so a wrong weight
    or node shows up as a residual.

    Args:
        rule: The rule.
        T: The banded matrix the rule was built from, with its shift.
        b: Right index, 0-based.
        a: Left index, 0-based.
        tol: Relative tolerance for rules on approximate nodes.

    Returns:
        The report; it passes when the rule is exact through the degree and the next remainder is positive.
    """

    dm = rule.measures
    d = rule.degrees[b][a]
    M = T.reach_bound(d + 1)
    if M > T.horizon:
        Error.horizon_exceeded(M, T.horizon)

    left = [dm.ic.right_weights()[b, i] for i in range(dm.q)]
    right = [dm.ic.left_weights()[i, a] for i in range(dm.p)]

    moments, differences = [], []
    for n in range(d + 2):
        semi = power_bracket(T, n, left, right, T.reach_bound(n))
        moments.append(semi)
        differences.append(semi - rule.apply(b, a, n))

    exact = dm.exact and all(is_exact(v) for v in differences)
    noise = 0.0 if exact else mass_identity_residual(dm)
    return ExactnessReport(b, a, d, differences[:-1], differences[-1], moments, exact, tol, noise)


def verify_all(rule: QuadratureRule, T: BandedMatrix, tol: float = QUADRATURE_TOL) -> list[ExactnessReport]:
    return [verify_exactness(rule, T, b, a, tol) for b in range(rule.q) for a in range(rule.p)]


def degree_consistency(rule: QuadratureRule, fam: RecursionFamilies) -> bool:
    """
    d_{b,a}(N) = deg A^(a)_N + deg B^(b)_N + 1 for every pair.
    """

    N = rule.N
    fam.require(N)
    return all(rule.degrees[b][a] == fam.A[a][N].degree + fam.B[b][N].degree + 1
               for b in range(rule.q) for a in range(rule.p))


def interpolatory_check(rule: QuadratureRule, fam: RecursionFamilies) -> bool:
    """
    d_{b,a}(N) >= deg B^(b)_N - 1 for every pair.
    """

    fam.require(rule.N)
    return all(rule.degrees[b][a] >= fam.B[b][rule.N].degree - 1 for b in range(rule.q) for a in range(rule.p))


def rule_csv(rule: QuadratureRule) -> list[list]:
    """
    Rows k, lambda_k, w^(b,a)_k with a header row.
    """

    pairs = [(b, a) for b in range(rule.q) for a in range(rule.p)]
    rows = [["k", "lambda"] + [f"w_{b + 1}_{a + 1}" for b, a in pairs]]
    for k, x in enumerate(rule.nodes):
        values = [x] + [rule.weights[b][a][k] for b, a in pairs]
        rows.append([k + 1] + [format_scalar(reported(v, rule.measures.exact)) for v in values])

    return rows


def exactness_json(rule: QuadratureRule, reports: list[ExactnessReport]) -> dict:
    return {
        "N": rule.N,
        "p": rule.p,
        "q": rule.q,
        "degrees": rule.degrees,
        "reports": [r.to_json() for r in reports],
        "status": "pass" if all(r.passed for r in reports) else "fail"
    }
