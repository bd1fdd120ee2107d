from typing import TYPE_CHECKING

import numpy as np

from .error import Error
from .numerics.scalar import Scalar, ScalarMode, convert, is_zero
from .numerics.dense import zeros, mode_of

if TYPE_CHECKING:
    from .factorization import BidiagonalFactorization


class Truncation:
    """
    Leading (N+1)x(N+1) block of a banded matrix.
    """

    N: int
    p: int
    q: int
    entries: np.ndarray

    def __init__(self, entries: np.ndarray, p: int, q: int):
        rows, cols = entries.shape
        if rows != cols:
            Error.non_square(rows, cols)

        self.entries = entries
        self.N = rows - 1
        self.p = p
        self.q = q

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def mode(self) -> ScalarMode:
        return mode_of(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def leading(self, N: int) -> "Truncation":
        if N > self.N:
            Error.horizon_exceeded(N, self.N)

        return Truncation(self.entries[:N + 1, :N + 1].copy(), self.p, self.q)

    def is_banded(self) -> bool:
        """
        Check that every entry outside the (p, q) band is zero.
        """

        n = self.size
        return all(self.entries[i, j] == 0
                   for i in range(n) for j in range(n)
                   if j - i > self.q or i - j > self.p)

    def band_positive(self, tol: float = 0.0) -> bool:
        """
        Check that every entry inside the (p, q) band is positive.
        """

        n = self.size
        return all(self.entries[i, j] > tol
                   for i in range(n) for j in range(max(0, i - self.p), min(n, i + self.q + 1)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Truncation):
            return NotImplemented

        return self.entries.shape == other.entries.shape and bool(np.all(self.entries == other.entries))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Truncation(N={self.N}, p={self.p}, q={self.q})"


class ExtremeProducts:
    """
    Sign-adjusted products of the extreme diagonals.
    """

    alpha: list[Scalar]
    beta: list[Scalar]

    def __init__(self, alpha: list[Scalar], beta: list[Scalar]):
        self.alpha = alpha
        self.beta = beta


class BandedMatrix:
    """
    Semi-infinite (p, q)-banded matrix given by finite generators.

    Entries are known for row and column indices up to the horizon. They come
    either from explicit diagonals or from a bidiagonal factorization whose
    product is formed once on first access. The shift s is applied on entry
    access, so the matrix seen by every operation is T + sI.
    """

    p: int
    q: int
    horizon: int
    shift: Scalar
    mode: ScalarMode
    bands: dict[int, list[Scalar]] | None
    factors: "BidiagonalFactorization | None"

    def __init__(self, p: int, q: int, horizon: int, bands: dict[int, list[Scalar]] | None = None,
                 factors: "BidiagonalFactorization | None" = None, shift: Scalar = 0,
                 mode: ScalarMode = ScalarMode.RATIONAL):
        """
        Args:
            p: Number of subdiagonals.
            q: Number of superdiagonals.
            horizon: Largest row/column index with known entries.
            bands: Diagonal d (j - i) mapped to its entries along the diagonal, top-left first.
            factors: Bidiagonal factorization generating the entries.
            shift: Shift s, the operator is T + sI.
            mode: Scalar mode of the entries.
        """

        if p < 1 or q < 1:
            Error.shape_violation("banded", f"needs p, q >= 1 (p={p}, q={q})")
        if (bands is None) == (factors is None):
            Error.shape_violation("banded", "needs exactly one of bands or factors")

        self.p = p
        self.q = q
        self.horizon = horizon
        self.mode = mode
        self.shift = convert(shift, mode)
        self.bands = bands
        self.factors = factors
        self._product = None
        self._bound = None

        if bands is not None:
            self._check_bands()

    @staticmethod
    def from_bands(p: int, q: int, bands: dict[int, list[Scalar]], horizon: int | None = None,
                   shift: Scalar = 0, mode: ScalarMode = ScalarMode.RATIONAL) -> "BandedMatrix":
        """
        Banded matrix from explicit diagonals.

        Args:
            p: Number of subdiagonals.
            q: Number of superdiagonals.
            bands: Diagonal d mapped to its entries; missing diagonals are an error.
            horizon: Largest valid index; inferred from the shortest diagonal when omitted.
            shift: Shift s.
            mode: Scalar mode.

        Returns:
            The banded matrix.
        """

        bands = {d: [convert(v, mode) for v in values] for d, values in bands.items()}
        if horizon is None:
            horizon = min(len(values) - 1 + abs(d) for d, values in bands.items())

        return BandedMatrix(p, q, horizon, bands=bands, shift=shift, mode=mode)

    @staticmethod
    def from_factors(f: "BidiagonalFactorization", shift: Scalar = 0) -> "BandedMatrix":
        return BandedMatrix(f.p, f.q, f.horizon - 1, factors=f, shift=shift, mode=f.mode)

    def _check_bands(self):
        for d in range(-self.p, self.q + 1):
            if d not in self.bands:
                Error.shape_violation("bands", f"misses diagonal [{d}]")

            needed = self.horizon + 1 - abs(d)
            if len(self.bands[d]) < needed:
                Error.horizon_exceeded(len(self.bands[d]) - 1 + abs(d), self.horizon)

        for d in set(self.bands) - set(range(-self.p, self.q + 1)):
            if any(v != 0 for v in self.bands[d]):
                Error.shape_violation("bands", f"has nonzero diagonal [{d}] outside the band")

        for n in range(self.horizon + 1 - self.p):
            if is_zero(self.bands[-self.p][n], 0.0):
                Error.zero_extreme_diagonal("lower", n)
        for n in range(self.horizon + 1 - self.q):
            if is_zero(self.bands[self.q][n], 0.0):
                Error.zero_extreme_diagonal("upper", n)

    def with_shift(self, s: Scalar) -> "BandedMatrix":
        """
        Same generators with a different shift.
        """

        out = BandedMatrix(self.p, self.q, self.horizon, bands=self.bands, factors=self.factors, shift=s,
                           mode=self.mode)
        out._product = self._product
        return out

    def _factor_product(self) -> np.ndarray:
        if self._product is None:
            self._product = self.factors.truncation(self.horizon)

        return self._product

    def _raw(self, i: int, j: int) -> Scalar:
        if j - i > self.q or i - j > self.p:
            return self.mode.zero()

        if self.bands is not None:
            return self.bands[j - i][min(i, j)]

        return self._factor_product()[i, j]

    def entry(self, i: int, j: int) -> Scalar:
        """
        Entry (i, j) of T + sI.

        Args:
            i: Row index.
            j: Column index.

        Returns:
            The entry, zero outside the band.
        """

        if i < 0 or j < 0:
            Error.index_out_of_range(min(i, j), self.horizon)
        if max(i, j) > self.horizon:
            Error.horizon_exceeded(max(i, j), self.horizon)

        value = self._raw(i, j)
        return value + self.shift if i == j else value

    def block(self, M: int) -> np.ndarray:
        """
        Leading (M+1)x(M+1) block as a dense matrix, requiring only M <= horizon.
        """

        if M > self.horizon:
            Error.horizon_exceeded(M, self.horizon)

        out = zeros(M + 1, M + 1, self.mode)
        for i in range(M + 1):
            for j in range(max(0, i - self.p), min(M, i + self.q) + 1):
                out[i, j] = self.entry(i, j)

        return out

    def truncate(self, N: int) -> Truncation:
        """
        Truncation T^[N], the leading (N+1)x(N+1) block including the shift.

        Args:
            N: Truncation index, N >= 0.

        Returns:
            The truncation.
        """

        if N < 0:
            Error.index_out_of_range(N, self.horizon)

        needed = N + self.p if self.bands is not None else N
        if needed > self.horizon:
            Error.horizon_exceeded(needed, self.horizon)

        return Truncation(self.block(N), self.p, self.q)

    def band_bound(self) -> float:
        """
        Largest absolute row sum over the horizon.

        Returns:
            The row-sum bound, an upper bound for every truncation eigenvalue modulus.
        """

        if self._bound is None:
            self._bound = max(
                sum(abs(float(self.entry(i, j)))
                    for j in range(max(0, i - self.p), min(self.horizon, i + self.q) + 1))
                for i in range(self.horizon + 1))

        return self._bound

    def reach_bound(self, n: int) -> int:
        """
        Truncation index large enough for exact semi-infinite brackets of T^n.
        """

        return (n + 1) * max(self.p, self.q)

    def __repr__(self) -> str:
        source = "bands" if self.bands is not None else "factors"
        return f"BandedMatrix(p={self.p}, q={self.q}, horizon={self.horizon}, shift={self.shift}, {source})"


def truncate(T: BandedMatrix, N: int) -> Truncation:
    return T.truncate(N)


def power_bracket(T: BandedMatrix, n: int, left: np.ndarray, right: np.ndarray, M: int) -> Scalar:
    """
    Bracket left^T T^n right computed on the truncation of index M.

    Walks of length n starting in the first max(p, q) rows stay below the
    reach bound, so the value equals the semi-infinite bracket.

    Args:
        T: The banded matrix.
        n: The power.
        left: Vector supported on the first q entries.
        right: Vector supported on the first p entries.
        M: Truncation index, at least T.reach_bound(n).

    Returns:
        The bracket.
    """

    needed = T.reach_bound(n)
    if M < needed:
        Error.insufficient_truncation(M, needed)

    t = T.block(M)
    v = zeros(M + 1, 1, T.mode)[:, 0]
    for i, value in enumerate(right):
        v[i] = value

    for _ in range(n):
        v = t @ v

    return sum((left[i] * v[i] for i in range(len(left))), T.mode.zero())


def extreme_products(T: BandedMatrix, N_max: int) -> ExtremeProducts:
    """
    Products alpha_N and beta_N for N = 0..N_max.

    Args:
        T: The banded matrix.
        N_max: Largest index.

    Returns:
        The two sequences, alpha_0 = beta_0 = 1.
    """

    alpha = [T.mode.one()]
    beta = [T.mode.one()]

    sign_p = -1 if (T.p - 1) % 2 else 1
    sign_q = -1 if (T.q - 1) % 2 else 1
    for N in range(N_max):
        alpha.append(sign_p * T.entry(N + T.p, N) * alpha[-1])
        beta.append(sign_q * T.entry(N, N + T.q) * beta[-1])

    return ExtremeProducts(alpha, beta)


def monic_normalization(t: Truncation) -> Truncation:
    """
    Diagonal similarity C T C^-1 that turns the extreme superdiagonal into ones.

    c_n = 1 for n < q and c_{n+q} = c_n T_{n,n+q}. Moment data only determine a
    banded matrix up to this similarity, so Gauss-Borel recovery returns this form.

    Args:
        t: The truncation.

    Returns:
        The normalized truncation.
    """

    n = t.size
    c = monic_scales(t)

    out = t.entries.copy()
    for i in range(n):
        for j in range(n):
            if out[i, j] != 0:
                out[i, j] = c[i] * out[i, j] / c[j]

    return Truncation(out, t.p, t.q)


def monic_scales(t: Truncation) -> list[Scalar]:
    """
    Diagonal of the similarity used by monic_normalization.
    """

    n = t.size
    c = [t.mode.one()] * n
    for i in range(n - t.q):
        c[i + t.q] = c[i] * t[i, i + t.q]

    return c


def sparsity_holds(t: Truncation, n: int) -> bool:
    """
    Check the band reach of the n-th power of a truncation.
    """

    power = np.linalg.matrix_power(t.entries, n) if n > 0 else None
    if power is None:
        return True

    size = t.size
    return all(power[i, j] == 0
               for i in range(size) for j in range(size)
               if j - i > n * t.q or i - j > n * t.p)
