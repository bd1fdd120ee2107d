from fractions import Fraction

import numpy as np

from .banded import BandedMatrix
from .factorization import BidiagonalFactorization, uniform_factorization, assemble
from .measures import DiscreteMeasureMatrix
from .numerics.scalar import ScalarMode

FIXTURE_HORIZON = 64


def f1(shift: Fraction = Fraction(1), horizon: int = FIXTURE_HORIZON,
       mode: ScalarMode = ScalarMode.RATIONAL) -> BandedMatrix:
    """
    Chebyshev-type tridiagonal matrix: zero diagonal, 1 above, 1/4 below, plus the shift.
    """

    bands = {
        -1: [Fraction(1, 4)] * horizon,
        0: [Fraction(0)] * (horizon + 1),
        1: [Fraction(1)] * horizon
    }
    return BandedMatrix.from_bands(1, 1, bands, horizon, shift, mode)


def f1_unshifted(horizon: int = FIXTURE_HORIZON) -> BandedMatrix:
    return f1(Fraction(0), horizon)


def f2_factorization(horizon: int = FIXTURE_HORIZON + 1,
                     mode: ScalarMode = ScalarMode.RATIONAL) -> BidiagonalFactorization:
    return uniform_factorization(2, 1, 1, horizon, mode)


def f2(horizon: int = FIXTURE_HORIZON + 1, mode: ScalarMode = ScalarMode.RATIONAL) -> BandedMatrix:
    """
    (2, 1)-banded matrix whose factorization has every parameter equal to 1.
    """

    return assemble(f2_factorization(horizon, mode))


def random_rational(rng: np.random.Generator, top: int = 9) -> Fraction:
    return Fraction(int(rng.integers(1, top + 1)), int(rng.integers(1, top + 1)))


def random_factorization(rng: np.random.Generator, p: int, q: int, horizon: int) -> BidiagonalFactorization:
    """
    Factorization with independent positive rationals a/b, 1 <= a, b <= 9.
    """

    lower = [[random_rational(rng) for _ in range(horizon - 1)] for _ in range(p)]
    delta = [random_rational(rng) for _ in range(horizon)]
    upper = [[random_rational(rng) for _ in range(horizon - 1)] for _ in range(q)]
    return BidiagonalFactorization(lower, delta, upper)


def materialize(T: BandedMatrix) -> BandedMatrix:
    """
    Explicitly banded copy of a matrix, the shift kept separate.
    """

    if T.bands is not None:
        return T

    unshifted = T.with_shift(0)
    bands = {d: [unshifted.entry(i, i + d) for i in range(max(0, -d), T.horizon + 1 - max(0, d))]
             for d in range(-T.p, T.q + 1)}
    return BandedMatrix(T.p, T.q, T.horizon, bands=bands, shift=T.shift, mode=T.mode)


def flip_sign(T: BandedMatrix, d: int, index: int) -> BandedMatrix:
    """
    Copy of a matrix with entry index of diagonal d negated.
    """

    T = materialize(T)
    bands = {k: list(values) for k, values in T.bands.items()}
    bands[d][index] = -bands[d][index]
    return BandedMatrix(T.p, T.q, T.horizon, bands=bands, shift=T.shift, mode=T.mode)


def corrupt_measures(dm: DiscreteMeasureMatrix, factor: int = 3) -> DiscreteMeasureMatrix:
    """
    Copy of discrete measures with every mu scaled by factor and the nodes in reverse order.
    """

    mu = [[factor * v for v in row] for row in dm.mu]
    return DiscreteMeasureMatrix(list(reversed(dm.nodes)), dm.rho, mu, dm.ic, dm.truncation, dm.exact)
