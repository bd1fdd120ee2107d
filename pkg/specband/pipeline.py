from .banded import BandedMatrix
from .factorization import BidiagonalFactorization, neville_factorize
from .recursion import InitialConditions, RecursionFamilies, DeterminantalBlocks, generate_families, \
    characteristic_polys, determinantal_blocks
from .spectral import SpectralData, AdmissibleIC, build_spectral_data, admissible_ic
from .measures import DiscreteMeasureMatrix, build_measures
from .numerics.polynomial import Polynomial


class Analysis:
    """
    Every stage of the spectral pipeline at one truncation index.
    """

    N: int
    fam: RecursionFamilies
    polys: list[Polynomial]
    blocks: DeterminantalBlocks
    sd: SpectralData
    dm: DiscreteMeasureMatrix

    def __init__(self, N: int, fam: RecursionFamilies, polys: list[Polynomial], blocks: DeterminantalBlocks,
                 sd: SpectralData, dm: DiscreteMeasureMatrix):
        self.N = N
        self.fam = fam
        self.polys = polys
        self.blocks = blocks
        self.sd = sd
        self.dm = dm


def analyze(T: BandedMatrix, ic: InitialConditions, N: int) -> Analysis:
    """
    Run the spectral pipeline on T^[N]

    Args:
        T: The banded matrix.
        ic: Initial conditions.
        N: Truncation index.

    Returns:
        Families, characteristic polynomials, determinantal blocks, spectral data and measures.
    """

    fam = generate_families(T, ic, N + max(T.p, T.q))
    polys = characteristic_polys(T, N)
    blocks = determinantal_blocks(fam, N)
    sd = build_spectral_data(T, fam, blocks, N, polys)
    dm = build_measures(sd)

    return Analysis(N, fam, polys, blocks, sd, dm)


def factorization_of(T: BandedMatrix, N: int) -> BidiagonalFactorization:
    """
    The generating factorization of T when it has one, else the factorization of T^[N].
    """

    if T.factors is not None and T.shift == 0:
        return T.factors

    return neville_factorize(T.truncate(N), T.p, T.q)


def default_ic(T: BandedMatrix, N: int, Acal=None, Bcal=None) -> AdmissibleIC:
    """
    Admissible initial conditions from the factorization of T (or of T^[N]).
    """

    return admissible_ic(factorization_of(T, N), Acal, Bcal)
