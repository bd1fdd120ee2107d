from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable

import numpy as np

from .error import Error, InternalError
from .banded import BandedMatrix
from .factorization import neville_factorize
from .recursion import InitialConditions, RecursionFamilies, generate_families, characteristic_polys, \
    determinantal_blocks, christoffel_darboux_check, blocks_agree, degree_law_holds
from .spectral import SpectralData, isolate_levels, isolation_bound, build_spectral_data, biorthogonality_residual, \
    christoffel_by_cofactors, christoffel_deviation, christoffel_minimum, eigenvector_sign_profile
from .measures import build_measures, mass_identity_residual, biorthogonality_table, hermite_pade_order, \
    weyl_convergence
from .quadrature import build_rule, verify_all
from .gaussborel import favard_round_trip
from .numerics.scalar import ScalarMode, format_scalar
from .numerics.dense import max_abs
from .util import flatten

CD_SAMPLES = 20
SIGN_PROFILE_MAX_N = 6


class CheckEntry:
    """
    One entry of a verification report.
    """

    name: str
    status: str
    max_residual: float | None
    details: dict

    def __init__(self, name: str, status: str, max_residual: float | None = None, details: dict | None = None):
        self.name = name
        self.status = status
        self.max_residual = max_residual
        self.details = details if details is not None else {}

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "max_residual": self.max_residual,
            "details": self.details
        }


class VerificationReport:
    """
    Ordered check entries with the seed that drove the sampled checks.
    """

    seed: int
    entries: list[CheckEntry]

    def __init__(self, seed: int, entries: list[CheckEntry] | None = None):
        self.seed = seed
        self.entries = entries if entries is not None else []

    @property
    def status(self) -> str:
        if not self.entries:
            return "pass-vacuous"

        return "fail" if any(e.failed for e in self.entries) else "pass"

    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for e in self.entries:
            out[e.status] += 1

        return out

    def entry(self, name: str) -> CheckEntry | None:
        return next((e for e in self.entries if e.name == name), None)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "status": self.status,
            "counts": self.counts(),
            "checks": [e.to_json() for e in self.entries]
        }


def _check(name: str, fn: Callable[[], tuple[bool, float | None, dict]]) -> CheckEntry:
    try:
        ok, residual, details = fn()
    except Error as e:
        return CheckEntry(name, "fail", None, {"error": e.kind.name, "message": e.msg, **_plain(e.details)})
    except InternalError as e:
        return CheckEntry(name, "fail", None, {"error": "InternalError", "message": str(e)})

    return CheckEntry(name, "pass" if ok else "fail", residual, details)


def _plain(details: dict) -> dict:
    return {k: v if isinstance(v, (int, str, bool)) or v is None else str(v) for k, v in details.items()}


def _within(value: float, tol: float) -> bool:
    return value <= tol


def _random_point(rng: np.random.Generator) -> Fraction:
    return Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8)))


class _Pipeline:
    """
    Stage results of one truncation index, filled as the checks run.
    """

    def __init__(self, T: BandedMatrix, ic: InitialConditions, N: int):
        self.T = T
        self.ic = ic
        self.N = N
        self.fam: RecursionFamilies | None = None
        self.Ps = None
        self.blocks = None
        self.sd: SpectralData | None = None
        self.dm = None


def checks_for(T: BandedMatrix, ic: InitialConditions, N: int, tol: float, seed: int) -> list[CheckEntry]:
    """
    Every check at truncation index N, in report order.

    Stages that depend on a failed stage are reported as skipped.

    Args:
        T: The banded matrix.
        ic: Initial conditions.
        N: Truncation index.
        tol: Residual tolerance for Float64 checks.
        seed: Seed of the sampled checks; combined with N so the order of evaluation does not matter.

    Returns:
        The entries.
    """

    rng = np.random.default_rng([seed, N])
    p, q = T.p, T.q
    state = _Pipeline(T, ic, N)
    exact = T.mode == ScalarMode.RATIONAL
    out = []

    def tag(name: str) -> str:
        return f"{name}[N={N}]"

    def factorization():
        t = T.truncate(N)
        f = neville_factorize(t, p, q)
        residual = max_abs(f.truncation(N) - t.entries)
        return residual == 0 if exact else _within(residual, tol), residual, {}

    out.append(_check(tag("factorization_round_trip"), factorization))

    def families():
        state.fam = generate_families(T, ic, N + max(p, q))
        state.Ps = characteristic_polys(T, N)
        state.blocks = determinantal_blocks(state.fam, N)
        return blocks_agree(state.blocks, state.Ps) and degree_law_holds(state.fam), None, {}

    out.append(_check(tag("determinant_identity"), families))
    if state.blocks is None:
        return out + [CheckEntry(tag(name), "skip", None, {"reason": "no determinantal blocks"}) for name in
                      ("christoffel_darboux", "interlacing", "biorthogonality", "christoffel_positivity",
                       "mass_identity", "hermite_pade", "quadrature", "favard_round_trip")]

    def christoffel_darboux():
        worst = 0.0
        for _ in range(CD_SAMPLES):
            x, y = _random_point(rng), _random_point(rng)
            if x == y:
                y += 1
            worst = max(worst, abs(float(christoffel_darboux_check(state.blocks, x, y))),
                        abs(float(christoffel_darboux_check(state.blocks, x))))
        return worst == 0 if exact else _within(worst, tol), worst, {"samples": CD_SAMPLES}

    out.append(_check(tag("christoffel_darboux"), christoffel_darboux))

    def interlacing():
        levels = isolate_levels(state.Ps, N, isolation_bound(T))
        return True, None, {"eigenvalues": [format_scalar(b.value) for b in levels[-1]]}

    entry = _check(tag("interlacing"), interlacing)
    out.append(entry)
    if entry.failed:
        return out + [CheckEntry(tag(name), "skip", None, {"reason": "eigenvalues not certified"}) for name in
                      ("biorthogonality", "christoffel_positivity", "mass_identity", "hermite_pade", "quadrature",
                       "favard_round_trip")]

    def biorthogonality():
        state.sd = build_spectral_data(T, state.fam, state.blocks, N, state.Ps)
        state.dm = build_measures(state.sd)
        residual = max(biorthogonality_residual(state.sd), biorthogonality_table(state.dm, state.fam))
        details = {}
        if N <= SIGN_PROFILE_MAX_N:
            profiles = [eigenvector_sign_profile(state.sd.U[:, k], k + 1, state.sd.exact) for k in range(N + 1)]
            details["sign_profiles"] = all(profile.passed for profile in profiles)
        ok = residual == 0 if state.sd.exact else _within(residual, tol)
        return ok and details.get("sign_profiles", True), residual, details

    entry = _check(tag("biorthogonality"), biorthogonality)
    out.append(entry)
    if state.sd is None:
        return out + [CheckEntry(tag(name), "skip", None, {"reason": "no spectral data"}) for name in
                      ("christoffel_positivity", "mass_identity", "hermite_pade", "quadrature", "favard_round_trip")]

    def positivity():
        minimum = christoffel_minimum(state.sd)
        deviation = christoffel_deviation(state.sd, christoffel_by_cofactors(state.sd, state.fam, state.blocks))
        return minimum > 0 and _within(deviation, tol), deviation, {"minimum": format_scalar(minimum)}

    out.append(_check(tag("christoffel_positivity"), positivity))

    def mass_identity():
        residual = mass_identity_residual(state.dm)
        return _within(residual, tol), residual, {}

    out.append(_check(tag("mass_identity"), mass_identity))

    def hermite_pade():
        orders = [hermite_pade_order(state.fam, state.dm, n) for n in range(N + 1)]
        return all(o.passed for o in orders), None, {"orders": [o.to_json() for o in orders]}

    out.append(_check(tag("hermite_pade"), hermite_pade))

    if N < max(p, q):
        out.append(CheckEntry(tag("quadrature"), "skip", None, {"reason": f"N below max(p, q) = {max(p, q)}"}))
    else:
        def quadrature():
            reports = verify_all(build_rule(state.sd), T, tol)
            residual = max(r.max_residual for r in reports)
            return all(r.passed for r in reports), residual, {"reports": [r.to_json() for r in reports]}

        out.append(_check(tag("quadrature"), quadrature))

    if N < p + q + 1:
        out.append(CheckEntry(tag("favard_round_trip"), "skip", None, {"reason": f"N below p + q + 1 = {p + q + 1}"}))
    else:
        def round_trip():
            result = favard_round_trip(T, ic, N)
            return result.passed(tol), result.deviation, {"window": result.window, "exact": result.exact}

        out.append(_check(tag("favard_round_trip"), round_trip))

    return out


def weyl_convergence_check(T: BandedMatrix, ic: InitialConditions, Ns: list[int], tol: float) -> CheckEntry:
    """
    Differences of the Weyl functions between the truncations N and 2N, expected non-increasing in N.

    Skipped when the horizon does not cover the largest doubled truncation.
    """

    needed = 2 * max(Ns) + T.p
    if needed > T.horizon:
        return CheckEntry("weyl_convergence", "skip", None,
                          {"reason": f"horizon {T.horizon} below 2 max(N) + p = {needed}"})

    def convergence():
        out = weyl_convergence(T, ic, Ns)
        d = out.differences
        ok = all(b <= a + tol for a, b in zip(d, d[1:]))
        return ok, max(d), out.to_json()

    return _check("weyl_convergence", convergence)


def verify_suite(T: BandedMatrix, ic: InitialConditions, Ns: list[int], tol: float, seed: int,
                 threads: int = 1) -> VerificationReport:
    """
    Run the checks for every truncation index.

    Args:
        T: The banded matrix.
        ic: Initial conditions.
        Ns: Truncation indices, ascending.
        tol: Residual tolerance.
        seed: Seed of the sampled checks.
        threads: Worker threads for the per-N fan-out.

    Returns:
        The report, identical for identical inputs whatever the thread count. A suite-wide
        weyl_convergence entry follows the per-N entries.
    """

    if threads > 1 and len(Ns) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(lambda N: checks_for(T, ic, N, tol, seed), Ns))
    else:
        results = [checks_for(T, ic, N, tol, seed) for N in Ns]

    entries = flatten(results)
    if Ns:
        entries.append(weyl_convergence_check(T, ic, list(Ns), tol))

    return VerificationReport(seed, entries)
