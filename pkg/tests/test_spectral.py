import unittest
from fractions import Fraction

import numpy as np

from specband.error import Error, ErrorKind
from specband.recursion import InitialConditions, generate_families, characteristic_polys, determinantal_blocks
from specband.spectral import RootBracket, cauchy_bound, fujiwara_bound, root_bound, isolation_bound, isolate_levels, isolate_roots, eigenvalues, \
    build_spectral_data, christoffel_by_cofactors, christoffel_deviation, biorthogonality_residual, \
    spectral_power_residual, christoffel_minimum, admissible_ic, eigenvector_sign_profile, orthogonality_interval, \
    jacobi_shift, spectral_csv
from specband.fixtures import f1, f1_unshifted, f2, f2_factorization, random_factorization, flip_sign
from specband.pipeline import analyze, default_ic
from specband.measures import mass_identity_residual
from specband.factorization import assemble, neville_factorize
from specband.numerics.polynomial import Polynomial
from specband.numerics.dense import matrix
from specband.numerics.scalar import ScalarMode, PRECISION_BITS


def spectral(T, ic, N):
    fam = generate_families(T, ic, N + max(T.p, T.q))
    Ps = characteristic_polys(T, N)
    blocks = determinantal_blocks(fam, N)
    return fam, blocks, build_spectral_data(T, fam, blocks, N, Ps)


class RootTestCase(unittest.TestCase):
    def test_cauchy_bound(self):
        self.assertEqual(cauchy_bound(Polynomial([1, -4, 1])), 6)
        self.assertGreater(cauchy_bound(Polynomial([-100, 1])), 100)

    def test_fujiwara_bound(self):
        self.assertEqual(fujiwara_bound(Polynomial([-100, 1])), 101)
        # roots 1, 2, 4, ..., 2^9: the coefficients grow far faster than the roots
        poly = Polynomial.from_roots([2 ** k for k in range(10)])
        self.assertGreater(root_bound(poly), 2 ** 9)
        self.assertLess(root_bound(poly), cauchy_bound(poly))

    def test_isolation_bound(self):
        T = f2()
        bound = isolation_bound(T)
        self.assertEqual(bound.denominator, 1)
        self.assertGreater(bound, T.band_bound())
        for bracket in isolate_roots(characteristic_polys(T, 8), 8, bound):
            self.assertLess(abs(bracket.point), bound)

    def test_f1_rational_roots(self):
        Ps = characteristic_polys(f1(), 1)
        roots = isolate_roots(Ps, 1)
        self.assertEqual([r.exact for r in roots], [Fraction(3, 2), Fraction(1, 2)])
        self.assertEqual(eigenvalues(Ps, 1), [Fraction(3, 2), Fraction(1, 2)])

    def test_irrational_roots(self):
        Ps = characteristic_polys(f2(), 1)
        roots = isolate_roots(Ps, 1)
        expected = (2 + 3 ** 0.5, 2 - 3 ** 0.5)
        for bracket, x in zip(roots, expected):
            with self.subTest(x=x):
                self.assertIsNone(bracket.exact)
                self.assertLess(bracket.lo, bracket.hi)
                self.assertNotEqual(Ps[2].sign_at(bracket.lo), Ps[2].sign_at(bracket.hi))
                self.assertAlmostEqual(bracket.value, x, places=10)

    def test_levels_interlace(self):
        Ps = characteristic_polys(f2(), 6)
        levels = isolate_levels(Ps, 6)
        for k in range(1, 7):
            upper, lower = levels[k], levels[k - 1]
            for i, bracket in enumerate(lower):
                with self.subTest(k=k, i=i):
                    self.assertGreater(upper[i].point, bracket.point)
                    self.assertLess(upper[i + 1].point, bracket.point)

    def test_interlacing_violated(self):
        Ps = characteristic_polys(flip_sign(f1(), 1, 0), 1)
        self.assertEqual(Ps[2], Polynomial([Fraction(5, 4), -2, 1]))
        with self.assertRaises(Error) as cm:
            isolate_levels(Ps, 1)
        self.assertEqual(cm.exception.kind, ErrorKind.INTERLACING_VIOLATED)

    def test_wrong_degree(self):
        with self.assertRaises(Error) as cm:
            isolate_levels([Polynomial([1]), Polynomial([-1, 1]), Polynomial([1, 1])], 1)
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

    def test_bracket(self):
        self.assertEqual(RootBracket(Fraction(1), Fraction(2)).point, Fraction(3, 2))
        self.assertEqual(RootBracket(Fraction(1), Fraction(1), Fraction(1)).width, 0)


class SpectralDataTestCase(unittest.TestCase):
    def test_f1_christoffel_numbers(self):
        _, _, sd = spectral(f1(), InitialConditions.identity(1, 1), 1)
        self.assertEqual(sd.mode, ScalarMode.RATIONAL)
        self.assertEqual(sd.eigenvalues, [Fraction(3, 2), Fraction(1, 2)])
        self.assertEqual(sd.U.tolist(), [[1, 1], [Fraction(1, 2), Fraction(-1, 2)]])
        self.assertEqual(sd.W.tolist(), [[Fraction(1, 2), 1], [Fraction(1, 2), -1]])
        self.assertEqual(sd.mu, [[Fraction(1, 2)], [Fraction(1, 2)]])
        self.assertEqual(sd.rho, [[1], [1]])

    def test_exact_biorthogonality(self):
        _, _, sd = spectral(f1(), InitialConditions.identity(1, 1), 1)
        self.assertEqual(biorthogonality_residual(sd), 0)
        for n in range(4):
            with self.subTest(n=n):
                self.assertEqual(spectral_power_residual(sd, n), 0)

    def test_f2_float_path(self):
        ic = admissible_ic(f2_factorization(mode=ScalarMode.FLOAT)).ic
        for N in (2, 4, 6, 8):
            with self.subTest(N=N):
                fam, blocks, sd = spectral(f2(mode=ScalarMode.FLOAT), ic, N)
                self.assertEqual(sd.mode, ScalarMode.FLOAT)
                self.assertLess(biorthogonality_residual(sd), 1e-9)
                self.assertLess(spectral_power_residual(sd, 2), 1e-9)
                self.assertLess(christoffel_deviation(sd, christoffel_by_cofactors(sd, fam, blocks)), 1e-8)

    def test_f2_irrational_nodes(self):
        ic = admissible_ic(f2_factorization()).ic
        for N in (2, 4, 6):
            with self.subTest(N=N):
                fam, blocks, sd = spectral(f2(), ic, N)
                self.assertFalse(sd.exact)
                self.assertLess(biorthogonality_residual(sd), 1e-20)
                self.assertLess(christoffel_deviation(sd, christoffel_by_cofactors(sd, fam, blocks)), 1e-20)

    def test_f2_float_precision_large_index(self):
        T = f2(mode=ScalarMode.FLOAT)
        an = analyze(T, default_ic(T, 24).ic, 24)
        self.assertFalse(an.sd.exact)
        self.assertLess(biorthogonality_residual(an.sd), 1e-9)
        self.assertLess(mass_identity_residual(an.dm), 1e-10)

        bound = isolation_bound(T)
        for bracket in an.sd.brackets:
            self.assertLessEqual(bracket.width, bound * Fraction(1, 10 ** 12))
            self.assertLessEqual(bracket.width, bound / 2 ** PRECISION_BITS)

    def test_rational_precision_large_index(self):
        T = f2()
        an = analyze(T, default_ic(T, 16).ic, 16)
        self.assertLess(biorthogonality_residual(an.sd), 1e-20)
        self.assertLess(spectral_power_residual(an.sd, 3), 1e-15)

    def test_christoffel_positivity(self):
        rng = np.random.default_rng(3)
        for p, q in ((1, 1), (2, 1), (1, 2), (2, 2)):
            with self.subTest(p=p, q=q):
                f = random_factorization(rng, p, q, 24)
                T = assemble(f)
                _, _, sd = spectral(T, admissible_ic(f).ic, 4)
                self.assertGreater(christoffel_minimum(sd), 0)

    def test_sign_profiles(self):
        _, _, sd = spectral(f2(), admissible_ic(f2_factorization()).ic, 5)
        for k in range(6):
            with self.subTest(k=k):
                self.assertTrue(eigenvector_sign_profile(sd.U[:, k], k + 1, sd.exact).passed)
                self.assertTrue(eigenvector_sign_profile(sd.W[k, :], k + 1, sd.exact).passed)

    def test_spectral_csv(self):
        _, _, sd = spectral(f1(), InitialConditions.identity(1, 1), 1)
        rows = spectral_csv(sd)
        self.assertEqual(rows[0], ["k", "lambda", "mu_1", "rho_1"])
        self.assertEqual(rows[1], [1, "3/2", "1/2", "1"])

    def test_orthogonality_interval(self):
        ic = InitialConditions.identity(1, 1)
        spectra = [spectral(f1(), ic, N)[2] for N in (1, 2, 3)]
        lo, hi = orthogonality_interval(spectra)
        self.assertGreater(lo, 0)
        self.assertLess(hi, 2)


class AdmissibleTestCase(unittest.TestCase):
    def test_lambda_p2(self):
        out = admissible_ic(f2_factorization())
        self.assertEqual(out.Lambda.tolist(), [[1, 1], [0, 1]])
        self.assertEqual(out.nu.tolist(), [[1, 0], [-1, 1]])
        self.assertEqual(out.xi.tolist(), [[1]])

    def test_lambda_scaled(self):
        f = neville_factorize(f2().truncate(6), 2, 1)
        f.lower[0][0] = Fraction(2)
        out = admissible_ic(f)
        self.assertEqual(out.Lambda.tolist(), [[1, Fraction(1, 2)], [0, 1]])

    def test_overrides(self):
        Acal = matrix([[1, Fraction(1, 3)], [0, 1]])
        out = admissible_ic(f2_factorization(), Acal=Acal)
        self.assertEqual(out.ic.nu[1, 0], -Fraction(4, 3))

        with self.assertRaises(Error) as cm:
            admissible_ic(f2_factorization(), Acal=matrix([[1, -1], [0, 1]]))
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

        with self.assertRaises(Error) as cm:
            admissible_ic(f2_factorization(), Bcal=matrix([[1, 0], [1, 1]]))
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

    def test_float_keeps_unit_diagonal(self):
        out = admissible_ic(f2_factorization(mode=ScalarMode.FLOAT))
        self.assertEqual(out.nu[0, 0], 1.0)
        self.assertEqual(out.nu[1, 1], 1.0)


class SignProfileTestCase(unittest.TestCase):
    PROFILES = (
        ([1, 2, 3], 1, True),
        ([1, -2, 3], 3, True),
        ([1, 0, 1], 1, False),
        ([0, 1, -1], 2, False)
    )

    def test_profiles(self):
        for v, k, passed in SignProfileTestCase.PROFILES:
            with self.subTest(v=v):
                self.assertEqual(eigenvector_sign_profile([Fraction(x) for x in v], k).passed, passed)

    def test_zero_counts(self):
        profile = eigenvector_sign_profile([Fraction(1), Fraction(0), Fraction(1)], 1)
        self.assertEqual((profile.minimum, profile.maximum), (0, 2))

    def test_approximate_zero(self):
        v = [Fraction(1), Fraction(1, 2 ** 100), Fraction(1)]
        self.assertTrue(eigenvector_sign_profile(v, 1, exact=True).passed)
        profile = eigenvector_sign_profile(v, 1, exact=False)
        self.assertEqual((profile.minimum, profile.maximum), (0, 2))
        self.assertEqual(eigenvector_sign_profile([1.0, 1e-12, 1.0], 1).maximum, 2)

    def test_zero_vector(self):
        with self.assertRaises(Error) as cm:
            eigenvector_sign_profile([Fraction(0)] * 3, 1)
        self.assertEqual(cm.exception.kind, ErrorKind.ZERO_VECTOR)


class JacobiShiftTestCase(unittest.TestCase):
    def test_shift(self):
        s = jacobi_shift(f1_unshifted(), 4)
        self.assertAlmostEqual(float(s), 3 ** 0.5 / 2, places=9)
        self.assertGreaterEqual(s, Fraction(3 ** 0.5 / 2) - Fraction(1, 10 ** 9))
        neville_factorize(f1_unshifted().with_shift(s).truncate(4), 1, 1)

    def test_already_positive(self):
        self.assertEqual(jacobi_shift(f1(), 4), 0)

    def test_needs_tridiagonal(self):
        with self.assertRaises(Error) as cm:
            jacobi_shift(f2(), 3)
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)


if __name__ == '__main__':
    unittest.main()
