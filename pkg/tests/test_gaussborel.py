import unittest
from fractions import Fraction

from specband.error import Error, ErrorKind
from specband.banded import BandedMatrix, monic_normalization
from specband.recursion import InitialConditions
from specband.pipeline import analyze, default_ic
from specband.gaussborel import moment_entry, moment_matrix, hankel_residual, shift_symmetry_residual, gauss_borel, \
    recover_recursion_matrix, recovery_discrepancy, recovered_polynomials, cauchy_transform_residual, \
    favard_round_trip
from specband.fixtures import f1, f2, corrupt_measures
from specband.numerics.dense import max_abs


def f1_measures(N: int):
    return analyze(f1(), InitialConditions.identity(1, 1), N)


class MomentMatrixTestCase(unittest.TestCase):
    def test_f1_window(self):
        mm = moment_matrix(f1_measures(1).dm, 2)
        self.assertEqual(mm.entries.tolist(), [[1, 1], [1, Fraction(5, 4)]])

    def test_scalar_indexing(self):
        dm = analyze(f2(), default_ic(f2(), 4).ic, 4).dm
        # row 1 is order 1 of psi_{1, .}, column 3 is order 1 of psi_{., 2}
        self.assertEqual(moment_entry(dm, 1, 3), dm.moment(0, 1, 2))
        self.assertEqual(moment_entry(dm, 0, 2), dm.moment(0, 0, 1))

    def test_structure(self):
        for T, ic in ((f1(), InitialConditions.identity(1, 1)), (f2(), default_ic(f2(), 6).ic)):
            with self.subTest(p=T.p, q=T.q):
                mm = moment_matrix(analyze(T, ic, 6).dm, 7)
                self.assertEqual(hankel_residual(mm), 0)
                self.assertEqual(shift_symmetry_residual(mm), 0)


class GaussBorelTestCase(unittest.TestCase):
    def test_factors(self):
        mm = moment_matrix(f1_measures(3).dm, 4)
        f = gauss_borel(mm)
        self.assertEqual(max_abs(f.L_inv @ f.U_inv - mm.entries), 0)
        for i in range(4):
            self.assertEqual(f.L_inv[i, i], 1)

    def test_singular_window(self):
        # two atoms give a rank two moment matrix
        mm = moment_matrix(f1_measures(1).dm, 3)
        with self.assertRaises(Error) as cm:
            gauss_borel(mm)
        self.assertEqual(cm.exception.kind, ErrorKind.SINGULAR_LEADING_MINOR)

    def test_window_too_small(self):
        f = gauss_borel(moment_matrix(f1_measures(2).dm, 3))
        for call in (recover_recursion_matrix, recovery_discrepancy):
            with self.subTest(call=call.__name__):
                with self.assertRaises(Error) as cm:
                    call(f)
                self.assertEqual(cm.exception.kind, ErrorKind.WINDOW_TOO_SMALL)

    def test_recovered_polynomials(self):
        an = f1_measures(4)
        families = recovered_polynomials(gauss_borel(moment_matrix(an.dm, 5)))
        for n in range(5):
            with self.subTest(n=n):
                self.assertTrue(families.B[0][n].close_to(an.fam.B[0][n], 1e-20))
                self.assertTrue(families.A[0][n].close_to(an.fam.A[0][n], 1e-20))
        self.assertEqual(families.degree_table()["B"], [[0, 1, 2, 3, 4]])

    def test_recovery_discrepancy(self):
        f = gauss_borel(moment_matrix(f1_measures(5).dm, 6))
        self.assertEqual(recovery_discrepancy(f), 0)

    def test_cauchy_transform(self):
        an = f1_measures(3)
        f = gauss_borel(moment_matrix(an.dm, 4))
        for n in range(4):
            with self.subTest(n=n):
                self.assertLess(cauchy_transform_residual(f, an.dm, 10, n), 1e-10)

        with self.assertRaises(Error) as cm:
            cauchy_transform_residual(f, an.dm, 10, 4)
        self.assertEqual(cm.exception.kind, ErrorKind.INDEX_OUT_OF_RANGE)


class RoundTripTestCase(unittest.TestCase):
    def test_f1(self):
        # every eigenvalue of T^[6] but the middle one is irrational
        result = favard_round_trip(f1(), InitialConditions.identity(1, 1), 6)
        self.assertFalse(result.exact)
        self.assertEqual(result.window, 6)
        self.assertLess(result.deviation, 1e-20)
        self.assertTrue(result.passed())

    def test_rational_spectrum(self):
        # T^[3] is the 4 x 4 Kac matrix plus 4I, with eigenvalues 1, 3, 5, 7
        bands = {-1: [1, 2, 3] + [1] * 5, 0: [4] * 9, 1: [3, 2, 1] + [1] * 5}
        T = BandedMatrix.from_bands(1, 1, {d: [Fraction(v) for v in values] for d, values in bands.items()})
        an = analyze(T, InitialConditions.identity(1, 1), 3)
        self.assertEqual(an.sd.eigenvalues, [7, 5, 3, 1])
        self.assertTrue(an.dm.exact)

        result = favard_round_trip(T, InitialConditions.identity(1, 1), 3)
        self.assertTrue(result.exact)
        self.assertEqual(result.deviation, 0)
        self.assertEqual(result.ic_deviation, 0)
        self.assertTrue(result.passed())

    def test_corrupted_atoms(self):
        # a uniform scale of the masses leaves the recovered matrix unchanged, the reversed nodes do not
        T = f2()
        dm = analyze(T, default_ic(T, 6).ic, 6).dm
        f = gauss_borel(moment_matrix(corrupt_measures(dm), 7))
        expected = monic_normalization(T.truncate(6)).entries
        self.assertGreater(max_abs(recover_recursion_matrix(f).entries[:5, :5] - expected[:5, :5]), 1e-3)

    def test_f2(self):
        for N in (4, 6, 8):
            with self.subTest(N=N):
                result = favard_round_trip(f2(), default_ic(f2(), N).ic, N)
                self.assertFalse(result.exact)
                self.assertEqual(result.window, N - 1)
                self.assertLess(result.deviation, 1e-15)
                self.assertLess(result.ic_deviation, 1e-15)
                self.assertTrue(result.passed())

    def test_monic_gauge(self):
        bands = {-1: [Fraction(1, 8)] * 20, 0: [Fraction(1)] * 21, 1: [Fraction(2)] * 20}
        T = BandedMatrix.from_bands(1, 1, bands)
        result = favard_round_trip(T, InitialConditions.identity(1, 1), 5)
        self.assertTrue(result.passed())
        self.assertEqual(result.recovered[0, 1], 1)
        self.assertAlmostEqual(float(result.recovered[1, 0]), 0.25, places=15)

    def test_too_small(self):
        with self.assertRaises(Error) as cm:
            favard_round_trip(f1(), InitialConditions.identity(1, 1), 2)
        self.assertEqual(cm.exception.kind, ErrorKind.WINDOW_TOO_SMALL)

    def test_json(self):
        out = favard_round_trip(f1(), InitialConditions.identity(1, 1), 4).to_json()
        self.assertEqual(out["N"], 4)
        self.assertFalse(out["exact"])
        for value in out["recovered"][0][:2]:
            self.assertIsInstance(value, float)
            self.assertAlmostEqual(value, 1.0, places=15)
        self.assertEqual(out["xi"], [[1.0]])


if __name__ == '__main__':
    unittest.main()
