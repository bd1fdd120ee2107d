import unittest
from fractions import Fraction

from specband.error import Error, ErrorKind
from specband.banded import BandedMatrix, power_bracket, extreme_products, monic_normalization, monic_scales, \
    sparsity_holds
from specband.fixtures import f1, f1_unshifted, f2, materialize
from specband.numerics.scalar import ScalarMode
from specband.numerics.dense import unit_vector


class BandedTestCase(unittest.TestCase):
    def test_f1_truncation(self):
        t = f1().truncate(1)
        self.assertEqual(t.entries.tolist(), [[1, 1], [Fraction(1, 4), 1]])
        self.assertTrue(t.is_banded())
        self.assertTrue(t.band_positive())

    def test_f2_truncation(self):
        t = f2().truncate(3)
        self.assertEqual(t.entries.tolist(), [
            [1, 1, 0, 0],
            [2, 3, 1, 0],
            [1, 3, 3, 1],
            [0, 1, 3, 3]
        ])

    def test_factor_and_band_modes_agree(self):
        T = f2()
        self.assertEqual(materialize(T).truncate(8), T.truncate(8))

    def test_shift(self):
        T = f1_unshifted()
        self.assertEqual(T.entry(2, 2), 0)
        self.assertEqual(T.with_shift(Fraction(3, 2)).entry(2, 2), Fraction(3, 2))
        self.assertEqual(T.with_shift(Fraction(3, 2)).entry(2, 3), 1)

    def test_outside_band(self):
        T = f2()
        self.assertEqual(T.entry(0, 2), 0)
        self.assertEqual(T.entry(5, 2), 0)

    def test_horizon(self):
        T = f1(horizon=8)
        with self.assertRaises(Error) as cm:
            T.truncate(8)
        self.assertEqual(cm.exception.kind, ErrorKind.HORIZON_EXCEEDED)
        T.truncate(7)

        with self.assertRaises(Error) as cm:
            T.entry(0, 9)
        self.assertEqual(cm.exception.kind, ErrorKind.HORIZON_EXCEEDED)

    def test_zero_extreme_diagonal(self):
        bands = {-1: [Fraction(1), Fraction(0), Fraction(1)], 0: [Fraction(1)] * 4, 1: [Fraction(1)] * 3}
        with self.assertRaises(Error) as cm:
            BandedMatrix.from_bands(1, 1, bands)
        self.assertEqual(cm.exception.kind, ErrorKind.ZERO_EXTREME_DIAGONAL)
        self.assertEqual(cm.exception.details["index"], 1)

    def test_missing_diagonal(self):
        with self.assertRaises(Error) as cm:
            BandedMatrix.from_bands(1, 1, {0: [1, 1], 1: [1]})
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

    def test_band_bound(self):
        self.assertAlmostEqual(f1().band_bound(), 2.25)

    def test_reach_bound(self):
        self.assertEqual(f2().reach_bound(3), 8)
        self.assertEqual(f1().reach_bound(3), 4)

    def test_power_bracket(self):
        T = f1()
        e0 = unit_vector(1, 0)
        # walks of length 2 from row 0: 1*1 + 1*(1/4)
        self.assertEqual(power_bracket(T, 2, e0, e0, T.reach_bound(2)), Fraction(5, 4))
        self.assertEqual(power_bracket(T, 0, e0, e0, T.reach_bound(0)), 1)

        with self.assertRaises(Error) as cm:
            power_bracket(T, 4, e0, e0, 2)
        self.assertEqual(cm.exception.kind, ErrorKind.INSUFFICIENT_TRUNCATION)

    def test_power_bracket_is_semi_infinite(self):
        T = f2()
        left = unit_vector(1, 0)
        right = unit_vector(2, 1)
        n = 5
        M = T.reach_bound(n)
        self.assertEqual(power_bracket(T, n, left, right, M), power_bracket(T, n, left, right, M + 6))

    def test_extreme_products(self):
        ep = extreme_products(f1(), 3)
        self.assertEqual(ep.alpha, [1, Fraction(1, 4), Fraction(1, 16), Fraction(1, 64)])
        self.assertEqual(ep.beta, [1, 1, 1, 1])

        # p = 2 carries the sign (-1)^(p-1)
        ep = extreme_products(f2(), 2)
        self.assertEqual(ep.alpha, [1, -1, 1])

    def test_monic_normalization(self):
        bands = {-1: [Fraction(1, 4)] * 10, 0: [Fraction(1)] * 11, 1: [Fraction(2)] * 10}
        t = BandedMatrix.from_bands(1, 1, bands).truncate(4)
        normalized = monic_normalization(t)
        self.assertEqual(monic_scales(t), [1, 2, 4, 8, 16])
        for i in range(4):
            with self.subTest(i=i):
                self.assertEqual(normalized[i, i + 1], 1)
                self.assertEqual(normalized[i + 1, i], Fraction(1, 2))
                self.assertEqual(normalized[i, i], 1)

    def test_sparsity(self):
        t = f2().truncate(8)
        for n in range(4):
            with self.subTest(n=n):
                self.assertTrue(sparsity_holds(t, n))

    def test_float_mode(self):
        T = f1(mode=ScalarMode.FLOAT)
        self.assertEqual(T.truncate(2).mode, ScalarMode.FLOAT)
        self.assertEqual(T.entry(1, 0), 0.25)


if __name__ == '__main__':
    unittest.main()
