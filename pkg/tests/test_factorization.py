import unittest
from fractions import Fraction

import numpy as np

from specband.error import Error, ErrorKind, ExitCode
from specband.banded import Truncation
from specband.factorization import BidiagonalFactorization, neville_factorize, uniform_factorization, assemble, \
    shift_to_pbf, characteristic_polynomial, darboux_chain, tn_certify, CertificateMode, Verdict
from specband.fixtures import f1, f1_unshifted, f2, f2_factorization, random_factorization, flip_sign
from specband.numerics.polynomial import Polynomial
from specband.numerics.dense import matrix, max_abs, inverse
from specband.numerics.scalar import ScalarMode


class FactorizationTestCase(unittest.TestCase):
    def test_f2_parameters_are_ones(self):
        f = neville_factorize(f2().truncate(6), 2, 1)
        self.assertEqual((f.p, f.q, f.horizon), (2, 1, 7))
        for seq in f.lower + f.upper + [f.delta]:
            for v in seq:
                self.assertEqual(v, 1)

    def test_product_reproduces_truncation(self):
        t = f2().truncate(6)
        f = neville_factorize(t, 2, 1)
        self.assertEqual(max_abs(f.truncation(6) - t.entries), 0)

        m = f.factor_matrices(6)
        product = m[0]
        for factor in m[1:]:
            product = product @ factor
        self.assertEqual(max_abs(product - t.entries), 0)

    def test_f1_pivots(self):
        f = neville_factorize(f1().truncate(3), 1, 1)
        self.assertEqual(f.delta[:3], [1, Fraction(3, 4), Fraction(2, 3)])
        self.assertEqual(f.lower[0][:2], [Fraction(1, 4), Fraction(1, 3)])

    def test_failure_reports_stage(self):
        with self.assertRaises(Error) as cm:
            neville_factorize(f1_unshifted().truncate(3), 1, 1)
        self.assertEqual(cm.exception.kind, ErrorKind.FACTORIZATION_FAILURE)
        self.assertEqual(cm.exception.details["stage"], "delta")
        self.assertEqual(cm.exception.details["index"], 0)
        self.assertEqual(cm.exception.exit_code, ExitCode.FACTORIZATION)

    def test_gauge_round_trip(self):
        rng = np.random.default_rng(7)
        for i in range(50):
            p, q = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            N = int(rng.integers(max(p, q), 11))
            with self.subTest(i=i, p=p, q=q, N=N):
                f = random_factorization(rng, p, q, 12)
                restricted = f.restrict(N)
                t = Truncation(restricted.truncation(N), p, q)
                g = neville_factorize(t, p, q, restricted.gauge())
                self.assertTrue(g.parameters_equal(restricted))

    def test_non_positive_parameter(self):
        with self.assertRaises(Error) as cm:
            BidiagonalFactorization([[1, 0, 1]], [1, 1, 1, 1], [[1, 1, 1]])
        self.assertEqual(cm.exception.kind, ErrorKind.NON_POSITIVE_PARAMETER)
        self.assertEqual(cm.exception.exit_code, ExitCode.POSITIVITY)

    def test_short_sequence(self):
        with self.assertRaises(Error) as cm:
            BidiagonalFactorization([[1]], [1, 1, 1], [[1, 1]])
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

    def test_not_banded(self):
        t = Truncation(matrix([[1, 1, 1], [1, 1, 1], [1, 1, 1]]), 1, 1)
        with self.assertRaises(Error) as cm:
            neville_factorize(t, 1, 1)
        self.assertEqual(cm.exception.kind, ErrorKind.SHAPE_VIOLATION)

    def test_assemble(self):
        T = assemble(uniform_factorization(1, 1, 1, 10))
        self.assertEqual(T.truncate(2).entries.tolist(), [[1, 1, 0], [1, 2, 1], [0, 1, 2]])

    def test_float_factorization(self):
        f = neville_factorize(f2(mode=ScalarMode.FLOAT).truncate(5), 2, 1)
        self.assertTrue(f.parameters_equal(uniform_factorization(2, 1, 1.0, 6, ScalarMode.FLOAT), 1e-12))


class ShiftTestCase(unittest.TestCase):
    def test_shift_search(self):
        T = f1_unshifted()
        s = shift_to_pbf(T, 4, Fraction(4))
        # the smallest eigenvalue of the unshifted truncation is -cos(pi/6)
        self.assertGreater(s, Fraction(866, 1000))
        self.assertLessEqual(s, Fraction(867, 1000))
        neville_factorize(T.with_shift(s).truncate(4), 1, 1)

    def test_no_shift_needed(self):
        self.assertEqual(shift_to_pbf(f2(), 4, Fraction(1)), 0)

    def test_shift_failure(self):
        with self.assertRaises(Error) as cm:
            shift_to_pbf(f1_unshifted(), 4, Fraction(1, 2))
        self.assertEqual(cm.exception.kind, ErrorKind.SHIFT_FAILURE)
        self.assertEqual(cm.exception.exit_code, ExitCode.FACTORIZATION)


class CertificateTestCase(unittest.TestCase):
    def test_oscillatory(self):
        for mode in CertificateMode:
            with self.subTest(mode=mode):
                self.assertEqual(tn_certify(f2().truncate(4), mode).verdict, Verdict.OSCILLATORY)

    def test_singular_ones(self):
        t = Truncation(matrix([[1, 1], [1, 1]]), 1, 1)
        for mode in CertificateMode:
            with self.subTest(mode=mode):
                self.assertEqual(tn_certify(t, mode).verdict, Verdict.NOT_TN)

        witness = tn_certify(t, CertificateMode.EXHAUSTIVE).witness
        self.assertEqual(witness["reason"], "singular")
        self.assertEqual((witness["rows"], witness["cols"], witness["value"]), ([1, 2], [1, 2], "0"))

    def test_nonsingular_not_oscillatory(self):
        t = Truncation(matrix([[1, 0], [0, 2]]), 1, 1)
        self.assertEqual(tn_certify(t, CertificateMode.EXHAUSTIVE).verdict, Verdict.TOTALLY_NONNEGATIVE)

    def test_witness(self):
        t = flip_sign(f1(), 1, 0).truncate(2)
        certificate = tn_certify(t, CertificateMode.EXHAUSTIVE)
        self.assertEqual(certificate.verdict, Verdict.NOT_TN)
        self.assertEqual(certificate.witness["rows"], [1])
        self.assertEqual(certificate.witness["cols"], [2])

    def test_exhaustive_size_limit(self):
        with self.assertRaises(Error) as cm:
            tn_certify(f2().truncate(8), CertificateMode.EXHAUSTIVE)
        self.assertEqual(cm.exception.kind, ErrorKind.SIZE_TOO_LARGE)


class DarbouxTestCase(unittest.TestCase):
    def test_characteristic_polynomial(self):
        self.assertEqual(characteristic_polynomial(f2().truncate(1).entries), Polynomial([1, -4, 1]))

    def test_chain(self):
        t = f2().truncate(4)
        f = neville_factorize(t, 2, 1)
        chain = darboux_chain(t, f)
        self.assertEqual(len(chain.members()), 3)
        self.assertTrue(chain.bands_positive())
        for member in chain.members():
            self.assertEqual(characteristic_polynomial(member), chain.characteristic)

    def test_eigenvector_maps(self):
        t = f2().truncate(3)
        chain = darboux_chain(t, neville_factorize(t, 2, 1))
        # T = L_1 (L_2 D U_1), the first plus transform is (L_2 D U_1) L_1
        inv = inverse(chain.left_map(1))
        self.assertEqual(max_abs(chain.plus_transforms[0] @ inv - inv @ t.entries), 0)

    def test_mismatch(self):
        t = f2().truncate(4)
        f = f2_factorization()
        other = Truncation(t.entries.copy(), 2, 1)
        other.entries[0, 0] += 1
        with self.assertRaises(Error) as cm:
            darboux_chain(other, f)
        self.assertEqual(cm.exception.kind, ErrorKind.MISMATCHED_FACTORIZATION)


if __name__ == '__main__':
    unittest.main()
