import unittest

from specband.recursion import InitialConditions
from specband.pipeline import default_ic
from specband.verify import CheckEntry, VerificationReport, CD_SAMPLES, checks_for, verify_suite, weyl_convergence_check
from specband.fixtures import f1, f2, flip_sign


class ReportTestCase(unittest.TestCase):
    def test_status(self):
        self.assertEqual(VerificationReport(0).status, "pass-vacuous")
        self.assertEqual(VerificationReport(0, [CheckEntry("a", "pass"), CheckEntry("b", "skip")]).status, "pass")
        self.assertEqual(VerificationReport(0, [CheckEntry("a", "pass"), CheckEntry("b", "fail")]).status, "fail")

    def test_counts(self):
        report = VerificationReport(3, [CheckEntry("a", "pass"), CheckEntry("b", "skip"), CheckEntry("c", "skip")])
        self.assertEqual(report.counts(), {"pass": 1, "fail": 0, "skip": 2})
        self.assertEqual(report.to_json()["seed"], 3)
        self.assertIsNone(report.entry("d"))


class SuiteTestCase(unittest.TestCase):
    def test_f2_passes(self):
        T = f2()
        report = verify_suite(T, default_ic(T, 8).ic, [4, 6, 8], 1e-8, 0)
        failed = [e.name for e in report.entries if e.failed]
        self.assertEqual(failed, [])
        self.assertEqual(report.status, "pass")
        self.assertEqual(report.entry("favard_round_trip[N=8]").status, "pass")
        weyl = report.entry("weyl_convergence")
        self.assertEqual(weyl.status, "pass")
        self.assertEqual(weyl.details["N"], [4, 6, 8])
        self.assertEqual(report.entries[-1].name, "weyl_convergence")
        self.assertEqual(report.entry("christoffel_darboux[N=6]").details["samples"], 20)

    def test_f1_small_indices(self):
        report = verify_suite(f1(), InitialConditions.identity(1, 1), [1, 2, 3], 1e-8, 0)
        self.assertEqual(report.status, "pass")
        self.assertEqual(report.entry("favard_round_trip[N=1]").status, "skip")
        self.assertEqual(report.entry("favard_round_trip[N=3]").status, "pass")
        self.assertEqual(report.entry("quadrature[N=1]").status, "pass")

    def test_sign_flip(self):
        T = flip_sign(f1(), 1, 0)
        entries = checks_for(T, InitialConditions.identity(1, 1), 2, 1e-8, 0)
        by_name = {e.name: e for e in entries}
        self.assertEqual(by_name["factorization_round_trip[N=2]"].status, "fail")
        self.assertEqual(by_name["interlacing[N=2]"].status, "fail")
        self.assertEqual(by_name["interlacing[N=2]"].details["error"], "INTERLACING_VIOLATED")
        for name in ("biorthogonality", "quadrature", "favard_round_trip"):
            with self.subTest(name=name):
                self.assertEqual(by_name[f"{name}[N=2]"].status, "skip")

    def test_weyl_convergence_horizon(self):
        T = f1(horizon=6)
        skipped = weyl_convergence_check(T, InitialConditions.identity(1, 1), [2, 3], 1e-8)
        self.assertEqual(skipped.status, "skip")
        self.assertIn("horizon 6", skipped.details["reason"])
        entry = weyl_convergence_check(f1(), InitialConditions.identity(1, 1), [2, 3], 1e-8)
        self.assertEqual(entry.status, "pass")
        self.assertEqual(len(entry.details["differences"]), 2)

    def test_sample_count(self):
        self.assertEqual(CD_SAMPLES, 20)
        entries = checks_for(f1(), InitialConditions.identity(1, 1), 3, 1e-8, 0)
        by_name = {e.name: e for e in entries}
        self.assertEqual(by_name["christoffel_darboux[N=3]"].details, {"samples": 20})

    def test_empty_list(self):
        report = verify_suite(f2(), default_ic(f2(), 2).ic, [], 1e-8, 0)
        self.assertEqual(report.status, "pass-vacuous")
        self.assertEqual(report.entries, [])

    def test_thread_count_does_not_matter(self):
        T = f1()
        ic = InitialConditions.identity(1, 1)
        serial = verify_suite(T, ic, [2, 3, 4], 1e-8, 11)
        parallel = verify_suite(T, ic, [2, 3, 4], 1e-8, 11, threads=3)
        self.assertEqual(serial.to_json(), parallel.to_json())

    def test_seed_is_per_index(self):
        # the sampled points of one index do not depend on the other indices requested
        T = f1()
        ic = InitialConditions.identity(1, 1)
        alone = verify_suite(T, ic, [3], 1e-8, 5)
        together = verify_suite(T, ic, [2, 3], 1e-8, 5)
        self.assertEqual(alone.entry("christoffel_darboux[N=3]").to_json(),
                         together.entry("christoffel_darboux[N=3]").to_json())


if __name__ == '__main__':
    unittest.main()
