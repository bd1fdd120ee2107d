import contextlib
import io
import json
import os
import sys
import tempfile
import unittest
from fractions import Fraction
from unittest import mock

from specband.error import Error, ErrorKind, ExitCode
from specband.cli import Command, RunConfig, execute, main, parse_n_list, parse_inline_matrix, threads_from_env, \
    THREADS_VARIABLE
from specband.schema import dump_banded, dumps
from specband.fixtures import f1, f1_unshifted, f2, flip_sign
from specband.numerics.scalar import ScalarMode


def run_quietly(code: str, config: RunConfig):
    with contextlib.redirect_stdout(io.StringIO()) as out:
        run = execute(code, "test", config)

    return run, out.getvalue()


def read_json(directory: str, name: str) -> dict:
    with open(os.path.join(directory, name), "r") as f:
        return json.load(f)


class ConfigTestCase(unittest.TestCase):
    def test_defaults(self):
        config = RunConfig(Command.VERIFY)
        self.assertEqual((config.N, config.Ns), (4, [4]))

        config = RunConfig(Command.VERIFY, Ns=[8, 4, 4, 6])
        self.assertEqual((config.N, config.Ns), (8, [4, 6, 8]))

        config = RunConfig(Command.VERIFY, Ns=[])
        self.assertEqual(config.Ns, [])

    def test_invalid(self):
        for kwargs in ({"tol": 0}, {"N": -1}, {"Ns": [2, -1]}, {"threads": 0}):
            with self.subTest(**kwargs):
                with self.assertRaises(Error) as cm:
                    RunConfig(Command.VERIFY, **kwargs)
                self.assertEqual(cm.exception.kind, ErrorKind.PARSE_ERROR)
                self.assertEqual(cm.exception.exit_code, ExitCode.PARSE)

    def test_n_list(self):
        self.assertEqual(parse_n_list("4,6, 8"), [4, 6, 8])
        self.assertEqual(parse_n_list(""), [])
        with self.assertRaises(Error):
            parse_n_list("4,x")

    def test_inline_matrix(self):
        m = parse_inline_matrix("[[1, \"1/3\"], [0, 1]]", ScalarMode.RATIONAL, "--Acal")
        self.assertEqual(m.shape, (2, 2))
        self.assertIsNone(parse_inline_matrix(None, ScalarMode.RATIONAL, "--Acal"))
        with self.assertRaises(Error):
            parse_inline_matrix("[[1, 2], [3]]", ScalarMode.RATIONAL, "--Acal")

    def test_threads(self):
        with mock.patch.dict(os.environ, {THREADS_VARIABLE: "4"}):
            self.assertEqual(threads_from_env(), 4)
        with mock.patch.dict(os.environ, {THREADS_VARIABLE: "many"}):
            with self.assertRaises(Error):
                threads_from_env()


class CommandTestCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def test_factorize(self):
        run, _ = run_quietly(dumps(dump_banded(f1())), RunConfig(Command.FACTORIZE, N=3, out=self.out))
        doc = read_json(self.out, "factorization.json")
        self.assertEqual(doc["factorization"]["delta"][:3], ["1", "3/4", "2/3"])
        self.assertEqual(doc["shift"], "1")
        self.assertEqual(doc["seed"], 0)
        self.assertFalse(os.path.exists(os.path.join(self.out, "certificate.json")))
        self.assertEqual([name for name, _ in run.artifacts], ["factorization.json"])

    def test_factorize_failure(self):
        with self.assertRaises(Error) as cm:
            run_quietly(dumps(dump_banded(f1_unshifted())), RunConfig(Command.FACTORIZE, N=3, out=self.out))
        self.assertEqual(cm.exception.exit_code, ExitCode.FACTORIZATION)
        self.assertTrue(os.path.exists(os.path.join(self.out, "certificate.json")))

    def test_shift_search(self):
        config = RunConfig(Command.FACTORIZE, N=4, out=self.out, shift_search="4")
        _, printed = run_quietly(dumps(dump_banded(f1_unshifted())), config)
        self.assertIn("shift: ", printed)
        self.assertNotEqual(read_json(self.out, "factorization.json")["shift"], "0")

    def test_quadrature(self):
        _, printed = run_quietly(dumps(dump_banded(f2())), RunConfig(Command.QUADRATURE, N=4, out=self.out))
        doc = read_json(self.out, "exactness.json")
        self.assertEqual(doc["degrees"], [[7, 6]])
        self.assertEqual(doc["status"], "pass")
        for name in ("spectral.csv", "rule.csv"):
            self.assertTrue(os.path.exists(os.path.join(self.out, name)))
        self.assertIn("through degree 7", printed)

    def test_quadrature_precondition(self):
        with self.assertRaises(Error) as cm:
            run_quietly(dumps(dump_banded(f2())), RunConfig(Command.QUADRATURE, N=1, out=self.out))
        self.assertEqual(cm.exception.kind, ErrorKind.ASSUMPTION_VIOLATED)

    def test_weyl(self):
        run_quietly(dumps(dump_banded(f1())), RunConfig(Command.WEYL, N=2, out=self.out))
        with open(os.path.join(self.out, "weyl.csv"), "r") as f:
            rows = f.read().splitlines()
        self.assertEqual(rows[0], "z,S_1_1")
        self.assertEqual(len(rows), 21)
        self.assertEqual(read_json(self.out, "measures.json")["N"], 2)

    def test_verify(self):
        config = RunConfig(Command.VERIFY, Ns=[4, 6, 8], tol=1e-8, out=self.out)
        _, printed = run_quietly(dumps(dump_banded(f2())), config)
        self.assertEqual(read_json(self.out, "report.json")["status"], "pass")
        self.assertIn("status: pass", printed)

    def test_verify_without_factorization(self):
        config = RunConfig(Command.VERIFY, Ns=[2], out=self.out)
        _, printed = run_quietly(dumps(dump_banded(flip_sign(f1(), 1, 0))), config)
        doc = read_json(self.out, "report.json")
        self.assertEqual(doc["status"], "fail")
        self.assertIn("using the identity", printed)

    def test_verify_empty(self):
        run_quietly(dumps(dump_banded(f2())), RunConfig(Command.VERIFY, Ns=[], out=self.out))
        self.assertEqual(read_json(self.out, "report.json")["status"], "pass-vacuous")

    def test_roundtrip(self):
        run_quietly(dumps(dump_banded(f2())), RunConfig(Command.ROUNDTRIP, N=6, out=self.out))
        doc = read_json(self.out, "roundtrip.json")
        self.assertFalse(doc["exact"])
        self.assertLess(doc["deviation"], 1e-15)
        self.assertEqual(doc["expected_nu"], [["1", "0"], ["-1", "1"]])
        for row, expected_row in zip(doc["nu"], doc["expected_nu"]):
            for value, expected in zip(row, expected_row):
                self.assertAlmostEqual(value, float(Fraction(expected)), places=12)

    def test_document_ic(self):
        doc = dump_banded(f1())
        doc["ic"] = {"nu": [[1]], "xi": [[1]]}
        run_quietly(dumps(doc), RunConfig(Command.ROUNDTRIP, N=4, out=self.out))
        self.assertEqual(read_json(self.out, "roundtrip.json")["xi"], [[1.0]])

    def test_acal_override(self):
        config = RunConfig(Command.ROUNDTRIP, N=5, out=self.out, Acal="[[1, \"1/3\"], [0, 1]]")
        run_quietly(dumps(dump_banded(f2())), config)
        doc = read_json(self.out, "roundtrip.json")
        self.assertEqual(doc["expected_nu"][1][0], "-4/3")
        self.assertAlmostEqual(doc["nu"][1][0], -4 / 3, places=12)
        self.assertLess(doc["deviation"], 1e-15)

    def test_bad_document(self):
        for code in ("{", "[1, 2]", "{\"p\": 1}"):
            with self.subTest(code=code):
                with self.assertRaises(Error) as cm:
                    run_quietly(code, RunConfig(Command.VERIFY, out=self.out))
                self.assertEqual(cm.exception.kind, ErrorKind.PARSE_ERROR)


class MainTestCase(unittest.TestCase):
    def test_missing_input(self):
        argv = ["specband", "--input", os.path.join(tempfile.gettempdir(), "specband-missing.json")]
        with mock.patch.object(sys, "argv", argv), contextlib.redirect_stdout(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                main()
        self.assertEqual(cm.exception.code, 1)

    def test_exit_code(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "input.json")
            with open(path, "w") as f:
                f.write(dumps(dump_banded(f1_unshifted())))

            argv = ["specband", "--input", path, "--command", "factorize", "--N", "3", "--out", tmp]
            with mock.patch.object(sys, "argv", argv), contextlib.redirect_stdout(io.StringIO()) as out:
                with self.assertRaises(SystemExit) as cm:
                    main()
        self.assertEqual(cm.exception.code, int(ExitCode.FACTORIZATION))
        self.assertIn("seed: 0", out.getvalue())

    def test_writes(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "input.json")
            with open(path, "w") as f:
                f.write(dumps(dump_banded(f1())))

            argv = ["specband", "--input", path, "--command", "roundtrip", "--N", "4", "--out", tmp]
            with mock.patch.object(sys, "argv", argv), contextlib.redirect_stdout(io.StringIO()) as out:
                main()
            self.assertTrue(os.path.exists(os.path.join(tmp, "roundtrip.json")))
        self.assertIn("wrote", out.getvalue())


if __name__ == '__main__':
    unittest.main()
