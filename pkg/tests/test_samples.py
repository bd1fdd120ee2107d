import contextlib
import io
import json
import os
import tempfile
import unittest

from specband.cli import Command, RunConfig, execute
from specband.schema import load_document, load_banded
from specband.fixtures import f2

SAMPLES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "samples")


def sample(name: str) -> str:
    with open(os.path.join(SAMPLES, name), "r") as f:
        return f.read()


class SamplesTestCase(unittest.TestCase):
    def test_samples_load(self):
        for name in sorted(os.listdir(SAMPLES)):
            with self.subTest(sample=name):
                T = load_banded(load_document(sample(name), name), source=name)
                self.assertEqual(T.horizon, 40)

    def test_f2_documents_agree(self):
        by_bands = load_banded(load_document(sample("f2.json"), "f2.json"))
        by_factors = load_banded(load_document(sample("f2_factors.json"), "f2_factors.json"))
        self.assertEqual(by_bands.truncate(10), by_factors.truncate(10))
        self.assertEqual(by_bands.truncate(10), f2().truncate(10))

    def test_verify_every_sample(self):
        for name, Ns in (("f1_shifted.json", [2, 3, 4]), ("f2.json", [4, 6]), ("f2_factors.json", [4, 6, 8])):
            with self.subTest(sample=name), tempfile.TemporaryDirectory() as tmp:
                config = RunConfig(Command.VERIFY, Ns=Ns, tol=1e-8, out=tmp)
                with contextlib.redirect_stdout(io.StringIO()):
                    execute(sample(name), name, config)

                with open(os.path.join(tmp, "report.json"), "r") as f:
                    report = json.load(f)
                self.assertEqual(report["status"], "pass")
                self.assertEqual(report["counts"]["fail"], 0)


if __name__ == '__main__':
    unittest.main()
