import argparse
import os
import sys
import enum
import time

import numpy as np
import pyperclip

from .error import Error, ErrorKind
from .formatting import Format
from .banded import BandedMatrix
from .factorization import neville_factorize, shift_to_pbf, tn_certify, CertificateMode
from .recursion import InitialConditions
from .spectral import spectral_csv
from .measures import second_kind, weyl, weyl_grid, weyl_csv, measures_csv, measures_json, hermite_pade_order
from .quadrature import degrees_of_precision, build_rule, verify_all, rule_csv, exactness_json
from .gaussborel import favard_round_trip
from .verify import verify_suite
from .pipeline import analyze, default_ic
from .schema import load_document, load_banded, load_ic, parse_matrix, dump_factorization, dump_matrix, \
    write_json, write_csv
from .numerics.scalar import Scalar, ScalarMode, format_scalar, parse_scalar
from . import __version__

DEFAULT_N = 4
THREADS_VARIABLE = "SPECBAND_THREADS"


class IOMethod(enum.Enum):
    """
    Method for document input.
    """

    FILE = enum.auto()
    CLIP = enum.auto()


class Command(enum.Enum):
    FACTORIZE = "factorize"
    QUADRATURE = "quadrature"
    WEYL = "weyl"
    VERIFY = "verify"
    ROUNDTRIP = "roundtrip"


class RunConfig:
    """
    Validated command line configuration.
    """

    command: Command
    N: int
    Ns: list[int]
    scalar: ScalarMode | None
    tol: float
    seed: int
    out: str
    Acal: list | None
    Bcal: list | None
    shift_search: str | None
    output_clip: bool
    verbose: bool
    threads: int

    def __init__(self, command: Command, N: int | None = None, Ns: list[int] | None = None,
                 scalar: ScalarMode | None = None, tol: float = 1e-10, seed: int = 0, out: str = ".",
                 Acal: list | None = None, Bcal: list | None = None, shift_search: str | None = None,
                 output_clip: bool = False, verbose: bool = False, threads: int = 1):
        if not tol > 0:
            Error.parse_error("--tol", f"tolerance must be positive, got {tol}")
        if N is not None and N < 0:
            Error.parse_error("--N", f"truncation index must be nonnegative, got {N}")
        if Ns is not None and any(n < 0 for n in Ns):
            Error.parse_error("--N-list", "truncation indices must be nonnegative")
        if threads < 1:
            Error.parse_error(THREADS_VARIABLE, f"thread count must be positive, got {threads}")

        self.command = command
        self.Ns = sorted(set(Ns)) if Ns is not None else [N if N is not None else DEFAULT_N]
        self.N = N if N is not None else (max(self.Ns) if self.Ns else DEFAULT_N)
        self.scalar = scalar
        self.tol = tol
        self.seed = seed
        self.out = out
        self.Acal = Acal
        self.Bcal = Bcal
        self.shift_search = shift_search
        self.output_clip = output_clip
        self.verbose = verbose
        self.threads = threads

    def path(self, name: str) -> str:
        return os.path.join(self.out, name)


def parse_n_list(text: str) -> list[int]:
    """
    Comma separated truncation indices, the empty string meaning none.
    """

    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        Error.parse_error("--N-list", f"not a list of integers: \"{text}\"")


def parse_inline_matrix(text: str | None, mode: ScalarMode, source: str) -> np.ndarray | None:
    if text is None:
        return None

    doc = load_document(f"{{\"m\": {text}}}", source)
    return parse_matrix(doc["m"], mode, source)


def threads_from_env() -> int:
    value = os.environ.get(THREADS_VARIABLE, "1")
    try:
        return int(value)
    except ValueError:
        Error.parse_error(THREADS_VARIABLE, f"not an integer: \"{value}\"")


class Run:
    """
    Execution of one command: keeps the loaded matrix, the initial conditions
    and the artifacts written so far.
    """

    config: RunConfig
    T: BandedMatrix
    doc: dict
    artifacts: list[tuple[str, str]]

    def __init__(self, config: RunConfig, T: BandedMatrix, doc: dict):
        self.config = config
        self.T = T
        self.doc = doc
        self.artifacts = []
        self._start = time.perf_counter()

    def log(self, stage: str, N: int | None = None):
        if self.config.verbose:
            at = f" N={N}" if N is not None else ""
            print(f"{Format.BLUE}{stage}{at}{Format.RESET} ({time.perf_counter() - self._start:.3f}s)")

    def write_json(self, name: str, doc: dict):
        doc = {**doc, "seed": self.config.seed}
        self.artifacts.append((name, write_json(self.config.path(name), doc)))

    def write_csv(self, name: str, rows: list[list]):
        self.artifacts.append((name, write_csv(self.config.path(name), rows)))

    def initial_conditions(self) -> InitialConditions:
        """
        Initial conditions from the document, else the admissible ones of the factorization.
        """

        mode = self.T.mode
        if "ic" in self.doc:
            return load_ic(self.doc["ic"], mode)

        Acal = parse_inline_matrix(self.config.Acal, mode, "--Acal")
        Bcal = parse_inline_matrix(self.config.Bcal, mode, "--Bcal")
        self.log("admissible initial conditions")
        return default_ic(self.T, max(self.config.N, self.T.p, self.T.q), Acal, Bcal).ic


def cmd_factorize(run: Run):
    T, N = run.T, run.config.N

    run.log("factorize", N)
    t = T.truncate(N)
    certificate = tn_certify(t, CertificateMode.CRITERION)
    if certificate.witness is not None:
        run.write_json("certificate.json", {"N": N, "certificate": certificate.to_json()})
    f = neville_factorize(t, T.p, T.q)

    run.write_json("factorization.json", {
        "N": N,
        "shift": format_scalar(T.shift),
        "factorization": dump_factorization(f),
        "certificate": certificate.to_json()
    })


def cmd_quadrature(run: Run):
    T, N = run.T, run.config.N
    degrees_of_precision(T.p, T.q, N)
    ic = run.initial_conditions()

    run.log("spectral data", N)
    analysis = analyze(T, ic, N)

    run.log("quadrature rule", N)
    rule = build_rule(analysis.sd)
    reports = verify_all(rule, T, run.config.tol)

    run.write_csv("spectral.csv", spectral_csv(analysis.sd))
    run.write_csv("rule.csv", rule_csv(rule))
    run.write_json("exactness.json", exactness_json(rule, reports))

    for report in reports:
        print(f"{Format.status(report.passed)} exactness ({report.b + 1},{report.a + 1}) "
              f"through degree {report.degree}")


def cmd_weyl(run: Run):
    T, N = run.T, run.config.N
    ic = run.initial_conditions()

    run.log("spectral data", N)
    analysis = analyze(T, ic, N)

    run.log("weyl functions", N)
    table = weyl(analysis.dm, second_kind(analysis.dm, analysis.blocks))
    orders = [hermite_pade_order(analysis.fam, analysis.dm, n) for n in range(N + 1)]

    run.write_csv("measures.csv", measures_csv(analysis.dm))
    run.write_json("measures.json", measures_json(analysis.dm, orders))
    run.write_csv("weyl.csv", weyl_csv(table, weyl_grid(T.band_bound())))


def cmd_verify(run: Run):
    T, config = run.T, run.config
    try:
        ic = run.initial_conditions()
    except Error as e:
        if e.kind != ErrorKind.FACTORIZATION_FAILURE:
            raise
        # no positive factorization: checks still run and report the failures
        print(f"{Format.YELLOW}no admissible initial conditions, using the identity{Format.RESET}")
        ic = InitialConditions.identity(T.p, T.q, T.mode)

    run.log(f"verify {config.Ns}")
    report = verify_suite(T, ic, config.Ns, config.tol, config.seed, config.threads)

    run.write_json("report.json", report.to_json())

    for entry in report.entries:
        print(f"{Format.status(None if entry.status == 'skip' else not entry.failed)} {entry.name}")
    print(f"status: {report.status}")
    if config.verbose:
        counts = report.counts()
        print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['skip']} skipped")


def cmd_roundtrip(run: Run):
    T, N = run.T, run.config.N
    ic = run.initial_conditions()

    run.log("favard round trip", N)
    result = favard_round_trip(T, ic, N)

    run.write_json("roundtrip.json", {
        **result.to_json(),
        "expected_nu": dump_matrix(result.nu_expected),
        "expected_xi": dump_matrix(result.xi_expected)
    })
    print(f"{Format.status(result.passed(run.config.tol))} round trip, window {result.window}")


COMMANDS = {
    Command.FACTORIZE: cmd_factorize,
    Command.QUADRATURE: cmd_quadrature,
    Command.WEYL: cmd_weyl,
    Command.VERIFY: cmd_verify,
    Command.ROUNDTRIP: cmd_roundtrip
}


def apply_shift_search(T: BandedMatrix, config: RunConfig) -> BandedMatrix:
    if config.shift_search is None:
        return T

    s_max: Scalar = parse_scalar(config.shift_search, T.mode, "--shift-search")
    s = shift_to_pbf(T, config.N, s_max)
    print(f"shift: {format_scalar(s)}")
    return T.with_shift(T.shift + s)


def execute(code: str, source: str, config: RunConfig) -> Run:
    """
    Load the document and run the configured command.

    Args:
        code: Text of the input document.
        source: Name of the input used in error messages.
        config: The configuration.

    Returns:
        The finished run.
    """

    doc = load_document(code, source)
    T = apply_shift_search(load_banded(doc, config.scalar, source), config)

    run = Run(config, T, doc)
    COMMANDS[config.command](run)
    return run


def main() -> None:
    """
    Parse command line arguments and run the command.
    """

    parser = argparse.ArgumentParser(description="Spectral analysis of positive banded matrices", prog="specband")

    parser.add_argument("--input", type=str, required=True, help="input document [@clip for clipboard]")
    parser.add_argument("--command", type=str, default=Command.VERIFY.value, choices=[c.value for c in Command],
                        help="command to run (default: verify)")

    parser.add_argument("--N", type=int, help=f"truncation index (default: {DEFAULT_N})")
    parser.add_argument("--N-list", type=str, help="comma separated truncation indices for verify")
    parser.add_argument("--scalar", type=str, choices=[m.value for m in ScalarMode], help="override the scalar mode")
    parser.add_argument("--tol", type=float, default=1e-10, help="residual tolerance for float checks")
    parser.add_argument("--seed", type=int, default=0, help="seed of the sampled checks")
    parser.add_argument("--out", type=str, default=".", help="output directory")
    parser.add_argument("--Acal", type=str, help="upper unitriangular p x p matrix as inline JSON")
    parser.add_argument("--Bcal", type=str, help="lower unitriangular q x q matrix as inline JSON")
    parser.add_argument("--shift-search", type=str, metavar="S_MAX", help="search the smallest shift giving a PBF")

    parser.add_argument("-o:c", "--output-clip", help="copy the main artifact to the clipboard", action="store_true")
    parser.add_argument("-v", "--verbose", help="print stage timings", action="store_true")

    parser.add_argument("--print-exceptions", help="print the traceback of errors (development only)",
                        action="store_true")

    parser.add_argument("-V", "--version", action="version", version=f"specband {__version__}")

    args = parser.parse_args()

    input_method = IOMethod.CLIP if args.input == "@clip" else IOMethod.FILE

    # check if input file exists
    if input_method == IOMethod.FILE and not os.path.isfile(args.input):
        print(f"Error: input file \"{args.input}\" does not exist")
        sys.exit(1)

    if input_method == IOMethod.CLIP:
        code = pyperclip.paste()
    else:
        with open(args.input, "r") as f:
            code = f.read()

    try:
        config = RunConfig(
            Command(args.command),
            N=args.N,
            Ns=parse_n_list(args.N_list) if args.N_list is not None else None,
            scalar=ScalarMode.parse(args.scalar) if args.scalar is not None else None,
            tol=args.tol,
            seed=args.seed,
            out=args.out,
            Acal=args.Acal,
            Bcal=args.Bcal,
            shift_search=args.shift_search,
            output_clip=args.output_clip,
            verbose=args.verbose,
            threads=threads_from_env()
        )

        print(f"seed: {config.seed}")
        run = execute(code, args.input, config)
    except Error as e:
        e.print()

        # print the traceback
        if args.print_exceptions:
            raise e

        sys.exit(int(e.exit_code))

    for name, _ in run.artifacts:
        print(f"{Format.status(True)} wrote {config.path(name)}")

    documents = [text for name, text in run.artifacts if name.endswith(".json")]
    if config.output_clip and documents:
        # the last JSON artifact is the main one
        pyperclip.copy(documents[-1])
