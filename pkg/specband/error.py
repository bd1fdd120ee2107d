import enum

from .formatting import Format


class ExitCode(enum.IntEnum):
    """
    Process exit codes of the command line interface.
    """

    OK = 0
    PARSE = 1
    FACTORIZATION = 2
    POSITIVITY = 3
    PRECONDITION = 4


class ErrorKind(enum.Enum):
    """
    Kinds of pipeline errors.
    """

    NON_SQUARE = enum.auto()
    SIZE_TOO_LARGE = enum.auto()
    HORIZON_EXCEEDED = enum.auto()
    INSUFFICIENT_TRUNCATION = enum.auto()
    NON_POSITIVE_PARAMETER = enum.auto()
    FACTORIZATION_FAILURE = enum.auto()
    SHIFT_FAILURE = enum.auto()
    MISMATCHED_FACTORIZATION = enum.auto()
    ZERO_EXTREME_DIAGONAL = enum.auto()
    INSUFFICIENT_LENGTH = enum.auto()
    COINCIDENT_POINTS = enum.auto()
    INTERLACING_VIOLATED = enum.auto()
    NOT_BRACKETED = enum.auto()
    DEGENERATE_EIGENVALUE = enum.auto()
    SHAPE_VIOLATION = enum.auto()
    ZERO_VECTOR = enum.auto()
    INDEX_OUT_OF_RANGE = enum.auto()
    EVALUATION_ON_SPECTRUM = enum.auto()
    SINGULAR_LEADING_MINOR = enum.auto()
    WINDOW_TOO_SMALL = enum.auto()
    NON_POSITIVE_WEIGHT = enum.auto()
    ASSUMPTION_VIOLATED = enum.auto()
    PARSE_ERROR = enum.auto()

    def exit_code(self) -> ExitCode:
        """
        Exit code reported by the CLI for this kind.

        Returns:
            The exit code.
        """

        match self:
            case ErrorKind.PARSE_ERROR:
                return ExitCode.PARSE

            case ErrorKind.FACTORIZATION_FAILURE | ErrorKind.SHIFT_FAILURE:
                return ExitCode.FACTORIZATION

            case ErrorKind.NON_POSITIVE_WEIGHT | ErrorKind.NON_POSITIVE_PARAMETER:
                return ExitCode.POSITIVITY

        return ExitCode.PRECONDITION


class Error(Exception):
    """
    Pipeline error.
    """

    msg: str
    kind: ErrorKind
    details: dict

    def __init__(self, msg: str, kind: ErrorKind, details: dict | None = None):
        """
        Args:
            msg: The message to be displayed.
            kind: Kind of the error.
            details: Structured information about the failure (stage, index, value, ...).
        """

        super().__init__(msg)

        self.msg = msg
        self.kind = kind
        self.details = details if details is not None else {}

    @property
    def exit_code(self) -> ExitCode:
        return self.kind.exit_code()

    def print(self):
        """
        Print the error message.
        """

        name = "".join(part.capitalize() for part in self.kind.name.split("_"))
        print(f"{Format.ERROR}{Format.BOLD}{name}{Format.RESET}{Format.ERROR}: {self.msg}{Format.RESET}")

    @staticmethod
    def non_square(rows: int, cols: int):
        raise Error(f"Matrix is not square [{rows}x{cols}]", ErrorKind.NON_SQUARE, {"rows": rows, "cols": cols})

    @staticmethod
    def size_too_large(size: int, limit: int):
        raise Error(f"Matrix size [{size}] exceeds the limit [{limit}]", ErrorKind.SIZE_TOO_LARGE,
                    {"size": size, "limit": limit})

    @staticmethod
    def horizon_exceeded(needed: int, horizon: int):
        raise Error(f"Index [{needed}] is beyond the horizon [{horizon}]", ErrorKind.HORIZON_EXCEEDED,
                    {"needed": needed, "horizon": horizon})

    @staticmethod
    def insufficient_truncation(size: int, needed: int):
        raise Error(f"Truncation size [{size}] is below the reach bound [{needed}]",
                    ErrorKind.INSUFFICIENT_TRUNCATION, {"size": size, "needed": needed})

    @staticmethod
    def non_positive_parameter(name: str, index: int, value):
        raise Error(f"Parameter [{name}] at index [{index}] is not positive ({value})",
                    ErrorKind.NON_POSITIVE_PARAMETER, {"name": name, "index": index, "value": str(value)})

    @staticmethod
    def factorization_failure(stage: str, index: int, value):
        raise Error(f"No positive bidiagonal factorization: pivot [{stage}] at index [{index}] is {value}",
                    ErrorKind.FACTORIZATION_FAILURE, {"stage": stage, "index": index, "value": str(value)})

    @staticmethod
    def shift_failure(s_max):
        raise Error(f"No shift up to [{s_max}] gives a positive bidiagonal factorization",
                    ErrorKind.SHIFT_FAILURE, {"s_max": str(s_max)})

    @staticmethod
    def mismatched_factorization(i: int, j: int):
        raise Error(f"Factorization does not reproduce the truncation at entry [{i}, {j}]",
                    ErrorKind.MISMATCHED_FACTORIZATION, {"row": i, "col": j})

    @staticmethod
    def zero_extreme_diagonal(side: str, n: int):
        raise Error(f"Extreme {side} diagonal vanishes at [{n}]", ErrorKind.ZERO_EXTREME_DIAGONAL,
                    {"side": side, "index": n})

    @staticmethod
    def insufficient_length(length: int, needed: int):
        raise Error(f"Recursion families generated to [{length}], need [{needed}]",
                    ErrorKind.INSUFFICIENT_LENGTH, {"length": length, "needed": needed})

    @staticmethod
    def coincident_points(x):
        raise Error(f"Points coincide [{x}], use the confluent form", ErrorKind.COINCIDENT_POINTS, {"x": str(x)})

    @staticmethod
    def interlacing_violated(level: int, interval: int):
        raise Error(f"No sign change of P_{level} in interlacing interval [{interval}]",
                    ErrorKind.INTERLACING_VIOLATED, {"level": level, "interval": interval})

    @staticmethod
    def not_bracketed(level: int, interval: int):
        raise Error(f"Root of P_{level} in interval [{interval}] could not be bracketed",
                    ErrorKind.NOT_BRACKETED, {"level": level, "interval": interval})

    @staticmethod
    def degenerate_eigenvalue(k: int):
        raise Error(f"Eigenvalue [{k}] is not simple", ErrorKind.DEGENERATE_EIGENVALUE, {"k": k})

    @staticmethod
    def shape_violation(name: str, reason: str):
        raise Error(f"Matrix [{name}] {reason}", ErrorKind.SHAPE_VIOLATION, {"name": name, "reason": reason})

    @staticmethod
    def zero_vector():
        raise Error("Vector has no nonzero entries", ErrorKind.ZERO_VECTOR)

    @staticmethod
    def index_out_of_range(index: int, limit: int):
        raise Error(f"Index [{index}] out of range (max {limit})", ErrorKind.INDEX_OUT_OF_RANGE,
                    {"index": index, "limit": limit})

    @staticmethod
    def evaluation_on_spectrum(z):
        raise Error(f"Evaluation point [{z}] is a node of the measure", ErrorKind.EVALUATION_ON_SPECTRUM,
                    {"z": str(z)})

    @staticmethod
    def singular_leading_minor(k: int):
        raise Error(f"Leading principal minor of order [{k}] vanishes", ErrorKind.SINGULAR_LEADING_MINOR, {"k": k})

    @staticmethod
    def window_too_small(window: int, needed: int):
        raise Error(f"Window [{window}] is smaller than [{needed}]", ErrorKind.WINDOW_TOO_SMALL,
                    {"window": window, "needed": needed})

    @staticmethod
    def non_positive_weight(b: int, a: int, k: int, value):
        raise Error(f"Quadrature weight ({b},{a}) at node [{k}] is not positive ({value})",
                    ErrorKind.NON_POSITIVE_WEIGHT, {"b": b, "a": a, "k": k, "value": str(value)})

    @staticmethod
    def assumption_violated(N: int, p: int, q: int):
        raise Error(f"Degrees of precision need N >= max(p, q) [N={N}, p={p}, q={q}]",
                    ErrorKind.ASSUMPTION_VIOLATED, {"N": N, "p": p, "q": q})

    @staticmethod
    def parse_error(source: str, message: str):
        raise Error(f"Cannot parse [{source}]: {message}", ErrorKind.PARSE_ERROR, {"source": source})


class InternalError(Exception):
    """
    Broken internal identity.
    """

    @staticmethod
    def identity_failed(name: str, residual):
        raise InternalError(f"Identity [{name}] does not hold (residual {residual})")
