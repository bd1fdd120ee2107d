import csv
import io
import json
import os
import tempfile

import numpy as np

from .error import Error
from .banded import BandedMatrix
from .factorization import BidiagonalFactorization
from .recursion import InitialConditions
from .numerics.scalar import Scalar, ScalarMode, parse_scalar, format_scalar
from .numerics.dense import matrix


def load_document(text: str, source: str) -> dict:
    """
    Parse a JSON document whose top level must be an object.
    """

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        Error.parse_error(source, f"invalid JSON ({e.msg} at line {e.lineno})")

    if not isinstance(doc, dict):
        Error.parse_error(source, "top level is not an object")

    return doc


def document_mode(doc: dict, override: ScalarMode | None = None) -> ScalarMode:
    if override is not None:
        return override

    return ScalarMode.parse(doc.get("scalar", ScalarMode.RATIONAL.value))


def _field(doc: dict, key: str, source: str):
    if key not in doc:
        Error.parse_error(source, f"missing field \"{key}\"")

    return doc[key]


def _int(value, source: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        Error.parse_error(source, f"not an integer: {value!r}")

    return value


def _scalars(values, mode: ScalarMode, source: str) -> list[Scalar]:
    if not isinstance(values, list):
        Error.parse_error(source, "is not a list")

    return [parse_scalar(v, mode, source) for v in values]


def parse_matrix(rows, mode: ScalarMode, source: str) -> np.ndarray:
    """
    Square-or-rectangular matrix from nested lists of scalar literals.
    """

    if not isinstance(rows, list) or not rows or not all(isinstance(row, list) for row in rows):
        Error.parse_error(source, "is not a list of rows")
    if len({len(row) for row in rows}) != 1:
        Error.parse_error(source, "has rows of different lengths")

    return matrix([_scalars(row, mode, source) for row in rows], object if mode == ScalarMode.RATIONAL else float)


def load_factorization(doc: dict, mode: ScalarMode, source: str = "factorization") -> BidiagonalFactorization:
    """
    Factorization from {"L": [[...], ...], "delta": [...], "U": [[...], ...], "horizon": int}.

    Positivity is checked on construction, so a bad parameter raises NonPositiveParameter.
    """

    lower = [_scalars(seq, mode, f"{source}.L") for seq in _field(doc, "L", source)]
    upper = [_scalars(seq, mode, f"{source}.U") for seq in _field(doc, "U", source)]
    delta = _scalars(_field(doc, "delta", source), mode, f"{source}.delta")

    if "horizon" in doc:
        horizon = _int(doc["horizon"], f"{source}.horizon")
        if horizon > len(delta):
            Error.parse_error(source, f"horizon [{horizon}] exceeds the [{len(delta)}] delta entries")
        delta = delta[:horizon]

    return BidiagonalFactorization(lower, delta, upper, mode)


def dump_factorization(f: BidiagonalFactorization) -> dict:
    return {
        "L": [[format_scalar(v) for v in seq[:f.horizon - 1]] for seq in f.lower],
        "delta": [format_scalar(v) for v in f.delta],
        "U": [[format_scalar(v) for v in seq[:f.horizon - 1]] for seq in f.upper],
        "horizon": f.horizon,
        "scalar": f.mode.value
    }


def load_banded(doc: dict, mode: ScalarMode | None = None, source: str = "banded") -> BandedMatrix:
    """
    Banded matrix from explicit diagonals or from a factorization.

    {"p", "q", "horizon", "shift", "bands": {"-p": [...], ..., "q": [...]}} or
    {"p", "q", "factors": <factorization>}; "scalar" selects the mode unless overridden.
    """

    mode = document_mode(doc, mode)
    p = _int(_field(doc, "p", source), f"{source}.p")
    q = _int(_field(doc, "q", source), f"{source}.q")
    shift = parse_scalar(doc.get("shift", 0), mode, f"{source}.shift")

    if "factors" in doc:
        factors = doc["factors"]
        if not isinstance(factors, dict):
            Error.parse_error(f"{source}.factors", "is not an object")
        f = load_factorization(factors, mode, f"{source}.factors")
        if (f.p, f.q) != (p, q):
            Error.parse_error(source, f"factors are ({f.p}, {f.q})-banded, header says ({p}, {q})")
        return BandedMatrix.from_factors(f, shift)

    bands = _field(doc, "bands", source)
    if not isinstance(bands, dict):
        Error.parse_error(f"{source}.bands", "is not an object")

    parsed = {}
    for key, values in bands.items():
        try:
            d = int(key)
        except ValueError:
            Error.parse_error(f"{source}.bands", f"bad diagonal key \"{key}\"")
        parsed[d] = _scalars(values, mode, f"{source}.bands[{key}]")

    horizon = _int(doc["horizon"], f"{source}.horizon") if "horizon" in doc else None
    return BandedMatrix.from_bands(p, q, parsed, horizon, shift, mode)


def dump_banded(T: BandedMatrix) -> dict:
    doc = {"p": T.p, "q": T.q, "shift": format_scalar(T.shift), "scalar": T.mode.value}
    if T.factors is not None:
        doc["factors"] = dump_factorization(T.factors)
        return doc

    doc["horizon"] = T.horizon
    doc["bands"] = {str(d): [format_scalar(v) for v in values] for d, values in sorted(T.bands.items())}
    return doc


def load_ic(doc: dict, mode: ScalarMode, source: str = "ic") -> InitialConditions:
    """
    Initial conditions from {"nu": [[...]], "xi": [[...]]}, unit diagonals enforced.
    """

    nu = parse_matrix(_field(doc, "nu", source), mode, f"{source}.nu")
    xi = parse_matrix(_field(doc, "xi", source), mode, f"{source}.xi")
    return InitialConditions(nu, xi)


def dump_matrix(m: np.ndarray) -> list[list]:
    return [[format_scalar(v) for v in row] for row in m]


def dumps(doc: dict) -> str:
    """
    Canonical JSON text: sorted keys, two-space indent, trailing newline.
    """

    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def csv_text(rows: list[list]) -> str:
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    return buffer.getvalue()


def write_atomic(path: str, text: str):
    """
    Write a file through a temporary file in the same directory and a rename.
    """

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)

    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_json(path: str, doc: dict) -> str:
    text = dumps(doc)
    write_atomic(path, text)
    return text


def write_csv(path: str, rows: list[list]) -> str:
    text = csv_text(rows)
    write_atomic(path, text)
    return text
