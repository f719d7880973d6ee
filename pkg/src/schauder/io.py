"""Reading sample CSV files and writing coefficient sets."""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction

import numpy as np

from .estimator import EstimateResult, SampleVector
from .exceptions import ValidationError
from .faber import grid_level

GRID_TOLERANCE = 1e-12
_FRACTION = re.compile(r"^\s*(\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")


def parse_t(text: str, row: int) -> tuple[Fraction | None, float]:
    """Parse a ``t`` cell: exact ``k/2^L`` or a decimal."""
    match = _FRACTION.match(text)
    if match:
        k, level = int(match.group(1)), int(match.group(2))
        return Fraction(k, 2**level), k / 2.0**level
    try:
        return None, float(text)
    except ValueError:
        raise ValidationError(f"row {row}: cannot parse t value {text!r}") from None


def _is_header(cells) -> bool:
    try:
        float(cells[1])
    except (ValueError, IndexError):
        return True
    return False


def read_samples(source) -> SampleVector:
    """Read ``t,F`` rows into a sample vector on the implied dyadic grid.

    ``source`` is a path or an open text stream.  Rows start at 1 counting
    the header, so error messages point at the line in the file.
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_samples(fh)
    rows = []
    for lineno, cells in enumerate(csv.reader(source), start=1):
        if not cells or cells[0].lstrip().startswith("#"):
            continue
        if lineno == 1 and _is_header(cells):
            continue
        if len(cells) != 2:
            raise ValidationError(f"row {lineno}: expected two columns t,F, got {len(cells)}")
        rows.append((lineno, cells[0], cells[1]))
    if not rows:
        raise ValidationError("no sample rows found")
    try:
        level = grid_level(len(rows))
    except ValidationError:
        raise ValidationError(f"got {len(rows)} sample rows; the count must be 2^L + 1") from None

    values = np.empty(len(rows))
    for k, (lineno, t_text, F_text) in enumerate(rows):
        exact, t = parse_t(t_text, lineno)
        target = Fraction(k, 2**level)
        if exact is not None:
            ok = exact == target
        else:
            ok = abs(t - float(target)) <= GRID_TOLERANCE
        if not ok:
            raise ValidationError(f"row {lineno}: t = {t_text.strip()} is not the grid point {k}/2^{level}")
        try:
            values[k] = float(F_text)
        except ValueError:
            raise ValidationError(f"row {lineno}: cannot parse F value {F_text!r}") from None
        if not np.isfinite(values[k]):
            raise ValidationError(f"row {lineno}: F value is not finite")
    return SampleVector(level, values)


def format_float(x: float) -> str:
    return repr(float(x))


def samples_to_csv(samples: SampleVector) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "F"])
    for k, value in enumerate(samples.values):
        writer.writerow([f"{k}/2^{samples.level}", format_float(value)])
    return out.getvalue()


def result_to_json(result: EstimateResult) -> str:
    payload = {
        "n": result.n,
        "f0": result.f0_hat,
        "truncated": result.truncated,
        "coeffs": [{"m": m, "k": k, "value": v} for m, k, v in result.coeffs.items()],
    }
    return json.dumps(payload, indent=2) + "\n"


def result_to_csv(result: EstimateResult) -> str:
    out = io.StringIO()
    out.write(f"# n={result.n}\n# f0={format_float(result.f0_hat)}\n# truncated={str(result.truncated).lower()}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["m", "k", "value"])
    for m, k, v in result.coeffs.items():
        writer.writerow([m, k, format_float(v)])
    return out.getvalue()


def rows_to_csv(header, rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return out.getvalue()
