"""CSV/JSON readers and atomic writers."""

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .exceptions import InputValidationError


class CsvParseError(InputValidationError):
    def __init__(self, message, line=None, column=None):
        loc = f"line {line}" + (f", column {column}" if column is not None else "") if line else ""
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.column = column


def _parse_rows(path, allow_header):
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh)]
    except OSError as exc:
        raise InputValidationError(f"cannot read {path}: {exc}") from None
    out = []
    width = None
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            vals = [float(c) for c in row]
        except ValueError:
            if allow_header and not out and width is None:
                width = len(row)
                continue
            bad = next(i for i, c in enumerate(row, start=1) if not _is_float(c))
            raise CsvParseError(f"non-numeric value {row[bad - 1]!r}", lineno, bad) from None
        if width is None:
            width = len(vals)
        if len(vals) != width:
            raise CsvParseError(f"expected {width} fields, found {len(vals)}", lineno)
        for col, v in enumerate(vals, start=1):
            if not math.isfinite(v):
                raise CsvParseError(f"non-finite value {row[col - 1]!r}", lineno, col)
        out.append(vals)
    if not out:
        raise CsvParseError(f"{path} contains no numeric rows")
    return np.array(out, dtype=float)


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_data_csv(path):
    """``n x p`` observations; an optional non-numeric header row is skipped."""
    return _parse_rows(path, allow_header=True)


def read_matrix_csv(path):
    """Square numeric matrix without header."""
    M = _parse_rows(path, allow_header=False)
    if M.shape[0] != M.shape[1]:
        raise InputValidationError(f"{path}: expected a square matrix, got shape {M.shape}")
    return M


def fmt(v):
    """Shortest round-tripping text for a cell."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def atomic_write_text(path, text):
    """Write via a temp file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_csv_text(M):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.asarray(M, dtype=float):
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_matrix_csv(path, M):
    atomic_write_text(path, matrix_csv_text(M))


def rows_csv_text(columns, rows, header=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def write_rows_csv(path, columns, rows):
    atomic_write_text(path, rows_csv_text(columns, rows))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _finite_json(o):
    # JSON has no inf/nan; write them as strings
    if isinstance(o, dict):
        return {k: _finite_json(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite_json(v) for v in o]
    if isinstance(o, (float, np.floating)) and not math.isfinite(o):
        return str(float(o))
    return o


def json_text(obj):
    return json.dumps(_finite_json(obj), indent=2, default=_json_default) + "\n"


def write_json(path, obj):
    atomic_write_text(path, json_text(obj))


class StreamingCsv:
    """Append rows to ``path`` as they arrive; the file is built under a
    temporary name and renamed into place by :meth:`close`."""

    def __init__(self, path, columns):
        self.path = os.fspath(path)
        self.columns = columns
        directory = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(directory, exist_ok=True)
        self.tmp = os.path.join(directory, f".partial-{os.path.basename(self.path)}")
        self._fh = open(self.tmp, "w", newline="")
        self._fh.write(rows_csv_text(columns, []))
        self._fh.flush()

    def write(self, rows):
        self._fh.write(rows_csv_text(self.columns, rows, header=False))
        self._fh.flush()

    def close(self):
        self._fh.close()
        os.replace(self.tmp, self.path)

    def abort(self):
        self._fh.close()
        if os.path.exists(self.tmp):
            os.unlink(self.tmp)
