"""Plain-text parameter container.

Layout::

    relex-model v1
    <name> <rows> <cols>
    <rows lines of cols floats>
    ...
    end

Vectors are written as ``rows x 1``. Floats use 9 significant digits, which
round-trips float32 exactly.
"""

from __future__ import annotations

import numpy as np

HEADER = "relex-model v1"
FOOTER = "end"


class ModelFormatError(ValueError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".9g")


def write_params(stream, values: dict[str, np.ndarray]):
    stream.write(HEADER + "\n")
    for name, value in values.items():
        mat = value.reshape(value.shape[0], -1) if value.ndim else value.reshape(1, 1)
        rows, cols = mat.shape
        stream.write(f"{name} {rows} {cols}\n")
        for row in mat:
            stream.write(" ".join(_fmt(x) for x in row) + "\n")
    stream.write(FOOTER + "\n")


def read_params(stream, expected: dict[str, tuple] | None = None, dtype=np.float64):
    """Parse a container into ``{name: array}``.

    With ``expected`` (name -> shape), names and shapes must match exactly;
    vectors come back 1-d.
    """
    lines = iter(stream.read().split("\n"))
    lineno = 0

    def next_line():
        nonlocal lineno
        lineno += 1
        try:
            return next(lines)
        except StopIteration:
            raise ModelFormatError(f"line {lineno}: unexpected end of file") from None

    if next_line() != HEADER:
        raise ModelFormatError(f"line 1: expected header {HEADER!r}")
    out = {}
    while True:
        line = next_line()
        if line == FOOTER:
            break
        parts = line.split()
        if len(parts) != 3:
            raise ModelFormatError(f"line {lineno}: expected 'name rows cols', got {line!r}")
        name = parts[0]
        try:
            rows, cols = int(parts[1]), int(parts[2])
        except ValueError:
            raise ModelFormatError(f"line {lineno}: bad shape in {line!r}") from None
        data = np.empty((rows, cols), dtype=dtype)
        for r in range(rows):
            fields = next_line().split()
            if len(fields) != cols:
                raise ModelFormatError(
                    f"line {lineno}: {name} row {r} has {len(fields)} values, expected {cols}")
            try:
                data[r] = [float(f) for f in fields]
            except ValueError:
                raise ModelFormatError(f"line {lineno}: {name} row {r} is not numeric") from None
            if not np.all(np.isfinite(data[r])):
                raise ModelFormatError(f"line {lineno}: {name} row {r} has non-finite values")
        if name in out:
            raise ModelFormatError(f"line {lineno}: duplicate parameter {name}")
        out[name] = data
    if expected is not None:
        missing = [n for n in expected if n not in out]
        extra = [n for n in out if n not in expected]
        if missing or extra:
            raise ModelFormatError(f"parameter mismatch: missing {missing}, unexpected {extra}")
        for name, shape in expected.items():
            want = (shape[0], shape[1] if len(shape) == 2 else 1)
            if out[name].shape != want:
                raise ModelFormatError(
                    f"{name}: stored shape {out[name].shape}, architecture expects {tuple(shape)}")
            if len(shape) == 1:
                out[name] = out[name][:, 0]
    return out
