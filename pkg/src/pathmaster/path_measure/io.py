"""Plain-text serialization of path measures.

Layout::

    # pathmeasure v1
    # d N M T
    1 4 10 1.0
    <N blocks of M+1 rows, d columns each>

Numbers are written with 17 significant digits, so a save/load round trip
is exact and equal measures produce identical bytes.
"""

import io as _io
import os
import tempfile

import numpy as np

from ..errors import ShapeError
from .paths import PathMeasure, TimeGrid

MAGIC = "# pathmeasure v1"


def dumps(mu):
    buf = _io.StringIO()
    buf.write(MAGIC + "\n# d N M T\n")
    buf.write(f"{mu.d} {mu.N} {mu.grid.M} {mu.grid.T!r}\n")
    rows = mu.values.reshape(-1, mu.d)
    np.savetxt(buf, rows, fmt="%.17g")
    return buf.getvalue()


def loads(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ShapeError("not a pathmeasure v1 file")
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    d, n, m, T = body[0].split()
    d, n, m = int(d), int(n), int(m)
    data = np.loadtxt(_io.StringIO("\n".join(body[1:])), ndmin=2)
    if data.shape != (n * (m + 1), d):
        raise ShapeError(f"expected {n * (m + 1)} rows of {d} columns, got {data.shape}")
    return PathMeasure(TimeGrid(float(T), m), data.reshape(n, m + 1, d))


def save_measure(path, mu):
    """Write atomically: a temporary file in the same directory is renamed into place."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".pm-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(dumps(mu))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_measure(path):
    with open(path) as fh:
        return loads(fh.read())
