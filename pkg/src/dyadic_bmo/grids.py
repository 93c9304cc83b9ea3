"""Sampled functions on dyadic grids: representation, exact integrals, I/O.

A :class:`GridFunction` is piecewise constant on the 2**(n*L) finest cells
of a root cube, so every average or oscillation over a dyadic cube of level
<= L is an exact finite sum of cell values.  Values are stored flat in
lexicographic order of the cell index vector with the last axis varying
fastest (C order), which is also the on-disk ordering.

File formats
------------
JSON: object with keys "n" (int), "levels" (int), "origin" (array of n
numbers), "side" (number), "values" (array of 2**(n*levels) numbers).

CSV (n=1 only): header line "value", then one value per line; the function
is placed on the unit interval and levels is inferred from the line count,
which must be a power of two.
"""

from __future__ import annotations

import json
import os
from typing import IO, Any

import numpy as np

from .cubes import DyadicCube, RootCube


class GridFormatError(ValueError):
    """Raised when an input file does not conform to the grid formats."""


class GridFunction:
    """Piecewise-constant function on the finest cells of a dyadic grid.

    Immutable after construction; all reads are safe to share across
    threads.
    """

    def __init__(self, root: RootCube, levels: int, values):
        if not isinstance(root, RootCube):
            raise TypeError("root must be a RootCube")
        levels = int(levels)
        if levels < 0:
            raise ValueError(f"levels must be >= 0, got {levels}")
        n = root.dimension
        expected = 1 << (n * levels)
        arr = np.asarray(values, dtype=np.float64).reshape(-1).copy()
        if arr.size != expected:
            raise GridFormatError(
                f"values: expected {expected} values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise GridFormatError(f"values[{bad}]: not finite")
        arr.flags.writeable = False
        self.root = root
        self.levels = levels
        self.values = arr
        self._grid = arr.reshape((1 << levels,) * n)

    @property
    def dimension(self) -> int:
        return self.root.dimension

    @property
    def cell_volume(self) -> float:
        """Volume of one finest cell."""
        return self.root.volume * 2.0 ** (-self.dimension * self.levels)

    def _block(self, cube: DyadicCube) -> np.ndarray:
        """View of the finest-cell values covered by ``cube``."""
        if cube.dimension != self.dimension:
            raise ValueError(
                f"cube dimension {cube.dimension} does not match grid dimension {self.dimension}"
            )
        if cube.level > self.levels:
            raise ValueError(
                f"cube level {cube.level} exceeds grid levels {self.levels}"
            )
        scale = 1 << (self.levels - cube.level)
        slices = tuple(slice(k * scale, (k + 1) * scale) for k in cube.index)
        return self._grid[slices]

    def cube_average(self, cube: DyadicCube) -> float:
        """Average value of the function over ``cube`` (exact cell mean)."""
        return float(self._block(cube).mean())

    def mean_oscillation_about(self, cube: DyadicCube, base: float) -> float:
        """Mean of |f - base| over ``cube``, as an exact cell sum."""
        return float(np.abs(self._block(cube) - base).mean())


# ---------------------------------------------------------------------------
# I/O


def _require_number(obj: Any, field: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise GridFormatError(f"{field}: expected a number, got {obj!r}")
    return float(obj)


def _require_int(obj: Any, field: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise GridFormatError(f"{field}: expected an integer, got {obj!r}")
    return obj


def from_dict(doc: Any) -> GridFunction:
    """Build a GridFunction from a parsed grid-JSON document."""
    if not isinstance(doc, dict):
        raise GridFormatError("expected a JSON object at top level")
    for key in ("n", "levels", "origin", "side", "values"):
        if key not in doc:
            raise GridFormatError(f"missing field '{key}'")
    n = _require_int(doc["n"], "n")
    if n < 1:
        raise GridFormatError(f"n: expected a positive integer, got {n}")
    levels = _require_int(doc["levels"], "levels")
    if levels < 0:
        raise GridFormatError(f"levels: expected a non-negative integer, got {levels}")
    origin = doc["origin"]
    if not isinstance(origin, list) or len(origin) != n:
        raise GridFormatError(
            f"origin: expected an array of {n} numbers, got {origin!r}"
        )
    origin = tuple(_require_number(x, f"origin[{i}]") for i, x in enumerate(origin))
    side = _require_number(doc["side"], "side")
    if not side > 0:
        raise GridFormatError(f"side: expected a positive number, got {side}")
    raw = doc["values"]
    if not isinstance(raw, list):
        raise GridFormatError("values: expected an array")
    expected = 1 << (n * levels)
    if len(raw) != expected:
        raise GridFormatError(f"values: expected {expected} values, got {len(raw)}")
    values = [_require_number(x, f"values[{i}]") for i, x in enumerate(raw)]
    return GridFunction(RootCube(n, origin, side), levels, values)


def to_dict(phi: GridFunction) -> dict:
    return {
        "n": phi.dimension,
        "levels": phi.levels,
        "origin": list(phi.root.origin),
        "side": phi.root.side,
        "values": [float(v) for v in phi.values],
    }


def _load_csv_lines(lines: list[str]) -> GridFunction:
    rows = [ln.strip() for ln in lines if ln.strip()]
    if not rows or rows[0] != "value":
        raise GridFormatError('csv: expected header line "value"')
    values = []
    for i, tok in enumerate(rows[1:]):
        try:
            v = float(tok)
        except ValueError:
            raise GridFormatError(f"values[{i}]: expected a number, got {tok!r}") from None
        values.append(v)
    count = len(values)
    levels = count.bit_length() - 1
    if count == 0 or (1 << levels) != count:
        raise GridFormatError(f"values: expected a power-of-two count, got {count}")
    return GridFunction(RootCube(1, (0.0,), 1.0), levels, values)


def load(source: str | os.PathLike | IO[str], fmt: str | None = None) -> GridFunction:
    """Load a GridFunction from a path or text stream.

    The format is inferred from the path suffix when ``fmt`` is None;
    streams default to JSON.
    """
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if fmt is None:
            fmt = "csv" if path.lower().endswith(".csv") else "json"
        with open(path, "r", encoding="utf-8") as fh:
            return load(fh, fmt)
    fmt = fmt or "json"
    if fmt == "json":
        try:
            doc = json.load(source)
        except json.JSONDecodeError as exc:
            raise GridFormatError(f"malformed JSON: {exc}") from None
        return from_dict(doc)
    if fmt == "csv":
        return _load_csv_lines(source.read().splitlines())
    raise ValueError(f"unknown format {fmt!r}")


def dumps(phi: GridFunction, fmt: str = "json") -> str:
    """Serialize to the interchange text form (bit-exact round trip)."""
    if fmt == "json":
        return json.dumps(to_dict(phi), indent=2) + "\n"
    if fmt == "csv":
        if phi.dimension != 1:
            raise GridFormatError("csv format supports n=1 only")
        return "value\n" + "".join(f"{float(v)!r}\n" for v in phi.values)
    raise ValueError(f"unknown format {fmt!r}")


def save(phi: GridFunction, path: str | os.PathLike, fmt: str | None = None) -> None:
    path = os.fspath(path)
    if fmt is None:
        fmt = "csv" if path.lower().endswith(".csv") else "json"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(phi, fmt))


# ---------------------------------------------------------------------------
# Built-in generators (test corpus)

GENERATOR_KINDS = ("constant", "step", "spike", "dyadic_martingale", "log_singularity")


def _upsample(arr: np.ndarray) -> np.ndarray:
    for axis in range(arr.ndim):
        arr = np.repeat(arr, 2, axis=axis)
    return arr


def generate(
    kind: str,
    n: int = 1,
    levels: int = 4,
    params: dict | None = None,
    seed: int = 0,
    origin: tuple[float, ...] | None = None,
    side: float = 1.0,
) -> GridFunction:
    """Deterministic test functions; identical (kind, params, seed) give
    identical values.

    Kinds:
      constant          params: c (default 1.0)
      step              params: axis (0), low (0.0), high (1.0) -- low on the
                        lower half of the axis, high on the upper half
      spike             params: h (default 1.0) placed in the last cell
      dyadic_martingale params: amplitude (1.0); every subdivision node adds
                        an independent uniform increment in [-amplitude, amplitude]
      log_singularity   params: x0 (default: root origin); cell-midpoint
                        samples of x -> log||x - x0||
    """
    params = dict(params or {})
    root = RootCube(n, origin if origin is not None else (0.0,) * n, side)
    m = 1 << levels
    shape = (m,) * n

    def take(name, default):
        return params.pop(name, default)

    if kind == "constant":
        c = float(take("c", 1.0))
        values = np.full(shape, c)
    elif kind == "step":
        axis = int(take("axis", 0))
        low = float(take("low", 0.0))
        high = float(take("high", 1.0))
        if not 0 <= axis < n:
            raise ValueError(f"step axis {axis} out of range for n={n}")
        idx = np.arange(m).reshape((1,) * axis + (m,) + (1,) * (n - axis - 1))
        values = np.where(idx < m // 2, low, high) * np.ones(shape)
    elif kind == "spike":
        h = float(take("h", 1.0))
        values = np.zeros(shape)
        values.reshape(-1)[-1] = h
    elif kind == "dyadic_martingale":
        amplitude = float(take("amplitude", 1.0))
        rng = np.random.default_rng(seed)
        values = np.zeros((1,) * n)
        for _ in range(levels):
            values = _upsample(values)
            values = values + rng.uniform(-amplitude, amplitude, size=values.shape)
    elif kind == "log_singularity":
        x0 = take("x0", root.origin)
        if np.isscalar(x0):
            x0 = (float(x0),) * n
        x0 = tuple(float(x) for x in x0)
        if len(x0) != n:
            raise ValueError(f"x0: expected {n} coordinates, got {len(x0)}")
        axes = [
            root.origin[i] + side * (np.arange(m) + 0.5) / m - x0[i] for i in range(n)
        ]
        sq = np.zeros(shape)
        for i, ax in enumerate(axes):
            sq = sq + (ax.reshape((1,) * i + (m,) + (1,) * (n - i - 1))) ** 2
        if np.any(sq == 0.0):
            raise ValueError("x0 coincides with a cell midpoint; log is singular there")
        values = 0.5 * np.log(sq)
    else:
        raise ValueError(f"unknown kind {kind!r}")

    if params:
        raise ValueError(f"unknown parameter {sorted(params)[0]!r} for kind {kind!r}")
    return GridFunction(root, levels, values.reshape(-1))
