"""Boxes, uniform cell-centred grids, dyadic cubes and cube families.

Every function in the package lives on a box ``[-R, R]^dim`` (``dim`` is 1
or 2) sampled at the centres of ``N = 2**levels`` cells per axis.  Integrals
are midpoint sums, so the average over a dyadic cube is exactly the mean of
the samples it contains and nested averages compose without error.

Suprema over "all cubes containing x" are realised by a :class:`CubeFamily`:
the dyadic cubes of levels ``0..max_level`` together with their concentric
3-fold dilations clipped to the box.  The family evaluates per-cube
statistics level by level on reshaped sample blocks, which keeps every
maximal operator linear in the number of samples per level.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "Box",
    "GridFunction",
    "DyadicCube",
    "Cube",
    "CubeFamily",
    "GridMismatchError",
    "ResolutionError",
    "enumerate_cubes",
    "cube_average",
    "dilate_cube",
    "default_family",
    "write_grid",
    "read_grid",
]


class GridMismatchError(ValueError):
    """Raised when two grid functions do not share box and level."""


class ResolutionError(ValueError):
    """Raised when a cube is finer than the grid it is evaluated on."""


@dataclass(frozen=True)
class Box:
    dim: int = 1
    halfwidth: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.halfwidth > 0:
            raise ValueError(f"halfwidth must be positive, got {self.halfwidth}")

    @property
    def side(self) -> float:
        return 2.0 * self.halfwidth

    @property
    def measure(self) -> float:
        return self.side**self.dim

    def cell_width(self, levels: int) -> float:
        return self.side / 2**levels

    def centers(self, levels: int) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        n = 2**levels
        h = self.side / n
        return -self.halfwidth + (np.arange(n) + 0.5) * h

    def mesh(self, levels: int) -> tuple[np.ndarray, ...]:
        c = self.centers(levels)
        if self.dim == 1:
            return (c,)
        return tuple(np.meshgrid(c, c, indexing="ij"))


class GridFunction:
    """Real samples of a function at the cell centres of a uniform grid.

    Instances are immutable; the sample array is stored read-only with shape
    ``(N,) * dim`` in row-major order.
    """

    __slots__ = ("box", "levels", "samples")

    def __init__(self, box: Box, levels: int, samples):
        arr = np.array(samples, dtype=np.float64)
        n = 2**levels
        shape = (n,) * box.dim
        if arr.size != n**box.dim:
            raise GridMismatchError(
                f"expected {n ** box.dim} samples for levels={levels}, got {arr.size}"
            )
        arr = arr.reshape(shape)
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid samples must be finite")
        arr.flags.writeable = False
        self.box = box
        self.levels = int(levels)
        self.samples = arr

    # -- construction -----------------------------------------------------
    @classmethod
    def from_function(cls, box: Box, levels: int, func: Callable) -> "GridFunction":
        """Sample ``func`` at every cell centre (``func`` receives one array per axis)."""
        values = func(*box.mesh(levels))
        values = np.broadcast_to(np.asarray(values, dtype=np.float64), (2**levels,) * box.dim)
        return cls(box, levels, values)

    @classmethod
    def constant(cls, box: Box, levels: int, value: float) -> "GridFunction":
        return cls(box, levels, np.full((2**levels,) * box.dim, float(value)))

    def with_samples(self, samples) -> "GridFunction":
        return GridFunction(self.box, self.levels, samples)

    # -- geometry ----------------------------------------------------------
    @property
    def n(self) -> int:
        return 2**self.levels

    @property
    def h(self) -> float:
        return self.box.cell_width(self.levels)

    @property
    def cell_measure(self) -> float:
        return self.h**self.box.dim

    def coords(self) -> tuple[np.ndarray, ...]:
        return self.box.mesh(self.levels)

    # -- integrals ---------------------------------------------------------
    def integral(self, weight: "GridFunction | None" = None) -> float:
        vals = self.samples if weight is None else self.samples * _check_same(self, weight).samples
        return float(vals.sum() * self.cell_measure)

    def mean(self) -> float:
        return float(self.samples.mean())

    def max_abs(self) -> float:
        return float(np.abs(self.samples).max())

    # -- pointwise algebra ---------------------------------------------------
    def _binary(self, other, op):
        if isinstance(other, GridFunction):
            _check_same(self, other)
            return self.with_samples(op(self.samples, other.samples))
        return self.with_samples(op(self.samples, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return self.with_samples(-self.samples)

    def __abs__(self):
        return self.with_samples(np.abs(self.samples))

    def scale(self, c: float) -> "GridFunction":
        return self.with_samples(float(c) * self.samples)

    def abs(self) -> "GridFunction":
        return abs(self)

    def power(self, exponent) -> "GridFunction":
        """Samplewise power; exponent may be a scalar or a grid function.

        Negative bases are only allowed for integer exponents.
        """
        e = exponent.samples if isinstance(exponent, GridFunction) else float(exponent)
        if isinstance(exponent, GridFunction):
            _check_same(self, exponent)
        if np.any(self.samples < 0):
            integral = np.all(np.equal(np.mod(e, 1.0), 0.0))
            if not integral:
                raise ValueError("negative base requires an integer exponent")
        return self.with_samples(np.power(self.samples, e))

    def map(self, func: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Compose with a scalar map applied to the sample array."""
        return self.with_samples(func(self.samples))

    def allclose(self, other: "GridFunction", rtol=1e-10, atol=1e-12) -> bool:
        _check_same(self, other)
        return bool(np.allclose(self.samples, other.samples, rtol=rtol, atol=atol))

    def __repr__(self):
        return f"GridFunction(dim={self.box.dim}, R={self.box.halfwidth}, levels={self.levels})"


def _check_same(f: GridFunction, g: GridFunction) -> GridFunction:
    if f.box != g.box or f.levels != g.levels:
        raise GridMismatchError(f"grid mismatch: {f!r} vs {g!r}")
    return g


# ---------------------------------------------------------------------------
# cubes


@dataclass(frozen=True)
class Cube:
    """An axis-parallel cube (or its clipped remainder) in box coordinates."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def measure(self) -> float:
        return float(np.prod([u - l for l, u in zip(self.lower, self.upper)]))

    @property
    def center(self) -> tuple[float, ...]:
        return tuple(0.5 * (l + u) for l, u in zip(self.lower, self.upper))

    def contains(self, point: Sequence[float]) -> bool:
        return all(l <= p < u for l, p, u in zip(self.lower, point, self.upper))

    def cell_mask(self, box: Box, levels: int) -> np.ndarray:
        """Boolean mask of the cells whose centres lie in the cube."""
        c = box.centers(levels)
        masks = [(c >= l) & (c < u) for l, u in zip(self.lower, self.upper)]
        if box.dim == 1:
            return masks[0]
        return np.logical_and.outer(masks[0], masks[1])


@dataclass(frozen=True)
class DyadicCube:
    """The dyadic subcube of ``box`` at ``level`` with multi-index ``index``."""

    box: Box
    level: int
    index: tuple[int, ...]

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if len(self.index) != self.box.dim:
            raise ValueError("index length must equal box dimension")
        if any(not 0 <= k < 2**self.level for k in self.index):
            raise ValueError(f"index {self.index} outside level {self.level}")

    @property
    def side(self) -> float:
        return self.box.side * 2.0**-self.level

    @property
    def corner(self) -> tuple[float, ...]:
        return tuple(-self.box.halfwidth + k * self.side for k in self.index)

    @property
    def measure(self) -> float:
        return self.side**self.box.dim

    def as_cube(self) -> Cube:
        lo = self.corner
        return Cube(lo, tuple(x + self.side for x in lo))

    def contains(self, point: Sequence[float]) -> bool:
        return self.as_cube().contains(point)

    def slices(self, grid_levels: int) -> tuple[slice, ...]:
        if self.level > grid_levels:
            raise ResolutionError(
                f"cube level {self.level} finer than grid level {grid_levels}"
            )
        n = 2 ** (grid_levels - self.level)
        return tuple(slice(k * n, (k + 1) * n) for k in self.index)

    def children(self) -> list["DyadicCube"]:
        offsets = [(0,), (1,)] if self.box.dim == 1 else [(0, 0), (0, 1), (1, 0), (1, 1)]
        return [
            DyadicCube(self.box, self.level + 1, tuple(2 * k + o for k, o in zip(self.index, off)))
            for off in offsets
        ]


def dilate_cube(q: DyadicCube | Cube, t: float, box: Box | None = None) -> Cube:
    """Concentric cube with side multiplied by ``t > 1``, clipped to the box."""
    if not t > 1:
        raise ValueError(f"dilation factor must exceed 1, got {t}")
    if isinstance(q, DyadicCube):
        box = q.box
        q = q.as_cube()
    if box is None:
        raise ValueError("a box is required to clip a non-dyadic cube")
    R = box.halfwidth
    lo, hi = [], []
    for l, u in zip(q.lower, q.upper):
        c, half = 0.5 * (l + u), 0.5 * t * (u - l)
        lo.append(max(-R, c - half))
        hi.append(min(R, c + half))
    return Cube(tuple(lo), tuple(hi))


def cube_average(f: GridFunction, q: DyadicCube | Cube) -> float:
    """Mean of the samples whose cell centres lie in ``q``."""
    if isinstance(q, DyadicCube):
        if q.box != f.box:
            raise GridMismatchError("cube and function live on different boxes")
        return float(f.samples[q.slices(f.levels)].mean())
    mask = q.cell_mask(f.box, f.levels)
    if not mask.any():
        raise ResolutionError("cube contains no cell centre at this resolution")
    return float(f.samples[mask].mean())


# ---------------------------------------------------------------------------
# cube families

# A per-cube statistic receives a 0/1 weight array and one window array per
# input function, all shaped (ncubes, cells), and returns shape (ncubes,).
CubeStat = Callable[..., np.ndarray]


@dataclass(frozen=True)
class CubeFamily:
    """Dyadic cubes of levels ``0..max_level`` plus optional clipped dilations."""

    box: Box
    max_level: int
    dilation: float | None = 3.0
    _keys: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.max_level < 0:
            raise ValueError("max_level must be >= 0")
        if self.dilation not in (None, 3.0, 3):
            raise ValueError("vectorised families support dilation 3 or none")
        keys = []
        for v in range(self.max_level + 1):
            keys.append((v, False))
            if self.dilation:
                keys.append((v, True))
        object.__setattr__(self, "_keys", tuple(keys))

    @property
    def count(self) -> int:
        """Number of dyadic cubes (dilations not counted)."""
        return sum(2 ** (v * self.box.dim) for v in range(self.max_level + 1))

    def iter_cubes(self) -> Iterator[DyadicCube]:
        for v in range(self.max_level + 1):
            for idx in np.ndindex(*(2**v,) * self.box.dim):
                yield DyadicCube(self.box, v, tuple(int(i) for i in idx))

    @property
    def cubes(self) -> list[DyadicCube]:
        return list(self.iter_cubes())

    def dilated_cubes(self) -> list[Cube]:
        if not self.dilation:
            return []
        return [dilate_cube(q, float(self.dilation)) for q in self.iter_cubes()]

    def all_cubes(self) -> list[DyadicCube | Cube]:
        return self.cubes + self.dilated_cubes()

    # -- vectorised evaluation ---------------------------------------------
    def _check(self, arrays: Sequence[np.ndarray]) -> int:
        n = arrays[0].shape[0]
        levels = int(round(math.log2(n)))
        if 2**levels != n:
            raise GridMismatchError("sample arrays must have power-of-two size")
        for a in arrays:
            if a.shape != arrays[0].shape:
                raise GridMismatchError("all inputs must share the grid")
        if self.max_level > levels:
            raise ResolutionError(
                f"family max_level {self.max_level} exceeds grid level {levels}"
            )
        return levels

    def stats(self, stat: CubeStat, *functions) -> list[np.ndarray]:
        """Evaluate ``stat`` on every cube of the family.

        Returns one array per (level, kind) in family order; dyadic entries
        are shaped ``(2**v,) * dim`` indexed by cube multi-index, dilated
        entries are indexed by the dyadic cube that was dilated.
        """
        arrays = [f.samples if isinstance(f, GridFunction) else np.asarray(f) for f in functions]
        levels = self._check(arrays)
        out = []
        for v, dilated in self._keys:
            wins, mask = _windows(arrays, levels, v, self.box.dim, dilated)
            vals = stat(mask, *wins)
            out.append(np.asarray(vals, dtype=np.float64).reshape((2**v,) * self.box.dim))
        return out

    def sup(self, per_cube: Sequence[np.ndarray], levels: int) -> np.ndarray:
        """Pointwise maximum over the family cubes containing each cell."""
        n = 2**levels
        dim = self.box.dim
        best = np.full((n,) * dim, -np.inf)
        for (v, dilated), vals in zip(self._keys, per_cube):
            if dilated:
                vals = _neighbour_max(vals)
            rep = n // 2**v
            expanded = vals
            for ax in range(dim):
                expanded = np.repeat(expanded, rep, axis=ax)
            np.maximum(best, expanded, out=best)
        return best

    def max(self, per_cube: Sequence[np.ndarray]) -> float:
        return float(max(np.max(v) for v in per_cube))

    def keys(self) -> tuple:
        return self._keys


def _windows(arrays, levels, v, dim, dilated):
    b = 2**v
    n = 2 ** (levels - v)
    blocks = []
    for a in arrays:
        if dim == 1:
            blocks.append(a.reshape(b, n))
        else:
            blocks.append(a.reshape(b, n, b, n).transpose(0, 2, 1, 3).reshape(b, b, n * n))
    if not dilated:
        flat = [x.reshape(-1, x.shape[-1]) for x in blocks]
        return flat, np.ones_like(flat[0])
    pad = ((1, 1), (0, 0)) if dim == 1 else ((1, 1), (1, 1), (0, 0))
    ones = np.ones_like(blocks[0])
    wins = []
    for x in blocks + [ones]:
        p = np.pad(x, pad)
        if dim == 1:
            w = sliding_window_view(p, 3, axis=0)  # (b, n, 3)
        else:
            w = sliding_window_view(p, (3, 3), axis=(0, 1))  # (b, b, nn, 3, 3)
        wins.append(w.reshape(b**dim, -1))
    return wins[:-1], wins[-1]


def _neighbour_max(vals: np.ndarray) -> np.ndarray:
    """Max over the 3**dim neighbourhood of each cube index (edges clipped)."""
    p = np.pad(vals, 1, constant_values=-np.inf)
    if vals.ndim == 1:
        return sliding_window_view(p, 3).max(axis=-1)
    return sliding_window_view(p, (3, 3)).max(axis=(-2, -1))


def enumerate_cubes(box: Box, max_level: int, dilation: float | None = 3.0) -> CubeFamily:
    """All dyadic subcubes of ``box`` up to ``max_level`` (plus 3-fold dilations)."""
    return CubeFamily(box, max_level, dilation)


def default_family(f: GridFunction) -> CubeFamily:
    return CubeFamily(f.box, f.levels, 3.0)


# ---------------------------------------------------------------------------
# masked window helpers shared by the statistic callbacks


def masked_mean(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return (x * mask).sum(axis=-1) / mask.sum(axis=-1)


def masked_max(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask > 0, x, -np.inf).max(axis=-1)


def masked_min(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask > 0, x, np.inf).min(axis=-1)


# ---------------------------------------------------------------------------
# serialization

_ENCODINGS = ("csv", "raw")


def write_grid(f: GridFunction, target, encoding: str = "csv") -> None:
    """Write a JSON header line followed by CSV ``index,value`` rows or raw LE float64."""
    if encoding not in _ENCODINGS:
        raise ValueError(f"encoding must be one of {_ENCODINGS}")
    header = {
        "dim": f.box.dim,
        "halfwidth": f.box.halfwidth,
        "levels": f.levels,
        "encoding": encoding,
    }
    flat = np.ascontiguousarray(f.samples).reshape(-1)
    head = (json.dumps(header, sort_keys=True) + "\n").encode()
    if encoding == "csv":
        body = "".join(f"{i},{float(v)!r}\n" for i, v in enumerate(flat)).encode()
    else:
        body = flat.astype("<f8").tobytes()
    data = head + body
    if hasattr(target, "write"):
        target.write(data)
    else:
        with open(target, "wb") as fh:
            fh.write(data)


def read_grid(source) -> GridFunction:
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    if isinstance(data, str):
        data = data.encode()
    nl = data.index(b"\n")
    header = json.loads(data[:nl].decode())
    body = data[nl + 1 :]
    box = Box(int(header["dim"]), float(header["halfwidth"]))
    levels = int(header["levels"])
    size = 2 ** (levels * box.dim)
    encoding = header.get("encoding", "csv")
    if encoding == "raw":
        flat = np.frombuffer(body, dtype="<f8", count=size).astype(np.float64)
    elif encoding == "csv":
        flat = np.empty(size)
        seen = np.zeros(size, dtype=bool)
        for line in io.StringIO(body.decode()):
            line = line.strip()
            if not line:
                continue
            i, v = line.split(",")
            flat[int(i)] = float(v)
            seen[int(i)] = True
        if not seen.all():
            raise ValueError("CSV payload is missing sample rows")
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    return GridFunction(box, levels, flat)
