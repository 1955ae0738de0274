"""L(log L) averages, the associated maximal function, and BMO.

The Young function is ``phi(t) = t * (1 + log+ t)`` with the natural log.
Its Luxemburg average over a cube,

    ||f||_{L log L, Q} = inf{lam > 0 : mean_Q phi(|f| / lam) <= 1},

is bracketed by ``[mean_Q |f|, max_Q |f|]`` (``phi(t) >= t`` with equality
on ``[0, 1]``) and found by geometric bisection.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import (
    Cube,
    CubeFamily,
    DyadicCube,
    GridFunction,
    ResolutionError,
    default_family,
    masked_max,
    masked_mean,
)
from .numerics import Comparison, bisect_decreasing

__all__ = [
    "phi",
    "phi_iter",
    "phi_inverse",
    "PhiFunction",
    "BmoFunction",
    "orlicz_average",
    "orlicz_cube_stats",
    "m_loglog",
    "bmo_norm",
    "bmo_holder_check",
    "bmo_dilate_bound_check",
    "bmo_dilated_oscillation_check",
    "truncate",
    "cube_values",
]

ORLICZ_RTOL = 1e-8


def _phi(t: np.ndarray) -> np.ndarray:
    return t * (1.0 + np.log(np.maximum(t, 1.0)))


def phi(t):
    """``t (1 + max(log t, 0))`` for ``t >= 0`` (scalars or arrays)."""
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("phi is defined for t >= 0")
    out = _phi(arr)
    return float(out) if out.ndim == 0 else out


def phi_iter(m: int, t):
    """``m``-fold composition of :func:`phi`."""
    if m < 1:
        raise ValueError("iteration order must be >= 1")
    out = np.asarray(t, dtype=np.float64)
    if np.any(out < 0):
        raise ValueError("phi is defined for t >= 0")
    for _ in range(m):
        out = _phi(out)
    return float(out) if out.ndim == 0 else out


def phi_inverse(y: float, m: int = 1, rtol: float = 1e-14) -> float:
    """Solve ``phi_iter(m, t) = y`` for ``t >= 0``."""
    if y < 0:
        raise ValueError("phi is onto [0, inf); y must be >= 0")
    if y == 0:
        return 0.0
    lo, hi = 0.0, max(1.0, y)
    while phi_iter(m, hi) < y:
        hi *= 2.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket exhausted at subnormal scales
            break
        if phi_iter(m, mid) < y:
            lo = mid
        else:
            hi = mid
    return hi


class PhiFunction:
    """The Young function ``phi`` composed ``order`` times."""

    def __init__(self, order: int = 1):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = int(order)

    def __call__(self, t):
        return phi_iter(self.order, t)

    def __repr__(self):
        return f"PhiFunction(order={self.order})"


# ---------------------------------------------------------------------------
# Luxemburg averages


def cube_values(f: GridFunction, q: DyadicCube | Cube) -> np.ndarray:
    """Samples of ``f`` whose cell centres lie in ``q`` (flattened)."""
    if isinstance(q, DyadicCube):
        return np.asarray(f.samples[q.slices(f.levels)]).reshape(-1)
    mask = q.cell_mask(f.box, f.levels)
    if not mask.any():
        raise ResolutionError("cube contains no cell centre at this resolution")
    return np.asarray(f.samples[mask]).reshape(-1)


def _orlicz_windows(mask: np.ndarray, x: np.ndarray, rtol: float = ORLICZ_RTOL) -> np.ndarray:
    a = np.abs(x)
    avg = masked_mean(a, mask)
    top = masked_max(a, mask)
    zero = top <= 0
    lo = np.where(zero, 1.0, avg)
    hi = np.where(zero, 1.0, top)

    def modular(lam):
        return masked_mean(_phi(a / lam[:, None]), mask)

    lam = bisect_decreasing(modular, lo, hi, rtol)
    return np.where(zero, 0.0, lam)


def orlicz_average(f: GridFunction, q: DyadicCube | Cube, tol: float = ORLICZ_RTOL) -> float:
    """Luxemburg ``L log L`` average of ``f`` over the cube ``q``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    vals = cube_values(f, q)[None, :]
    return float(_orlicz_windows(np.ones_like(vals), vals, tol)[0])


def orlicz_cube_stats(f: GridFunction, cubes: CubeFamily, tol: float = ORLICZ_RTOL):
    """Per-cube ``L log L`` averages of ``f`` over a whole family."""
    return cubes.stats(lambda m, x: _orlicz_windows(m, x, tol), f)


def m_loglog(f: GridFunction, cubes: CubeFamily | None = None, x=None, tol: float = ORLICZ_RTOL):
    """Maximal ``L log L`` function; a scalar when a grid index ``x`` is given."""
    cubes = cubes or default_family(f)
    out = f.with_samples(cubes.sup(orlicz_cube_stats(f, cubes, tol), f.levels))
    if x is None:
        return out
    return float(out.samples[x])


# ---------------------------------------------------------------------------
# BMO


def _oscillation(mask, x):
    mean = masked_mean(x, mask)
    return masked_mean(np.abs(x - mean[:, None]), mask)


def bmo_norm(b: GridFunction, cubes: CubeFamily | None = None) -> float:
    """Largest mean oscillation ``mean_Q |b - b_Q|`` over the family."""
    cubes = cubes or default_family(b)
    return cubes.max(cubes.stats(_oscillation, b))


class BmoFunction:
    """A sampled BMO symbol with its norm cached per cube family."""

    def __init__(self, samples: GridFunction):
        self.samples = samples
        self._norms: dict[CubeFamily, float] = {}

    def norm(self, cubes: CubeFamily | None = None) -> float:
        cubes = cubes or default_family(self.samples)
        if cubes not in self._norms:
            self._norms[cubes] = bmo_norm(self.samples, cubes)
        return self._norms[cubes]


def bmo_holder_check(
    b: GridFunction, f: GridFunction, q: DyadicCube | Cube, cubes: CubeFamily | None = None
) -> Comparison:
    """``mean_Q |b - b_Q||f|`` against ``||b||_BMO ||f||_{L log L, Q}``."""
    bq = cube_values(b, q)
    fq = cube_values(f, q)
    lhs = float(np.mean(np.abs(bq - bq.mean()) * np.abs(fq)))
    norm = bmo_norm(b, cubes)
    if norm == 0 or not np.any(fq):
        return Comparison(lhs, 0.0, skipped=True)
    return Comparison(lhs, norm * orlicz_average(f, q))


def _dilated(q, t, box):
    from .grid import dilate_cube

    return dilate_cube(q, t, box)


def bmo_dilate_bound_check(
    b: GridFunction, q: DyadicCube | Cube, t: float, cubes: CubeFamily | None = None
) -> Comparison:
    """``|b_Q - b_{tQ}|`` against ``log(t + 1) ||b||_BMO``."""
    tq = _dilated(q, t, b.box)
    lhs = abs(cube_values(b, q).mean() - cube_values(b, tq).mean())
    return Comparison(float(lhs), math.log(t + 1.0) * bmo_norm(b, cubes))


def bmo_dilated_oscillation_check(
    b: GridFunction, q: DyadicCube | Cube, t: float, r: float, cubes: CubeFamily | None = None
) -> Comparison:
    """``(mean_Q |b - b_{tQ}|^r)^{1/r}`` against ``(1 + log t) ||b||_BMO``."""
    if not r > 0:
        raise ValueError("r must be positive")
    tq = _dilated(q, t, b.box)
    btq = cube_values(b, tq).mean()
    lhs = float(np.mean(np.abs(cube_values(b, q) - btq) ** r) ** (1.0 / r))
    return Comparison(lhs, (1.0 + math.log(t)) * bmo_norm(b, cubes))


def truncate(b: GridFunction, k: float) -> GridFunction:
    """Clamp samples to ``[-k, k]``."""
    if not k > 0:
        raise ValueError("truncation level must be positive")
    return b.map(lambda s: np.clip(s, -k, k))
