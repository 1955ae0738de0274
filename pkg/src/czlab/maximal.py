"""Dyadic-family maximal operators and the classical inequalities built on them.

All suprema run over a :class:`~czlab.grid.CubeFamily`.  Per-cube statistics
are computed once per input and combined per cube, so the multilinear
operators cost little more than their linear pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import (
    Cube,
    CubeFamily,
    DyadicCube,
    GridFunction,
    GridMismatchError,
    default_family,
    masked_mean,
)
from .numerics import Comparison
from .orlicz_bmo import _oscillation, cube_values, orlicz_cube_stats

__all__ = [
    "MaximalConfig",
    "hl_maximal",
    "m_delta",
    "sharp_maximal",
    "sharp_maximal_delta",
    "multilinear_m",
    "multilinear_m_r",
    "m_i_loglog",
    "m_loglog_multi",
    "mean_stats",
    "weak_lq_norm",
    "weak_sup",
    "KolmogorovResult",
    "kolmogorov_check",
    "fefferman_stein_check",
    "fs_weak_check",
]


@dataclass(frozen=True)
class MaximalConfig:
    cubes: CubeFamily
    delta: float = 0.25
    r: float = 2.0

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise ValueError("delta must lie in (0, 1]")
        if not self.r > 1:
            raise ValueError("r must exceed 1")


def _family(f: GridFunction, cubes: CubeFamily | None) -> CubeFamily:
    return cubes if cubes is not None else default_family(f)


def _abs_mean(mask, x):
    return masked_mean(np.abs(x), mask)


def mean_stats(f: GridFunction, cubes: CubeFamily, r: float = 1.0) -> list[np.ndarray]:
    """Per-cube ``(mean_Q |f|^r)^{1/r}``."""
    if r == 1.0:
        return cubes.stats(_abs_mean, f)
    return [s ** (1.0 / r) for s in cubes.stats(lambda m, x: masked_mean(np.abs(x) ** r, m), f)]


def _sup(f: GridFunction, cubes: CubeFamily, per_cube) -> GridFunction:
    return f.with_samples(cubes.sup(per_cube, f.levels))


def _check_tuple(fs: Sequence[GridFunction]) -> None:
    if not fs:
        raise ValueError("at least one function is required")
    for g in fs[1:]:
        if g.box != fs[0].box or g.levels != fs[0].levels:
            raise GridMismatchError("all inputs must share box and level")


def _product(stats: Sequence[list[np.ndarray]]) -> list[np.ndarray]:
    out = [np.array(s, copy=True) for s in stats[0]]
    for other in stats[1:]:
        for k, s in enumerate(other):
            out[k] = out[k] * s
    return out


# ---------------------------------------------------------------------------
# linear operators


def hl_maximal(f: GridFunction, cubes: CubeFamily | None = None) -> GridFunction:
    """Hardy-Littlewood maximal function ``M f``."""
    cubes = _family(f, cubes)
    return _sup(f, cubes, mean_stats(f, cubes))


def m_delta(f: GridFunction, delta: float, cubes: CubeFamily | None = None) -> GridFunction:
    """``M_delta f = M(|f|^delta)^{1/delta}``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta == 1:
        return hl_maximal(f, cubes)
    return hl_maximal(abs(f).power(delta), cubes).power(1.0 / delta)


def sharp_maximal(f: GridFunction, cubes: CubeFamily | None = None) -> GridFunction:
    """``M^# f`` with the oscillation measured about the cube average."""
    cubes = _family(f, cubes)
    return _sup(f, cubes, cubes.stats(_oscillation, f))


def sharp_maximal_delta(f: GridFunction, delta: float, cubes: CubeFamily | None = None) -> GridFunction:
    """``M^#_delta f = M^#(|f|^delta)^{1/delta}``."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    return sharp_maximal(abs(f).power(delta), cubes).power(1.0 / delta)


# ---------------------------------------------------------------------------
# multilinear operators


def multilinear_m(fs: Sequence[GridFunction], cubes: CubeFamily | None = None) -> GridFunction:
    """``sup_Q prod_j mean_Q |f_j|``."""
    _check_tuple(fs)
    cubes = _family(fs[0], cubes)
    return _sup(fs[0], cubes, _product([mean_stats(f, cubes) for f in fs]))


def multilinear_m_r(fs: Sequence[GridFunction], r: float, cubes: CubeFamily | None = None) -> GridFunction:
    """``sup_Q prod_j (mean_Q |f_j|^r)^{1/r}``."""
    if not r > 1:
        raise ValueError("r must exceed 1")
    _check_tuple(fs)
    cubes = _family(fs[0], cubes)
    return _sup(fs[0], cubes, _product([mean_stats(f, cubes, r) for f in fs]))


def m_i_loglog(fs: Sequence[GridFunction], i: int, cubes: CubeFamily | None = None) -> GridFunction:
    """L log L average in slot ``i`` (1-based), plain averages elsewhere."""
    _check_tuple(fs)
    if not 1 <= i <= len(fs):
        raise ValueError(f"slot {i} outside 1..{len(fs)}")
    cubes = _family(fs[0], cubes)
    stats = [
        orlicz_cube_stats(f, cubes) if k == i - 1 else mean_stats(f, cubes)
        for k, f in enumerate(fs)
    ]
    return _sup(fs[0], cubes, _product(stats))


def m_loglog_multi(fs: Sequence[GridFunction], cubes: CubeFamily | None = None) -> GridFunction:
    """``sup_Q prod_j ||f_j||_{L log L, Q}``."""
    _check_tuple(fs)
    cubes = _family(fs[0], cubes)
    return _sup(fs[0], cubes, _product([orlicz_cube_stats(f, cubes) for f in fs]))


# ---------------------------------------------------------------------------
# weak-type quantities


def weak_sup(values: np.ndarray, masses: np.ndarray, q: float = 1.0, p: float = 1.0) -> float:
    """``sup_lam lam^p * mu({|v| > lam})^{1/q}`` for a discrete measure.

    The distribution function jumps only at sample magnitudes, so the
    supremum is the limit from below at one of them.
    """
    a = np.abs(np.asarray(values, dtype=np.float64)).reshape(-1)
    mu = np.asarray(masses, dtype=np.float64).reshape(-1)
    if a.size == 0:
        return 0.0
    order = np.argsort(-a, kind="stable")
    a, mu = a[order], mu[order]
    cum = np.cumsum(mu)
    # group ties: the measure of {|v| >= a_k} is the cumulative mass at the last tie
    last = np.r_[a[1:] != a[:-1], True]
    a, cum = a[last], cum[last]
    return float(np.max(a**p * cum ** (1.0 / q)))


def weak_lq_norm(f: GridFunction, q_cube: DyadicCube | Cube | None, q: float) -> float:
    """``||f||_{L^{q,inf}(Q)}``; ``q_cube=None`` means the whole box."""
    if not q > 0:
        raise ValueError("q must be positive")
    vals = f.samples.reshape(-1) if q_cube is None else cube_values(f, q_cube)
    return weak_sup(vals, np.full(vals.shape, f.cell_measure), q)


@dataclass(frozen=True)
class KolmogorovResult:
    lhs: float
    rhs: float
    constant: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.constant * self.rhs * (1.0 + 1e-12)


def kolmogorov_check(
    f: GridFunction, q_cube: DyadicCube | Cube | None, p: float, q: float
) -> KolmogorovResult:
    """``|Q|^{-1/p}||f||_{L^p(Q)}`` against ``|Q|^{-1/q}||f||_{L^{q,inf}(Q)}``."""
    if not 0 < p < q:
        raise ValueError(f"need 0 < p < q, got p={p}, q={q}")
    vals = f.samples.reshape(-1) if q_cube is None else cube_values(f, q_cube)
    measure = vals.size * f.cell_measure
    lhs = float(np.mean(np.abs(vals) ** p) ** (1.0 / p))
    rhs = measure ** (-1.0 / q) * weak_sup(vals, np.full(vals.shape, f.cell_measure), q)
    return KolmogorovResult(lhs, float(rhs), (q / (q - p)) ** (1.0 / p))


def fefferman_stein_check(
    f: GridFunction, delta: float, p: float, w: GridFunction, cubes: CubeFamily | None = None
) -> Comparison:
    """``int (M_delta f)^p w`` against ``int (M^#_delta f)^p w``."""
    lhs = m_delta(f, delta, cubes).power(p).integral(w)
    rhs = sharp_maximal_delta(f, delta, cubes).power(p).integral(w)
    # constants have no oscillation; the boxed inequality is vacuous there
    return Comparison(lhs, rhs, skipped=rhs == 0)


def fs_weak_check(
    f: GridFunction, delta: float, p: float, w: GridFunction, cubes: CubeFamily | None = None
) -> Comparison:
    """Weak form with ``phi(lam) = lam^p``: suprema of ``lam^p w({. > lam})``."""
    masses = w.samples * f.cell_measure
    lhs = weak_sup(m_delta(f, delta, cubes).samples, masses, 1.0, p)
    rhs = weak_sup(sharp_maximal_delta(f, delta, cubes).samples, masses, 1.0, p)
    return Comparison(lhs, rhs, skipped=rhs == 0)
