"""Small numerical kernels shared across modules.

* :func:`bisect_decreasing` solves ``modular(lam) = 1`` for many independent
  Luxemburg-type problems at once by geometric bisection.
* :func:`classify_refinement` turns a sequence of constants computed at
  successive grid levels into a stable / divergent verdict.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "bisect_decreasing",
    "Refinement",
    "classify_refinement",
    "drifts",
    "DRIFT_TOL",
    "GROWTH_RATIO",
    "INCREMENT_RATIO",
    "Comparison",
]

DRIFT_TOL = 0.25
GROWTH_RATIO = 10.0
INCREMENT_RATIO = 0.9


def bisect_decreasing(
    modular: Callable[[np.ndarray], np.ndarray],
    lo,
    hi,
    rtol: float = 1e-8,
    max_iter: int = 400,
) -> np.ndarray:
    """Smallest ``lam`` with ``modular(lam) <= 1`` for a decreasing modular.

    ``lo`` and ``hi`` bracket the root elementwise (``modular(lo) >= 1 >=
    modular(hi)``).  Bisection is geometric so the bracket ratio, not its
    width, shrinks to ``1 + rtol``.  The upper end is returned; it always
    satisfies the constraint.
    """
    lo = np.array(lo, dtype=np.float64, copy=True)
    hi = np.array(hi, dtype=np.float64, copy=True)
    for _ in range(max_iter):
        active = hi > lo * (1.0 + rtol)
        if not active.any():
            break
        mid = np.where(active, np.sqrt(lo * hi), hi)
        above = modular(mid) > 1.0
        lo = np.where(active & above, mid, lo)
        hi = np.where(active & ~above, mid, hi)
    return hi


def drifts(values: Sequence[float]) -> list[float]:
    """Relative change between consecutive entries (0 when both vanish)."""
    out = []
    for a, b in zip(values[:-1], values[1:]):
        if a == 0 and b == 0:
            out.append(0.0)
        elif a == 0:
            out.append(float("inf"))
        else:
            out.append(abs(b / a - 1.0))
    return out


@dataclass(frozen=True)
class Refinement:
    levels: tuple[int, ...]
    values: tuple[float, ...]
    drifts: tuple[float, ...]
    stable: bool
    divergent: bool

    @property
    def member(self) -> bool:
        """Finite constant: not divergent and settled at the finest step."""
        return (not self.divergent) and (not self.drifts or self.drifts[-1] <= DRIFT_TOL)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["member"] = self.member
        return d


def classify_refinement(
    levels: Sequence[int],
    values: Sequence[float],
    drift_tol: float = DRIFT_TOL,
    growth_ratio: float = GROWTH_RATIO,
    increment_ratio: float = INCREMENT_RATIO,
) -> Refinement:
    """Classify constants computed on successively finer grids.

    ``stable``: every consecutive drift is at most ``drift_tol``.

    ``divergent``: the sequence is monotone increasing and either grows by
    more than ``growth_ratio`` overall or its increments do not decay (the
    last increment is at least ``increment_ratio`` times the first).
    Power-law and logarithmic blow-up both trip the second clause;
    convergent discretisations have geometrically shrinking increments.
    """
    vals = [float(v) for v in values]
    d = drifts(vals)
    stable = all(x <= drift_tol for x in d)
    divergent = False
    if len(vals) >= 3 and all(np.isfinite(vals)):
        inc = np.diff(vals)
        scale = max(abs(vals[0]), 1e-300)
        monotone = bool(np.all(inc >= -1e-12 * scale))
        if monotone:
            grew = vals[0] > 0 and vals[-1] / vals[0] > growth_ratio
            nondecaying = inc[0] > 1e-9 * scale and inc[-1] >= increment_ratio * inc[0]
            divergent = bool(grew or nondecaying)
    elif not all(np.isfinite(vals)):
        divergent = True
    return Refinement(tuple(int(l) for l in levels), tuple(vals), tuple(d), stable, divergent)


@dataclass(frozen=True)
class Comparison:
    """Both sides of an inequality ``lhs <= C * rhs`` evaluated numerically."""

    lhs: float
    rhs: float
    skipped: bool = False

    @property
    def ratio(self) -> float:
        if self.lhs == 0:
            return 0.0
        if self.rhs == 0:
            return float("inf")
        return self.lhs / self.rhs

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "skipped": self.skipped}
