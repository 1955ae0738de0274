"""Kernel size / regularity validation and direct kernel quadrature (n = 1).

A kernel is validated on random *admissible* tuples: the points sit inside
the box, ``max_j |x - y_j|`` is at least one cell (off the diagonal), and the
perturbation of ``x`` or of one ``y_j`` is at most ``tau * max_j |x - y_j|``
with ``tau = 1/2``.  Offsets are drawn log-uniformly so every scale between
the cell width and the box is represented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..grid import GridFunction
from .moduli import Modulus

__all__ = [
    "TAU",
    "Kernel",
    "KernelSamples",
    "KernelCheck",
    "admissible_samples",
    "kernel_size_check",
    "kernel_reg_x_check",
    "kernel_reg_y_check",
    "apply_kernel_operator",
    "hilbert_kernel",
]

TAU = 0.5


@dataclass(frozen=True)
class Kernel:
    """``K(x, y_1, .., y_m)``; ``func`` broadcasts over array arguments."""

    m: int
    func: Callable[..., np.ndarray] = field(repr=False)
    A: float = 1.0
    name: str = "K"

    def __call__(self, x, *ys):
        if len(ys) != self.m:
            raise ValueError(f"kernel takes {self.m} y-arguments")
        return self.func(x, *ys)

    def scaled(self, c: float) -> "Kernel":
        return Kernel(self.m, lambda x, *ys: c * self.func(x, *ys), self.A, f"{c}*{self.name}")


def hilbert_kernel() -> Kernel:
    """``1/(x - y)``: the linear model kernel with size constant 1."""
    return Kernel(1, lambda x, y: 1.0 / (x - y), 1.0, "1/(x-y)")


@dataclass(frozen=True)
class KernelSamples:
    """Base tuples plus one perturbed coordinate (``slot`` 0 is ``x``)."""

    x: np.ndarray
    ys: np.ndarray  # shape (m, count)
    slot: int
    moved: np.ndarray

    @property
    def count(self) -> int:
        return int(self.x.size)


@dataclass(frozen=True)
class KernelCheck:
    max_ratio: float
    evaluated: int
    skipped: int

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "evaluated": self.evaluated, "skipped": self.skipped}


def admissible_samples(
    rng: np.random.Generator,
    count: int,
    m: int,
    halfwidth: float,
    min_sep: float,
    slot: int = 0,
    tau: float = TAU,
) -> KernelSamples:
    """Random admissible tuples; ``slot`` picks the perturbed coordinate."""
    R = halfwidth
    x = rng.uniform(-R, R, count)
    mags = np.exp(rng.uniform(np.log(min_sep), np.log(2 * R), (m, count)))
    ys = x + rng.choice([-1.0, 1.0], (m, count)) * mags
    ys = np.where(np.abs(ys) <= R, ys, x - (ys - x))  # reflect offsets that leave the box
    ys = np.clip(ys, -R, R)
    reach = np.max(np.abs(x - ys), axis=0)
    dmax = tau * reach
    dmag = np.exp(rng.uniform(np.log(1e-3 * np.maximum(dmax, 1e-300)), np.log(np.maximum(dmax, 1e-300))))
    base = x if slot == 0 else ys[slot - 1]
    moved = base + rng.choice([-1.0, 1.0], count) * dmag
    moved = np.where(np.abs(moved) <= R, moved, base - (moved - base))
    return KernelSamples(x, ys, slot, moved)


def _valid(s: KernelSamples, min_sep: float, tau: float) -> np.ndarray:
    reach = np.max(np.abs(s.x - s.ys), axis=0)
    ok = reach >= min_sep * (1 - 1e-12)
    if s.slot == 0:
        ok &= np.abs(s.moved - s.x) <= tau * reach
    else:
        ok &= np.abs(s.moved - s.ys[s.slot - 1]) <= tau * reach
    return ok


def _distance_sum(x, ys) -> np.ndarray:
    return np.sum(np.abs(x - ys), axis=0)


def kernel_size_check(K: Kernel, samples: KernelSamples, min_sep: float = 0.0) -> KernelCheck:
    """``max |K| (sum_j |x - y_j|)^m / A``."""
    ok = _valid(samples, min_sep, np.inf)
    x, ys = samples.x[ok], samples.ys[:, ok]
    if not x.size:
        return KernelCheck(0.0, 0, samples.count)
    r = np.abs(K(x, *ys)) * _distance_sum(x, ys) ** K.m / K.A
    return KernelCheck(float(np.max(r)), int(x.size), int(samples.count - x.size))


def _reg(K: Kernel, omega: Modulus, samples: KernelSamples, min_sep: float, tau: float) -> KernelCheck:
    ok = _valid(samples, min_sep, tau)
    x, ys, moved = samples.x[ok], samples.ys[:, ok], samples.moved[ok]
    if not x.size:
        return KernelCheck(0.0, 0, samples.count)
    S = _distance_sum(x, ys)
    if samples.slot == 0:
        diff = K(x, *ys) - K(moved, *ys)
        step = np.abs(moved - x)
    else:
        ys2 = ys.copy()
        ys2[samples.slot - 1] = moved
        diff = K(x, *ys) - K(x, *ys2)
        step = np.abs(moved - ys[samples.slot - 1])
    w = omega(step / S)
    num = np.abs(diff) * S**K.m
    live = w > 0
    skipped = int(samples.count - x.size + np.count_nonzero(~live & (num == 0)))
    if np.any(~live & (num > 0)):
        return KernelCheck(float("inf"), int(x.size), skipped)
    r = num[live] / (K.A * w[live])
    return KernelCheck(float(np.max(r)) if r.size else 0.0, int(live.sum()), skipped)


def kernel_reg_x_check(
    K: Kernel, omega: Modulus, samples: KernelSamples, min_sep: float = 0.0, tau: float = TAU
) -> KernelCheck:
    """``max |K(x,y) - K(x',y)| S^m / (A w(|x-x'|/S))`` with ``S = sum_j |x - y_j|``."""
    if samples.slot != 0:
        raise ValueError("x-regularity needs samples perturbing x (slot 0)")
    return _reg(K, omega, samples, min_sep, tau)


def kernel_reg_y_check(
    K: Kernel, omega: Modulus, j: int, samples: KernelSamples, min_sep: float = 0.0, tau: float = TAU
) -> KernelCheck:
    """Regularity in ``y_j`` (1-based)."""
    if samples.slot != j:
        raise ValueError(f"samples perturb slot {samples.slot}, not {j}")
    return _reg(K, omega, samples, min_sep, tau)


def apply_kernel_operator(
    K: Kernel,
    fs: Sequence[GridFunction],
    exclusion: int = 1,
    points: Sequence[int] | None = None,
):
    """Midpoint quadrature of ``int K(x, y) prod f_j(y_j) dy``.

    Cells whose indices are all within ``exclusion`` of the output index are
    skipped.  With ``points`` the values at those grid indices are returned as
    an array; otherwise the whole grid function is built.
    """
    if len(fs) != K.m:
        raise ValueError("need one function per kernel slot")
    f0 = fs[0]
    if f0.box.dim != 1:
        raise ValueError("kernel quadrature is implemented for n = 1")
    c = f0.box.centers(f0.levels)
    n = c.size
    m = K.m
    shape = lambda ax: tuple(n if k == ax else 1 for k in range(m))  # noqa: E731
    ys = [c.reshape(shape(k)) for k in range(m)]
    prod = np.ones((1,) * m)
    for k, f in enumerate(fs):
        prod = prod * f.samples.reshape(shape(k))
    idx = [np.arange(n).reshape(shape(k)) for k in range(m)]
    weight = f0.cell_measure**m
    pts = range(n) if points is None else points
    out = []
    for p in pts:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = K(c[p], *ys) * prod
        near = np.ones((1,) * m, dtype=bool)
        for ix in idx:
            near = near & (np.abs(ix - p) < exclusion)
        out.append(float(np.sum(np.where(near, 0.0, vals)) * weight))
    if points is None:
        return f0.with_samples(np.array(out))
    return np.array(out)
