"""Muckenhoupt and multiple-weight constants on a cube family.

On a bounded box every positive continuous weight has a finite constant, so
class membership is decided by refinement: the constant is recomputed on
grids of increasing level (with the family refined alongside) and the
sequence is classified by :func:`~czlab.numerics.classify_refinement`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import Box, CubeFamily, GridFunction, default_family, masked_mean, masked_min
from .maximal import hl_maximal
from .numerics import Refinement, classify_refinement

__all__ = [
    "Weight",
    "WeightVector",
    "power_weight",
    "ap_constant",
    "a1_constant",
    "multi_ap_constant",
    "refine_constant",
    "ComponentwiseReport",
    "componentwise_weight_check",
    "a_infinity_certificate",
    "A_INF_EXPONENT",
    "DEFAULT_LEVELS",
]

A_INF_EXPONENT = 4.0
DEFAULT_LEVELS = (4, 5, 6, 7, 8, 9, 10)


def _samples(w) -> GridFunction:
    return w.samples if isinstance(w, Weight) else w


@dataclass(frozen=True)
class Weight:
    samples: GridFunction

    def __post_init__(self):
        if not np.all(self.samples.samples > 0):
            raise ValueError("weights must be strictly positive")

    def power(self, s: float) -> "Weight":
        return Weight(self.samples.power(s))


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[Weight, ...]
    exponents: tuple[float, ...]
    nu: Weight = field(init=False, repr=False)

    def __post_init__(self):
        ws = tuple(w if isinstance(w, Weight) else Weight(w) for w in self.weights)
        ps = tuple(float(p) for p in self.exponents)
        if len(ws) != len(ps) or not ws:
            raise ValueError("need one exponent per weight")
        if any(not 1 <= p < np.inf for p in ps):
            raise ValueError("exponents must lie in [1, inf)")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "exponents", ps)
        p = self.p
        nu = ws[0].samples.power(p / ps[0])
        for w, pj in zip(ws[1:], ps[1:]):
            nu = nu * w.samples.power(p / pj)
        object.__setattr__(self, "nu", Weight(nu))

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def p(self) -> float:
        return 1.0 / sum(1.0 / pj for pj in self.exponents)


def power_weight(a: float, box: Box, levels: int) -> Weight:
    """``|x|^a`` sampled at cell centres.

    Cell centres sit at least half a cell from the origin, which is where
    the singular value is clamped.
    """
    h = box.cell_width(levels)

    def func(*xs):
        r = np.sqrt(sum(x * x for x in xs))
        return np.maximum(r, 0.5 * h) ** a

    return Weight(GridFunction.from_function(box, levels, func))


def _conj(p: float) -> float:
    return np.inf if p == 1 else p / (p - 1.0)


def ap_constant(w, p: float, cubes: CubeFamily | None = None) -> float:
    """``sup_Q (mean_Q w)(mean_Q w^{1-p'})^{p-1}``."""
    if not p > 1:
        raise ValueError("A_p needs p > 1; use a1_constant for p = 1")
    ws = _samples(w)
    if not np.all(ws.samples > 0):
        raise ValueError("weights must be strictly positive")
    cubes = cubes or default_family(ws)
    dual = ws.power(1.0 - _conj(p))

    def stat(mask, x, y):
        return masked_mean(x, mask) * masked_mean(y, mask) ** (p - 1.0)

    return cubes.max(cubes.stats(stat, ws, dual))


def a1_constant(w, cubes: CubeFamily | None = None) -> float:
    """``max_x M w(x) / w(x)``."""
    ws = _samples(w)
    if not np.all(ws.samples > 0):
        raise ValueError("weights must be strictly positive")
    return float(np.max(hl_maximal(ws, cubes).samples / ws.samples))


def multi_ap_constant(wv: WeightVector, cubes: CubeFamily | None = None) -> float:
    """``sup_Q (mean_Q nu)^{1/p} prod_j (mean_Q w_j^{1-p_j'})^{1/p_j'}``.

    A slot with ``p_j = 1`` contributes ``(min_Q w_j)^{-1}``.
    """
    cubes = cubes or default_family(wv.nu.samples)
    p = wv.p
    arrays = [wv.nu.samples]
    for w, pj in zip(wv.weights, wv.exponents):
        arrays.append(w.samples if pj == 1 else w.samples.power(1.0 - _conj(pj)))

    def stat(mask, nu, *duals):
        out = masked_mean(nu, mask) ** (1.0 / p)
        for x, pj in zip(duals, wv.exponents):
            if pj == 1:
                out = out / masked_min(x, mask)
            else:
                pc = _conj(pj)
                out = out * masked_mean(x, mask) ** (1.0 / pc)
        return out

    return cubes.max(cubes.stats(stat, *arrays))


def refine_constant(
    constant: Callable[[int], float], levels: Sequence[int] = DEFAULT_LEVELS
) -> Refinement:
    """Evaluate ``constant(level)`` on each level and classify the sequence."""
    return classify_refinement(levels, [constant(L) for L in levels])


def a_infinity_certificate(
    factory: Callable[[int], Weight], levels: Sequence[int] = DEFAULT_LEVELS
) -> Refinement:
    """Membership proxy for ``A_inf``: the ``A_4`` constant settles under refinement."""
    return refine_constant(lambda L: ap_constant(factory(L), A_INF_EXPONENT), levels)


@dataclass(frozen=True)
class ComponentwiseReport:
    multilinear: Refinement
    components: tuple[Refinement, ...]
    labels: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        """Joint membership agrees with membership of every component."""
        return self.multilinear.member == all(c.member for c in self.components)

    def to_dict(self) -> dict:
        return {
            "multilinear": self.multilinear.to_dict(),
            "components": {k: c.to_dict() for k, c in zip(self.labels, self.components)},
            "consistent": self.consistent,
        }


def _components(wv: WeightVector) -> list[tuple[str, Callable[[], float]]]:
    m, p = wv.m, wv.p
    out = []
    for j, (w, pj) in enumerate(zip(wv.weights, wv.exponents), start=1):
        if pj == 1:
            out.append((f"w{j}^(1/m) in A_1", lambda w=w: a1_constant(w.power(1.0 / m))))
        else:
            pc = _conj(pj)
            out.append(
                (f"w{j}^(1-p{j}') in A_(m p{j}')", lambda w=w, pc=pc: ap_constant(w.power(1.0 - pc), m * pc))
            )
    if m * p > 1:
        out.append(("nu in A_(m p)", lambda: ap_constant(wv.nu, m * p)))
    else:
        out.append(("nu in A_1", lambda: a1_constant(wv.nu)))
    return out


def componentwise_weight_check(
    factory: Callable[[int], WeightVector], levels: Sequence[int] = DEFAULT_LEVELS
) -> ComponentwiseReport:
    """Compare joint ``A_P`` membership with the componentwise characterisation.

    ``factory(L)`` builds the weight vector on a grid of level ``L``; every
    constant is computed on the default family of that grid.
    """
    multi, comps, labels = [], None, None
    for L in levels:
        wv = factory(L)
        multi.append(multi_ap_constant(wv))
        parts = _components(wv)
        if comps is None:
            comps = [[] for _ in parts]
            labels = tuple(k for k, _ in parts)
        for acc, (_, fn) in zip(comps, parts):
            acc.append(fn())
    return ComponentwiseReport(
        classify_refinement(levels, multi),
        tuple(classify_refinement(levels, c) for c in comps),
        labels,
    )
