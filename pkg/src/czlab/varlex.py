"""Variable-exponent Lebesgue norms and the weight class ``A_{p(.)}``.

The Luxemburg modular ``rho(lam) = int (|f|/lam)^{p(x)} dx`` is strictly
decreasing where positive.  With ``S = rho(1)`` the root is bracketed by
``[S^{1/p+}, S^{1/p-}]`` when ``S >= 1`` and by ``[S^{1/p-}, S^{1/p+}]``
otherwise, so bisection needs no search for a bracket; for a constant
exponent the bracket collapses to the exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .grid import Box, CubeFamily, GridFunction, GridMismatchError, default_family, masked_max, masked_min
from .numerics import Comparison, Refinement, bisect_decreasing, classify_refinement

__all__ = [
    "VarExponent",
    "varlex_norm",
    "weighted_norm",
    "conjugate",
    "LogHolder",
    "log_holder_check",
    "log_holder_refinement",
    "homogeneity_check",
    "gen_holder_check",
    "gen_holder_m_check",
    "monotone_convergence_check",
    "var_ap_constant",
    "ProductWeightReport",
    "product_weight_constant",
    "product_weight_check",
    "reciprocal_sum",
]

VARLEX_RTOL = 1e-10


@dataclass(frozen=True)
class VarExponent:
    """Exponent samples ``p(x)`` with the asymptotic value ``p_inf``."""

    samples: GridFunction
    p_inf: float | None = None

    def __post_init__(self):
        s = self.samples.samples
        if not (np.all(s > 0) and np.all(np.isfinite(s))):
            raise ValueError("exponents must be positive and finite")

    @classmethod
    def constant(cls, box: Box, levels: int, p0: float) -> "VarExponent":
        return cls(GridFunction.constant(box, levels, p0), float(p0))

    @classmethod
    def from_function(cls, box: Box, levels: int, func: Callable, p_inf: float | None = None):
        return cls(GridFunction.from_function(box, levels, func), p_inf)

    @property
    def p_minus(self) -> float:
        return float(self.samples.samples.min())

    @property
    def p_plus(self) -> float:
        return float(self.samples.samples.max())

    @property
    def tag(self) -> str:
        """``"P"`` when ``p- > 1``, otherwise ``"P0"``."""
        return "P" if self.p_minus > 1 else "P0"

    def scale(self, s: float) -> "VarExponent":
        return VarExponent(self.samples.scale(s), None if self.p_inf is None else s * self.p_inf)


def reciprocal_sum(exponents: Sequence[VarExponent]) -> VarExponent:
    """The exponent ``q`` with ``1/q = sum_j 1/q_j``."""
    inv = sum(1.0 / e.samples.samples for e in exponents)
    p_inf = None
    if all(e.p_inf is not None for e in exponents):
        p_inf = 1.0 / sum(1.0 / e.p_inf for e in exponents)
    return VarExponent(exponents[0].samples.with_samples(1.0 / inv), p_inf)


def _luxemburg(mask, a, p, cell_measure, rtol):
    """Luxemburg norms of many windows at once (shape ``(ncubes, cells)``)."""
    live = (mask > 0) & (a > 0)
    safe_p = np.where(mask > 0, p, 1.0)
    s = cell_measure * np.where(live, a**safe_p, 0.0).sum(axis=-1)
    pmin = masked_min(safe_p, mask)
    pmax = masked_max(safe_p, mask)
    zero = s <= 0
    s1 = np.where(zero, 1.0, s)
    big = s1 >= 1
    lo = np.where(big, s1 ** (1.0 / pmax), s1 ** (1.0 / pmin))
    hi = np.where(big, s1 ** (1.0 / pmin), s1 ** (1.0 / pmax))

    def modular(lam):
        ratio = a / lam[:, None]
        return cell_measure * np.where(live, ratio**safe_p, 0.0).sum(axis=-1)

    lam = bisect_decreasing(modular, lo, hi, rtol)
    return np.where(zero, 0.0, lam)


def _check(f: GridFunction, p: VarExponent) -> None:
    if f.box != p.samples.box or f.levels != p.samples.levels:
        raise GridMismatchError("function and exponent must share the grid")


def varlex_norm(f: GridFunction, p: VarExponent, tol: float = VARLEX_RTOL) -> float:
    """``inf{lam > 0 : int (|f|/lam)^{p(x)} dx <= 1}``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    _check(f, p)
    a = np.abs(f.samples).reshape(1, -1)
    return float(_luxemburg(np.ones_like(a), a, p.samples.samples.reshape(1, -1), f.cell_measure, tol)[0])


def weighted_norm(f: GridFunction, v: GridFunction, p: VarExponent, tol: float = VARLEX_RTOL) -> float:
    """``||f||_{L^{p(.)}_v} = ||f v||_{p(.)}``."""
    return varlex_norm(f * v, p, tol)


def conjugate(p: VarExponent) -> VarExponent:
    """``p' = p / (p - 1)``; requires ``p- > 1``."""
    if p.p_minus <= 1:
        raise ValueError("the conjugate exponent needs p- > 1")
    s = p.samples.samples
    p_inf = None if p.p_inf is None else (np.inf if p.p_inf == 1 else p.p_inf / (p.p_inf - 1.0))
    return VarExponent(p.samples.with_samples(s / (s - 1.0)), p_inf)


# ---------------------------------------------------------------------------
# log-Hölder regularity


@dataclass(frozen=True)
class LogHolder:
    c0: float
    c_inf: float


def _offsets(dim: int, reach: int):
    rng = range(-reach, reach + 1)
    if dim == 1:
        return [(d,) for d in range(1, reach + 1)]
    return [(i, j) for i in rng for j in rng if (i, j) > (0, 0)]


def log_holder_check(p: VarExponent) -> LogHolder:
    """Grid maxima of the local and decay log-Hölder quotients.

    ``c0 = max |p(x) - p(y)| (-log |x - y|)`` over sample pairs with
    ``|x - y| <= 1/2``; ``c_inf = max |p(x) - p_inf| log(e + |x|)``.
    """
    if p.p_inf is None:
        raise ValueError("p_inf must be supplied by the exponent generator")
    g = p.samples
    s, h, dim = g.samples, g.h, g.box.dim
    reach = int(np.floor(0.5 / h + 1e-12))
    c0 = 0.0
    for d in _offsets(dim, reach):
        dist = h * np.sqrt(sum(k * k for k in d))
        if dist > 0.5 or dist == 0:
            continue
        a = s[tuple(slice(max(k, 0), s.shape[i] + min(k, 0)) for i, k in enumerate(d))]
        b = s[tuple(slice(max(-k, 0), s.shape[i] + min(-k, 0)) for i, k in enumerate(d))]
        if a.size:
            c0 = max(c0, float(np.abs(a - b).max()) * -np.log(dist))
    r = np.sqrt(sum(x * x for x in g.coords()))
    c_inf = float(np.max(np.abs(s - p.p_inf) * np.log(np.e + r)))
    return LogHolder(c0, c_inf)


def log_holder_refinement(
    factory: Callable[[int], VarExponent], levels: Sequence[int]
) -> tuple[Refinement, Refinement, bool]:
    """Refinement classification of ``(c0, c_inf)``; the flag is joint membership."""
    vals = [log_holder_check(factory(L)) for L in levels]
    r0 = classify_refinement(levels, [v.c0 for v in vals])
    ri = classify_refinement(levels, [v.c_inf for v in vals])
    return r0, ri, r0.member and ri.member


# ---------------------------------------------------------------------------
# norm identities and Hölder-type inequalities


def homogeneity_check(f: GridFunction, p: VarExponent, s: float, tol: float = VARLEX_RTOL) -> Comparison:
    """``|| |f|^s ||_{p(.)}`` against ``||f||_{s p(.)}^s`` (an identity)."""
    if not s > 0:
        raise ValueError("s must be positive")
    lhs = varlex_norm(abs(f).power(s), p, tol)
    rhs = varlex_norm(f, p.scale(s), tol) ** s
    return Comparison(lhs, rhs)


def gen_holder_check(
    f: GridFunction, g: GridFunction, p: VarExponent, q: VarExponent, tol: float = VARLEX_RTOL
) -> Comparison:
    """``||f g||_{r(.)}`` against ``||f||_{p(.)} ||g||_{q(.)}`` with ``1/r = 1/p + 1/q``."""
    r = reciprocal_sum([p, q])
    return Comparison(varlex_norm(f * g, r, tol), varlex_norm(f, p, tol) * varlex_norm(g, q, tol))


def gen_holder_m_check(
    fs: Sequence[GridFunction], qs: Sequence[VarExponent], tol: float = VARLEX_RTOL
) -> Comparison:
    """``||prod f_j||_{q(.)}`` against ``prod ||f_j||_{q_j(.)}``."""
    if len(fs) != len(qs) or not fs:
        raise ValueError("need one exponent per function")
    q = reciprocal_sum(qs)
    prod = fs[0]
    for f in fs[1:]:
        prod = prod * f
    rhs = float(np.prod([varlex_norm(f, qj, tol) for f, qj in zip(fs, qs)]))
    return Comparison(varlex_norm(prod, q, tol), rhs)


def monotone_convergence_check(
    f: GridFunction, p: VarExponent, ks: Sequence[float], tol: float = VARLEX_RTOL
) -> dict:
    """Norms of the truncations ``min(|f|, k) sign f`` against the norm of ``f``."""
    norms = [varlex_norm(f.map(lambda s, k=k: np.sign(s) * np.minimum(np.abs(s), k)), p, tol) for k in ks]
    limit = varlex_norm(f, p, tol)
    slack = 1.0 + 10 * tol
    return {
        "ks": [float(k) for k in ks],
        "norms": norms,
        "limit": limit,
        "nondecreasing": all(b >= a / slack for a, b in zip(norms, norms[1:])),
        "bounded": all(n <= limit * slack for n in norms),
        "gap": abs(norms[-1] - limit) / limit if limit else 0.0,
    }


# ---------------------------------------------------------------------------
# A_{p(.)}


def var_ap_constant(
    v, p: VarExponent, cubes: CubeFamily | None = None, tol: float = 1e-8
) -> float:
    """``sup_Q |Q|^{-1} ||v chi_Q||_{p(.)} ||v^{-1} chi_Q||_{p'(.)}`` over the family."""
    vs = v.samples if hasattr(v, "samples") and isinstance(v.samples, GridFunction) else v
    if not np.all(vs.samples > 0):
        raise ValueError("weights must be strictly positive")
    _check(vs, p)
    pc = conjugate(p)
    cubes = cubes or default_family(vs)
    cm = vs.cell_measure
    inv = vs.with_samples(1.0 / vs.samples)

    def stat(mask, w, wi, pp, pq):
        measure = cm * mask.sum(axis=-1)
        return _luxemburg(mask, w, pp, cm, tol) * _luxemburg(mask, wi, pq, cm, tol) / measure

    return cubes.max(cubes.stats(stat, vs, inv, p.samples, pc.samples))


def product_weight_constant(
    vs: Sequence[GridFunction], ps: Sequence[VarExponent], p: VarExponent | None = None
) -> float:
    """``[v^{1/m}]_{A_{m p(.)}}`` for ``v = prod v_j`` and ``1/p = sum 1/p_j``."""
    m = len(vs)
    if m != len(ps) or m == 0:
        raise ValueError("need one exponent per weight")
    derived = reciprocal_sum(ps)
    if p is not None:
        if not np.allclose(p.samples.samples, derived.samples.samples, rtol=1e-10, atol=0):
            raise ValueError("exponents violate 1/p = sum 1/p_j")
    else:
        p = derived
    v = vs[0].samples if not isinstance(vs[0], GridFunction) else vs[0]
    for w in vs[1:]:
        v = v * (w if isinstance(w, GridFunction) else w.samples)
    return var_ap_constant(v.power(1.0 / m), p.scale(m))


@dataclass(frozen=True)
class ProductWeightReport:
    inputs: tuple[Refinement, ...]
    product: Refinement

    @property
    def status(self) -> str:
        """``input-failure`` when some ``v_j`` is not a member, else membership of the product."""
        if not all(r.member for r in self.inputs):
            return "input-failure"
        return "holds" if self.product.member else "violated"

    def to_dict(self) -> dict:
        return {
            "inputs": [r.to_dict() for r in self.inputs],
            "product": self.product.to_dict(),
            "status": self.status,
        }


def product_weight_check(
    factory: Callable[[int], tuple[Sequence[GridFunction], Sequence[VarExponent]]],
    levels: Sequence[int],
) -> ProductWeightReport:
    """Refinement test of ``v_j in A_{p_j(.)}  =>  v^{1/m} in A_{m p(.)}``."""
    ins, prod = None, []
    for L in levels:
        vs, ps = factory(L)
        consts = [var_ap_constant(v, pj) for v, pj in zip(vs, ps)]
        if ins is None:
            ins = [[] for _ in consts]
        for acc, c in zip(ins, consts):
            acc.append(c)
        prod.append(product_weight_constant(vs, ps))
    return ProductWeightReport(
        tuple(classify_refinement(levels, c) for c in ins), classify_refinement(levels, prod)
    )
