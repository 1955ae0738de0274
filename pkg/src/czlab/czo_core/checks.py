"""Numerical sides of the weighted inequalities for iterated commutators.

Each check evaluates both sides of one inequality for a single input tuple.
Constants are never asserted here; the harness fits them over families and
tests how they behave under refinement.  Checks that sweep weights accept
the commutator output as ``value`` so it is computed once per input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..grid import CubeFamily, GridFunction, default_family
from ..maximal import m_delta, m_loglog_multi, sharp_maximal_delta
from ..numerics import Comparison
from ..orlicz_bmo import bmo_norm, phi_iter
from ..varlex import VarExponent, reciprocal_sum, varlex_norm
from .operators import CommutatorSubset, MultilinearOperator, commutator_pi, proper_subsets

__all__ = [
    "SharpEstimate",
    "sharp_estimate_check",
    "commutator_maximal_strong_check",
    "commutator_maximal_weak_check",
    "phi_weak_sup",
    "thm_strong_check",
    "thm_weak_check",
    "thm_varlex_check",
]


@dataclass(frozen=True)
class SharpEstimate:
    """Pointwise sides of the sharp-function estimate."""

    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(self.lhs == 0, 0.0, self.lhs / self.rhs)
        return r

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    def pass_fraction(self, C: float) -> float:
        return float(np.mean(self.lhs <= C * self.rhs))


def sharp_estimate_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    delta: float,
    eps: float,
    cubes: CubeFamily | None = None,
) -> SharpEstimate:
    """``M^#_delta(T_Pi(f))`` against the bundle
    ``prod ||b|| (M_LlogL(f) + M_eps(T f)) + sum_sigma prod_{sigma} ||b|| M_eps(T_Pi[sigma'](f))``.
    """
    m = T.arity
    if not (0 < delta < eps and delta < 1.0 / m):
        raise ValueError("need 0 < delta < eps and delta < 1/m")
    cubes = cubes or default_family(fs[0])
    norms = [bmo_norm(b, cubes) for b in bs]
    lhs = sharp_maximal_delta(commutator_pi(T, bs).apply(fs), delta, cubes)
    full = float(np.prod(norms))
    rhs = (m_loglog_multi(fs, cubes) + m_delta(T.apply(fs), eps, cubes)).scale(full)
    for sigma in proper_subsets(m):
        rest = CommutatorSubset(sigma.complement(m))
        coef = float(np.prod([norms[i - 1] for i in sigma.indices]))
        rhs = rhs + m_delta(commutator_pi(T, bs, rest).apply(fs), eps, cubes).scale(coef)
    return SharpEstimate(lhs.samples.reshape(-1), rhs.samples.reshape(-1))


def commutator_maximal_strong_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    p: float,
    w: GridFunction,
    cubes: CubeFamily | None = None,
    value: GridFunction | None = None,
    maximal: GridFunction | None = None,
) -> Comparison:
    """``int |T_Pi f|^p w`` against ``(prod ||b_j||)^p int (M_LlogL f)^p w``."""
    cubes = cubes or default_family(fs[0])
    g = value if value is not None else commutator_pi(T, bs).apply(fs)
    lhs = abs(g).power(p).integral(w)
    coef = float(np.prod([bmo_norm(b, cubes) for b in bs])) ** p
    mf = maximal if maximal is not None else m_loglog_multi(fs, cubes)
    rhs = coef * mf.power(p).integral(w)
    return Comparison(lhs, rhs, skipped=rhs == 0 and lhs == 0)


def phi_weak_sup(values: np.ndarray, masses: np.ndarray, m: int) -> float:
    """``sup_t w({|g| > t^m}) / Phi^(m)(1/t)`` computed exactly from samples.

    ``1/Phi^(m)(1/t)`` increases with ``t`` while the level set shrinks, so
    the supremum is the left limit at some ``t = |g_k|^{1/m}``.
    """
    a = np.abs(np.asarray(values, dtype=np.float64)).reshape(-1)
    mu = np.asarray(masses, dtype=np.float64).reshape(-1)
    keep = a > 0
    a, mu = a[keep], mu[keep]
    if a.size == 0:
        return 0.0
    order = np.argsort(-a, kind="stable")
    a, mu = a[order], mu[order]
    cum = np.cumsum(mu)
    last = np.r_[a[1:] != a[:-1], True]
    a, cum = a[last], cum[last]
    t = a ** (1.0 / m)
    return float(np.max(cum / phi_iter(m, 1.0 / t)))


def commutator_maximal_weak_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    w: GridFunction,
    cubes: CubeFamily | None = None,
    value: GridFunction | None = None,
    maximal: GridFunction | None = None,
) -> Comparison:
    """Weak form: ``phi_weak_sup`` of ``T_Pi f`` against that of ``M_LlogL f``."""
    cubes = cubes or default_family(fs[0])
    m = T.arity
    masses = w.samples * w.cell_measure
    g = value if value is not None else commutator_pi(T, bs).apply(fs)
    lhs = phi_weak_sup(g.samples, masses, m)
    mf = maximal if maximal is not None else m_loglog_multi(fs, cubes)
    rhs = phi_weak_sup(mf.samples, masses, m)
    return Comparison(lhs, rhs, skipped=rhs == 0 and lhs == 0)


def _nu(ws: Sequence[GridFunction], ps: Sequence[float]) -> tuple[GridFunction, float]:
    p = 1.0 / sum(1.0 / pj for pj in ps)
    nu = ws[0].power(p / ps[0])
    for w, pj in zip(ws[1:], ps[1:]):
        nu = nu * w.power(p / pj)
    return nu, p


def thm_strong_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    ps: Sequence[float],
    ws: Sequence[GridFunction],
    cubes: CubeFamily | None = None,
    value: GridFunction | None = None,
) -> Comparison:
    """``||T_Pi f||_{L^p(nu)}`` against ``prod ||b_j|| prod ||f_j||_{L^{p_j}(w_j)}``."""
    cubes = cubes or default_family(fs[0])
    nu, p = _nu(ws, ps)
    g = value if value is not None else commutator_pi(T, bs).apply(fs)
    lhs = abs(g).power(p).integral(nu) ** (1.0 / p)
    rhs = float(np.prod([bmo_norm(b, cubes) for b in bs]))
    for f, w, pj in zip(fs, ws, ps):
        rhs *= abs(f).power(pj).integral(w) ** (1.0 / pj)
    return Comparison(lhs, rhs, skipped=rhs == 0 and lhs == 0)


def thm_weak_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    ws: Sequence[GridFunction],
    lam: float,
    value: GridFunction | None = None,
) -> Comparison:
    """``nu({|T_Pi f| > lam^m})`` against ``prod (int Phi^(m)(|f_j|/lam) w_j)^{1/m}``.

    Here every ``p_j = 1`` so ``nu = prod w_j^{1/m}``.
    """
    m = T.arity
    if not lam > 0:
        raise ValueError("lambda must be positive")
    nu, _ = _nu(ws, [1.0] * m)
    g = value if value is not None else commutator_pi(T, bs).apply(fs)
    lhs = float(np.sum(nu.samples[np.abs(g.samples) > lam**m]) * nu.cell_measure)
    rhs = 1.0
    for f, w in zip(fs, ws):
        rhs *= f.with_samples(phi_iter(m, np.abs(f.samples) / lam)).integral(w) ** (1.0 / m)
    return Comparison(lhs, rhs, skipped=rhs == 0 and lhs == 0)


def thm_varlex_check(
    T: MultilinearOperator,
    bs: Sequence[GridFunction],
    fs: Sequence[GridFunction],
    ps: Sequence[VarExponent],
    vs: Sequence[GridFunction],
    p: VarExponent | None = None,
    value: GridFunction | None = None,
) -> Comparison:
    """``||T_Pi f||_{L^{p(.)}_v}`` against ``prod ||f_j||_{L^{p_j(.)}_{v_j}}`` with ``v = prod v_j``."""
    p = p or reciprocal_sum(ps)
    v = vs[0]
    for vj in vs[1:]:
        v = v * vj
    g = value if value is not None else commutator_pi(T, bs).apply(fs)
    lhs = varlex_norm(g * v, p)
    rhs = float(np.prod([varlex_norm(f * vj, pj) for f, vj, pj in zip(fs, vs, ps)]))
    return Comparison(lhs, rhs, skipped=rhs == 0 and lhs == 0)
