"""Experiment registry and runners.

Every experiment sweeps a family of inputs over grid levels, records both
sides of one inequality (or the value of one constant) per configuration,
and asserts the behaviour the corresponding claim predicts: a finite ratio
that settles under refinement, an exact identity, or a classification.

Runners return records; :func:`run` aggregates them into a :class:`Report`.
Records carry ``level``, ``index``, ``group`` and ``ratio`` plus whatever the
check produced.  Aggregates are per level; refinement is judged per group.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from ..czo_core.checks import (
    commutator_maximal_strong_check,
    commutator_maximal_weak_check,
    sharp_estimate_check,
    thm_strong_check,
    thm_varlex_check,
    thm_weak_check,
)
from ..czo_core.kernels import (
    Kernel,
    admissible_samples,
    apply_kernel_operator,
    kernel_reg_x_check,
    kernel_reg_y_check,
    kernel_size_check,
)
from ..czo_core.moduli import Modulus, condensed_series, dini_integral, dyadic_series, log_dini_integral
from ..czo_core.operators import commutator_pi
from ..grid import Box, DyadicCube, GridFunction, default_family
from ..maximal import (
    fefferman_stein_check,
    fs_weak_check,
    hl_maximal,
    kolmogorov_check,
    m_i_loglog,
    m_loglog_multi,
    multilinear_m,
    multilinear_m_r,
)
from ..model_ops import (
    bpdo_operator,
    condition_sup,
    cutoff_symbol,
    fit_kernel_modulus,
    fitted_A0,
    log_modulus_symbol,
    make_molecules,
    paraproduct,
    paraproduct_kernel,
    paraproduct_operator,
    regularity_ratio,
    smooth_symbol,
    symbol_class_check,
    unit_symbol,
)
from ..numerics import Comparison, classify_refinement
from ..orlicz_bmo import bmo_dilate_bound_check, bmo_dilated_oscillation_check, bmo_holder_check, m_loglog
from ..varlex import (
    gen_holder_check,
    gen_holder_m_check,
    homogeneity_check,
    monotone_convergence_check,
    var_ap_constant,
)
from ..varlex import product_weight_check as _product_weight_check
from ..weights import WeightVector, Weight, ap_constant, componentwise_weight_check, power_weight
from .config import ExperimentConfig
from .corpus import corpus_rng, generate_corpus, realize, realize_exponent
from .report import Report

__all__ = ["Experiment", "EXPERIMENTS", "CLAIMS", "run", "default_config", "threads", "build_operator"]

THREADS_ENV = "CZLAB_THREADS"


def threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(fn: Callable, items: Sequence) -> list:
    """Map in a thread pool; results keep the order of ``items``."""
    n = threads()
    if n == 1 or len(items) < 2:
        return [fn(*it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda it: fn(*it), items))


@dataclass
class Context:
    cfg: ExperimentConfig

    @property
    def box(self) -> Box:
        return Box(1, float(self.cfg.halfwidth))

    def corpus(self, kind: str, count: int, salt: int = 0) -> list[dict]:
        return generate_corpus(kind, self.cfg.seed, count, self.cfg.halfwidth, salt)

    def param(self, key: str, default=None):
        return self.cfg.params.get(key, default)


# ---------------------------------------------------------------------------
# helpers


SYMBOLS = {
    "unit": unit_symbol,
    "smooth": smooth_symbol,
    "log-modulus": log_modulus_symbol,
    "cutoff": cutoff_symbol,
}


def build_operator(spec: dict, box: Box):
    """``(label, operator)`` from an operator spec."""
    t = spec.get("type")
    if t == "paraproduct":
        V = int(spec.get("V", 6))
        fam = make_molecules(box, V, spec.get("shapes", ("tent-difference", "tent-difference", "bump")))
        return f"paraproduct(V={V})", paraproduct_operator(fam)
    if t == "bpdo":
        name = spec.get("symbol", "smooth")
        if name not in SYMBOLS:
            raise ValueError(f"unknown symbol {name!r}; expected one of {sorted(SYMBOLS)}")
        return f"bpdo({name})", bpdo_operator(SYMBOLS[name]())
    raise ValueError(f"unknown operator type {t!r}")


def _wlabel(spec: dict) -> str:
    if spec["type"] == "power":
        return f"|x|^{float(spec['a']):g}"
    if spec["type"] == "unit":
        return "1"
    return json.dumps(spec, sort_keys=True)


def _wvlabel(specs: Sequence[dict]) -> str:
    return "(" + ", ".join(_wlabel(s) for s in specs) + ")"


def _record(level: int, index: int, group: str, cmp: Comparison | None = None, **extra) -> dict:
    rec = {"level": int(level), "index": int(index), "group": group}
    if cmp is not None:
        rec.update(lhs=float(cmp.lhs), rhs=float(cmp.rhs), ratio=float(cmp.ratio), skipped=bool(cmp.skipped))
    rec.update(extra)
    rec.setdefault("skipped", False)
    return rec


def _pairs(specs: list[dict], n: int, box: Box, L: int, i: int) -> list[GridFunction]:
    return [realize(specs[2 * i], box, L), realize(specs[2 * i + 1], box, L)]


def _level_items(cfg: ExperimentConfig, n: int) -> list[tuple[int, int]]:
    return [(L, i) for L in cfg.levels for i in range(n)]


def _flatten(parts: list[list[dict]]) -> list[dict]:
    return [r for part in parts for r in part]


def stability_assertions(records: list[dict], levels: Sequence[int], drift: float, prefix: str = "") -> tuple[list, dict]:
    """Per group: max ratio finite at every level and drifting at most ``drift``."""
    groups: dict[str, dict[int, float]] = {}
    for r in records:
        if r.get("skipped") or "ratio" not in r:
            continue
        g = groups.setdefault(r["group"], {})
        g[r["level"]] = max(g.get(r["level"], 0.0), r["ratio"])
    assertions, summary = [], {}
    for name in sorted(groups):
        per = groups[name]
        lv = [L for L in levels if L in per]
        vals = [per[L] for L in lv]
        ref = classify_refinement(lv, vals, drift_tol=drift)
        finite = all(np.isfinite(v) for v in vals)
        summary[name] = {"levels": lv, "max_ratio": vals, "drifts": list(ref.drifts), "stable": ref.stable}
        complete = len(lv) == len(levels)
        assertions.append(
            {
                "name": f"{prefix}{name}: finite, drift <= {drift:g}",
                "passed": bool(finite and ref.stable and complete),
                "detail": {"max_ratio": vals, "drifts": list(ref.drifts)},
            }
        )
    return assertions, summary


def _aggregate(records: list[dict], experiment: str) -> list[dict]:
    levels = sorted({r["level"] for r in records})
    out = []
    for L in levels:
        rs = [r for r in records if r["level"] == L]
        live = [r["ratio"] for r in rs if not r.get("skipped") and "ratio" in r]
        out.append(
            {
                "experiment": experiment,
                "level": L,
                "max_ratio": float(max(live)) if live else 0.0,
                "count": len(rs),
                "skipped": sum(1 for r in rs if r.get("skipped")),
            }
        )
    return out


# ---------------------------------------------------------------------------
# theorem sweeps (strong, weak, variable exponent)


def _operators(ctx: Context):
    return [build_operator(o, ctx.box) for o in ctx.cfg.operators]


def _theorem_inputs(ctx: Context, n: int):
    F = ctx.corpus(ctx.cfg.inputs.get("kind", "step-functions"), 2 * n, salt=1)
    B = ctx.corpus(ctx.cfg.symbols.get("kind", "bmo-bumps"), 2 * n, salt=2)
    return F, B


def run_strong(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F, B = _theorem_inputs(ctx, n)
    ops = _operators(ctx)
    ps = tuple(ctx.param("p", [2.0, 2.0]))

    def unit(L, i):
        fs, bs = _pairs(F, n, box, L, i), _pairs(B, n, box, L, i)
        cubes = default_family(fs[0])
        out = []
        for label, T in ops:
            G = commutator_pi(T, bs).apply(fs)
            for wspec in cfg.weights:
                ws = [realize(s, box, L) for s in wspec]
                c = thm_strong_check(T, bs, fs, ps, ws, cubes, value=G)
                out.append(_record(L, i, f"{label} w={_wvlabel(wspec)}", c))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g}


def run_weak(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F, B = _theorem_inputs(ctx, n)
    ops = _operators(ctx)
    lams = [float(v) for v in ctx.param("lambdas", (2.0 ** -np.arange(0, 11)).tolist())]

    def unit(L, i):
        fs, bs = _pairs(F, n, box, L, i), _pairs(B, n, box, L, i)
        out = []
        for label, T in ops:
            G = commutator_pi(T, bs).apply(fs)
            for wspec in cfg.weights:
                ws = [realize(s, box, L) for s in wspec]
                best, best_lam = None, None
                for lam in lams:
                    c = thm_weak_check(T, bs, fs, ws, lam, value=G)
                    if best is None or c.ratio > best.ratio:
                        best, best_lam = c, lam
                out.append(_record(L, i, f"{label} w={_wvlabel(wspec)}", best, lam=best_lam))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g, "lambdas": lams}


def run_varlex(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F, B = _theorem_inputs(ctx, n)
    P = ctx.corpus(cfg.exponents.get("kind", "exponents"), 2 * n, salt=3)
    ops = _operators(ctx)

    def unit(L, i):
        fs, bs = _pairs(F, n, box, L, i), _pairs(B, n, box, L, i)
        ps = [realize_exponent(P[2 * i], box, L), realize_exponent(P[2 * i + 1], box, L)]
        out = []
        for label, T in ops:
            G = commutator_pi(T, bs).apply(fs)
            for wspec in cfg.weights:
                vs = [realize(s, box, L) for s in wspec]
                c = thm_varlex_check(T, bs, fs, ps, vs, value=G)
                out.append(_record(L, i, f"{label} v={_wvlabel(wspec)}", c))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g}


# ---------------------------------------------------------------------------
# sharp-function estimate and commutator / maximal comparison


def run_sharp(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    n_cal = int(ctx.param("calibration", n // 2))
    delta, eps = float(ctx.param("delta", 0.25)), float(ctx.param("eps", 0.4))
    factor = float(ctx.param("factor", 2.0))
    required = float(ctx.param("pass_fraction", 0.99))
    F, B = _theorem_inputs(ctx, n)
    ops = _operators(ctx)

    def unit(L, i):
        fs, bs = _pairs(F, n, box, L, i), _pairs(B, n, box, L, i)
        cubes = default_family(fs[0])
        return [(label, sharp_estimate_check(T, bs, fs, delta, eps, cubes)) for label, T in ops]

    items = _level_items(cfg, n)
    results = _pmap(unit, items)
    records, assertions, fitted = [], [], {}
    for L in cfg.levels:
        for label, _ in ops:
            ests = [(i, est) for (LL, i), res in zip(items, results) if LL == L for lab, est in res if lab == label]
            cal = [e.max_ratio for i, e in ests if i < n_cal]
            C = max(cal) if cal else 0.0
            fitted[f"{label} L={L}"] = C
            fracs = []
            for i, e in ests:
                role = "calibration" if i < n_cal else "holdout"
                rec = _record(L, i, label, ratio=e.max_ratio, role=role)
                if role == "holdout":
                    frac = e.pass_fraction(factor * C)
                    rec["pass_fraction"] = frac
                    fracs.append(frac)
                records.append(rec)
            if fracs:
                assertions.append(
                    {
                        "name": f"{label} L={L}: holdout pass fraction >= {required:g} at {factor:g}C",
                        "passed": bool(min(fracs) >= required),
                        "detail": {"C": C, "min_pass_fraction": min(fracs)},
                    }
                )
    return records, assertions, {"fitted_C": fitted, "delta": delta, "eps": eps}


def run_commutator_maximal(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F, B = _theorem_inputs(ctx, n)
    ops = _operators(ctx)
    ps = [float(p) for p in ctx.param("p", [0.5, 1.0, 2.0])]

    def unit(L, i):
        fs, bs = _pairs(F, n, box, L, i), _pairs(B, n, box, L, i)
        cubes = default_family(fs[0])
        M = m_loglog_multi(fs, cubes)
        out = []
        for label, T in ops:
            G = commutator_pi(T, bs).apply(fs)
            for wspec in cfg.weights:
                w = realize(wspec[0], box, L)
                wl = _wlabel(wspec[0])
                for p in ps:
                    c = commutator_maximal_strong_check(T, bs, fs, p, w, cubes, value=G, maximal=M)
                    out.append(_record(L, i, f"{label} strong p={p:g} w={wl}", c))
                c = commutator_maximal_weak_check(T, bs, fs, w, cubes, value=G, maximal=M)
                out.append(_record(L, i, f"{label} weak w={wl}", c))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g}


# ---------------------------------------------------------------------------
# maximal functions


def _pointwise_ratio(lhs: GridFunction, rhs: GridFunction) -> float:
    a, b = np.abs(lhs.samples), np.abs(rhs.samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(a == 0, 0.0, a / b)
    return float(np.max(r))


def run_fefferman_stein(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F = ctx.corpus(cfg.inputs.get("kind", "smooth-bumps"), n, salt=1)
    delta = float(ctx.param("delta", 0.5))
    ps = [float(p) for p in ctx.param("p", [1.0, 2.0])]

    def unit(L, i):
        f = realize(F[i], box, L)
        cubes = default_family(f)
        out = []
        for wspec in cfg.weights:
            w = realize(wspec[0], box, L)
            wl = _wlabel(wspec[0])
            for p in ps:
                out.append(_record(L, i, f"strong p={p:g} w={wl}", fefferman_stein_check(f, delta, p, w, cubes)))
                out.append(_record(L, i, f"weak p={p:g} w={wl}", fs_weak_check(f, delta, p, w, cubes)))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    # A_inf certificates for the weights used
    certs = {}
    for wspec in cfg.weights:
        cert = classify_refinement(
            cfg.levels, [ap_constant(realize(wspec[0], box, L), 4.0) for L in cfg.levels], drift_tol=cfg.drift
        )
        certs[_wlabel(wspec[0])] = cert.to_dict()
        a.append({"name": f"A_inf certificate {_wlabel(wspec[0])}", "passed": bool(cert.member), "detail": cert.to_dict()})
    return records, a, {"groups": g, "a_inf": certs}


def run_maximal_chain(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F = ctx.corpus(cfg.inputs.get("kind", "step-functions"), 2 * n, salt=1)
    rs = [float(r) for r in ctx.param("r", [1.5, 2.0, 3.0])]

    def unit(L, i):
        fs = _pairs(F, n, box, L, i)
        cubes = default_family(fs[0])
        M = multilinear_m(fs, cubes)
        Mi = [m_i_loglog(fs, j, cubes) for j in (1, 2)]
        ML = m_loglog_multi(fs, cubes)
        out = []
        for j, mi in enumerate(Mi, start=1):
            out.append(_record(L, i, f"M <= M^{j}_LlogL", ratio=_pointwise_ratio(M, mi)))
            out.append(_record(L, i, f"M^{j}_LlogL <= M_LlogL", ratio=_pointwise_ratio(mi, ML)))
        for r in rs:
            out.append(_record(L, i, f"M_LlogL <= M_r r={r:g}", ratio=_pointwise_ratio(ML, multilinear_m_r(fs, r, cubes))))
        for j, f in enumerate(fs, start=1):
            if not np.any(f.samples):
                continue
            MM = hl_maximal(hl_maximal(f, cubes), cubes)
            ll = m_loglog(f, cubes)
            out.append(_record(L, i, "M_LlogL f <= M(Mf)", ratio=_pointwise_ratio(ll, MM)))
            out.append(_record(L, i, "M(Mf) <= M_LlogL f", ratio=_pointwise_ratio(MM, ll)))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g}


def _random_cubes(ctx: Context, n: int, max_level: int = 4) -> list[tuple[int, int]]:
    rng = corpus_rng(ctx.cfg.seed, "cubes", 7)
    out = []
    for _ in range(n):
        v = int(rng.integers(0, max_level + 1))
        out.append((v, int(rng.integers(0, 2**v))))
    return out


def run_kolmogorov(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F = ctx.corpus(cfg.inputs.get("kind", "step-functions"), n, salt=1)
    pq = [tuple(map(float, x)) for x in ctx.param("pq", [[0.4, 0.5], [0.5, 1.0]])]
    cubes = _random_cubes(ctx, n)

    def unit(L, i):
        f = realize(F[i], box, L)
        v, k = cubes[i]
        q = DyadicCube(box, v, (k,))
        out = []
        for p, qq in pq:
            for where, cube in (("box", None), ("cube", q)):
                res = kolmogorov_check(f, cube, p, qq)
                skipped = res.rhs == 0 and res.lhs == 0
                ratio = 0.0 if res.lhs == 0 else res.lhs / (res.constant * res.rhs)
                out.append(
                    _record(L, i, f"p={p:g} q={qq:g} {where}", lhs=res.lhs, rhs=res.constant * res.rhs,
                            ratio=ratio, holds=bool(res.holds), skipped=skipped)
                )
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    assertions = []
    for p, qq in pq:
        bad = [r for r in records if r["group"].startswith(f"p={p:g} q={qq:g}") and not r["holds"]]
        assertions.append(
            {
                "name": f"p={p:g} q={qq:g}: zero violations with C=(q/(q-p))^(1/p)",
                "passed": not bad,
                "detail": {"violations": len(bad), "constant": (qq / (qq - p)) ** (1.0 / p)},
            }
        )
    return records, assertions, {}


# ---------------------------------------------------------------------------
# BMO / Orlicz inequalities


def run_bmo(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F = ctx.corpus(cfg.inputs.get("kind", "step-functions"), n, salt=1)
    B = ctx.corpus(cfg.symbols.get("kind", "log-bmo"), n, salt=2)
    cubes = _random_cubes(ctx, n, 5)
    ts = [float(t) for t in ctx.param("t", [2.0, 4.0, 8.0])]
    r = float(ctx.param("r", 2.0))

    def unit(L, i):
        f, b = realize(F[i], box, L), realize(B[i], box, L)
        fam = default_family(f)
        v, k = cubes[i]
        q = DyadicCube(box, v, (k,))
        out = [_record(L, i, "holder", bmo_holder_check(b, f, q, fam))]
        for t in ts:
            out.append(_record(L, i, f"dilate-mean t={t:g}", bmo_dilate_bound_check(b, q, t, fam)))
            out.append(_record(L, i, f"dilate-osc t={t:g} r={r:g}", bmo_dilated_oscillation_check(b, q, t, r, fam)))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    a, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, a, {"groups": g}


# ---------------------------------------------------------------------------
# weights


def _weight_vector(specs, ps, box, L) -> WeightVector:
    return WeightVector(tuple(Weight(realize(s, box, L)) for s in specs), tuple(ps))


def run_weight_characterization(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    ps = tuple(float(p) for p in ctx.param("p", [2.0, 2.0]))
    levels = cfg.levels
    configs = list(cfg.weights)

    def unit(idx, wspec):
        rep = componentwise_weight_check(lambda L: _weight_vector(wspec, ps, box, L), levels)
        return rep

    reports = _pmap(unit, list(enumerate(configs)))
    records, assertions, detail = [], [], {}
    for idx, (wspec, rep) in enumerate(zip(configs, reports)):
        label = _wvlabel(wspec)
        for L, v in zip(levels, rep.multilinear.values):
            records.append(_record(L, idx, label, ratio=float(v), member=bool(rep.multilinear.member)))
        detail[label] = rep.to_dict()
        assertions.append(
            {
                "name": f"{label}: joint membership agrees with the components",
                "passed": bool(rep.consistent),
                "detail": {"joint": rep.multilinear.member, "components": [c.member for c in rep.components]},
            }
        )
    for spec in ctx.param("out_of_range", [{"a": -1.5, "p": 2.0}]):
        a, p = float(spec["a"]), float(spec["p"])
        ref = classify_refinement(levels, [ap_constant(power_weight(a, box, L), p) for L in levels])
        detail[f"out-of-range |x|^{a:g} in A_{p:g}"] = ref.to_dict()
        assertions.append(
            {"name": f"|x|^{a:g} flagged divergent for A_{p:g}", "passed": bool(ref.divergent), "detail": ref.to_dict()}
        )
    return records, assertions, {"reports": detail}


def run_product_weight(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    levels = cfg.levels
    exps = cfg.exponents.get("pairs") or [[{"type": "constant", "value": 2.0}, {"type": "constant", "value": 2.0}]]
    configs = [(w, e) for w in cfg.weights for e in exps]

    def unit(idx, cfgpair):
        wspec, espec = cfgpair
        return _product_weight_check(
            lambda L: ([realize(s, box, L) for s in wspec], [realize_exponent(e, box, L) for e in espec]), levels
        )

    reports = _pmap(unit, list(enumerate(configs)))
    records, assertions, detail = [], [], {}
    for idx, ((wspec, espec), rep) in enumerate(zip(configs, reports)):
        label = f"v={_wvlabel(wspec)} p={json.dumps(espec, sort_keys=True)}"
        for L, v in zip(levels, rep.product.values):
            records.append(_record(L, idx, label, ratio=float(v), status=rep.status))
        detail[label] = rep.to_dict()
        assertions.append({"name": f"{label}: product weight is a member", "passed": rep.status == "holds",
                           "detail": {"status": rep.status}})
    for spec in ctx.param("out_of_range", [{"a": -2.0, "p": {"type": "constant", "value": 2.0}}]):
        a = float(spec["a"])
        ref = classify_refinement(
            levels, [var_ap_constant(power_weight(a, box, L).samples, realize_exponent(spec["p"], box, L)) for L in levels]
        )
        detail[f"out-of-range |x|^{a:g}"] = ref.to_dict()
        assertions.append({"name": f"|x|^{a:g} flagged divergent for A_p(.)", "passed": bool(ref.divergent),
                           "detail": ref.to_dict()})
    return records, assertions, {"reports": detail}


# ---------------------------------------------------------------------------
# variable exponent lemmas


def run_varlex_lemmas(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    n = cfg.family_size
    F = ctx.corpus(cfg.inputs.get("kind", "step-functions"), 3 * n, salt=1)
    P = ctx.corpus(cfg.exponents.get("kind", "exponents"), 3 * n, salt=3)
    rng = corpus_rng(cfg.seed, "homogeneity", 11)
    ss = rng.uniform(0.5, 3.0, n)
    tol = float(cfg.tolerances.get("identity", 1e-8))

    def unit(L, i):
        fs = [realize(F[3 * i + j], box, L) for j in range(3)]
        ps = [realize_exponent(P[3 * i + j], box, L) for j in range(3)]
        out = []
        if not np.any(fs[0].samples):
            return out
        h = homogeneity_check(fs[0], ps[0], float(ss[i]))
        out.append(_record(L, i, "homogeneity", h, rel_error=abs(h.lhs / h.rhs - 1.0)))
        out.append(_record(L, i, "holder m=2", gen_holder_check(fs[0], fs[1], ps[0], ps[1])))
        out.append(_record(L, i, "holder m=3", gen_holder_m_check(fs, ps)))
        top = fs[0].max_abs()
        mc = monotone_convergence_check(fs[0], ps[0], [top * t for t in (0.1, 0.25, 0.5, 0.75, 1.0)])
        ok = mc["nondecreasing"] and mc["bounded"] and mc["gap"] <= tol
        out.append(_record(L, i, "monotone", ratio=mc["norms"][-1] / mc["limit"], monotone_ok=bool(ok)))
        return out

    records = _flatten(_pmap(unit, _level_items(cfg, n)))
    holder = [r for r in records if r["group"].startswith("holder")]
    a, g = stability_assertions(holder, cfg.levels, cfg.drift)
    homo = [r["rel_error"] for r in records if r["group"] == "homogeneity"]
    a.append({"name": f"homogeneity identity within {tol:g}", "passed": bool(homo) and max(homo) <= tol,
              "detail": {"max_rel_error": max(homo) if homo else None}})
    mono = [r for r in records if r["group"] == "monotone"]
    a.append({"name": "truncation norms increase to the norm", "passed": bool(mono) and all(r["monotone_ok"] for r in mono),
              "detail": {"count": len(mono)}})
    return records, a, {"groups": g}


# ---------------------------------------------------------------------------
# kernels, symbols and moduli


def run_paraproduct_kernel(ctx: Context):
    cfg, box = ctx.cfg, ctx.box
    offset = int(ctx.param("V_offset", 2))
    count = int(ctx.param("tuples", 10_000))
    theta = Modulus.lipschitz()
    levels = cfg.levels
    h0 = box.cell_width(min(levels))
    R = box.halfwidth
    rng = corpus_rng(cfg.seed, "kernel", 13)
    size_s = admissible_samples(rng, count, 2, R, h0)
    reg_s = [admissible_samples(rng, count, 2, R, h0, slot=s) for s in (0, 1, 2)]

    fits, records, assertions = {}, [], []
    fixed = None
    for L in levels:
        fam = make_molecules(box, V=L - offset)
        K = paraproduct_kernel(fam)
        fit = fit_kernel_modulus(K, theta, size_s, reg_s, h0)
        fits[L] = fit.to_dict()
        if fixed is None:
            fixed = fit  # omega and A fitted on the coarsest grid, then held fixed
        KA = Kernel(2, K.func, fixed.A)
        om = fixed.modulus(theta)
        records.append(_record(L, 0, "size", ratio=kernel_size_check(KA, size_s, h0).max_ratio))
        records.append(_record(L, 0, "reg-x", ratio=kernel_reg_x_check(KA, om, reg_s[0], h0).max_ratio))
        for j in (1, 2):
            records.append(_record(L, 0, f"reg-y{j}", ratio=kernel_reg_y_check(KA, om, j, reg_s[j], h0).max_ratio))
        # molecule validators
        canc = max(float(np.max(np.abs(fam.cancellation_integrals(j, L)))) for j in (1, 2))
        records.append(_record(L, 0, "molecule A0", ratio=fitted_A0(fam, L)))
        records.append(_record(L, 0, "molecule regularity", ratio=max(
            regularity_ratio(fam, j, corpus_rng(cfg.seed, "molecule", 17 + j), count) for j in (1, 2, 3))))
        assertions.append({"name": f"L={L}: cancellation integrals vanish", "passed": canc <= 1e-12, "detail": {"max": canc}})
        # kernel quadrature against the direct paraproduct, disjoint supports
        err = _kernel_cross_check(fam, box, L, int(ctx.param("points", 8)))
        records.append(_record(L, 0, "quadrature cross-check", ratio=1.0 + err, rel_error=err))
        assertions.append({"name": f"L={L}: kernel quadrature within 5% of direct application",
                           "passed": err <= 0.05, "detail": {"rel_error": err}})
    stab = [r for r in records if r["group"] in ("size", "reg-x", "reg-y1", "reg-y2")]
    a, g = stability_assertions(stab, levels, cfg.drift)
    return records, a + assertions, {"fits": fits, "groups": g}


def _kernel_cross_check(fam, box: Box, L: int, points: int) -> float:
    """Relative sup error of kernel quadrature at points off the inputs' support."""
    x = box.centers(L)
    R = box.halfwidth
    f = GridFunction.from_function(box, L, lambda t: np.where((t > 0.05 * R) & (t < 0.45 * R), np.cos(7 * t) + 0.3, 0.0))
    g = GridFunction.from_function(box, L, lambda t: np.where((t > 0.1 * R) & (t < 0.4 * R), np.sin(5 * t) + 0.5, 0.0))
    direct = paraproduct(fam, f, g).samples
    region = np.flatnonzero((x > 0.55 * R) & (x < 0.95 * R))
    pts = region[np.linspace(0, region.size - 1, points).astype(int)]
    quad = apply_kernel_operator(paraproduct_kernel(fam), [f, g], exclusion=1, points=pts.tolist())
    scale = max(float(np.max(np.abs(direct[pts]))), 1e-300)
    return float(np.max(np.abs(quad - direct[pts])) / scale)


def run_symbol_class(ctx: Context):
    cfg = ctx.cfg
    names = ctx.param("symbols", ["smooth", "log-modulus"])
    a = float(ctx.param("a", 0.5))
    records, assertions, reports = [], [], {}
    for L in cfg.levels:  # ladder depth for h = 2^-k
        for idx, name in enumerate(names):
            sigma = SYMBOLS[name]()
            rep = symbol_class_check(sigma, kmax=L, a=a)
            reports[f"{name} k<={L}"] = rep.to_dict()
            for key, v in rep.derivative_ratios.items():
                records.append(_record(L, idx, f"{name} D{key}", ratio=v))
            for key, v in rep.x_ratios.items():
                records.append(_record(L, idx, f"{name} x-diff {key}", ratio=v))
            assertions.append({"name": f"{name} k<={L}: ladder ratios finite", "passed": rep.finite,
                               "detail": {"condition_sup": rep.condition_sup}})
    theta = Modulus.log_power(4.0)
    sup = condition_sup(theta, lambda t: np.ones_like(np.asarray(t, dtype=float)), a, kmax=200)
    assertions.append({"name": "sup theta^(1-a)(t) Omega(1/t) finite for (log(e/t))^-4, Omega=1, a=1/2",
                       "passed": bool(np.isfinite(sup)), "detail": {"sup": sup}})
    st, g = stability_assertions(records, cfg.levels, cfg.drift)
    return records, assertions + st, {"reports": reports, "condition_sup": sup, "groups": g}


def run_dini(ctx: Context):
    specs = ctx.param(
        "moduli",
        [
            {"kind": "lipschitz"},
            {"kind": "power", "param": 0.5},
            {"kind": "log-power", "param": 2.5},
            {"kind": "log-power", "param": 3.5},
            {"kind": "log-power", "param": 4.0},
        ],
    )
    ms = [int(m) for m in ctx.param("m", [0, 1, 2])]
    records, assertions = [], []
    for idx, spec in enumerate(specs):
        om = Modulus(spec["kind"], float(spec.get("param", 1.0)))
        label = f"{spec['kind']}({spec.get('param', '')})"
        for m in ms:
            integ = log_dini_integral(om, m) if m else dini_integral(om)
            s1 = dyadic_series(om, m, 200)
            series_div = condensed_series(om, m).divergent
            ratio = s1 / integ.value if integ.value else float("inf")
            records.append(_record(0, idx, f"{label} m={m}", ratio=ratio, integral=integ.value,
                                   divergent=integ.divergent, series=s1, series_divergent=bool(series_div)))
            assertions.append({"name": f"{label} m={m}: integral and dyadic series agree on convergence",
                               "passed": bool(integ.divergent == series_div), "detail": integ.to_dict()})
    five = log_dini_integral(Modulus.power(1.0), 2)
    assertions.append({"name": "w(t)=t, m=2 integral equals 5", "passed": abs(five.value - 5.0) <= 1e-6,
                       "detail": five.to_dict()})
    return records, assertions, {}


# ---------------------------------------------------------------------------
# registry

CLAIMS = {
    "bmo-inequalities": "Mean oscillation of a BMO function against L log L averages and under cube dilation",
    "fefferman-stein": "Weighted Fefferman-Stein inequality M_delta against M#_delta for A_inf weights (strong and weak)",
    "multilinear-maximal-chain": "Pointwise chain M <= M^i_LlogL <= M_LlogL <= M_r and M_LlogL ~ M(M f)",
    "weight-characterization": "Joint multiple-weight condition equals the componentwise conditions",
    "kolmogorov": "Kolmogorov inequality between L^p and weak L^q averages on cubes",
    "sharp-pointwise": "Pointwise sharp-function bound for the iterated commutator",
    "commutator-maximal": "Iterated commutator controlled by the multilinear L log L maximal function in weighted norms",
    "strong-type": "Weighted strong-type bound for iterated commutators of log-Dini kernels",
    "weak-type": "Weighted endpoint estimate for iterated commutators with Phi^(m) integrals",
    "varlex-bound": "Variable-exponent weighted bound for iterated commutators",
    "varlex-lemmas": "Identities and Hölder-type inequalities for variable-exponent norms",
    "product-weight": "Product of variable-exponent weights is a variable-exponent weight of the product class",
    "paraproduct-kernel": "Molecule paraproducts are bilinear kernels of type w = c1 theta(c2 t)",
    "symbol-class": "Mild-regularity bilinear symbols satisfy the class bounds and the theta/Omega condition",
    "paraproduct-strong": "Weighted strong-type bound for iterated commutators of molecule paraproducts",
    "paraproduct-weak": "Weighted endpoint estimate for iterated commutators of molecule paraproducts",
    "paraproduct-varlex": "Variable-exponent bound for iterated commutators of molecule paraproducts",
    "bpdo-strong": "Weighted strong-type bound for iterated commutators of bilinear pseudo-differential operators",
    "bpdo-weak": "Weighted endpoint estimate for iterated commutators of bilinear pseudo-differential operators",
    "bpdo-varlex": "Variable-exponent bound for iterated commutators of bilinear pseudo-differential operators",
    "dini-conditions": "Dini and log-Dini integrals against their dyadic series",
}


@dataclass(frozen=True)
class Experiment:
    id: str
    claim: str
    runner: Callable = field(repr=False)

    @property
    def description(self) -> str:
        return CLAIMS[self.claim]


EXPERIMENTS = {
    e.id: e
    for e in [
        Experiment("bmo-inequalities", "bmo-inequalities", run_bmo),
        Experiment("fefferman-stein", "fefferman-stein", run_fefferman_stein),
        Experiment("maximal-chain", "multilinear-maximal-chain", run_maximal_chain),
        Experiment("weight-characterization", "weight-characterization", run_weight_characterization),
        Experiment("kolmogorov", "kolmogorov", run_kolmogorov),
        Experiment("sharp-pointwise", "sharp-pointwise", run_sharp),
        Experiment("commutator-maximal", "commutator-maximal", run_commutator_maximal),
        Experiment("strong-type", "strong-type", run_strong),
        Experiment("weak-type", "weak-type", run_weak),
        Experiment("varlex-bound", "varlex-bound", run_varlex),
        Experiment("varlex-lemmas", "varlex-lemmas", run_varlex_lemmas),
        Experiment("product-weight", "product-weight", run_product_weight),
        Experiment("paraproduct-kernel", "paraproduct-kernel", run_paraproduct_kernel),
        Experiment("symbol-class", "symbol-class", run_symbol_class),
        Experiment("paraproduct-strong", "paraproduct-strong", run_strong),
        Experiment("paraproduct-weak", "paraproduct-weak", run_weak),
        Experiment("paraproduct-varlex", "paraproduct-varlex", run_varlex),
        Experiment("bpdo-strong", "bpdo-strong", run_strong),
        Experiment("bpdo-weak", "bpdo-weak", run_weak),
        Experiment("bpdo-varlex", "bpdo-varlex", run_varlex),
        Experiment("dini", "dini-conditions", run_dini),
    ]
}


def default_config(experiment: str) -> dict:
    """Shipped defaults for one experiment (``harness/configs/<id>.json``)."""
    if experiment not in EXPERIMENTS:
        raise KeyError(f"unknown experiment id {experiment!r}; see `czlab list`")
    text = resources.files("czlab.harness").joinpath("configs", f"{experiment}.json").read_text()
    return json.loads(text)


def run(cfg: ExperimentConfig) -> Report:
    if cfg.experiment not in EXPERIMENTS:
        raise KeyError(f"unknown experiment id {cfg.experiment!r}; see `czlab list`")
    exp = EXPERIMENTS[cfg.experiment]
    ctx = Context(cfg)
    records, assertions, extra = exp.runner(ctx)
    return Report(
        experiment=exp.id,
        claim=exp.claim,
        config=cfg.to_dict(),
        provenance={"config_sha256": cfg.sha256(), "seed": int(cfg.seed)},
        records=records,
        aggregates=_aggregate(records, exp.id),
        groups=extra.pop("groups", {}),
        assertions=assertions,
        extra=extra,
    )
