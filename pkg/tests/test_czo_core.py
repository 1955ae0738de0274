import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from czlab.czo_core import (
    CommutatorSubset,
    Kernel,
    Modulus,
    MultilinearOperator,
    admissible_samples,
    apply_kernel_operator,
    commutator_j,
    commutator_maximal_strong_check,
    commutator_maximal_weak_check,
    commutator_pi,
    commutator_sigma,
    condensed_series,
    dini_integral,
    dyadic_series,
    hilbert_kernel,
    kernel_reg_x_check,
    kernel_reg_y_check,
    kernel_size_check,
    log_dini_integral,
    phi_weak_sup,
    proper_subsets,
    sharp_estimate_check,
    thm_strong_check,
    thm_varlex_check,
    thm_weak_check,
)
from czlab.grid import Box, GridFunction
from czlab.orlicz_bmo import phi_iter
from czlab.varlex import VarExponent

BOX = Box(1, 1.0)

# ---------------------------------------------------------------------------
# moduli


def test_modulus_kinds():
    t = np.array([0.0, 0.25, 1.0, 3.0])
    assert np.allclose(Modulus.power(0.5)(t), np.sqrt(t))
    assert np.allclose(Modulus.lipschitz()(t), [0, 0.25, 1, 1])
    lp = Modulus.log_power(2.0)
    assert lp(0.0) == 0.0 and lp(1.0) == 1.0 and lp(math.exp(-1)) == pytest.approx(0.25)
    assert Modulus.lipschitz().fitted(3.0, 2.0)(0.25) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        Modulus("gaussian")
    with pytest.raises(ValueError):
        Modulus.power(0.0)
    with pytest.raises(ValueError):
        Modulus.lipschitz()(-1.0)


@pytest.mark.parametrize(
    "om", [Modulus.power(0.3), Modulus.lipschitz().fitted(2.0, 4.0), Modulus.log_power(3.0).fitted(1.0, 0.5)]
)
def test_at_log_agrees_with_direct_evaluation(om):
    u = np.linspace(0.0, 30.0, 61)
    assert np.allclose(om.at_log(u), om(np.exp(-u)), rtol=1e-12)
    assert om.nondecreasing_on_ladder()


def test_concavity_on_ladder():
    assert Modulus.power(0.5).midpoint_concave_on_ladder()
    assert Modulus.lipschitz().midpoint_concave_on_ladder()
    assert not Modulus("custom", func=lambda t: t * t).midpoint_concave_on_ladder()


def _quad_log_dini(om, m):
    val, _ = quad(lambda u: om.at_log(u) * (1 + u) ** m, 0, np.inf, limit=400)
    return val


@pytest.mark.parametrize("eps", [0.25, 0.5, 1.0, 2.0])
def test_dini_of_power_modulus(eps):
    r = dini_integral(Modulus.power(eps))
    assert r.converged and not r.divergent
    assert r.value == pytest.approx(1 / eps, rel=1e-8)


def test_log_dini_of_identity_equals_five():
    assert abs(log_dini_integral(Modulus.power(1.0), 2).value - 5.0) <= 1e-6


@pytest.mark.parametrize("beta,m", [(2.5, 0), (3.5, 1), (4.0, 2), (6.0, 3)])
def test_log_dini_of_log_power(beta, m):
    om = Modulus.log_power(beta)
    r = log_dini_integral(om, m) if m else dini_integral(om)
    assert not r.divergent
    assert r.value == pytest.approx(1 / (beta - m - 1), rel=1e-6)
    assert r.value == pytest.approx(_quad_log_dini(om, m), rel=1e-6)


@pytest.mark.parametrize("beta,m", [(1.0, 0), (2.0, 1), (3.0, 2)])
def test_divergent_log_dini_detected(beta, m):
    om = Modulus.log_power(beta)
    r = log_dini_integral(om, m) if m else dini_integral(om)
    assert r.divergent
    assert condensed_series(om, m).divergent


@pytest.mark.parametrize("beta,m", [(2.5, 0), (3.5, 2), (5.0, 2)])
def test_condensation_converges_with_integral(beta, m):
    assert not condensed_series(Modulus.log_power(beta), m).divergent


def test_dyadic_series_direct():
    om = Modulus.power(0.5)
    ref = sum(k**2 * 2 ** (-k / 2) for k in range(1, 51))
    assert dyadic_series(om, 2, 50) == pytest.approx(ref, rel=1e-13)


# ---------------------------------------------------------------------------
# commutators


def _random_bilinear(rng, n):
    A, B = rng.normal(size=(n, n)), rng.normal(size=(n, n))
    return MultilinearOperator(2, lambda f, g: f.with_samples((A @ f.samples) * (B @ g.samples)), "AB")


def _random_trilinear(rng, n):
    A, B, C = (rng.normal(size=(n, n)) for _ in range(3))
    return MultilinearOperator(
        3, lambda f, g, k: f.with_samples((A @ f.samples) * (B @ g.samples) * (C @ k.samples)), "ABC"
    )


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_nested_matches_expanded_commutator(seed):
    rng = np.random.default_rng(seed)
    n = 32
    T = _random_bilinear(rng, n)
    fs = [GridFunction(BOX, 5, rng.normal(size=n)) for _ in range(2)]
    bs = [GridFunction(BOX, 5, rng.normal(size=n)) for _ in range(2)]
    nested = commutator_j(commutator_j(T, bs[0], 1), bs[1], 2).apply(fs)
    expanded = commutator_pi(T, bs).apply(fs)
    scale = np.abs(nested.samples).max()
    assert np.max(np.abs(nested.samples - expanded.samples)) <= 1e-10 * scale


def test_nested_matches_expanded_trilinear(rng):
    n = 16
    T = _random_trilinear(rng, n)
    fs = [GridFunction(BOX, 4, rng.normal(size=n)) for _ in range(3)]
    bs = [GridFunction(BOX, 4, rng.normal(size=n)) for _ in range(3)]
    nested = commutator_j(commutator_j(commutator_j(T, bs[0], 1), bs[1], 2), bs[2], 3).apply(fs)
    expanded = commutator_pi(T, bs).apply(fs)
    assert np.max(np.abs(nested.samples - expanded.samples)) <= 1e-10 * np.abs(nested.samples).max()
    partial = commutator_pi(T, bs, CommutatorSubset((1, 3))).apply(fs)
    nested13 = commutator_j(commutator_j(T, bs[0], 1), bs[2], 3).apply(fs)
    assert np.max(np.abs(partial.samples - nested13.samples)) <= 1e-10 * np.abs(nested13.samples).max()


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), c1=st.floats(-5, 5), c2=st.floats(-5, 5))
def test_constant_symbols_give_vanishing_commutators(seed, c1, c2):
    rng = np.random.default_rng(seed)
    T = _random_bilinear(rng, 32)
    fs = [GridFunction(BOX, 5, rng.normal(size=32)) for _ in range(2)]
    bs = [GridFunction.constant(BOX, 5, c1), GridFunction.constant(BOX, 5, c2)]
    scale = max(1.0, abs(c1), abs(c2)) ** 2 * T.apply(fs).max_abs()
    assert commutator_pi(T, bs).apply(fs).max_abs() <= 1e-10 * scale
    assert commutator_sigma(T, bs).apply(fs).max_abs() <= 1e-10 * scale


def test_commutator_sigma_is_sum(rng):
    T = _random_bilinear(rng, 16)
    fs = [GridFunction(BOX, 4, rng.normal(size=16)) for _ in range(2)]
    bs = [GridFunction(BOX, 4, rng.normal(size=16)) for _ in range(2)]
    total = commutator_j(T, bs[0], 1).apply(fs) + commutator_j(T, bs[1], 2).apply(fs)
    assert commutator_sigma(T, bs).apply(fs).allclose(total)


def test_subsets():
    assert [s.indices for s in proper_subsets(3)] == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert CommutatorSubset((2,)).complement(3) == (1, 3)
    for bad in [(), (2, 1), (0, 1), (1, 1)]:
        with pytest.raises(ValueError):
            CommutatorSubset(bad)
    T = MultilinearOperator(2, lambda f, g: f * g)
    with pytest.raises(ValueError):
        commutator_j(T, GridFunction.constant(BOX, 2, 1.0), 3)
    with pytest.raises(ValueError):
        T.apply([GridFunction.constant(BOX, 2, 1.0)])


# ---------------------------------------------------------------------------
# kernels


def test_admissible_samples_respect_constraints(rng):
    s = admissible_samples(rng, 5000, 2, 1.0, 0.01, slot=1)
    assert np.all(np.abs(s.x) <= 1) and np.all(np.abs(s.ys) <= 1) and np.all(np.abs(s.moved) <= 1)
    reach = np.max(np.abs(s.x - s.ys), axis=0)
    ok = reach >= 0.01 * (1 - 1e-12)
    assert ok.mean() > 0.95
    assert np.all(np.abs(s.moved - s.ys[0])[ok] <= 0.5 * reach[ok] * (1 + 1e-12))


def test_hilbert_kernel_checks(rng):
    K = hilbert_kernel()
    size = kernel_size_check(K, admissible_samples(rng, 4000, 1, 1.0, 1e-3), 1e-3)
    assert size.max_ratio == pytest.approx(1.0, rel=1e-12)
    reg = kernel_reg_x_check(K, Modulus.lipschitz(), admissible_samples(rng, 4000, 1, 1.0, 1e-3, slot=0), 1e-3)
    # |x - y|^2 / |x' - y| <= 1 / (1 - tau) = 2
    assert 1.0 < reg.max_ratio <= 2.0 + 1e-9
    with pytest.raises(ValueError):
        kernel_reg_y_check(K, Modulus.lipschitz(), 1, admissible_samples(rng, 10, 1, 1.0, 1e-3, slot=0))


def test_regularity_infinite_when_modulus_vanishes(rng):
    K = hilbert_kernel()
    s = admissible_samples(rng, 100, 1, 1.0, 1e-3, slot=0)
    zero = Modulus("custom", func=lambda t: np.zeros_like(t))
    assert kernel_reg_x_check(K, zero, s, 1e-3).max_ratio == float("inf")


def test_kernel_quadrature_matches_double_sum(rng):
    L = 4
    n = 2**L
    f, g = GridFunction(BOX, L, rng.normal(size=n)), GridFunction(BOX, L, rng.normal(size=n))
    K = Kernel(2, lambda x, y1, y2: np.exp(-((x - y1) ** 2)) * np.cos(x - y2))
    c, h = BOX.centers(L), BOX.cell_width(L)
    ref = np.zeros(n)
    for p in range(n):
        for i in range(n):
            for j in range(n):
                if abs(i - p) < 1 and abs(j - p) < 1:
                    continue
                ref[p] += K(c[p], c[i], c[j]) * f.samples[i] * g.samples[j] * h * h
    out = apply_kernel_operator(K, [f, g], exclusion=1)
    assert np.allclose(out.samples, ref, rtol=1e-12, atol=1e-14)
    pts = apply_kernel_operator(K, [f, g], exclusion=1, points=[0, 5])
    assert np.allclose(pts, ref[[0, 5]], rtol=1e-12)


# ---------------------------------------------------------------------------
# inequality checks


def test_phi_weak_sup_against_scan(rng):
    vals = np.round(rng.normal(size=64), 2)
    masses = np.full(64, 1 / 32)
    exact = phi_weak_sup(vals, masses, 2)
    a = np.abs(vals)
    best = 0.0
    for t in np.concatenate([np.linspace(1e-3, a.max() ** 0.5, 4001), a[a > 0] ** 0.5 * (1 - 1e-14)]):
        best = max(best, masses[0] * np.count_nonzero(a > t**2) / phi_iter(2, 1 / t))
    assert best == pytest.approx(exact, rel=1e-10)


def _smoothing_operator(rng, L):
    n = 2**L
    K = np.exp(-np.subtract.outer(np.arange(n), np.arange(n)) ** 2 / 8.0)
    return MultilinearOperator(2, lambda f, g: f.with_samples((K @ f.samples) * (K @ g.samples) / n))


def test_checks_accept_precomputed_value(rng):
    L = 6
    T = _smoothing_operator(rng, L)
    box = Box(1, 2.0)
    fs = [GridFunction(box, L, rng.normal(size=64)) for _ in range(2)]
    bs = [GridFunction(box, L, rng.normal(size=64)) for _ in range(2)]
    ws = [GridFunction.constant(box, L, 1.0)] * 2
    G = commutator_pi(T, bs).apply(fs)
    assert thm_strong_check(T, bs, fs, (2.0, 2.0), ws) == thm_strong_check(T, bs, fs, (2.0, 2.0), ws, value=G)
    assert thm_weak_check(T, bs, fs, ws, 0.5) == thm_weak_check(T, bs, fs, ws, 0.5, value=G)
    ps = [VarExponent.constant(box, L, 2.0)] * 2
    assert thm_varlex_check(T, bs, fs, ps, ws) == thm_varlex_check(T, bs, fs, ps, ws, value=G)
    a = commutator_maximal_strong_check(T, bs, fs, 1.0, ws[0])
    assert a == commutator_maximal_strong_check(T, bs, fs, 1.0, ws[0], value=G)
    assert commutator_maximal_weak_check(T, bs, fs, ws[0]).ratio > 0
    with pytest.raises(ValueError):
        thm_weak_check(T, bs, fs, ws, 0.0)


def test_strong_check_unit_weights_is_plain_norm(rng):
    L = 6
    T = _smoothing_operator(rng, L)
    box = Box(1, 2.0)
    fs = [GridFunction(box, L, rng.normal(size=64)) for _ in range(2)]
    bs = [GridFunction(box, L, rng.normal(size=64)) for _ in range(2)]
    ws = [GridFunction.constant(box, L, 1.0)] * 2
    c = thm_strong_check(T, bs, fs, (2.0, 2.0), ws)
    G = commutator_pi(T, bs).apply(fs)
    # 1/p = 1/2 + 1/2, so the left side is the L^1 norm
    assert c.lhs == pytest.approx(abs(G).integral(), rel=1e-12)


def test_sharp_estimate_validation(rng):
    L = 6
    T = _smoothing_operator(rng, L)
    fs = [GridFunction(BOX, L, rng.normal(size=64)) for _ in range(2)]
    bs = [GridFunction(BOX, L, rng.normal(size=64)) for _ in range(2)]
    est = sharp_estimate_check(T, bs, fs, 0.25, 0.4)
    assert est.lhs.shape == est.rhs.shape == (64,)
    assert est.pass_fraction(est.max_ratio) == 1.0
    with pytest.raises(ValueError):
        sharp_estimate_check(T, bs, fs, 0.6, 0.7)
