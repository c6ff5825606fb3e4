import math

import numpy as np
import pytest
from scipy.optimize import brentq

from shockfront.c1bounds import (appendix_b_deltas, aux_gAB, bound_constants, c1_horizon_neg, c1_horizon_pos,
                                 coefficient_rows, coefficients, envelope_from_coefficients, gab_by_quadrature,
                                 phi_psi, q_eval, q_inverse, v_envelope, v_inverse, v_transform, x_of,
                                 BoundConstants)
from shockfront.eos import PerfectGas, VanDerWaals
from shockfront.errors import DomainError, HorizonExceeded, PathTooShort, SingularParameter
from shockfront.riemann import SymmetryConfig, lambdas, source_f, to_riemann
from shockfront.smooth import frozen_path

MODELS = [PerfectGas(1.4), PerfectGas(2.0), PerfectGas(2.5), VanDerWaals(2.0, 0.05), VanDerWaals(2.0, 0.1)]
IDS = ["pg1.4", "pg2", "pg2.5", "vdw.05", "vdw.1"]


def bisect_q(y):
    return brentq(lambda x: x * math.exp(x) - y, 0.0, max(1.0, math.log(y + 1) + 1), xtol=1e-15, rtol=1e-15)


def random_states(model, rng, n):
    hi = 0.24 / model.params[2] if model.params[2] else 10.0
    rho = np.exp(rng.uniform(np.log(0.05), np.log(hi), n))
    u = rng.uniform(-2, 3, n)
    return to_riemann(model, (rho, u)), rho


def test_gab_perfect_gas_values(pg2):
    g, A, B = aux_gAB(pg2, 1.0)
    assert (g, A) == pytest.approx((-2.0, -1.0))
    assert B == pytest.approx(-3 * 2 * math.sqrt(2))
    g, A, _ = aux_gAB(pg2, 7.3)
    assert (g, A) == pytest.approx((-2.0, -1.0))
    with pytest.raises(SingularParameter):
        aux_gAB(PerfectGas(5 / 3), 1.0)
    with pytest.raises(SingularParameter):
        aux_gAB(PerfectGas(3.0), 1.0)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_gab_satisfy_defining_odes(model):
    for rho in np.geomspace(0.05, 0.2 / model.params[2] if model.params[2] else 10.0, 12):
        h = 1e-5 * rho

        def G(x):
            return 2 * math.sqrt(model.dH(x)) * aux_gAB(model, x)[0]

        def P(x):
            return 2 * math.sqrt(model.dH(x)) * aux_gAB(model, x)[2]

        sq = math.sqrt(model.dH(rho))
        g = aux_gAB(model, rho)[0]
        assert (G(rho + h) - G(rho - h)) / (2 * h) == pytest.approx(sq / rho, rel=1e-8)
        assert (P(rho + h) - P(rho - h)) / (2 * h) == pytest.approx(model.dH(rho) * sq * (1 + 2 * g), rel=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_gab_quadrature_matches_closed_form(model):
    ref = 0.1
    g0, _, B0 = aux_gAB(model, ref)
    for rho in (0.05, 0.5, 0.2 / model.params[2] if model.params[2] else 3.0):
        g, A, B = gab_by_quadrature(model, rho, ref, g0, B0)
        want = aux_gAB(model, rho)
        assert (g, A, B) == pytest.approx(want, rel=1e-9)


def test_phi_psi(pg2, sph):
    w = to_riemann(pg2, (1.0, 1.0))
    Phi, Psi = phi_psi(pg2, sph, 1.0, w)
    assert Phi == pytest.approx(2 * (-1 + 6 * math.sqrt(2)))
    assert Psi == pytest.approx(2 * (-1 - 6 * math.sqrt(2)))
    assert phi_psi(pg2, SymmetryConfig(1), 1.0, w) == (0.0, 0.0)
    assert phi_psi(pg2, sph, 2.0, w)[0] == Phi / 2


def test_a0_two_assemblies(pg2, sph):
    w = to_riemann(pg2, (1.0, 1.0))
    cs = coefficients(pg2, sph, 1.0, w)
    # -G / (2 sqrt(H')) with H' = c/rho = sqrt(2)
    assert cs.a0 == pytest.approx(-1.5 / (2 * 2**0.25), rel=1e-12)
    assert cs.b0 == cs.a0


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_a0_against_lambda_derivative(model, sph, rng):
    (w1, w2), rho = random_states(model, rng, 50)
    cs = coefficients(model, sph, 1.0, (w1, w2))
    h = 1e-6 * np.maximum(1.0, np.abs(w1))
    d1l1 = (lambdas(model, (w1 + h, w2))[0] - lambdas(model, (w1 - h, w2))[0]) / (2 * h)
    want = -d1l1 / np.sqrt(model.dH(rho))
    assert np.allclose(cs.a0, want, rtol=1e-7)
    assert np.all(cs.a0 <= 0) and np.array_equal(cs.b0, cs.a0)


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_r_invariance(model, rng):
    for d in (2, 3):
        cfg = SymmetryConfig(d)
        (w1, w2), _ = random_states(model, rng, 10_000)
        r = np.exp(rng.uniform(-3, 3, w1.size))
        a = coefficients(model, cfg, r, (w1, w2))
        b = coefficients(model, cfg, 1.0, (w1, w2))
        for x, y in ((a.abar1, b.abar1), (a.abar2, b.abar2), (a.bbar1, b.bbar1), (a.bbar2, b.bbar2),
                     (r * a.a1, b.a1), (r * r * a.a2, b.a2), (a.a0, b.a0)):
            assert np.allclose(x, y, rtol=1e-10, atol=1e-10 * np.max(np.abs(y)))


def test_scaling_by_two(pg2, sph):
    w = to_riemann(pg2, (1.0, 0.7))
    a, b = coefficients(pg2, sph, 1.0, w), coefficients(pg2, sph, 2.0, w)
    assert b.a2 == pytest.approx(a.a2 / 4) and b.a1 == pytest.approx(a.a1 / 2) and b.a0 == a.a0


@pytest.mark.parametrize("model", MODELS, ids=IDS)
def test_defining_pdes(model, sph, rng):
    """d2 h = d2 lambda1 / (lambda1 - lambda2) and d2(e^h Phi) = -e^h d2 f / (lambda1 - lambda2)."""
    (w1s, w2s), _ = random_states(model, rng, 20)
    r = 1.3
    for w1, w2 in zip(w1s, w2s):
        e = 1e-5 * max(1.0, abs(w2))

        def h(a, b):
            return v_transform(model, sph, r, (a, b), (0.0, 0.0)).h

        def ePhi(a, b):
            gv = v_transform(model, sph, r, (a, b), (0.0, 0.0))
            return math.exp(gv.h) * gv.Phi

        def ePsi(a, b):
            gv = v_transform(model, sph, r, (a, b), (0.0, 0.0))
            return math.exp(gv.h) * gv.Psi

        l1, l2 = lambdas(model, (w1, w2))
        d2l1 = (lambdas(model, (w1, w2 + e))[0] - lambdas(model, (w1, w2 - e))[0]) / (2 * e)
        d1l2 = (lambdas(model, (w1 + e, w2))[1] - lambdas(model, (w1 - e, w2))[1]) / (2 * e)
        d2h = (h(w1, w2 + e) - h(w1, w2 - e)) / (2 * e)
        d1h = (h(w1 + e, w2) - h(w1 - e, w2)) / (2 * e)
        assert d2h == pytest.approx(d2l1 / (l1 - l2), rel=1e-6)
        assert d1h == pytest.approx(d1l2 / (l2 - l1), rel=1e-6)
        d2f = (source_f(model, sph, r, (w1, w2 + e)) - source_f(model, sph, r, (w1, w2 - e))) / (2 * e)
        d1f = (source_f(model, sph, r, (w1 + e, w2)) - source_f(model, sph, r, (w1 - e, w2))) / (2 * e)
        lhs = (ePhi(w1, w2 + e) - ePhi(w1, w2 - e)) / (2 * e)
        eh = math.exp(h(w1, w2))
        assert lhs == pytest.approx(-eh * d2f / (l1 - l2), rel=1e-6, abs=1e-7 * abs(eh * d2f))
        lhs = (ePsi(w1 + e, w2) - ePsi(w1 - e, w2)) / (2 * e)
        assert lhs == pytest.approx(eh * d1f / (l2 - l1), rel=1e-6, abs=1e-7 * abs(eh * d1f))


def manufactured_rates(model, cfg, r0, w, dw, d2w, family):
    """Transport rate (dt + lambda dr) of v along a characteristic for a local Taylor solution.

    w(r) = w + dw (r - r0) + d2w (r - r0)^2 / 2 at t = 0; time derivatives come
    from the PDE itself (dt w1 = f - lambda1 dr w1, dt w2 = -f - lambda2 dr w2),
    differentiated in r by finite differences.  Returns (v, D v).
    """
    w, dw, d2w = (np.asarray(x, float) for x in (w, dw, d2w))

    def state(r):
        s = r - r0
        return w + dw * s + 0.5 * d2w * s * s, dw + d2w * s

    def dt_state(r):
        ws, gs = state(r)
        l1, l2 = lambdas(model, ws)
        f = float(source_f(model, cfg, r, ws))
        return np.array([f - l1 * gs[0], -f - l2 * gs[1]])

    e = 1e-5 * r0
    dtw = dt_state(r0)
    dtdw = (dt_state(r0 + e) - dt_state(r0 - e)) / (2 * e)

    def v_at(t, r):
        ws, gs = state(r)
        gv = v_transform(model, cfg, r, ws + t * dtw, gs + t * dtdw)
        return np.array([gv.v1, gv.v2])

    lam = lambdas(model, w)[family - 1]
    k = 1e-5
    dt = (v_at(k, r0) - v_at(-k, r0)) / (2 * k)
    dr = (v_at(0.0, r0 + e) - v_at(0.0, r0 - e)) / (2 * e)
    return v_at(0.0, r0)[family - 1], dt[family - 1] + lam * dr[family - 1]


@pytest.mark.parametrize("model", MODELS, ids=IDS)
@pytest.mark.parametrize("d", [2, 3])
def test_riccati_coefficients_by_manufactured_solution(model, d, rng):
    """Independent oracle for a1, a2 (b1, b2): the gradient variables obey the Riccati law."""
    cfg = SymmetryConfig(d)
    (w1s, w2s), _ = random_states(model, rng, 8)
    for w1, w2 in zip(w1s, w2s):
        r0 = rng.uniform(0.5, 3.0)
        dw = rng.normal(size=2)
        d2w = rng.normal(size=2)
        cs = coefficients(model, cfg, r0, (w1, w2))
        for fam, (c0, c1, c2) in ((1, (cs.a0, cs.a1, cs.a2)), (2, (cs.b0, cs.b1, cs.b2))):
            v, rate = manufactured_rates(model, cfg, r0, (w1, w2), dw, d2w, fam)
            want = c0 * v * v + c1 * v + c2
            assert rate == pytest.approx(want, rel=1e-5, abs=1e-5 * (abs(c0) * v * v + abs(c1 * v) + abs(c2)))


def test_scaled_coefficients(pg2, sph):
    """r^ell v obeys a Riccati law with a0/r^ell, a1 + ell lambda1/r, a2 r^ell."""
    w = to_riemann(pg2, (1.2, 0.8))
    r = 1.7
    a, s = coefficients(pg2, sph, r, w), coefficients(pg2, sph, r, w, ell=2)
    l1, l2 = lambdas(pg2, w)
    assert s.a0 == pytest.approx(a.a0 / r**2) and s.a2 == pytest.approx(a.a2 * r**2)
    assert s.a1 == pytest.approx(a.a1 + 2 * l1 / r) and s.b1 == pytest.approx(a.b1 + 2 * l2 / r)
    with pytest.raises(DomainError):
        coefficients(pg2, SymmetryConfig(1), r, w)


def test_coefficient_rows_and_appendix_report(pg2, sph):
    rows = coefficient_rows(pg2, sph, [1.0, 2.0], [0.1, 0.2], [3.0, 3.5])
    assert rows.shape == (2, 9)
    rep = appendix_b_deltas(pg2, sph, 1.0, to_riemann(pg2, (1.0, 1.0)))
    assert {"a0", "a1", "a2", "g", "B"} <= set(rep)
    assert rep["g"][2] == pytest.approx(0.0, abs=1e-12)
    # the printed a0 differs from the general formula; reported only
    assert abs(rep["a0"][2]) > 1e-3


def test_v_transform(pg2, sph, rng):
    w = to_riemann(pg2, (1.0, 1.0))
    Phi, Psi = phi_psi(pg2, sph, 1.0, w)
    gv = v_transform(pg2, sph, 1.0, w, (-Phi, -Psi))
    assert gv.v1 == pytest.approx(0, abs=1e-13) and gv.v2 == pytest.approx(0, abs=1e-13)
    gv = v_transform(pg2, sph, 1.0, w, (1.0 - Phi, 0.0 - Psi))
    assert gv.v1 == pytest.approx(2**0.25)
    for _ in range(100):
        r = rng.uniform(0.2, 5)
        ww = to_riemann(pg2, (rng.uniform(0.1, 5), rng.uniform(-2, 2)))
        dw = rng.normal(size=2)
        gv = v_transform(pg2, sph, r, ww, dw)
        back = v_inverse(pg2, sph, r, ww, (gv.v1, gv.v2))
        assert np.allclose(back, dw, rtol=1e-12, atol=1e-12 * (abs(gv.Phi) + abs(gv.Psi)))


def test_q_functions():
    assert q_eval(1.0) == pytest.approx(math.e)
    assert x_of(1, math.e, 1) == pytest.approx(1.0, rel=1e-12)
    assert q_inverse(1.0) == pytest.approx(bisect_q(1.0), rel=1e-13)
    assert q_inverse(1.0) == pytest.approx(0.567143, abs=1e-6)
    ys = np.geomspace(1e-8, 1e3, 400)
    xs = q_inverse(ys)
    assert np.allclose(q_eval(xs), ys, rtol=1e-12)
    assert np.allclose(q_inverse(q_eval(xs)), xs, rtol=1e-12)
    for y in (1e-6, 0.5, 3.0, 1e3):
        assert q_inverse(y) == pytest.approx(bisect_q(y), rel=1e-12)
    with pytest.raises(DomainError):
        q_inverse(0.0)
    with pytest.raises(DomainError):
        x_of(1, -1, 1)


def unit_consts(A2=1.0):
    return BoundConstants(1.0, 1.0, A2, 1.0, 1.0, A2, 0.0, 0.0)


def test_horizons():
    c = unit_consts()
    assert c1_horizon_pos(c, 1.0, 0.0, 1) == pytest.approx(bisect_q(1.0), rel=1e-12)
    assert c1_horizon_pos(c, 2.0, 0.0, 2) == pytest.approx(2 * bisect_q(1.0), rel=1e-12)
    assert c1_horizon_pos(unit_consts(1e-12), 1.0, 0.0, 1) > 10
    assert c1_horizon_neg(c, 0.0, 1.0, 0.0, 1) == pytest.approx(c1_horizon_pos(c, 1.0, 0.0, 1), rel=1e-14)
    assert c1_horizon_neg(c, -1.0, 1.0, 0.0, 1) == pytest.approx(bisect_q(0.5), rel=1e-12)
    assert c1_horizon_neg(c, -1.0, 1.0, 0.0, 1) == pytest.approx(0.351734, abs=1e-6)
    assert c1_horizon_neg(c, -2.0, 1.0, 0.0, 1) < c1_horizon_neg(c, -1.0, 1.0, 0.0, 1)
    with pytest.raises(DomainError):
        c1_horizon_neg(c, 1.0, 1.0, 0.0, 1)
    with pytest.raises(DomainError):
        c1_horizon_pos(BoundConstants(1, 0, 1, 1, 0, 1, 0, 0), 1.0, 0.0, 1)


def test_bound_constants_on_frozen_paths(pg2, sph):
    w = to_riemann(pg2, (1.0, 0.5))
    R = 2.0
    pair = (frozen_path(1, w, R, 0.0, 2.0), frozen_path(2, w, R, 0.0, 2.0))
    cs = coefficients(pg2, sph, R, w)
    bc = bound_constants(pg2, sph, pair, (0.0, 1.0))
    assert (bc.A0, bc.A1, bc.A2) == pytest.approx((abs(cs.a0), abs(cs.abar1), abs(cs.abar2)), rel=1e-12)
    assert (bc.B0, bc.B1, bc.B2) == pytest.approx((abs(cs.b0), abs(cs.bbar1), abs(cs.bbar2)), rel=1e-12)
    assert bc.Ka == pytest.approx(abs(cs.a2) * math.exp(abs(cs.a1)), rel=1e-12)
    bc2 = bound_constants(pg2, sph, pair, (0.0, 2.0))
    assert bc2.Ka == pytest.approx(bc.Ka * 2 * math.exp(abs(cs.a1)), rel=1e-12)
    assert bc.min_X1 == R
    with pytest.raises(PathTooShort):
        bound_constants(pg2, sph, pair, (0.0, 3.0))


def test_envelopes_closed_forms():
    t = np.linspace(0, 2, 401)
    env = envelope_from_coefficients(t, -1.0, 0.0, 0.0, 1.0)
    assert np.all(env.lower == 0) and np.all(env.upper == 1)
    assert env.contains(t, 1 / (1 + t))
    env = envelope_from_coefficients(t, -0.5, 0.3, 0.0, 2.0)
    assert np.allclose(env.upper, 2.0 * np.exp(0.3 * t))
    assert np.allclose(env.lower, 0.0)


def test_negative_case_envelope_up_to_horizon():
    # constant coefficients: sup-based horizon on a frozen path at R = 1
    a0, a1, a2, v = -1.0, 0.5, 0.4, -0.3
    c = BoundConstants(1.0, 0.5, 0.4, 1.0, 0.5, 0.4, 0.0, 0.0)
    T = c1_horizon_neg(c, v, 1.0, 0.0, 1)
    t = np.linspace(0, T, 2001)
    env = envelope_from_coefficients(t, a0, a1, a2, v)
    assert np.all(1.0 - (abs(v) + env.K) * env.I0 > 0)
    with pytest.raises(HorizonExceeded):
        envelope_from_coefficients(np.linspace(0, 50, 2001), a0, a1, a2, v)


def test_v_envelope_frozen(pg2, sph):
    w = to_riemann(pg2, (1.0, 0.5))
    env = v_envelope(pg2, sph, 0.2, frozen_path(1, w, 5.0, 0.0, 0.1), 1)
    assert env.lower[0] == 0 and env.upper[0] == pytest.approx(0.2)
    with pytest.raises(DomainError):
        v_envelope(pg2, sph, 0.2, frozen_path(1, w, 5.0, 0.0, 0.1), 3)
