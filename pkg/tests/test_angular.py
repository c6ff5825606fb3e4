import json
import math

import numpy as np
import pytest

from shockfront import _kernels
from shockfront.angular import (DEFAULT_NUMERICS, build_shock_wave, check_hypotheses, existence_bound,
                                validate_solution)
from shockfront.errors import BlowupDetected, CompatibilityError, DomainError, HypothesisViolated
from shockfront.riemann import SymmetryConfig, to_riemann
from shockfront.shock import downstream_state

from conftest import WIND_NUMERICS, constant_data, wind_specs

U210 = 2 * math.sqrt(1.5)
SMALL = {"rows": 50, "nr": 200, "nt": 100}


def jump_210(pg2):
    return constant_data(pg2, 2.0, math.sqrt(1.5)), constant_data(pg2, 1.0, 0.0)


@pytest.mark.parametrize("R0", [1.0, 2.0])
def test_front_starts_with_jump_speed(pg2, sph, R0):
    left, right = jump_210(pg2)
    sol = build_shock_wave(pg2, sph, left, right, R0, 0.05 * R0, numerics=SMALL)
    assert sol.front.r[0] == R0 and sol.front.t[0] == 0
    assert sol.front.U[0] == pytest.approx(U210, rel=1e-12)
    assert sol.reason == "t_end" and sol.T_reached == pytest.approx(0.05 * R0)
    for row in sol.front.rows(pg2):
        assert row[7] > 0 and row[8] > 0    # both Lax margins along the whole span
    rep = validate_solution(pg2, sph, sol)
    assert rep.passed, {k: v for k, v in rep.checks.items() if not v}
    # front strictly right of the leading characteristic
    assert np.all(sol.front.r[1:] > np.asarray(sol.c1_curve.dense(sol.front.t[1:])).reshape(-1))


def test_reversed_or_incompatible_jump_rejected(pg2, sph):
    left, right = jump_210(pg2)
    with pytest.raises(CompatibilityError):
        build_shock_wave(pg2, sph, right, left, 1.0, 0.05, numerics=SMALL)
    # right ordering but the wrong velocity: no jump connects these states
    with pytest.raises(CompatibilityError):
        build_shock_wave(pg2, sph, constant_data(pg2, 2.0, 1.0), right, 1.0, 0.05, numerics=SMALL)
    with pytest.raises(DomainError):
        build_shock_wave(pg2, sph, left, right, 1.0, 0.05, numerics={"rowz": 3})


def test_tampered_front_is_flagged(pg2, sph):
    sol = build_shock_wave(pg2, sph, *jump_210(pg2), 1.0, 0.05, numerics=SMALL)
    sol.front.U[10:13] += 1e-3
    rep = validate_solution(pg2, sph, sol)
    assert not rep.passed
    assert rep.flagged["front RH residual"] == [10, 11, 12]


def test_coarsened_runs_converge(pg2, sph):
    pos = []
    for rows in (50, 100, 200):
        sol = build_shock_wave(pg2, sph, *jump_210(pg2), 1.0, 0.1,
                               numerics={"rows": rows, "nr": 4 * rows, "nt": 2 * rows}, with_bound=False)
        pos.append(np.interp(0.05, sol.front.t, sol.front.r))
    assert abs(pos[0] - pos[1]) / abs(pos[1] - pos[2]) >= 2.5


def test_check_hypotheses_examples(pg2, sph):
    left, right = jump_210(pg2)
    rep = check_hypotheses(pg2, sph, left, right, 1.0)
    assert not rep.checks["min w1- > 0"]
    assert rep.margins["min w1- > 0"] == pytest.approx(math.sqrt(1.5) - 4)
    assert 0 < rep.where["min w1- > 0"] <= 1.0
    H = float(pg2.enthalpy(1.2))
    rep = check_hypotheses(pg2, sph, constant_data(pg2, 1.2, H + 0.5), right, 1.0)
    assert rep.checks["min w1- > 0"] and rep.margins["min w1- > 0"] == pytest.approx(0.5)


def test_gradient_constant_in_planar_case(pg2):
    cfg = SymmetryConfig(1)
    left = lambda r: (0.5 + 0.1 * np.asarray(r), 6.0 - 0.2 * np.asarray(r))
    rep = check_hypotheses(pg2, cfg, left, constant_data(pg2, 1.0, 0.0), 1.0)
    assert rep.C0 == pytest.approx(0.2 * 1.0, rel=1e-6)
    assert rep.checks["|dr w2-| <= C0/r"]
    with pytest.raises(HypothesisViolated):
        existence_bound(pg2, cfg, left, constant_data(pg2, 1.0, 0.0), 1.0, 1.0, require_hypotheses=False)


def test_density_gap_term(pg2, sph):
    left = lambda r: (np.full(np.shape(r), 3.0), np.full(np.shape(r), 10.0))
    right = lambda r: (np.full(np.shape(r), 0.5), np.full(np.shape(r), 1.0))
    _, ledger = existence_bound(pg2, sph, left, right, 1.0, 10.0, require_hypotheses=False)
    assert ledger.terms["density_gap"][0] == pytest.approx(4 / 3, rel=1e-12)
    assert not math.isfinite(ledger.terms["c0_positivity"][0])
    json.dumps(ledger.to_json())


def test_positivity_term_active_for_negative_right_w1(pg2, sph):
    left, right = wind_specs(pg2, sph)
    T, ledger = existence_bound(pg2, sph, left.at_radius(1.0), right.at_radius(1.0), 1.0, 1.0,
                                left_range=(0.85, 1.0))
    W = float(left.at_radius(1.0)(np.array([1.0]))[0][0])
    m1 = -2 * math.sqrt(2)
    assert ledger.terms["c0_positivity"][0] == pytest.approx(2 * (1 / abs(m1) - 1 / W), rel=1e-12)
    assert T == min(v for v, _ in ledger.terms.values())


def test_bound_is_linear_in_radius(pg2, sph):
    left, right = wind_specs(pg2, sph)
    out = []
    for R0 in (1.0, 2.0, 4.0):
        T, ledger = existence_bound(pg2, sph, left.at_radius(R0), right.at_radius(R0), R0, 1e3 * R0,
                                    left_range=(0.85 * R0, R0))
        out.append((T, ledger))
    for (a, la), (b, lb) in zip(out, out[1:]):
        assert b == pytest.approx(2 * a, rel=1e-12)
        assert la.governing == lb.governing


def test_wind_run_breaks_down_in_the_left_field(pg2, sph):
    left, right = wind_specs(pg2, sph)
    num = dict(WIND_NUMERICS, rows=100, nr=400, nt=200)
    sol = build_shock_wave(pg2, sph, left.at_radius(1.0), right.at_radius(1.0), 1.0, 0.02, numerics=num)
    assert sol.reason == "left_blowup"
    assert sol.T_reached >= sol.T_bound > 0
    assert sol.hypotheses.passed
    rep = validate_solution(pg2, sph, sol)
    assert rep.passed, {k: v for k, v in rep.checks.items() if not v}
    with pytest.raises(BlowupDetected) as ei:
        build_shock_wave(pg2, sph, left.at_radius(1.0), right.at_radius(1.0), 1.0, 0.02, numerics=num,
                         raise_on_stop=True, with_bound=False)
    assert ei.value.solution.reason == "left_blowup"


def test_mesh_backends_agree(pg2, sph, monkeypatch):
    if _kernels.march_mesh_numba is None:
        pytest.skip("numba disabled")
    left, right = jump_210(pg2)
    a = build_shock_wave(pg2, sph, left, right, 1.0, 0.05, numerics=SMALL, with_bound=False)
    monkeypatch.setattr(_kernels, "march_mesh", _kernels.march_mesh_python)
    b = build_shock_wave(pg2, sph, left, right, 1.0, 0.05, numerics=SMALL, with_bound=False)
    assert np.allclose(a.front.r, b.front.r, rtol=1e-12) and np.allclose(a.front.U, b.front.U, rtol=1e-12)
    assert a.reason == b.reason
