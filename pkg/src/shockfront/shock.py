"""Jump algebra for a single 2-shock: Rankine-Hugoniot, Lax and the boundary map g."""
from dataclasses import dataclass, field
import warnings

import numpy as np

from . import _core
from .errors import ConvergenceError, DegenerateJumpWarning, DegenerateShock, DomainError, OutOfValidity
from .riemann import RiemannState, from_riemann, lambdas, source_f, to_riemann

DEGENERATE_DRHO = 1e-10


@dataclass
class ShockJump:
    w_minus: RiemannState
    w_plus: RiemannState
    U: float
    j: float
    rho_minus: float
    rho_plus: float
    degenerate: bool = False


@dataclass
class LaxReport:
    passed: bool
    checks: dict
    margins: dict
    rh_mass: float
    rh_momentum: float
    rh_scaled: tuple = field(default=(0.0, 0.0))


def hugoniot_F(model, rho, rho_plus):
    rho = np.asarray(rho, float)
    rho_plus = np.asarray(rho_plus, float)
    if np.any(rho < rho_plus):
        raise DomainError("Hugoniot function defined for rho >= rho_plus only")
    return (model.pressure(rho) - model.pressure(rho_plus)) * (1.0 / rho_plus - 1.0 / rho)


def downstream_state(model, rho_minus, rho_plus, u_plus):
    """Inner state and speed of the 2-shock running into ``(rho_plus, u_plus)``."""
    rm = float(rho_minus)
    rp = float(rho_plus)
    up = float(u_plus)
    if not rm >= rp - DEGENERATE_DRHO:
        raise DomainError("a 2-shock needs rho_minus > rho_plus")
    wp = to_riemann(model, (rp, up))
    if abs(rm - rp) < DEGENERATE_DRHO:
        warnings.warn("degenerate jump: returning the continuous state", DegenerateJumpWarning, stacklevel=2)
        U = up + float(model.sound_speed(rp))
        return ShockJump(wp, wp, U, rp * (U - up), rp, rp, degenerate=True)
    sq = float(np.sqrt(hugoniot_F(model, rm, rp)))
    um = up + sq
    # equivalent to (rp up - rm um) / (rp - rm) without the cancellation
    U = up + rm * sq / (rm - rp)
    wm = to_riemann(model, (rm, um))
    return ShockJump(RiemannState(float(wm[0]), float(wm[1])), RiemannState(float(wp[0]), float(wp[1])),
                     U, rp * (U - up), rm, rp)


def jump_from_states(model, w_minus, w_plus):
    """Rebuild a jump record from both Riemann states, taking U from the mass balance."""
    rm, um = (float(x) for x in from_riemann(model, w_minus))
    rp, up = (float(x) for x in from_riemann(model, w_plus))
    if abs(rm - rp) < DEGENERATE_DRHO:
        U = up + float(model.sound_speed(rp))
        return ShockJump(RiemannState(*map(float, w_minus)), RiemannState(*map(float, w_plus)),
                         U, rp * (U - up), rm, rp, degenerate=True)
    U = (rp * up - rm * um) / (rp - rm)
    return ShockJump(RiemannState(*map(float, w_minus)), RiemannState(*map(float, w_plus)), U, rp * (U - up), rm, rp)


def rh_residuals(model, jump):
    """Raw and scaled residuals of mass and momentum balance across the front."""
    rm, rp = jump.rho_minus, jump.rho_plus
    um = 0.5 * (jump.w_minus[0] + jump.w_minus[1])
    up = 0.5 * (jump.w_plus[0] + jump.w_plus[1])
    pm, pp = float(model.pressure(rm)), float(model.pressure(rp))
    U = jump.U
    mass = -U * (rm - rp) + (rm * um - rp * up)
    mom = -U * (rm * um - rp * up) + (rm * um * um + pm - rp * up * up - pp)
    vel = max(abs(U), abs(um), abs(up), float(model.sound_speed(rm)), 1e-300)
    s_mass = max(rm, rp) * vel
    s_mom = max(rm, rp) * vel * vel + max(pm, pp)
    return mass, mom, abs(mass) / s_mass, abs(mom) / s_mom


def lax_check(model, jump, rh_tol=1e-10):
    rm, rp = jump.rho_minus, jump.rho_plus
    um = 0.5 * (jump.w_minus[0] + jump.w_minus[1])
    up = 0.5 * (jump.w_plus[0] + jump.w_plus[1])
    l1m, l2m = (float(x) for x in lambdas(model, jump.w_minus))
    _, l2p = (float(x) for x in lambdas(model, jump.w_plus))
    U = jump.U
    margins = {
        "rho": rm - rp,
        "p": float(model.pressure(rm) - model.pressure(rp)),
        "u": um - up,
        "lax1": U - l1m,
        "lax2": l2m - U,
        "lax3": U - l2p,
    }
    scale = max(abs(U), abs(l2m), 1.0)
    checks = {k: v > 0 for k, v in margins.items() if k != "lax3"}
    checks["lax3"] = margins["lax3"] >= -1e-12 * scale
    mass, mom, s_mass, s_mom = rh_residuals(model, jump)
    checks["rh"] = s_mass <= rh_tol and s_mom <= rh_tol
    return LaxReport(all(checks.values()), checks, margins, mass, mom, (s_mass, s_mom))


def _scale(w_plus):
    up = 0.5 * (w_plus[0] + w_plus[1])
    hp = 0.5 * (w_plus[1] - w_plus[0])
    return max(1.0, abs(up), hp)


def compatibility(model, w_minus, w_plus):
    """u- - u+ - sqrt(F(rho-, rho+)), the function whose zero set defines g."""
    return float(_core.compat(*model.params, float(w_minus[0]), float(w_minus[1]),
                              float(w_plus[0]), float(w_plus[1])))


def solve_g(model, w2_minus, w_plus):
    """w1- on the compatibility manifold for given w2- and outer state."""
    w1p, w2p = float(w_plus[0]), float(w_plus[1])
    w2m = float(w2_minus)
    scale = _scale(w_plus)
    if w2m <= w2p:
        if w2p - w2m <= 1e-12 * scale:
            warnings.warn("zero-strength jump (w2- == w2+): g = w1+", DegenerateJumpWarning, stacklevel=2)
            return w1p
        raise OutOfValidity(f"w2- = {w2m} must exceed w2+ = {w2p}")
    x, status = _core.c_solve_g(*model.params, w2m, w1p, w2p, 1e-12 * scale)
    if status == 1:
        warnings.warn("zero-strength jump (w2- == w2+): g = w1+", DegenerateJumpWarning, stacklevel=2)
    elif status != 0:
        raise ConvergenceError("solve_g failed to close its bracket")
    return float(x)


def dF_partials(model, w_minus, w_plus):
    """Analytic partials of the compatibility function; signs are (+, -, -, +)."""
    rm = float(from_riemann(model, w_minus)[0])
    rp = float(from_riemann(model, w_plus)[0])
    if not rm > rp * (1 + 1e-14):
        raise DomainError("partials need rho- > rho+ (they contain 1/sqrt(F))")
    F = float(hugoniot_F(model, rm, rp))
    dp = float(model.pressure(rm) - model.pressure(rp))
    x = 1.0 / rp - 1.0 / rm
    zm = rm * float(model.sound_speed(rm))
    zp = rp * float(model.sound_speed(rp))
    k = 1.0 / (4.0 * np.sqrt(F))
    a, b = np.sqrt(zm * x), np.sqrt(dp / zm)
    c, e = np.sqrt(zp * x), np.sqrt(dp / zp)
    return (k * (a + b) ** 2, -k * (a - b) ** 2, -k * (c + e) ** 2, k * (c - e) ** 2)


def g_partials(model, w_minus, w_plus):
    """(dg/dw2-, dg/dw1+, dg/dw2+) by the implicit function theorem."""
    d1m, d2m, d1p, d2p = dF_partials(model, w_minus, w_plus)
    return -d2m / d1m, -d1p / d1m, -d2p / d1m


def shock_boundary_gradient(model, cfg, jump, r, grads_plus, dr_w2_minus):
    """Radial derivative of w1- on the front implied by the compatibility condition."""
    l1m, l2m = (float(x) for x in lambdas(model, jump.w_minus))
    l1p, l2p = (float(x) for x in lambdas(model, jump.w_plus))
    U = jump.U
    if U - l1m < 1e-10:
        raise DegenerateShock("U - lambda1- below 1e-10")
    g2m, g1p, g2p = g_partials(model, jump.w_minus, jump.w_plus)
    fm = float(source_f(model, cfg, r, jump.w_minus))
    fp = float(source_f(model, cfg, r, jump.w_plus))
    num = ((U - l2m) * g2m * dr_w2_minus - (g2m + 1.0) * fm
           + (U - l1p) * g1p * grads_plus[0] + (U - l2p) * g2p * grads_plus[1]
           + (g1p - g2p) * fp)
    return num / (U - l1m)
