"""Gradient variables, Riccati coefficients and C1 existence horizons.

The transformed gradients ``v1 = e^h (dr w1 + Phi)`` and
``v2 = e^k (dr w2 + Psi)`` obey scalar Riccati equations along the 1- and
2-characteristics.  Coefficients are assembled from the general expressions
(partials of f, lambda, h and Phi in the Riemann invariants) using
``h = k = log(H')/2`` and the auxiliary functions g, A, B.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import lambertw

from .errors import DomainError, HorizonExceeded, PathTooShort, SingularParameter
from .eos import PerfectGas, PSystem, VanDerWaals

NU_GUARD = 1e-6


@dataclass
class GradientVars:
    v1: object
    v2: object
    h: object
    k: object
    Phi: object
    Psi: object


@dataclass
class CoefficientSet:
    a0: object
    a1: object
    a2: object
    b0: object
    b1: object
    b2: object
    ell: int
    abar1: object  # r * a1 (plus ell * lambda1); independent of r
    abar2: object  # r**2 * a2 of the unscaled equation
    bbar1: object
    bbar2: object


@dataclass
class BoundConstants:
    A0: float
    A1: float
    A2: float
    B0: float
    B1: float
    B2: float
    Ka: float
    Kb: float
    theta_plus: float = None
    xi_plus: float = None
    min_X1: float = None
    min_X2: float = None
    interval: tuple = None


# ------------------------------------------------------------------ state helpers

def _state(model, w):
    w1 = np.asarray(w[0], float)
    w2 = np.asarray(w[1], float)
    gap = 0.5 * (w2 - w1)
    if np.any(~(gap > 0)):
        raise DomainError("need w2 > w1")
    rho = model.enthalpy_inverse(gap)
    u = 0.5 * (w1 + w2)
    c = model.sound_speed(rho)
    return rho, u, c, c / rho, model.fundamental_derivative(rho)


def _check_r(r):
    r = np.asarray(r, float)
    if np.any(~(r > 0)):
        raise DomainError("need r > 0")
    return r


# ------------------------------------------------------------------ g, A, B

def aux_gAB(model, rho):
    """Closed-form (g, A, B) for the supported gas laws.

    For the perfect gas and p-system ``g = (nu-1)/(2-nu)`` and
    ``B = nu H / ((2-nu)(4-nu))``.  For Van der Waals with
    ``X = b rho / (1 - b rho)``::

        g = (nu-1) / ((2-nu)(1+X))
        B = H/(1+X) * (nu/((2-nu)(4-nu)) + X/(2+nu))

    Both satisfy the defining ODEs exactly (the leading ``nu`` in B is
    required for that).
    """
    if not isinstance(model, (PerfectGas, VanDerWaals, PSystem)):
        raise DomainError(f"no closed form for {type(model).__name__}")
    nu = model.nu
    if abs(nu - 2.0) < NU_GUARD or abs(nu - 4.0) < NU_GUARD:
        raise SingularParameter(f"closed forms singular at nu={nu:g}")
    rho = model._check(rho)
    H = model.enthalpy(rho)
    b = model.params[2]
    X = b * rho / (1.0 - b * rho)
    g = (nu - 1.0) / ((2.0 - nu) * (1.0 + X))
    B = H / (1.0 + X) * (nu / ((2.0 - nu) * (4.0 - nu)) + X / (2.0 + nu))
    return g, 1.0 + g, B


def gab_by_quadrature(model, rho, rho_ref, g_ref, B_ref, rtol=1e-12, atol=1e-14):
    """Integrate the defining ODEs for (g, B) from ``rho_ref`` to ``rho``.

    Uses the products ``G = 2 sqrt(H') g`` and ``P = 2 sqrt(H') B``, whose
    derivatives are ``sqrt(H')/rho`` and ``H' sqrt(H') (1 + 2g)``.
    """
    rho = float(rho)
    model._check(np.array([rho, rho_ref]))
    s_ref = 2.0 * math.sqrt(float(model.dH(rho_ref)))

    def rhs(x, y):
        dh = float(model.dH(x))
        sq = math.sqrt(dh)
        g = y[0] / (2.0 * sq)
        return [sq / x, dh * sq * (1.0 + 2.0 * g)]

    if rho == rho_ref:
        return g_ref, 1.0 + g_ref, B_ref
    sol = solve_ivp(rhs, (rho_ref, rho), [s_ref * g_ref, s_ref * B_ref], method="DOP853",
                    rtol=rtol, atol=atol)
    s = 2.0 * math.sqrt(float(model.dH(rho)))
    g = sol.y[0, -1] / s
    return g, 1.0 + g, sol.y[1, -1] / s


def _gab_rho_derivs(rho, c, G, g, B):
    """d/drho of A (= g) and of B from the defining ODEs."""
    dA = (1.0 - g * (G - 2.0)) / (2.0 * rho)
    dB = (c * (1.0 + 2.0 * g) - B * (G - 2.0)) / (2.0 * rho)
    return dA, dB


# ------------------------------------------------------------------ Phi, Psi, v

def phi_psi(model, cfg, r, w):
    """Shifts ``Phi = (d-1)(uA - B)/r`` and ``Psi = (d-1)(uA + B)/r``."""
    r = _check_r(r)
    rho, u, *_ = _state(model, w)
    g, A, B = aux_gAB(model, rho)
    k = (cfg.d - 1) / r
    return k * (u * A - B), k * (u * A + B)


def v_transform(model, cfg, r, w, dw):
    rho, *_rest = _state(model, w)
    h = 0.5 * np.log(model.dH(rho))
    Phi, Psi = phi_psi(model, cfg, r, w)
    e = np.exp(h)
    return GradientVars(e * (np.asarray(dw[0], float) + Phi), e * (np.asarray(dw[1], float) + Psi),
                        h, h, Phi, Psi)


def v_inverse(model, cfg, r, w, v):
    """Recover ``(dr w1, dr w2)`` from ``(v1, v2)``."""
    rho, *_rest = _state(model, w)
    e = np.sqrt(model.dH(rho))
    Phi, Psi = phi_psi(model, cfg, r, w)
    return np.asarray(v[0], float) / e - Phi, np.asarray(v[1], float) / e - Psi


# ------------------------------------------------------------------ coefficients

def coefficients(model, cfg, r, w, ell=0):
    """Riccati coefficients of the (optionally ``r**ell``-scaled) gradient equations."""
    if cfg.d < 2:
        raise DomainError("gradient equations need d >= 2")
    if int(ell) != ell or ell < 0:
        raise DomainError("ell must be a nonnegative integer")
    r = _check_r(r)
    rho, u, c, dH, G = _state(model, w)
    g, A, B = aux_gAB(model, rho)
    dA, dB = _gab_rho_derivs(rho, c, G, g, B)
    m = cfg.d - 1.0
    sq = np.sqrt(dH)
    f = m * u * c / r
    d1f = m / (2 * r) * (c - u * (G - 1.0))
    d2f = m / (2 * r) * (c + u * (G - 1.0))
    dh_diff = (2.0 - G) / (2.0 * c)  # d1 h - d2 h (same for k)
    Phi = m * (u * A - B) / r
    Psi = m * (u * A + B) / r
    dPhi_diff = -m * (u * dA - dB) / (r * dH)  # d1 Phi - d2 Phi
    dPsi_diff = -m * (u * dA + dB) / (r * dH)
    l1, l2 = u - c, u + c
    half = 0.5 * G  # d1 lambda1 = d2 lambda2

    a0 = -half / sq
    a1 = d1f + 2 * Phi * half + dh_diff * f
    a2 = sq * (-f / r - Phi * d1f - Phi**2 * half + dPhi_diff * f - l1 * Phi / r)
    b1 = -d2f + 2 * half * Psi + dh_diff * f
    b2 = sq * (f / r + d2f * Psi - half * Psi**2 - l2 * Psi / r + dPsi_diff * f)
    abar2, bbar2 = r**2 * a2, r**2 * b2
    if ell:
        a0, b0 = a0 / r**ell, a0 / r**ell
        a1, b1 = a1 + ell * l1 / r, b1 + ell * l2 / r
        a2, b2 = a2 * r**ell, b2 * r**ell
    else:
        b0 = a0
    return CoefficientSet(a0, a1, a2, b0, b1, b2, int(ell), r * a1, abar2, r * b1, bbar2)


def coefficient_rows(model, cfg, r, w1, w2):
    """Rows ``r,w1,w2,a0,a1,a2,b0,b1,b2`` for a diagnostic sweep."""
    r, w1, w2 = np.broadcast_arrays(np.asarray(r, float), np.asarray(w1, float), np.asarray(w2, float))
    cs = coefficients(model, cfg, r, (w1, w2))
    cols = [r, w1, w2, cs.a0, cs.a1, cs.a2, cs.b0, cs.b1, cs.b2]
    return np.column_stack([np.broadcast_to(x, r.shape).ravel() for x in cols])


def lemma_closed_forms(model, cfg, r, w):
    """Expanded a1/b1 forms from the coefficient derivation (should match :func:`coefficients`)."""
    r = _check_r(r)
    rho, u, c, dH, G = _state(model, w)
    g, A, B = aux_gAB(model, rho)
    m = cfg.d - 1.0
    a1 = m / r * (0.5 * c - B * G + 0.5 * u * (3.0 + 2.0 * G * g))
    b1 = m / (2 * r) * (u * (2 * G * (A - 1.0) + 3.0) + 2 * G * B - c)
    return {"a0": -G / (2.0 * np.sqrt(dH)), "a1": a1, "b1": b1}


def appendix_b_deltas(model, cfg, r, w):
    """Closed forms as printed in the appendix, next to the assembled values.

    Returns ``{name: (assembled, printed, printed - assembled)}``.  Known
    disagreements are reported, never asserted.
    """
    r = _check_r(r)
    rho, u, c, dH, G = _state(model, w)
    nu = model.nu
    H = model.enthalpy(rho)
    m = cfg.d - 1.0
    cs = coefficients(model, cfg, r, w)
    out = {}

    def put(name, mine, printed):
        out[name] = (mine, printed, printed - mine)

    a0_printed = -nu / (2 * (nu - 1) ** 0.5 * (2 * nu + 2) ** ((nu - 1) / 2)) * H ** (nu - 1)
    put("a0", cs.a0, a0_printed)
    g, A, B = aux_gAB(model, rho)
    sq = np.sqrt(dH)
    if cfg.d == 3:
        quad = -u**2 * (G * A**2 - 2 * A * (G - 2) + G - 1) - G * B**2
        put("a2_expanded", cs.a2, 2 * sq / r**2 * (quad + u * (2 * (A - 1) * (G * B + c) + 4 * B)))
        put("b2_expanded", cs.b2, 2 * sq / r**2 * (quad + u * (2 * B * (G - 2 - G * A) - 2 * c * (A - 1))))
    elif cfg.d == 2:
        put("a2_expanded", cs.a2, sq / (2 * r**2) * (-G * (u * (A - 1 + 2.5 / G) - B) ** 2
                                                      - 6.25 * u**2 * (0.64 - 1 / G) + 3 * u * c * (A - 1)))
    if isinstance(model, VanDerWaals):
        gamma0, b = model.gamma0, model.b
        bt = b * ((gamma0 - 1) / (4 * gamma0)) ** (1 / (gamma0 - 1))
        X = bt * H ** (nu - 1)
        put("g", g, (nu - 1) / ((2 - nu) * (1 + X)))
        put("B", B, H / ((2 - nu) * (4 - nu) * (1 + X)) * (1 + (2 - nu) * (4 - nu) / (2 + nu) * X))
        return out
    a1_printed = m / ((2 - nu) * r) * (3 * u + 2 * (4 - 3 * nu) * H / ((nu - 1) * (4 - nu)))
    inner = (-2 * u**2 / (2 - nu) - 8 * u * H / ((2 - nu) * (4 - nu))
             + (nu * H**2 / ((nu - 1) * (4 - nu)) - nu**3 / ((nu - 1) * (2 - nu) * (4 - nu) ** 2)) * H**2)
    a2_printed = m / ((2 - nu) * r**2) * (-u**2 + 4 * u * H / (4 - nu) - nu * H**2 / ((nu - 1) * (4 - nu))
                                          + m / 2 * inner)
    put("a1", cs.a1, a1_printed)
    put("a2", cs.a2, a2_printed)
    put("g", g, (nu - 1) / (2 - nu))
    put("B", B, nu / ((2 - nu) * (4 - nu)) * H)
    return out


# ------------------------------------------------------------------ Q(x) = x e^x

def q_eval(x):
    return x * np.exp(x)


def q_inverse(y):
    """Positive root of ``x e^x = y`` (principal Lambert W plus one Newton step)."""
    y = np.asarray(y, float)
    if np.any(~(y > 0)):
        raise DomainError("Q^-1 needs y > 0")
    x = np.real(lambertw(y))
    # polish: Newton on x e^x - y
    ex = np.exp(x)
    x = x - (x * ex - y) / (ex * (1.0 + x))
    return x[()] if x.ndim == 0 else x


def x_of(z0, z1, z2):
    if not (z0 > 0 and z1 > 0 and z2 > 0):
        raise DomainError("x(z0, z1, z2) needs positive arguments")
    return float(q_inverse(z1 / math.sqrt(z0 * z2)))


# ------------------------------------------------------------------ sampling along paths

def _path_values(path, ts):
    rs = np.asarray(path.dense(ts), float).reshape(-1) if path.dense is not None else \
        np.interp(ts, path.t, path.r)
    if path.source is not None:
        vals = np.array([path.source(a, b) for a, b in zip(ts, rs)], float).reshape(-1, 2)
        return rs, vals[:, 0], vals[:, 1]
    return rs, np.interp(ts, path.t, path.w1), np.interp(ts, path.t, path.w2)


def _cumtrapz(y, t):
    return np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (y[1:] + y[:-1]))])


def _coeff_along(model, cfg, path, ts, which, ell):
    rs, w1, w2 = _path_values(path, ts)
    cs = coefficients(model, cfg, rs, (w1, w2), ell=ell)
    if which == 1:
        return rs, cs.a0, cs.a1, cs.a2, cs.abar1, cs.abar2
    return rs, cs.b0, cs.b1, cs.b2, cs.bbar1, cs.bbar2


def _refined_max(fn, ts, vals, refine):
    """Max of |vals| with local resampling around the current argmax."""
    best = float(np.max(np.abs(vals)))
    if len(ts) < 3:
        return best
    for _ in range(refine):
        i = int(np.argmax(np.abs(vals)))
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
        ts = np.linspace(lo, hi, 33)
        vals = fn(ts)
        best = max(best, float(np.max(np.abs(vals))))
    return best


def bound_constants(model, cfg, path_pair, interval, n=256, refine=3, ell=0, v_init=None):
    """Suprema A_i/B_i and integral constants K_a/K_b along a pair of paths.

    ``path_pair = (X1, X2)`` are family-1 and family-2 paths covering
    ``interval = (alpha, theta)``.  With ``v_init = (v1, v2)`` the negative
    case constants Theta_+ and Xi_+ are filled in too.
    """
    alpha, theta = map(float, interval)
    if not theta > alpha:
        raise PathTooShort("empty interval")
    res = {}
    for which, path in zip((1, 2), path_pair):
        t_lo, t_hi = min(path.t[0], path.t[-1]), max(path.t[0], path.t[-1])
        if alpha < t_lo - 1e-12 or theta > t_hi + 1e-12:
            raise PathTooShort(f"family-{which} path covers [{t_lo:g}, {t_hi:g}], need [{alpha:g}, {theta:g}]")
        ts = np.linspace(alpha, theta, max(n, 2))
        rs, c0, c1, c2, cb1, cb2 = _coeff_along(model, cfg, path, ts, which, ell)

        def pick(k):
            return lambda s: _coeff_along(model, cfg, path, s, which, ell)[k]

        M0 = _refined_max(pick(1), ts, c0, refine)
        M1 = _refined_max(pick(4), ts, cb1, refine)
        M2 = _refined_max(pick(5), ts, cb2, refine)
        K = float(np.trapezoid(np.abs(c2), ts) * math.exp(np.trapezoid(np.abs(c1), ts)))
        res[which] = (M0, M1, M2, K, float(np.min(rs)))
    (A0, A1, A2, Ka, mx1), (B0, B1, B2, Kb, mx2) = res[1], res[2]
    bc = BoundConstants(A0, A1, A2, B0, B1, B2, Ka, Kb, min_X1=mx1, min_X2=mx2, interval=(alpha, theta))
    if v_init is not None:
        bc.theta_plus = _theta_plus(A0, A1, A2, abs(v_init[0]), mx1)
        bc.xi_plus = _theta_plus(B0, B1, B2, abs(v_init[1]), mx2)
    return bc


def _theta_plus(z0, z1, z2, v_abs, min_x):
    return z1 / math.sqrt(z0 * z2) / (1.0 + math.sqrt(z0 / z2) * v_abs * min_x)


def _triple(consts, which):
    if which == 1:
        return consts.A0, consts.A1, consts.A2
    if which == 2:
        return consts.B0, consts.B1, consts.B2
    raise DomainError("which must be 1 or 2")


def c1_horizon_pos(consts, min_X, alpha, which):
    """``alpha + min_X x(A0, A1, A2) / A1``; unbounded when A0 or A2 vanishes."""
    z0, z1, z2 = _triple(consts, which)
    if z1 <= 0 or z0 < 0 or z2 < 0 or min_X <= 0:
        raise DomainError("horizon needs A1 > 0, A0, A2 >= 0 and min_X > 0")
    if z0 == 0 or z2 == 0:
        return math.inf
    return alpha + min_X * x_of(z0, z1, z2) / z1


def c1_horizon_neg(consts, v_init, min_X, alpha, which):
    """Horizon for a nonpositive starting value ``v_init``."""
    if v_init > 0:
        raise DomainError("negative-case horizon needs v_init <= 0")
    z0, z1, z2 = _triple(consts, which)
    if z1 <= 0 or z0 < 0 or z2 < 0 or min_X <= 0:
        raise DomainError("horizon needs A1 > 0, A0, A2 >= 0 and min_X > 0")
    if z0 == 0:
        return math.inf
    if z2 == 0:
        # Theta_+ limit with A2 -> 0: the quadratic in Theta becomes linear
        return alpha + min_X / z1 * float(q_inverse(z1 / (z0 * abs(v_init) * min_X))) if v_init else math.inf
    return alpha + min_X / z1 * float(q_inverse(_theta_plus(z0, z1, z2, abs(v_init), min_X)))


# ------------------------------------------------------------------ envelopes

@dataclass
class VEnvelope:
    t: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    weight: np.ndarray  # exp(int a1); bounds above already include it
    K: np.ndarray
    I0: np.ndarray
    sign_case: str

    def contains(self, t, v, slack=0.0):
        lo = np.interp(t, self.t, self.lower)
        hi = np.interp(t, self.t, self.upper)
        return bool(np.all((v >= lo - slack) & (v <= hi + slack)))


def envelope_from_coefficients(t, a0, a1, a2, v_init, sign_case=None):
    """Bounds on y with y' = a0 y^2 + a1 y + a2 (a0 <= 0), y(t[0]) = v_init.

    The estimates hold for ``y exp(-int a1)``; the returned bounds are
    multiplied back by the weight.
    """
    t = np.asarray(t, float)
    a0, a1, a2 = (np.broadcast_to(np.asarray(x, float), t.shape) for x in (a0, a1, a2))
    if np.any(a0 > 1e-14):
        raise DomainError("envelopes need a0 <= 0")
    case = sign_case or ("positive" if v_init >= 0 else "negative")
    if case not in ("positive", "negative"):
        raise DomainError("sign_case must be 'positive' or 'negative'")
    if case == "positive" and v_init < 0 or case == "negative" and v_init > 0:
        raise DomainError(f"v_init={v_init:g} does not match sign case {case}")
    abs1 = _cumtrapz(np.abs(a1), t)
    K = _cumtrapz(np.abs(a2), t) * np.exp(abs1)
    I0 = _cumtrapz(np.abs(a0) * np.exp(abs1), t)
    weight = np.exp(_cumtrapz(a1, t))
    start = K if case == "positive" else abs(v_init) + K
    denom = 1.0 - start * I0
    if np.any(denom <= 0):
        bad = int(np.argmax(denom <= 0))
        raise HorizonExceeded(f"envelope denominator vanishes at t={t[bad]:.6g}")
    lower = -start / denom * weight
    upper = (v_init + K) * weight
    return VEnvelope(t, lower, upper, weight, K, I0, case)


def v_envelope(model, cfg, v_init, path, which, sign_case=None, ell=0, interval=None, n=512):
    """Envelope for ``v_which`` (or ``r**ell v_which``) along ``path``.

    ``v_init`` is the value at the start of the interval, in the same
    scaling as ``ell``.
    """
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    alpha, theta = interval if interval is not None else (path.t[0], path.t[-1])
    if theta <= alpha:
        raise PathTooShort("empty interval")
    ts = np.linspace(alpha, theta, n)
    _, c0, c1, c2, _, _ = _coeff_along(model, cfg, path, ts, which, ell)
    return envelope_from_coefficients(ts, c0, c1, c2, v_init, sign_case)
