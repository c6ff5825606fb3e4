"""Scalar formulas shared by the vectorized API and the compiled kernels.

Every gas law here is described by three floats ``(kappa, gamma, b)``:

    s = rho / (1 - b rho)
    p = kappa**2 / gamma * s**gamma
    c = kappa * s**((gamma - 1) / 2) / (1 - b rho)
    H = 2 kappa / (gamma - 1) * s**((gamma - 1) / 2)

Perfect gas is ``(sqrt(g0 (g0 - 1)), g0, 0)``, Van der Waals adds the
covolume ``b`` and the p-system is ``(sqrt(gamma), gamma, 0)``.
The functions only use arithmetic and ``np`` ufuncs so they accept either
scalars (inside numba) or arrays (from :mod:`shockfront.eos`).
"""
import numpy as np

from ._accel import jit


def pressure(kappa, gamma, b, rho):
    s = rho / (1.0 - b * rho)
    return kappa * kappa / gamma * s**gamma


def sound_speed(kappa, gamma, b, rho):
    s = rho / (1.0 - b * rho)
    return kappa * s ** (0.5 * (gamma - 1.0)) / (1.0 - b * rho)


def enthalpy(kappa, gamma, b, rho):
    s = rho / (1.0 - b * rho)
    return 2.0 * kappa / (gamma - 1.0) * s ** (0.5 * (gamma - 1.0))


def enthalpy_inverse(kappa, gamma, b, h):
    s = (0.5 * (gamma - 1.0) * h / kappa) ** (2.0 / (gamma - 1.0))
    return s / (1.0 + b * s)


def fundamental(kappa, gamma, b, rho):
    return 0.5 * (gamma + 1.0) / (1.0 - b * rho)


c_pressure = jit(pressure)
c_sound_speed = jit(sound_speed)
c_enthalpy = jit(enthalpy)
c_enthalpy_inverse = jit(enthalpy_inverse)
c_fundamental = jit(fundamental)


def hugoniot(kappa, gamma, b, rho, rho_plus):
    dp = c_pressure(kappa, gamma, b, rho) - c_pressure(kappa, gamma, b, rho_plus)
    return dp * (1.0 / rho_plus - 1.0 / rho)


c_hugoniot = jit(hugoniot)


def compat(kappa, gamma, b, w1m, w2m, w1p, w2p):
    """Compatibility function u- - u+ - sqrt(F(rho-, rho+)); NaN outside rho- >= rho+."""
    rm = c_enthalpy_inverse(kappa, gamma, b, 0.5 * (w2m - w1m))
    rp = c_enthalpy_inverse(kappa, gamma, b, 0.5 * (w2p - w1p))
    f = c_hugoniot(kappa, gamma, b, rm, rp)
    return 0.5 * (w1m + w2m) - 0.5 * (w1p + w2p) - np.sqrt(f)


def compat_dw1m(kappa, gamma, b, w1m, w2m, w1p, w2p):
    rm = c_enthalpy_inverse(kappa, gamma, b, 0.5 * (w2m - w1m))
    rp = c_enthalpy_inverse(kappa, gamma, b, 0.5 * (w2p - w1p))
    f = c_hugoniot(kappa, gamma, b, rm, rp)
    dp = c_pressure(kappa, gamma, b, rm) - c_pressure(kappa, gamma, b, rp)
    zc = rm * c_sound_speed(kappa, gamma, b, rm)
    x = 1.0 / rp - 1.0 / rm
    t = np.sqrt(zc * x) + np.sqrt(dp / zc)
    return t * t / (4.0 * np.sqrt(f))


c_compat = jit(compat)
c_compat_dw1m = jit(compat_dw1m)


def _solve_g(kappa, gamma, b, w2m, w1p, w2p, ftol):
    """Root of the compatibility function in w1- by bracketed Newton.

    Returns ``(w1m, status)`` with status 0 on success, 1 when the jump is
    degenerate (w2- == w2+) and 2 when the bracket could not be closed.
    """
    hi = w2m - w2p + w1p
    gap = w2m - w2p
    if gap <= 0.0:
        return w1p, 1
    # F(hi) = w2m - w2p > 0 and F decreases to -inf as w1- -> -inf
    step = max(gap, 1e-3 * (abs(w1p) + abs(w2p)) + 1e-12)
    lo = hi - step
    flo = c_compat(kappa, gamma, b, lo, w2m, w1p, w2p)
    n = 0
    while not flo < 0.0:
        step *= 2.0
        lo = hi - step
        flo = c_compat(kappa, gamma, b, lo, w2m, w1p, w2p)
        n += 1
        if n > 200:
            return lo, 2
    a = lo
    z = hi
    x = 0.5 * (a + z)
    for _ in range(200):
        fx = c_compat(kappa, gamma, b, x, w2m, w1p, w2p)
        if abs(fx) <= ftol:
            return x, 0
        if fx < 0.0:
            a = x
        else:
            z = x
        if z - a <= 4e-16 * max(abs(a), abs(z), 1.0):
            return x, 0
        d = c_compat_dw1m(kappa, gamma, b, x, w2m, w1p, w2p)
        xn = x - fx / d
        if not (a < xn < z):
            xn = 0.5 * (a + z)
        x = xn
    return x, 2


c_solve_g = jit(_solve_g)
