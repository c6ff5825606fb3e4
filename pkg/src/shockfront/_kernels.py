"""Hot loops of the characteristic solvers.

Each kernel exists twice: a scalar-loop version compiled by numba and a
vectorized numpy version used when acceleration is disabled.  The
benchmark in ``benchmarks/`` times one against the other.
"""
import math

import numpy as np

from . import _core
from ._accel import USE_NUMBA, jit

# status codes shared by both implementations
OK = 0
BLOWUP = 1
VACUUM = 2
SHRUNK = 3
GHOST = 4
CROSSING = 5


def _lagrange_weights(p):
    return (-(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0,
            p * (p - 2.0) * (p - 3.0) / 2.0,
            -p * (p - 1.0) * (p - 3.0) / 2.0,
            p * (p - 1.0) * (p - 2.0) / 6.0)


# ---------------------------------------------------------------- numba path

def _interp4(x0, h, lo, hi, w1, w2, xi):
    s = (xi - x0) / h
    i = int(math.floor(s)) - 1
    if i < lo:
        i = lo
    if i > hi - 3:
        i = hi - 3
    p = s - i
    l0 = -(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0
    l1 = p * (p - 2.0) * (p - 3.0) / 2.0
    l2 = -p * (p - 1.0) * (p - 3.0) / 2.0
    l3 = p * (p - 1.0) * (p - 2.0) / 6.0
    a = l0 * w1[i] + l1 * w1[i + 1] + l2 * w1[i + 2] + l3 * w1[i + 3]
    b = l0 * w2[i] + l1 * w2[i + 1] + l2 * w2[i + 2] + l3 * w2[i + 3]
    return a, b


_c_interp4 = jit(_interp4)


def _speeds_source(kappa, gamma, bcov, dm1, r, w1, w2):
    rho = _core.c_enthalpy_inverse(kappa, gamma, bcov, 0.5 * (w2 - w1))
    c = _core.c_sound_speed(kappa, gamma, bcov, rho)
    u = 0.5 * (w1 + w2)
    return u - c, u + c, dm1 * u * c / r


_c_speeds_source = jit(_speeds_source)


def _speeds_source_np(kappa, gamma, bcov, dm1, r, w1, w2):
    rho = _core.enthalpy_inverse(kappa, gamma, bcov, 0.5 * (w2 - w1))
    c = _core.sound_speed(kappa, gamma, bcov, rho)
    u = 0.5 * (w1 + w2)
    return u - c, u + c, dm1 * u * c / r


def _level_loop(kappa, gamma, bcov, dm1, r, w1o, w2o, lo, hi, ja, jb, dt, n_corr,
                w1n, w2n, foot1, foot2):
    """Advance one level for nodes ja..jb; returns the number of nodes with a foot outside [lo, hi]."""
    x0 = r[0]
    h = r[1] - r[0]
    rlo = r[lo]
    rhi = r[hi]
    nbad = 0
    for j in range(ja, jb + 1):
        rj = r[j]
        l1, l2, _ = _c_speeds_source(kappa, gamma, bcov, dm1, rj, w1o[j], w2o[j])
        x1 = rj - dt * l1
        x2 = rj - dt * l2
        a1, a2 = _c_interp4(x0, h, lo, hi, w1o, w2o, x1)
        b1, b2 = _c_interp4(x0, h, lo, hi, w1o, w2o, x2)
        _, _, fa = _c_speeds_source(kappa, gamma, bcov, dm1, x1, a1, a2)
        _, _, fb = _c_speeds_source(kappa, gamma, bcov, dm1, x2, b1, b2)
        p1 = a1 + dt * fa
        p2 = b2 - dt * fb
        for _ in range(n_corr):
            m1, m2, fn = _c_speeds_source(kappa, gamma, bcov, dm1, rj, p1, p2)
            la1, _, _ = _c_speeds_source(kappa, gamma, bcov, dm1, x1, a1, a2)
            _, lb2, _ = _c_speeds_source(kappa, gamma, bcov, dm1, x2, b1, b2)
            x1 = rj - 0.5 * dt * (m1 + la1)
            x2 = rj - 0.5 * dt * (m2 + lb2)
            a1, a2 = _c_interp4(x0, h, lo, hi, w1o, w2o, x1)
            b1, b2 = _c_interp4(x0, h, lo, hi, w1o, w2o, x2)
            _, _, fa = _c_speeds_source(kappa, gamma, bcov, dm1, x1, a1, a2)
            _, _, fb = _c_speeds_source(kappa, gamma, bcov, dm1, x2, b1, b2)
            p1 = a1 + 0.5 * dt * (fn + fa)
            p2 = b2 - 0.5 * dt * (fn + fb)
        w1n[j] = p1
        w2n[j] = p2
        foot1[j] = x1
        foot2[j] = x2
        if x1 < rlo or x1 > rhi or x2 < rlo or x2 > rhi:
            nbad += 1
    return nbad


_c_level_loop = jit(_level_loop)


# ---------------------------------------------------------------- numpy path

def _interp4_np(x0, h, lo, hi, w1, w2, xi):
    s = (xi - x0) / h
    i = np.clip(np.floor(s).astype(np.int64) - 1, lo, hi - 3)
    p = s - i
    l0, l1, l2, l3 = _lagrange_weights(p)
    a = l0 * w1[i] + l1 * w1[i + 1] + l2 * w1[i + 2] + l3 * w1[i + 3]
    b = l0 * w2[i] + l1 * w2[i + 1] + l2 * w2[i + 2] + l3 * w2[i + 3]
    return a, b


def _level_numpy(kappa, gamma, bcov, dm1, r, w1o, w2o, lo, hi, ja, jb, dt, n_corr,
                 w1n, w2n, foot1, foot2):
    x0 = r[0]
    h = r[1] - r[0]
    sl = slice(ja, jb + 1)
    rj = r[sl]
    ss = _speeds_source_np
    l1, l2, _ = ss(kappa, gamma, bcov, dm1, rj, w1o[sl], w2o[sl])
    x1 = rj - dt * l1
    x2 = rj - dt * l2
    a1, a2 = _interp4_np(x0, h, lo, hi, w1o, w2o, x1)
    b1, b2 = _interp4_np(x0, h, lo, hi, w1o, w2o, x2)
    fa = ss(kappa, gamma, bcov, dm1, x1, a1, a2)[2]
    fb = ss(kappa, gamma, bcov, dm1, x2, b1, b2)[2]
    p1 = a1 + dt * fa
    p2 = b2 - dt * fb
    for _ in range(n_corr):
        m1, m2, fn = ss(kappa, gamma, bcov, dm1, rj, p1, p2)
        la1 = ss(kappa, gamma, bcov, dm1, x1, a1, a2)[0]
        lb2 = ss(kappa, gamma, bcov, dm1, x2, b1, b2)[1]
        x1 = rj - 0.5 * dt * (m1 + la1)
        x2 = rj - 0.5 * dt * (m2 + lb2)
        a1, a2 = _interp4_np(x0, h, lo, hi, w1o, w2o, x1)
        b1, b2 = _interp4_np(x0, h, lo, hi, w1o, w2o, x2)
        fa = ss(kappa, gamma, bcov, dm1, x1, a1, a2)[2]
        fb = ss(kappa, gamma, bcov, dm1, x2, b1, b2)[2]
        p1 = a1 + 0.5 * dt * (fn + fa)
        p2 = b2 - 0.5 * dt * (fn + fb)
    w1n[sl] = p1
    w2n[sl] = p2
    foot1[sl] = x1
    foot2[sl] = x2
    rlo, rhi = r[lo], r[hi]
    return int(np.count_nonzero((x1 < rlo) | (x1 > rhi) | (x2 < rlo) | (x2 > rhi)))


level_numba = _c_level_loop if USE_NUMBA else None
level_numpy = _level_numpy
level = _c_level_loop if USE_NUMBA else _level_numpy


# ---------------------------------------------------------------- angular mesh

MESH_OK = 0
MESH_VALIDITY = 1
MESH_CROSSING = 2
MESH_VACUUM = 3
MESH_RIGHT = 4
MESH_LAX = 5
MESH_NONFINITE = 6
MESH_ORIGIN = 7


def _field_at(t, r, t0, dt, n_ok, r0, dr, lo, hi, W1, W2):
    """Bilinear value of a rectangular field; NaN outside its valid region."""
    s = (t - t0) / dt
    n = int(math.floor(s))
    if n < 0:
        n = 0
    if n > n_ok - 2:
        n = n_ok - 2
    a = s - n
    if a < -1e-9 or a > 1.0 + 1e-9 or n < 0:
        return math.nan, math.nan
    a = min(max(a, 0.0), 1.0)
    jlo = max(lo[n], lo[n + 1])
    jhi = min(hi[n], hi[n + 1])
    q = (r - r0) / dr
    if jhi <= jlo or q < jlo - 1e-9 or q > jhi + 1e-9:
        return math.nan, math.nan
    j = int(math.floor(q))
    if j < jlo:
        j = jlo
    if j > jhi - 1:
        j = jhi - 1
    b = min(max(q - j, 0.0), 1.0)
    v1 = ((1 - a) * ((1 - b) * W1[n, j] + b * W1[n, j + 1])
          + a * ((1 - b) * W1[n + 1, j] + b * W1[n + 1, j + 1]))
    v2 = ((1 - a) * ((1 - b) * W2[n, j] + b * W2[n, j + 1])
          + a * ((1 - b) * W2[n + 1, j] + b * W2[n + 1, j + 1]))
    return v1, v2


_c_field_at = jit(_field_at)


def _front_speed(kappa, gamma, bcov, w1m, w2m, w1p, w2p):
    rm = _core.c_enthalpy_inverse(kappa, gamma, bcov, 0.5 * (w2m - w1m))
    rp = _core.c_enthalpy_inverse(kappa, gamma, bcov, 0.5 * (w2p - w1p))
    up = 0.5 * (w1p + w2p)
    f = _core.c_hugoniot(kappa, gamma, bcov, rm, rp)
    return up + rm * math.sqrt(max(f, 0.0)) / (rm - rp), rm, rp


_c_front_speed = jit(_front_speed)


def _march_mesh(kappa, gamma, bcov, dm1, Ct, Cr, C1, C2,
                ft0, fdt, fn_ok, fr0, fdr, flo, fhi, FW1, FW2,
                w1m0, w2m0, w1p0, w2p0, U0, delta_rel, tol, n_iter, vac_tol,
                T, R, W1, W2, KU, KP1, KP2, info):
    """March the characteristic mesh of the angular domain row by row.

    Row m is the family-2 line leaving the boundary node (Ct[m], Cr[m]); node
    (m, k) is its intersection with the family-1 line leaving front node k,
    and (m, m) is the front node.  Returns (rows completed, status, k).
    ``info`` receives the largest last-iteration correction.
    """
    M = Ct.shape[0] - 1
    T[0, 0] = Ct[0]
    R[0, 0] = Cr[0]
    W1[0, 0] = w1m0
    W2[0, 0] = w2m0
    KU[0] = U0
    KP1[0] = w1p0
    KP2[0] = w2p0
    corr = 0.0
    for m in range(1, M + 1):
        T[m, 0] = Ct[m]
        R[m, 0] = Cr[m]
        W1[m, 0] = C1[m]
        W2[m, 0] = C2[m]
        for k in range(1, m):
            ta, ra, a1, a2 = T[m, k - 1], R[m, k - 1], W1[m, k - 1], W2[m, k - 1]
            tb, rb, b1, b2 = T[m - 1, k], R[m - 1, k], W1[m - 1, k], W2[m - 1, k]
            _, l2a, fa = _c_speeds_source(kappa, gamma, bcov, dm1, ra, a1, a2)
            l1b, _, fb = _c_speeds_source(kappa, gamma, bcov, dm1, rb, b1, b2)
            l1n, l2n, fn = l1b, l2a, 0.5 * (fa + fb)
            t = ta
            r = ra
            v1 = b1
            v2 = a2
            step = 0.0
            for _ in range(n_iter):
                l2m = 0.5 * (l2a + l2n)
                l1m = 0.5 * (l1b + l1n)
                den = l2m - l1m
                if not den > 0.0:
                    return m - 1, MESH_VACUUM, k
                tn = (rb - ra + l2m * ta - l1m * tb) / den
                rn = ra + l2m * (tn - ta)
                n2 = a2 - 0.5 * (fa + fn) * (tn - ta)
                n1 = b1 + 0.5 * (fb + fn) * (tn - tb)
                step = abs(tn - t) + abs(rn - r) + abs(n1 - v1) + abs(n2 - v2)
                t, r, v1, v2 = tn, rn, n1, n2
                if not (math.isfinite(t) and math.isfinite(r) and math.isfinite(v1) and math.isfinite(v2)):
                    return m - 1, MESH_NONFINITE, k
                if r <= 0.0:
                    return m - 1, MESH_ORIGIN, k
                if v2 - v1 < vac_tol:
                    return m - 1, MESH_VACUUM, k
                l1n, l2n, fn = _c_speeds_source(kappa, gamma, bcov, dm1, r, v1, v2)
                if step <= tol * (1.0 + abs(t) + abs(r) + abs(v1) + abs(v2)):
                    break
            corr = max(corr, step)
            if not (t > ta and t > tb):
                return m - 1, MESH_CROSSING, k
            T[m, k] = t
            R[m, k] = r
            W1[m, k] = v1
            W2[m, k] = v2
        # front node: family-2 line from (m, m-1) meets the front from node m-1
        ta, ra, a1, a2 = T[m, m - 1], R[m, m - 1], W1[m, m - 1], W2[m, m - 1]
        ts, rs, us = T[m - 1, m - 1], R[m - 1, m - 1], KU[m - 1]
        _, l2a, fa = _c_speeds_source(kappa, gamma, bcov, dm1, ra, a1, a2)
        l2n, un, fn = l2a, us, fa
        t = ta
        r = ra
        v1 = W1[m - 1, m - 1]
        v2 = a2
        p1 = KP1[m - 1]
        p2 = KP2[m - 1]
        step = 0.0
        for _ in range(n_iter):
            l2m = 0.5 * (l2a + l2n)
            um = 0.5 * (us + un)
            den = l2m - um
            if not den > 0.0:
                return m - 1, MESH_LAX, m
            tn = (rs - ra + l2m * ta - um * ts) / den
            rn = ra + l2m * (tn - ta)
            n2 = a2 - 0.5 * (fa + fn) * (tn - ta)
            if not (math.isfinite(tn) and math.isfinite(rn) and math.isfinite(n2)):
                return m - 1, MESH_NONFINITE, m
            q1, q2 = _c_field_at(tn, rn, ft0, fdt, fn_ok, fr0, fdr, flo, fhi, FW1, FW2)
            if not (math.isfinite(q1) and math.isfinite(q2)):
                return m - 1, MESH_RIGHT, m
            if not n2 > q2:
                return m - 1, MESH_VALIDITY, m
            n1, st = _core.c_solve_g(kappa, gamma, bcov, n2, q1, q2,
                                     1e-12 * max(1.0, abs(0.5 * (q1 + q2)), 0.5 * (q2 - q1)))
            if st != 0:
                return m - 1, MESH_VALIDITY, m
            un, rm, rp = _c_front_speed(kappa, gamma, bcov, n1, n2, q1, q2)
            if not rm > rp * (1.0 + delta_rel):
                return m - 1, MESH_VALIDITY, m
            step = abs(tn - t) + abs(rn - r) + abs(n1 - v1) + abs(n2 - v2)
            t, r, v1, v2, p1, p2 = tn, rn, n1, n2, q1, q2
            _, l2n, fn = _c_speeds_source(kappa, gamma, bcov, dm1, r, v1, v2)
            if step <= tol * (1.0 + abs(t) + abs(r) + abs(v1) + abs(v2)):
                break
        corr = max(corr, step)
        if not (t > ta and t > ts):
            return m - 1, MESH_CROSSING, m
        T[m, m] = t
        R[m, m] = r
        W1[m, m] = v1
        W2[m, m] = v2
        KU[m] = un
        KP1[m] = p1
        KP2[m] = p2
        info[0] = corr
    info[0] = corr
    return M, MESH_OK, 0


march_mesh_numba = jit(_march_mesh) if USE_NUMBA else None
march_mesh_python = _march_mesh
march_mesh = march_mesh_numba if USE_NUMBA else _march_mesh
