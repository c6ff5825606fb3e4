"""Smooth solutions of the radially symmetric reduced system.

Evolution uses a second-order semi-Lagrangian characteristic scheme on a
rectangular (t, r) grid; paths are traced with an adaptive Runge-Kutta
4(5) pair on the bilinearly interpolated field.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import _core, _kernels
from .errors import (BlowupDetected, DomainError, DomainShrunk, GridError, HypothesisViolated,
                     OutOfDomain, StepFailure, VacuumApproached)
from .riemann import lambdas, reduced_residual, source_f

FAMILIES = (1, 2, "fluid")


# ------------------------------------------------------------------ data

def prolong(profile, R0, side, margin=None):
    """Extend one-sided data past ``R0`` by a constant, C1-blended over ``margin``.

    ``side="left"`` means the data live on (0, R0] and are extended to the
    right; ``side="right"`` means [R0, inf) extended to the left.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    m = 0.1 * R0 if margin is None else float(margin)
    eps = 1e-5 * R0
    sgn = 1.0 if side == "left" else -1.0
    w0 = np.array(profile(np.array([R0]))).reshape(2)
    wa = np.array(profile(np.array([R0 - sgn * eps]))).reshape(2)
    wb = np.array(profile(np.array([R0 - 2 * sgn * eps]))).reshape(2)
    # second-order one-sided slope in the outward coordinate s = sgn (r - R0)
    slope = (3 * w0 - 4 * wa + wb) / (2 * eps)

    def extended(r):
        r = np.asarray(r, float)
        flat = np.atleast_1d(r).ravel()
        s = sgn * (flat - R0)
        inside = s <= 0
        out = np.empty((2, flat.size))
        if np.any(inside):
            a, b = profile(flat[inside])
            out[0, inside] = a
            out[1, inside] = b
        z = np.clip(s[~inside] / m, 0.0, 1.0)
        out[:, ~inside] = w0[:, None] + slope[:, None] * (m * (z - 0.5 * z * z))[None, :]
        return out[0].reshape(r.shape), out[1].reshape(r.shape)

    return extended


def stationary_profile(model, cfg, w_ref, r_ref, r_min, r_max, rtol=1e-12, atol=1e-13):
    """Time-independent solution through ``w_ref`` at ``r_ref``, valid on [r_min, r_max].

    Solves lambda1 w1' = f, lambda2 w2' = -f outward and inward from the
    reference radius.  A sonic point (either speed reaching zero) inside the
    interval is an error, since the profile cannot be continued through it.
    """
    if not (0 < r_min <= r_ref <= r_max):
        raise GridError("need 0 < r_min <= r_ref <= r_max")

    def rhs(r, w):
        l1, l2 = lambdas(model, w)
        f = source_f(model, cfg, r, w)
        return [f / l1, -f / l2]

    def sonic(r, w):
        l1, l2 = lambdas(model, w)
        return float(l1 * l2)

    sonic.terminal = True
    parts = []
    for end in (r_min, r_max):
        if end == r_ref:
            continue
        sol = solve_ivp(rhs, (r_ref, end), [float(w_ref[0]), float(w_ref[1])], method="DOP853",
                        rtol=rtol, atol=atol, dense_output=True, events=sonic)
        if sol.status != 0:
            raise DomainError(f"stationary profile hits a sonic point at r={sol.t[-1]:.6g}")
        parts.append((min(r_ref, end), max(r_ref, end), sol.sol))

    def profile(r):
        r = np.asarray(r, float)
        flat = np.atleast_1d(r).ravel()
        if np.any(flat < r_min * (1 - 1e-12)) or np.any(flat > r_max * (1 + 1e-12)):
            raise DomainError(f"stationary profile defined on [{r_min:g}, {r_max:g}] only")
        out = np.empty((2, flat.size))
        out[0], out[1] = float(w_ref[0]), float(w_ref[1])
        for a, b, sol in parts:
            sel = (flat >= a) & (flat <= b) & (flat != r_ref)
            if np.any(sel):
                out[:, sel] = sol(flat[sel])
        return out[0].reshape(r.shape), out[1].reshape(r.shape)

    return profile


@dataclass
class SmoothField:
    """Rectangular (t, r) sample of (w1, w2); NaN outside the computed region."""

    t: np.ndarray
    r: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    lo: np.ndarray  # first valid r-index per level
    hi: np.ndarray  # last valid r-index per level
    domain: str = "free"
    d: int = 3
    model: object = None
    status: str = "ok"
    t_stop: float = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.dt = (self.t[-1] - self.t[0]) / (len(self.t) - 1) if len(self.t) > 1 else 1.0
        self.dr = (self.r[-1] - self.r[0]) / (len(self.r) - 1)
        if self.t_stop is None:
            self.t_stop = float(self.t[-1])
        # last stored level; cells never reach past it
        self.n_stop = int(round((self.t_stop - self.t[0]) / self.dt)) if len(self.t) > 1 else 0

    @property
    def valid(self):
        idx = np.arange(len(self.r))[None, :]
        return (idx >= self.lo[:, None]) & (idx <= self.hi[:, None])

    def _cell(self, t):
        s = (t - self.t[0]) / self.dt
        n = min(max(int(math.floor(s)), 0), max(min(self.n_stop, len(self.t) - 1) - 1, 0))
        return n, s - n

    def bounds(self, t):
        """Radial interval on which bilinear interpolation at time ``t`` is valid."""
        n, _ = self._cell(t)
        lo = max(self.lo[n], self.lo[n + 1])
        hi = min(self.hi[n], self.hi[n + 1])
        return self.r[lo], self.r[hi]

    def interp(self, t, r, clamp=False):
        """Bilinear value of (w1, w2) at a single point; NaN outside unless ``clamp``."""
        if not (self.t[0] - 1e-12 * self.dt <= t <= self.t_stop + 1e-12 * self.dt):
            if not clamp:
                return math.nan, math.nan
            t = min(max(t, self.t[0]), self.t_stop)
        n, a = self._cell(t)
        a = min(max(a, 0.0), 1.0)
        jlo = max(self.lo[n], self.lo[n + 1])
        jhi = min(self.hi[n], self.hi[n + 1])
        if jhi <= jlo:
            return math.nan, math.nan
        rlo, rhi = self.r[jlo], self.r[jhi]
        if not (rlo <= r <= rhi):
            if not clamp or not math.isfinite(r):
                return math.nan, math.nan
            r = min(max(r, rlo), rhi)
        s = (r - self.r[0]) / self.dr
        # keep both stencil nodes inside the valid index range
        j = min(max(int(math.floor(s)), jlo), jhi - 1)
        b = min(max(s - j, 0.0), 1.0)
        out = []
        for w in (self.w1, self.w2):
            v = ((1 - a) * ((1 - b) * w[n, j] + b * w[n, j + 1])
                 + a * ((1 - b) * w[n + 1, j] + b * w[n + 1, j + 1]))
            out.append(v)
        return out[0], out[1]

    def interp_many(self, t, r):
        t = np.atleast_1d(np.asarray(t, float))
        r = np.broadcast_to(np.asarray(r, float), t.shape)
        vals = np.array([self.interp(a, b) for a, b in zip(t, r)])
        return vals[:, 0], vals[:, 1]

    def residual(self, cfg):
        return reduced_residual(self.model, cfg, self.t, self.r, self.w1, self.w2)


def _gradient_max(w, lo, hi, h):
    if hi - lo < 1:
        return 0.0
    return float(np.max(np.abs(np.diff(w[lo:hi + 1]))) / h)


def _advance_edge(model, rx, w1o, w2o, w1n, w2n, lo, hi, x, dt, family, r_lo, r_hi):
    """Move an edge of the domain of determinacy along the extreme characteristic.

    The left edge follows the 2-family, the right edge the 1-family; an edge
    sitting on the grid boundary stays there while that characteristic
    points outward.
    """
    x0, h = rx[0], rx[1] - rx[0]

    def speed(w1, w2, xx):
        a, b = _kernels._interp4(x0, h, lo, hi, w1, w2, xx)
        return float(_speed(model, family, a, b))

    def clamp(v, y):
        if family == 2 and y <= r_lo and v < 0:
            return 0.0
        if family == 1 and y >= r_hi and v > 0:
            return 0.0
        return v

    v0 = clamp(speed(w1o, w2o, x), x)
    xp = min(max(x + dt * v0, r_lo), r_hi)
    v1 = clamp(speed(w1n, w2n, xp), xp)
    return min(max(x + 0.5 * dt * (v0 + v1), r_lo), r_hi)


def evolve_smooth(model, cfg, initial, r_lo, r_hi, t_end, nr=400, nt=400, boundary="mask",
                  n_corr=2, blowup_factor=1e3, resolve_frac=0.03, vacuum_tol=1e-8, domain="free",
                  raise_on_stop=True):
    """Evolve initial data ``initial(r) -> (w1, w2)`` to ``t_end``.

    ``boundary="mask"`` keeps only the numerical domain of determinacy, which
    shrinks from both ends.  ``boundary="frozen"`` pins the exterior to the
    initial profile, which is exact when that profile is a stationary
    solution (it is evaluated in ghost cells beyond both ends).

    Blow-up is declared when the steepest gradient exceeds ``blowup_factor``
    times its initial value or when a single cell jump exceeds
    ``resolve_frac`` of the solution scale, whichever comes first.  The
    second test catches gradient catastrophes that the grid would otherwise
    smear into an unresolved front.

    When a breakdown occurs the field is truncated at the last good level;
    with ``raise_on_stop`` the matching exception is raised carrying it.
    """
    if not (r_hi > r_lo > 0) or t_end <= 0:
        raise GridError("need 0 < r_lo < r_hi and t_end > 0")
    if nr < 8 or nt < 3:
        raise GridError("grid too small")
    if boundary not in ("mask", "frozen"):
        raise GridError(f"unknown boundary mode {boundary!r}")
    r = np.linspace(r_lo, r_hi, nr)
    t = np.linspace(0.0, t_end, nt)
    h = r[1] - r[0]
    dt = t[1] - t[0]
    w1i, w2i = (np.asarray(x, float) for x in initial(r))
    if np.any(w2i - w1i < vacuum_tol):
        raise VacuumApproached("initial data at or below the vacuum threshold")
    l1, l2 = lambdas(model, (w1i, w2i))
    ghost = 0
    if boundary == "frozen":
        cfl = float(np.max(np.abs(np.concatenate([l1, l2])))) * dt / h
        ghost = int(math.ceil(3 * cfl)) + 4
        if r_lo - ghost * h <= 0:
            raise GridError("frozen boundary needs ghost cells at positive radius; raise r_lo or refine dt")
    rx = r_lo + h * np.arange(-ghost, nr + ghost)
    gw1, gw2 = (np.asarray(x, float) for x in initial(rx))
    n_ext = len(rx)
    W1 = np.full((nt, n_ext), np.nan)
    W2 = np.full((nt, n_ext), np.nan)
    W1[0], W2[0] = gw1, gw2
    lo = np.zeros(nt, dtype=np.int64)
    hi = np.zeros(nt, dtype=np.int64)
    lo[0], hi[0] = 0, n_ext - 1
    scale = max(float(np.max(np.abs(np.concatenate([w1i, w2i])))), 1e-12)
    g0 = max(_gradient_max(w1i, 0, nr - 1, h), _gradient_max(w2i, 0, nr - 1, h), scale / (r_hi - r_lo))
    ceiling = min(blowup_factor * g0, max(2.0 * g0, resolve_frac * scale / h))
    kappa, gamma, bcov = model.params
    dm1 = float(cfg.d - 1)
    foot1 = np.zeros(n_ext)
    foot2 = np.zeros(n_ext)
    status, last = "ok", nt - 1
    xl, xr = r_lo, r_hi
    for n in range(nt - 1):
        ja, jb = (ghost, n_ext - ghost - 1) if boundary == "frozen" else (lo[n], hi[n])
        w1n = W1[n + 1]
        w2n = W2[n + 1]
        nbad = _kernels.level(kappa, gamma, bcov, dm1, rx, W1[n], W2[n], int(lo[n]), int(hi[n]),
                              int(ja), int(jb), dt, n_corr, w1n, w2n, foot1, foot2)
        if boundary == "frozen":
            w1n[:ghost], w2n[:ghost] = gw1[:ghost], gw2[:ghost]
            if ghost:
                w1n[-ghost:], w2n[-ghost:] = gw1[-ghost:], gw2[-ghost:]
            if nbad:
                status, last = "ghost", n
                break
            lo[n + 1], hi[n + 1] = 0, n_ext - 1
        else:
            xl_new = _advance_edge(model, rx, W1[n], W2[n], w1n, w2n, lo[n], hi[n], xl, dt, 2, r_lo, r_hi)
            xr_new = _advance_edge(model, rx, W1[n], W2[n], w1n, w2n, lo[n], hi[n], xr, dt, 1, r_lo, r_hi)
            a = int(np.searchsorted(rx, xl_new - 1e-12 * h))
            b = int(np.searchsorted(rx, xr_new + 1e-12 * h, side="right")) - 1
            if b - a < 3:
                status, last = "shrunk", n
                break
            xl, xr = xl_new, xr_new
            w1n[:a], w2n[:a] = np.nan, np.nan
            w1n[b + 1:], w2n[b + 1:] = np.nan, np.nan
            lo[n + 1], hi[n + 1] = a, b
        a, b = (ghost, n_ext - ghost - 1) if boundary == "frozen" else (lo[n + 1], hi[n + 1])
        if np.any(np.diff(foot1[a:b + 1]) <= 0) or np.any(np.diff(foot2[a:b + 1]) <= 0):
            status, last = "crossing", n
            break
        seg1, seg2 = w1n[a:b + 1], w2n[a:b + 1]
        if not (np.all(np.isfinite(seg1)) and np.all(np.isfinite(seg2))):
            status, last = "blowup", n
            break
        if np.min(seg2 - seg1) < vacuum_tol:
            status, last = "vacuum", n
            break
        if max(_gradient_max(seg1, 0, len(seg1) - 1, h), _gradient_max(seg2, 0, len(seg2) - 1, h)) > ceiling:
            status, last = "blowup", n
            break
    sl = slice(ghost, ghost + nr)
    w1 = W1[:last + 1, sl].copy()
    w2 = W2[:last + 1, sl].copy()
    lo_r = np.clip(lo[:last + 1] - ghost, 0, nr - 1)
    hi_r = np.clip(hi[:last + 1] - ghost, 0, nr - 1)
    if boundary == "frozen":
        lo_r[:], hi_r[:] = 0, nr - 1
    if status != "ok":
        # keep the full time axis so downstream consumers see where it stopped
        pad = nt - (last + 1)
        w1 = np.vstack([w1, np.full((pad, nr), np.nan)])
        w2 = np.vstack([w2, np.full((pad, nr), np.nan)])
        lo_r = np.concatenate([lo_r, np.full(pad, nr - 1)])
        hi_r = np.concatenate([hi_r, np.zeros(pad, dtype=np.int64)])
    fld = SmoothField(t, r, w1, w2, lo_r, hi_r, domain=domain, d=cfg.d, model=model, status=status,
                      t_stop=float(t[last]), meta={"boundary": boundary, "ceiling": ceiling, "scale": scale,
                                                   "n_corr": n_corr, "backend": _kernels.USE_NUMBA})
    if status != "ok" and raise_on_stop:
        msg = f"evolution stopped at t={t[last]:.6g}: {status}"
        exc = {"blowup": BlowupDetected, "crossing": BlowupDetected, "vacuum": VacuumApproached,
               "shrunk": DomainShrunk, "ghost": StepFailure}[status](msg)
        exc.field = fld
        raise exc
    return fld


# ------------------------------------------------------------------ paths

@dataclass
class CharacteristicPath:
    family: object
    t: np.ndarray
    r: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    exited: bool = False
    dense: object = None
    source: object = None  # (t, r) -> (w1, w2) of the field the path was traced in

    def sample(self, n=512):
        """Resample ``(t, r)`` uniformly in t using the dense output (or linear interpolation)."""
        ts = np.linspace(self.t[0], self.t[-1], n)
        if self.dense is not None:
            rs = np.asarray(self.dense(ts)).reshape(-1)
        else:
            order = np.argsort(self.t)
            rs = np.interp(ts, self.t[order], self.r[order])
        return ts, rs


def frozen_path(family, w, R, t0, t1, n=2):
    """Path sitting at constant radius ``R`` in a constant state ``w`` (a test fixture)."""
    ts = np.linspace(t0, t1, n)
    w1, w2 = float(w[0]), float(w[1])
    return CharacteristicPath(family, ts, np.full(n, float(R)), np.full(n, w1), np.full(n, w2),
                              dense=lambda s: np.full(np.shape(s), float(R)),
                              source=lambda t, r: (w1, w2))


def _speed(model, family, w1, w2):
    kappa, gamma, b = model.params
    rho = _core.enthalpy_inverse(kappa, gamma, b, 0.5 * (w2 - w1))
    c = _core.sound_speed(kappa, gamma, b, rho)
    u = 0.5 * (w1 + w2)
    if family == 1:
        return u - c
    if family == 2:
        return u + c
    return u


def trace_characteristic(model, cfg, fld, family, t0, r0, t_end, rtol=1e-9, atol=1e-9,
                         on_exit="flag", max_step=None):
    """Integrate dX/dt = lambda_family(w(t, X)) through a field from (t0, r0) to t_end.

    ``fld`` is a :class:`SmoothField` or a callable ``(t, r) -> (w1, w2)``.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if isinstance(fld, SmoothField):
        w1s, w2s = fld.interp(t0, r0)
        if not np.isfinite(w1s):
            raise OutOfDomain(f"start point ({t0}, {r0}) outside the field")
        if not (fld.t[0] <= t_end <= fld.t_stop + 1e-12):
            raise OutOfDomain(f"t_end={t_end} outside field time span")

        def value(t, x):
            return fld.interp(t, x, clamp=True)

        def lower(t, y):
            return y[0] - fld.bounds(t)[0]

        def upper(t, y):
            return fld.bounds(t)[1] - y[0]

        events = [lower, upper]
        for e in events:
            e.terminal = True
    else:
        value = fld
        events = None

    def rhs(t, y):
        a, b = value(t, y[0])
        return [_speed(model, family, a, b)]

    def origin(t, y):
        return y[0]

    origin.terminal = True
    events = (events or []) + [origin]
    kw = {} if max_step is None else {"max_step": max_step}
    sol = solve_ivp(rhs, (t0, t_end), [r0], method="RK45", rtol=rtol, atol=atol,
                    dense_output=True, events=events, **kw)
    if sol.status == -1:
        raise StepFailure(sol.message)
    ts = sol.t
    rs = sol.y[0]
    w = np.array([value(a, b) for a, b in zip(ts, rs)])
    exited = sol.status == 1
    path = CharacteristicPath(family, ts, rs, w[:, 0], w[:, 1], exited, sol.sol, value)
    if exited and on_exit == "raise":
        raise OutOfDomain(f"path left the field at t={ts[-1]:.6g}", path=path)
    return path


# ------------------------------------------------------------------ C0 bounds

@dataclass
class C0Envelope:
    t: np.ndarray
    lower_w1: np.ndarray
    upper_w1: np.ndarray
    lower_w2: np.ndarray
    upper_w2: np.ndarray
    quad_err: float = 0.0

    def violation(self, w1=None, w2=None):
        """Largest amount by which the supplied values leave the envelope (<= 0 means inside)."""
        v = -np.inf
        if w1 is not None:
            v = max(v, float(np.max(self.lower_w1 - w1)), float(np.max(w1 - self.upper_w1)))
        if w2 is not None:
            v = max(v, float(np.max(self.lower_w2 - w2)), float(np.max(w2 - self.upper_w2)))
        return v


def check_c0_hypotheses(w0_data):
    r, w1, w2 = (np.asarray(x, float) for x in w0_data)
    bad = []
    if np.any(w2 - w1 < 0):
        bad.append("w2 - w1 >= 0 at t=0")
    if np.any(w1 <= 0):
        bad.append("w1 > 0 at t=0")
    return bad


def c0_envelope(model, cfg, w0_data, path, w_start=None, n=None):
    """Envelopes for w1 along a 1-path and w2 along a 2-path.

    ``w0_data = (r, w1, w2)`` samples the initial data (used for the
    hypotheses and for the sup-norm of w2).  The path may start at any time
    beta; its starting values come from ``w_start`` or the path itself.
    """
    bad = check_c0_hypotheses(w0_data)
    if bad:
        raise HypothesisViolated("C0 estimate hypotheses failed: " + ", ".join(bad))
    w2_sup = float(np.max(np.abs(w0_data[2])))
    if n is None:
        ts, xs = np.asarray(path.t, float), np.asarray(path.r, float)
    else:
        ts, xs = path.sample(n)
    if np.any(xs <= 0):
        raise HypothesisViolated("path reaches r <= 0")
    integrand = (cfg.d - 1) / (4.0 * xs)
    steps = np.diff(ts)
    I = np.concatenate([[0.0], np.cumsum(0.5 * steps * (integrand[1:] + integrand[:-1]))])
    # trapezoid error estimate from the second difference of the integrand
    quad_err = 0.0
    if len(ts) > 2:
        quad_err = float(np.sum(np.abs(np.diff(integrand, 2))) * np.max(np.abs(steps)) / 12.0)
    s1, s2 = (path.w1[0], path.w2[0]) if w_start is None else w_start
    lower_w1 = np.full_like(I, s1)
    upper_w1 = s1 + w2_sup**2 * I
    lower_w2 = s2 / (1.0 + s2 * I)
    upper_w2 = np.full_like(I, s2)
    return C0Envelope(ts, lower_w1, upper_w1, lower_w2, upper_w2, quad_err)


def t0_lower_bound(cfg, w1_min, w2_min, r2, script_T):
    """Finite-horizon C0 time: unbounded when w1_min >= 0, else the positivity horizon."""
    if w1_min + w2_min <= 0:
        raise HypothesisViolated("need min w1 + min w2 > 0")
    if w1_min >= 0 or cfg.d == 1:
        return float(script_T)
    bound = -4.0 * r2 / ((cfg.d - 1) * w1_min * w2_min) * (w1_min + w2_min)
    return float(min(script_T, bound))


@dataclass
class C0Report:
    passed: bool
    checks: dict
    worst: dict
    slack: float
    n_paths: int
    notes: list = field(default_factory=list)


def _along(fld, path):
    """Field values at the field's own time levels along a path (plus both endpoints)."""
    t0, t1 = sorted((path.t[0], path.t[-1]))
    inner = fld.t[(fld.t > t0) & (fld.t < t1)]
    ts = np.concatenate([[t0], inner, [t1]])
    if path.t[-1] < path.t[0]:
        ts = ts[::-1]
    rs = np.asarray(path.dense(ts)).reshape(-1)
    w = np.array([fld.interp(a, b) for a, b in zip(ts, rs)])
    keep = np.isfinite(w[:, 0])
    return ts[keep], rs[keep], w[keep, 0], w[keep, 1]


def verify_c0(model, cfg, fld, n_paths=16, n_chain=32, mono_slack=1e-8, envelope_slack=None):
    """Check the C0 lemma on a computed field; failures are reported, not raised."""
    valid = np.isfinite(fld.w1) & np.isfinite(fld.w2)
    scale = float(np.nanmax(np.abs(np.concatenate([fld.w1[valid], fld.w2[valid]]))))
    res1, res2 = fld.residual(cfg)
    max_res = float(np.nanmax(np.abs(np.concatenate([res1.ravel(), res2.ravel()])))) if np.any(
        np.isfinite(res1)) else 0.0
    slack = 10.0 * max_res if envelope_slack is None else envelope_slack
    checks, worst, notes = {}, {}, []
    gap = fld.w2[valid] - fld.w1[valid]
    checks["w2>=w1"] = bool(np.all(gap >= 0))
    worst["w2>=w1"] = float(gap.min())

    t_end = fld.t_stop
    r0s = fld.r[fld.lo[0]:fld.hi[0] + 1]
    w0_data = (r0s, fld.w1[0, fld.lo[0]:fld.hi[0] + 1], fld.w2[0, fld.lo[0]:fld.hi[0] + 1])
    hyp = check_c0_hypotheses(w0_data)
    if hyp:
        notes.append("C0 lemma hypotheses fail: " + ", ".join(hyp))
    mono_worst = {1: 0.0, 2: 0.0}
    env_worst = -np.inf
    count = 0
    lo_r, hi_r = r0s[0], r0s[-1]
    for fam in (1, 2):
        for r0 in np.linspace(lo_r, hi_r, n_paths + 2)[1:-1]:
            path = trace_characteristic(model, cfg, fld, fam, 0.0, r0, t_end)
            if len(path.t) < 2:
                continue
            count += 1
            ts, rs, a, b = _along(fld, path)
            if len(ts) < 2:
                continue
            seq = a if fam == 1 else -b
            mono_worst[fam] = min(mono_worst[fam], float(np.min(np.diff(seq))))
            if not hyp:
                env = c0_envelope(model, cfg, w0_data, path)
                envt = np.interp(ts, env.t, env.lower_w1), np.interp(ts, env.t, env.upper_w1), \
                    np.interp(ts, env.t, env.lower_w2), np.interp(ts, env.t, env.upper_w2)
                if fam == 1:
                    v = max(np.max(envt[0] - a), np.max(a - envt[1]))
                else:
                    v = max(np.max(envt[2] - b), np.max(b - envt[3]))
                env_worst = max(env_worst, float(v) - env.quad_err)
    tol = mono_slack * scale
    checks["w1 nondecreasing on 1-paths"] = mono_worst[1] >= -tol
    checks["w2 nonincreasing on 2-paths"] = mono_worst[2] >= -tol
    worst["w1 nondecreasing on 1-paths"] = mono_worst[1]
    worst["w2 nonincreasing on 2-paths"] = mono_worst[2]
    if not hyp:
        checks["envelope containment"] = env_worst <= slack
        worst["envelope containment"] = env_worst

    # ordering chain at sample points of the last level, traced back to t = 0
    n_last = int(np.searchsorted(fld.t, t_end))
    n_last = min(n_last, len(fld.t) - 1)
    idx = np.arange(fld.lo[n_last], fld.hi[n_last] + 1)
    chain_worst = np.inf
    if len(idx) > 4:
        for j in np.unique(np.linspace(idx[1], idx[-2], n_chain).astype(int)):
            rr = fld.r[j]
            w1v, w2v = fld.w1[n_last, j], fld.w2[n_last, j]
            p1 = trace_characteristic(model, cfg, fld, 1, fld.t[n_last], rr, 0.0)
            p2 = trace_characteristic(model, cfg, fld, 2, fld.t[n_last], rr, 0.0)
            if p1.exited or p2.exited:
                continue
            chain = [p1.w1[-1], w1v, w2v, p2.w2[-1]]
            chain_worst = min(chain_worst, float(np.min(np.diff(chain))))
    checks["ordering chain"] = chain_worst >= -slack
    worst["ordering chain"] = chain_worst
    return C0Report(all(checks.values()), checks, worst, slack, count, notes)
