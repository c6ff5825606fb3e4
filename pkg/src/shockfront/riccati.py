"""Scalar Riccati equations y' = a0 y^2 + a1 y + a2: existence tests and bounds.

The toolbox is used in two ways: as the oracle for the gradient estimates
(coefficients frozen along a characteristic) and as a standalone battery
of randomized problems.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import cmath
import math
import os
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, cumulative_simpson, quad, solve_ivp
from scipy.optimize import brentq

from .errors import BlowupDetected, ConfigError, DomainError, HypothesisViolated, QuadratureFailure

BLOWUP_FACTOR = 1e12


# ------------------------------------------------------------------ coefficient functions

class Poly:
    """Polynomial in t, coefficients in increasing degree."""

    def __init__(self, coeffs):
        self.coeffs = np.atleast_1d(np.asarray(coeffs, float))
        self._rev = self.coeffs[::-1].copy()

    def __call__(self, t):
        return np.polyval(self._rev, t)

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"


def Const(v):
    return Poly([v])


class Trig:
    """``scale * clip(c0 + sum_k (ck cos(k w t) + sk sin(k w t)))``.

    Clipping acts on the unscaled shape, so every integral of |f| is
    linear in ``scale``.
    """

    def __init__(self, c0, cos=(), sin=(), omega=1.0, clip=math.inf, scale=1.0):
        self.c0 = float(c0)
        self.cos = [float(x) for x in cos]
        self.sin = [float(x) for x in sin]
        self.omega = float(omega)
        self.clip = float(clip)
        self.scale = float(scale)
        n = max(len(self.cos), len(self.sin))
        self._pairs = [(self.cos[k] if k < len(self.cos) else 0.0, self.sin[k] if k < len(self.sin) else 0.0)
                       for k in range(n)]

    def scaled(self, s):
        return Trig(self.c0, self.cos, self.sin, self.omega, self.clip, self.scale * s)

    def _one(self, t):
        # cos(kx) + i sin(kx) by repeated multiplication
        z = cmath.exp(1j * self.omega * t)
        zk = 1.0
        v = self.c0
        for a, b in self._pairs:
            zk *= z
            v += a * zk.real + b * zk.imag
        return self.scale * min(max(v, -self.clip), self.clip)

    def __call__(self, t):
        if isinstance(t, float):
            return self._one(t)
        t = np.asarray(t, float)
        v = np.full(t.shape, self.c0)
        for k, a in enumerate(self.cos, 1):
            v = v + a * np.cos(k * self.omega * t)
        for k, a in enumerate(self.sin, 1):
            v = v + a * np.sin(k * self.omega * t)
        return self.scale * np.clip(v, -self.clip, self.clip)


@dataclass
class RiccatiProblem:
    a0: object
    a1: object
    a2: object
    y0: float
    T: float
    label: str = ""

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("T must be positive")

    def rhs(self, t, y):
        return self.a0(t) * y * y + self.a1(t) * y + self.a2(t)


# ------------------------------------------------------------------ integrals

def _sign_changes(f, T, n=513):
    """Roots of f on (0, T) located by sampling and polished with brentq."""
    ts = np.linspace(0.0, T, n)
    v = np.asarray(f(ts), float)
    if v.shape != ts.shape:
        return []
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    return [brentq(lambda x: float(f(x)), ts[i], ts[i + 1], xtol=1e-14) for i in idx]


def _quad(fn, T, points=None, epsrel=1e-10):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(lambda s: float(fn(s)), 0.0, T, epsabs=1e-13, epsrel=epsrel, limit=200,
                            points=points or None)
        except IntegrationWarning as exc:
            raise QuadratureFailure(str(exc)) from None
    return val, err


@dataclass
class Integrals:
    abs_a1: float
    abs_a2: float
    pos_a0: float
    abs_a0: float
    err: float

    @property
    def K(self):
        return self.abs_a2 * math.exp(self.abs_a1)


def integrals(p):
    """Adaptive quadrature of |a1|, |a2|, a0+ and |a0| over [0, T], split at sign changes."""
    k1, k2, k0 = (_sign_changes(f, p.T) for f in (p.a1, p.a2, p.a0))
    parts = [_quad(lambda s: abs(p.a1(s)), p.T, k1), _quad(lambda s: abs(p.a2(s)), p.T, k2),
             _quad(lambda s: max(float(p.a0(s)), 0.0), p.T, k0), _quad(lambda s: abs(p.a0(s)), p.T, k0)]
    (i1, e1), (i2, e2), (ip, ep), (i0, e0) = parts
    # propagate the absolute errors through K = I2 exp(I1)
    err = e2 * math.exp(i1) + i2 * math.exp(i1) * e1 + ep + e0
    return Integrals(i1, i2, ip, i0, err)


def k_constant(p):
    """``K = int |a2| * exp(int |a1|)`` over [0, T]."""
    return integrals(p).K


def existence_conditions(p, ints=None):
    """Both sufficient conditions for existence on [0, T] with signed margins."""
    if p.y0 < 0:
        raise HypothesisViolated("existence conditions need y0 >= 0")
    ints = ints or integrals(p)
    K = ints.K
    E = math.exp(ints.abs_a1)
    lhs1 = math.inf if p.y0 + K == 0 else 1.0 / (p.y0 + K)
    lhs2 = math.inf if K == 0 else 1.0 / K
    m1 = lhs1 - ints.pos_a0 * E
    m2 = lhs2 - ints.abs_a0 * E
    return m1 > 0, m2 > 0, {"cond1": m1, "cond2": m2, "K": K}


# ------------------------------------------------------------------ integration

@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    sol: object
    completed: bool = True
    ode_err: float = 0.0


class _Piecewise:
    """Dense output glued from y-segments and 1/y-segments."""

    def __init__(self, segs):
        self.segs = segs  # (t0, t1, kind, sol)

    def __call__(self, ts):
        ts = np.atleast_1d(np.asarray(ts, float))
        out = np.empty(ts.shape)
        for k, (a, b, kind, sol) in enumerate(self.segs):
            last = k == len(self.segs) - 1
            m = (ts >= a) & ((ts < b) | last)
            if np.any(m):
                v = sol(ts[m])[0]
                out[m] = v if kind == "y" else 1.0 / v
        return out[None, :]


def integrate(p, rtol=1e-10, atol=1e-12, err_check=True, switch=1e3):
    """Integrate on [0, T]; raises :class:`BlowupDetected` when |y| passes 1e12 * scale.

    Once |y| exceeds ``switch * scale`` the reciprocal ``w = 1/y`` is
    integrated instead (it solves w' = -(a0 + a1 w + a2 w^2)), which turns
    the approach to blow-up into an ordinary zero crossing.  With
    ``err_check`` a second solve at 100x looser tolerance gives an a
    posteriori error estimate for y.
    """
    scale = max(1.0, abs(p.y0))
    cap = BLOWUP_FACTOR * scale
    hi = switch * scale
    a0, a1, a2 = p.a0, p.a1, p.a2

    def f_y(t, y):
        v = y[0]
        return [a0(t) * v * v + a1(t) * v + a2(t)]

    def f_w(t, w):
        v = w[0]
        return [-(a0(t) + a1(t) * v + a2(t) * v * v)]

    def leave_y(t, y):
        return hi - abs(y[0])

    def leave_w(t, w):
        return abs(w[0]) - 2.0 / hi

    def blow(t, w):
        return w[0]

    for e in (leave_y, leave_w, blow):
        e.terminal = True
    segs, steps, t, val, kind = [], [], 0.0, float(p.y0), "y"
    if abs(val) >= hi:
        val, kind = 1.0 / val, "w"
    while True:
        if kind == "y":
            sol = solve_ivp(f_y, (t, p.T), [val], method="DOP853", rtol=rtol, atol=atol, dense_output=True,
                            events=leave_y)
        else:
            sol = solve_ivp(f_w, (t, p.T), [val], method="DOP853", rtol=rtol, atol=atol * 1e-6,
                            dense_output=True, events=[leave_w, blow])
        if sol.status < 0:
            raise BlowupDetected(f"integration failed: {sol.message}", t=float(sol.t[-1]),
                                 bracket=(float(sol.t[-1]), p.T))
        t_next = float(sol.t[-1])
        segs.append((t, t_next, kind, sol.sol))
        steps.append(sol.t)
        if sol.status == 0:
            break
        if kind == "w" and len(sol.t_events[1]):
            # 1/y crosses zero at t_next; |y| passed the cap within the last step
            prev = float(sol.t[-2]) if len(sol.t) > 1 else t
            raise BlowupDetected(f"|y| exceeded {cap:.3g}; blow-up at t={t_next:.6g}", t=t_next,
                                 bracket=(prev, t_next))
        val, kind, t = 1.0 / float(sol.y[0, -1]), ("w" if kind == "y" else "y"), t_next
    dense = segs[0][3] if len(segs) == 1 and segs[0][2] == "y" else _Piecewise(segs)
    ts = np.unique(np.concatenate(steps))
    ys = dense(ts)[0]
    ode_err = 0.0
    if err_check:
        try:
            loose = integrate(p, rtol * 100, atol * 100, err_check=False, switch=switch)
            probe = np.linspace(0.0, p.T, 64)
            ode_err = float(np.max(np.abs(loose.sol(probe)[0] - dense(probe)[0])))
        except BlowupDetected:
            ode_err = math.inf
    return Trajectory(ts, ys, dense, True, ode_err)


def running_integrals(p, ts):
    """Cumulative integrals of |a1|, |a2|, a0+, |a0| and a1 at sorted times ``ts`` (from 0)."""
    a0, a1, a2 = (np.broadcast_to(np.asarray(f(ts), float), ts.shape) for f in (p.a0, p.a1, p.a2))
    rows = [np.abs(a1), np.abs(a2), np.maximum(a0, 0.0), np.abs(a0), a1]
    return np.array([cumulative_simpson(r, x=ts, initial=0.0) for r in rows])


# ------------------------------------------------------------------ bounds

@dataclass
class BoundReport:
    passed: bool
    worst_upper: float  # max of y - upper (<= slack is fine)
    worst_lower: float  # max of lower - y
    slack: float
    n_checked: int
    notes: list = field(default_factory=list)


def guaranteed_bounds(p, run):
    """Pointwise (lower, upper) for ``exp(-int a1) y`` from the lemma applied on [0, t].

    ``run`` holds the running integrals of |a1|, |a2|, a0+ and |a0|.
    """
    i1, i2, ip, i0 = run[:4]
    E = np.exp(i1)
    K = i2 * E
    with np.errstate(divide="ignore"):
        d1 = np.where(p.y0 + K > 0, 1.0 / (p.y0 + K), np.inf) - ip * E
        d2 = np.where(K > 0, 1.0 / K, np.inf) - i0 * E
        upper = np.where(d1 > 0, 1.0 / d1, np.inf)
        lower = np.where(d2 > 0, -1.0 / d2, -np.inf)
    return lower, upper


def bound_check(p, traj, ints=None, n_dense=256, literal=False):
    """Check both solution bounds at every step time and on a dense sample.

    The bounds are proved for the gauge variable ``exp(-int a1) y``, which
    is what is checked by default.  ``literal=True`` applies them to y
    itself; that version is false as soon as a1 drives y up (a0 = a2 = 0,
    a1 = 1, y0 = 1 gives y = e^t > 1).
    """
    ints = ints or integrals(p)
    c1, c2, _ = existence_conditions(p, ints)
    notes = [] if (c1 and c2) else ["existence conditions do not hold; bounds may be vacuous"]
    ts = np.union1d(traj.t, np.linspace(0.0, p.T, n_dense))
    fine = np.union1d(ts, np.linspace(0.0, p.T, 8 * n_dense + 1))
    run = running_integrals(p, fine)[:, np.searchsorted(fine, ts)]
    y = traj.sol(ts)[0]
    if not literal:
        y = y * np.exp(-run[4])
    lower, upper = guaranteed_bounds(p, run)
    quad_err = ints.err + float(np.max(np.abs(run[:4, -1] - [ints.abs_a1, ints.abs_a2, ints.pos_a0, ints.abs_a0])))
    # the bounds are 1/D, so an error in D moves them by about bound^2 times that
    mag = np.maximum(1.0, np.maximum(np.abs(np.where(np.isfinite(upper), upper, 0)),
                                     np.abs(np.where(np.isfinite(lower), lower, 0))))
    ode_err = traj.ode_err * (1.0 if literal else float(np.max(np.exp(-run[4]))))
    slack = 10.0 * (quad_err + ode_err) * mag**2
    up = y - upper - slack
    lo = lower - y - slack
    wu, wl = float(np.max(up)), float(np.max(lo))
    return BoundReport(bool(wu <= 0 and wl <= 0), wu, wl, float(np.max(slack)), len(ts), notes)


def comparison_check(a, b, w0, z, T, n=400, tol=1e-7):
    """Maximum principle: z(0) >= w(0) and z' >= a z^2 + b imply z >= w on [0, T]."""
    ts = np.linspace(0.0, T, n)
    if z(0.0) < w0 - tol:
        raise HypothesisViolated(f"z(0)={z(0.0):g} < w(0)={w0:g}")
    h = 1e-6 * max(1.0, T)
    zs = np.array([z(t) for t in ts])
    dz = np.array([(z(t + h) - z(t - h)) / (2 * h) for t in ts])
    gap = dz - (np.array([a(t) for t in ts]) * zs**2 + np.array([b(t) for t in ts]))
    if np.min(gap) < -max(tol, 1e-5):
        i = int(np.argmin(gap))
        raise HypothesisViolated(f"differential inequality fails at t={ts[i]:.6g} by {-gap[i]:.3g}")
    prob = RiccatiProblem(a, Const(0.0), b, w0, T)
    try:
        tr = integrate(prob, err_check=False)
    except BlowupDetected:
        return False
    w = tr.sol(ts)[0]
    return bool(np.all(zs >= w - tol))


# ------------------------------------------------------------------ gauge transform

def _running_a1(p, rtol=1e-12):
    sol = solve_ivp(lambda t, s: [p.a1(t)], (0.0, p.T), [0.0], method="DOP853", rtol=rtol, atol=1e-14,
                    dense_output=True)
    return lambda t: sol.sol(t)[0]


def gauge_transform(p):
    """Problem without the linear term: ``ytilde = exp(-int a1) y``.

    Returns ``(problem, back)`` where ``back(t, ytilde)`` maps to y.
    """
    S = _running_a1(p)

    def a0t(t):
        return math.exp(S(t)) * p.a0(t)

    def a2t(t):
        return math.exp(-S(t)) * p.a2(t)

    def back(t, yt):
        return np.exp(S(t)) * yt

    return RiccatiProblem(a0t, Const(0.0), a2t, p.y0, p.T, label=p.label + "~"), back


# ------------------------------------------------------------------ generators

def _random_trig(rng, modes, amp, omega, clip):
    return Trig(rng.uniform(-amp, amp), rng.uniform(-amp, amp, modes) / 2, rng.uniform(-amp, amp, modes) / 2,
                omega, clip)


def random_problem(rng, T=1.0, modes=3, margin=0.1, clip=5.0, max_tries=60):
    """Random smooth problem meeting both existence conditions with ``margin``.

    Coefficient amplitudes are shrunk by 0.7 until the margins hold.  All
    the integrals are linear in the amplitude, so they are computed once.
    """
    omega = 2 * math.pi / T * rng.uniform(0.5, 2.0)
    shapes = [_random_trig(rng, modes, 1.0, omega, clip) for _ in range(3)]
    y0 = float(rng.uniform(0.0, 2.0))
    s = float(rng.uniform(0.5, 3.0))
    unit = integrals(RiccatiProblem(*shapes, y0, T))
    for _ in range(max_tries):
        ints = Integrals(s * unit.abs_a1, s * unit.abs_a2, s * unit.pos_a0, s * unit.abs_a0, s * unit.err)
        p = RiccatiProblem(*(f.scaled(s) for f in shapes), y0, T)
        c1, c2, m = existence_conditions(p, ints)
        if m["cond1"] >= margin and m["cond2"] >= margin:
            return p
        s *= 0.7
    raise DomainError("could not meet the existence margins")


def blowup_problem(rng, modes=2, clip=50.0):
    """Problem violating the first condition whose solution provably blows up before T.

    a0 >= a_min > 0 and y0 > 2 max|a1| / a_min give y' >= a_min y^2 / 2 + a2,
    with a2 >= 0, so y blows up before 2 / (a_min y0) < T.
    """
    a_min = float(rng.uniform(0.5, 2.0))
    amp = float(rng.uniform(0.0, 1.0))
    cos = np.abs(rng.uniform(0.0, amp, modes))
    # keep a0 >= a_min by bounding the oscillating part by its own c0 surplus
    a0 = Trig(a_min + cos.sum(), cos, (), rng.uniform(1.0, 6.0), clip)
    a1 = _random_trig(rng, modes, float(rng.uniform(0.0, 1.0)), rng.uniform(1.0, 6.0), clip)
    a1max = abs(a1.c0) + np.abs(a1.cos).sum() + np.abs(a1.sin).sum()
    c2 = np.abs(rng.uniform(0.0, 0.5, modes))
    a2 = Trig(c2.sum(), c2, (), rng.uniform(1.0, 6.0), clip)
    y0 = float(max(1.0, 2.5 * a1max / a_min) * rng.uniform(1.0, 2.0))
    T = 3.0 / (a_min * y0)
    return RiccatiProblem(a0, a1, a2, y0, T, label="blowup")


# ------------------------------------------------------------------ presets and batches

PRESETS = {
    "decay": lambda: RiccatiProblem(Const(-1.0), Const(0.0), Const(0.0), 1.0, 1.0, "decay"),
    "linear": lambda: RiccatiProblem(Const(0.0), Const(0.0), Const(1.0), 0.0, 3.0, "linear"),
    "blowup": lambda: RiccatiProblem(Const(1.0), Const(0.0), Const(0.0), 1.0, 2.0, "blowup"),
    "short": lambda: RiccatiProblem(Const(1.0), Const(0.0), Const(0.0), 1.0, 0.5, "short"),
    "damped": lambda: RiccatiProblem(Const(-1.0), Const(-0.5), Const(0.2), 0.5, 2.0, "damped"),
}


def _coef_from_json(v):
    if isinstance(v, bool):
        raise ConfigError("coefficient must be a number or {'poly': [...]}")
    if isinstance(v, (int, float)):
        return Const(float(v))
    if isinstance(v, dict) and set(v) == {"poly"} and isinstance(v["poly"], list) and v["poly"]:
        if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v["poly"]):
            raise ConfigError("poly entries must be numbers")
        return Poly(v["poly"])
    raise ConfigError(f"bad coefficient {v!r}")


def problem_from_json(obj):
    if not isinstance(obj, dict):
        raise ConfigError("each problem must be an object")
    if "preset" in obj:
        extra = set(obj) - {"preset", "id"}
        if extra:
            raise ConfigError(f"unknown keys with preset: {sorted(extra)}")
        name = obj["preset"]
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}")
        p = PRESETS[name]()
        p.label = str(obj.get("id", name))
        return p
    allowed = {"id", "a0", "a1", "a2", "y0", "T"}
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"unknown keys: {sorted(extra)}")
    missing = {"a0", "a1", "a2", "y0", "T"} - set(obj)
    if missing:
        raise ConfigError(f"missing keys: {sorted(missing)}")
    for k in ("y0", "T"):
        if isinstance(obj[k], bool) or not isinstance(obj[k], (int, float)):
            raise ConfigError(f"{k} must be a number")
    try:
        return RiccatiProblem(_coef_from_json(obj["a0"]), _coef_from_json(obj["a1"]), _coef_from_json(obj["a2"]),
                              float(obj["y0"]), float(obj["T"]), str(obj.get("id", "")))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class BatchRow:
    id: str
    cond1: bool
    cond2: bool
    K: float
    completed: bool
    bound_ok: bool


def evaluate(p, ints=None):
    """One batch row: conditions, K, whether [0, T] was reached, whether the bounds held."""
    ints = ints or integrals(p)
    if p.y0 >= 0:
        c1, c2, _ = existence_conditions(p, ints)
    else:
        c1 = c2 = False
    try:
        tr = integrate(p)
    except BlowupDetected:
        return BatchRow(p.label, c1, c2, ints.K, False, False)
    ok = bound_check(p, tr, ints).passed if (c1 and c2) else False
    return BatchRow(p.label, c1, c2, ints.K, True, ok)


def thread_count():
    raw = os.environ.get("SHOCKFRONT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def run_batch(problems, threads=None):
    """Evaluate problems in order; threads only change the wall time, not the output."""
    threads = threads or thread_count()
    if threads == 1 or len(problems) < 2:
        return [evaluate(p) for p in problems]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(evaluate, problems))
