"""Scenario files: parsing, validation and the initial-data descriptors.

Radial coordinates inside descriptors are in units of R0 (``s = r / R0``)
so that one descriptor gives the same state data at every R0 of a sweep.
"""
from dataclasses import dataclass, field
import hashlib
import json
import math

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError
from .eos import model_from_json
from .riemann import SymmetryConfig, from_riemann, to_riemann
from .shock import downstream_state
from .smooth import stationary_profile

DATA_TYPES = ("constant", "polynomial", "tabulated", "stationary")
_DATA_KEYS = {
    "constant": {"rho", "u"},
    "polynomial": {"rho", "u"},
    "tabulated": {"s", "rho", "u"},
    "stationary": {"rho", "u", "range"},
}
_COMMON = {"type", "bump"}
_BUMP_KEYS = {"center", "width", "amplitude", "component"}


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def scenario_hash(obj, seed=None):
    h = hashlib.sha256(canonical({"scenario": obj, "seed": seed}).encode())
    return h.hexdigest()[:16]


def _num(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{what} must be a finite number")
    return float(v)


def _numlist(v, what, min_len=1):
    if not isinstance(v, list) or len(v) < min_len:
        raise ConfigError(f"{what} must be a list of at least {min_len} numbers")
    return [_num(x, what) for x in v]


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(obj) - allowed
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _bump(spec):
    _check_keys(spec, _BUMP_KEYS, _BUMP_KEYS, "bump")
    c = _num(spec["center"], "bump.center")
    w = _num(spec["width"], "bump.width")
    a = _num(spec["amplitude"], "bump.amplitude")
    comp = spec["component"]
    if comp not in ("w1", "w2") or w <= 0:
        raise ConfigError("bump needs component 'w1' or 'w2' and width > 0")

    def add(s):
        z = (s - c) / w
        return a * np.where(np.abs(z) < 1.0, np.cos(0.5 * math.pi * np.clip(z, -1, 1)) ** 4, 0.0)

    return (0 if comp == "w1" else 1), add


@dataclass
class DataSpec:
    """Initial data of one side as a function of s = r / R0."""

    kind: str
    raw: dict
    profile: object            # s -> (w1, w2)
    natural: bool = False      # valid past R0 without prolongation

    def at_radius(self, R0):
        def data(r):
            s = np.asarray(r, float) / R0
            a, b = self.profile(s)
            return np.broadcast_to(a, s.shape).astype(float), np.broadcast_to(b, s.shape).astype(float)
        return data


def parse_data(model, cfg, spec, where, jump_from=None):
    """Build a :class:`DataSpec`; ``"u": "jump"`` picks u- so the jump at s=1 is compatible."""
    if not isinstance(spec, dict) or spec.get("type") not in DATA_TYPES:
        raise ConfigError(f"{where}.type must be one of {DATA_TYPES}")
    kind = spec["type"]
    _check_keys(spec, _DATA_KEYS[kind] | _COMMON, _DATA_KEYS[kind] | {"type"}, where)
    u_spec = spec["u"]
    if u_spec == "jump":
        if jump_from is None or kind not in ("constant", "stationary"):
            raise ConfigError(f"{where}: 'u': 'jump' is only allowed for constant/stationary left data")
        rho = _num(spec["rho"], f"{where}.rho")
        w_plus = jump_from(1.0)
        rp, up = (float(x) for x in from_riemann(model, w_plus))
        try:
            u_val = 0.5 * sum(downstream_state(model, rho, rp, up).w_minus)
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    try:
        if kind == "constant":
            rho = _num(spec["rho"], f"{where}.rho")
            u = u_val if u_spec == "jump" else _num(u_spec, f"{where}.u")
            w = to_riemann(model, (rho, u))
            w1, w2 = float(w[0]), float(w[1])

            def profile(s):
                s = np.asarray(s, float)
                return np.full_like(s, w1), np.full_like(s, w2)
            natural = True
        elif kind == "polynomial":
            pr = _numlist(spec["rho"], f"{where}.rho")
            pu = _numlist(u_spec, f"{where}.u")

            def profile(s):
                s = np.asarray(s, float)
                w = to_riemann(model, (np.polynomial.polynomial.polyval(s, pr),
                                       np.polynomial.polynomial.polyval(s, pu)))
                return np.asarray(w[0], float), np.asarray(w[1], float)
            natural = False
        elif kind == "tabulated":
            s_tab = _numlist(spec["s"], f"{where}.s", 4)
            r_tab = _numlist(spec["rho"], f"{where}.rho", 4)
            u_tab = _numlist(u_spec, f"{where}.u", 4)
            if not (len(s_tab) == len(r_tab) == len(u_tab)) or np.any(np.diff(s_tab) <= 0):
                raise ConfigError(f"{where}: tables need equal lengths and increasing s")
            wt = to_riemann(model, (np.array(r_tab), np.array(u_tab)))
            sp1, sp2 = CubicSpline(s_tab, wt[0]), CubicSpline(s_tab, wt[1])
            lo, hi = s_tab[0], s_tab[-1]

            def profile(s):
                s = np.asarray(s, float)
                if np.any(s < lo - 1e-12) or np.any(s > hi + 1e-12):
                    raise DomainError(f"tabulated data cover s in [{lo:g}, {hi:g}] only")
                return sp1(s), sp2(s)
            natural = False
        else:
            rho = _num(spec["rho"], f"{where}.rho")
            u = u_val if u_spec == "jump" else _num(u_spec, f"{where}.u")
            lo, hi = _numlist(spec["range"], f"{where}.range", 2)[:2]
            w = to_riemann(model, (rho, u))
            # the stationary equations only see 1/r, so a profile in s serves every R0
            profile = stationary_profile(model, cfg, (float(w[0]), float(w[1])), 1.0, lo, hi)
            natural = True
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    if "bump" in spec:
        comp, add = _bump(spec["bump"])
        base = profile

        def profile(s, base=base, comp=comp, add=add):
            w = list(base(s))
            w[comp] = w[comp] + add(np.asarray(s, float))
            return w[0], w[1]
    return DataSpec(kind, spec, profile, natural)


# ------------------------------------------------------------------ scenario kinds

_THERMO = {"name", "model", "rho_range", "n"}
_SMOOTH = {"name", "model", "d", "initial", "r_range", "t_end", "numerics"}
_SMOOTH_NUM = {"nr", "nt", "boundary", "n_paths", "resolve_frac"}
_SHOCK = {"name", "model", "d", "R0", "left", "right", "t_end", "t_end_per_R0", "numerics",
          "require_hypotheses", "C0"}
_RICCATI = {"name", "problems", "random", "blowup", "T"}


@dataclass
class Scenario:
    kind: str
    raw: dict
    name: str
    model: object = None
    cfg: object = None
    data: dict = field(default_factory=dict)


def _model_cfg(obj, need_d=True):
    model = model_from_json(obj.get("model"))
    cfg = None
    if need_d:
        d = obj.get("d")
        if d not in (1, 2, 3):
            raise ConfigError("d must be 1, 2 or 3")
        cfg = SymmetryConfig(int(d))
    return model, cfg


def parse_scenario(obj, kind):
    """Validate a scenario object for one subcommand; raises ConfigError on any problem."""
    if kind == "riccati" and isinstance(obj, list):
        obj = {"problems": obj}
    if not isinstance(obj, dict):
        raise ConfigError("scenario must be a JSON object")
    name = str(obj.get("name", kind))
    if kind == "thermo-check":
        _check_keys(obj, _THERMO, {"model"}, "scenario")
        model, _ = _model_cfg(obj, need_d=False)
        rng = _numlist(obj.get("rho_range", [1e-3, 10.0]), "rho_range", 2)
        n = obj.get("n", 2001)
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError("n must be an integer >= 2")
        return Scenario(kind, obj, name, model, None, {"rho_range": rng[:2], "n": n})
    if kind == "simulate-smooth":
        _check_keys(obj, _SMOOTH, {"model", "d", "initial", "r_range", "t_end"}, "scenario")
        model, cfg = _model_cfg(obj)
        r_lo, r_hi = _numlist(obj["r_range"], "r_range", 2)[:2]
        t_end = _num(obj["t_end"], "t_end")
        num = obj.get("numerics", {})
        _check_keys(num, _SMOOTH_NUM, set(), "numerics")
        spec = parse_data(model, cfg, obj["initial"], "initial")
        # the smooth solver takes plain radii: the descriptor coordinate is r itself here
        return Scenario(kind, obj, name, model, cfg, {"initial": spec.at_radius(1.0), "r_range": (r_lo, r_hi),
                                                      "t_end": t_end, "numerics": num})
    if kind == "build-shock":
        _check_keys(obj, _SHOCK, {"model", "d", "R0", "left", "right"}, "scenario")
        model, cfg = _model_cfg(obj)
        r0 = obj["R0"]
        R0s = _numlist(r0, "R0") if isinstance(r0, list) else [_num(r0, "R0")]
        if any(x <= 0 for x in R0s):
            raise ConfigError("R0 must be positive")
        if ("t_end" in obj) == ("t_end_per_R0" in obj):
            raise ConfigError("give exactly one of t_end and t_end_per_R0")
        num = obj.get("numerics", {})
        from .angular import DEFAULT_NUMERICS
        _check_keys(num, set(DEFAULT_NUMERICS), set(), "numerics")
        right = parse_data(model, cfg, obj["right"], "right")
        left = parse_data(model, cfg, obj["left"], "left",
                          jump_from=lambda s: tuple(float(np.ravel(x)[0]) for x in right.profile(np.array([s]))))
        req = obj.get("require_hypotheses", True)
        if not isinstance(req, bool):
            raise ConfigError("require_hypotheses must be true or false")
        C0 = None if obj.get("C0") is None else _num(obj["C0"], "C0")
        return Scenario(kind, obj, name, model, cfg, {
            "R0": R0s, "left": left, "right": right, "t_end": obj.get("t_end"),
            "t_end_per_R0": obj.get("t_end_per_R0"), "numerics": num, "require_hypotheses": req, "C0": C0})
    if kind == "riccati":
        _check_keys(obj, _RICCATI, set(), "scenario")
        from .riccati import problem_from_json
        probs = obj.get("problems", [])
        if not isinstance(probs, list):
            raise ConfigError("problems must be a list")
        parsed = [problem_from_json(p) for p in probs]
        for i, p in enumerate(parsed):
            if not p.label:
                p.label = str(i)
        counts = {}
        for key in ("random", "blowup"):
            v = obj.get(key, 0)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"{key} must be a nonnegative integer")
            counts[key] = v
        T = _num(obj.get("T", 1.0), "T")
        return Scenario(kind, obj, name, data={"problems": parsed, "T": T, **counts})
    raise ConfigError(f"unknown scenario kind {kind!r}")
