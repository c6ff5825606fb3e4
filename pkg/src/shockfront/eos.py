"""Equations of state on the frozen isentrope.

The entropy constant is fixed so that the sound speed matches the usual
closed forms exactly; all quantities are dimensionless.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import _core
from .errors import DomainError, NotApplicable

VDW_GUARD = 1e-9


@dataclass(frozen=True)
class ThermoCoefficients:
    gamma: float
    grueneisen: float
    delta: float
    fundamental_derivative: float


@dataclass
class ValidationReport:
    passed: bool
    checks: dict
    margins: dict
    notes: list = field(default_factory=list)

    def failures(self):
        return [k for k, ok in self.checks.items() if not ok]


class GasModel:
    """Common interface; subclasses only provide the three shape parameters."""

    kind = ""

    @property
    def params(self):
        raise NotImplementedError

    @property
    def rho_max(self):
        return math.inf

    @property
    def nu(self):
        g = self.params[1]
        return (g + 1.0) / (g - 1.0)

    def _check(self, rho):
        rho = np.asarray(rho, dtype=float)
        bad = ~(rho > 0)
        if np.isfinite(self.rho_max):
            bad |= rho >= (1.0 - VDW_GUARD) * self.rho_max
        if np.any(bad):
            first = rho[bad].flat[0] if rho.ndim else float(rho)
            raise DomainError(f"density {first!r} outside (0, {self.rho_max})")
        return rho

    def pressure(self, rho):
        return _core.pressure(*self.params, self._check(rho))

    def sound_speed(self, rho):
        return _core.sound_speed(*self.params, self._check(rho))

    def enthalpy(self, rho):
        return _core.enthalpy(*self.params, self._check(rho))

    def enthalpy_inverse(self, h):
        h = np.asarray(h, dtype=float)
        if np.any(~(h > 0)):
            raise DomainError("H^-1 needs h > 0")
        return _core.enthalpy_inverse(*self.params, h)

    def dH(self, rho):
        """H'(rho) = c / rho."""
        rho = self._check(rho)
        return _core.sound_speed(*self.params, rho) / rho

    def fundamental_derivative(self, rho):
        return _core.fundamental(*self.params, self._check(rho))

    def thermo_coefficients(self, rho):
        raise NotApplicable(f"{self.kind} has no complete state law")

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class PerfectGas(GasModel):
    gamma0: float
    kind = "perfect"

    def __post_init__(self):
        if not self.gamma0 > 1:
            raise DomainError("gamma0 must exceed 1")

    @property
    def params(self):
        g = float(self.gamma0)
        return (math.sqrt(g * (g - 1.0)), g, 0.0)

    def thermo_coefficients(self, rho):
        self._check(rho)
        g = self.gamma0
        return ThermoCoefficients(g, g - 1.0, g - 1.0, 0.5 * (g + 1.0))

    def to_json(self):
        return {"type": "perfect", "gamma0": self.gamma0}


@dataclass(frozen=True)
class VanDerWaals(GasModel):
    gamma0: float
    b: float
    kind = "vdw"

    def __post_init__(self):
        if not self.gamma0 > 1:
            raise DomainError("gamma0 must exceed 1")
        if not self.b >= 0:
            raise DomainError("covolume b must be nonnegative")

    @property
    def params(self):
        g = float(self.gamma0)
        return (math.sqrt(g * (g - 1.0)), g, float(self.b))

    @property
    def rho_max(self):
        return 1.0 / self.b if self.b > 0 else math.inf

    def thermo_coefficients(self, rho):
        rho = float(self._check(rho))
        f = 1.0 / (1.0 - self.b * rho)  # v / (v - b)
        g = self.gamma0
        return ThermoCoefficients(g * f, (g - 1.0) * f, (g - 1.0) * f, 0.5 * (g + 1.0) * f)

    def to_json(self):
        return {"type": "vdw", "gamma0": self.gamma0, "b": self.b}


@dataclass(frozen=True)
class PSystem(GasModel):
    gamma: float
    kind = "psystem"

    def __post_init__(self):
        if not self.gamma > 1:
            raise DomainError("gamma must exceed 1")

    @property
    def params(self):
        g = float(self.gamma)
        return (math.sqrt(g), g, 0.0)

    def to_json(self):
        return {"type": "psystem", "gamma": self.gamma}


_FIELDS = {"perfect": {"gamma0"}, "vdw": {"gamma0", "b"}, "psystem": {"gamma"}}


def model_from_json(obj):
    """Build a model from ``{"type": ..., ...}``; unknown or missing fields are errors."""
    from .errors import ConfigError

    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError("model must be an object with a 'type' field")
    kind = obj["type"]
    if kind not in _FIELDS:
        raise ConfigError(f"unknown model type {kind!r}")
    keys = set(obj) - {"type"}
    extra = keys - _FIELDS[kind]
    missing = _FIELDS[kind] - keys
    if extra:
        raise ConfigError(f"unknown model fields {sorted(extra)}")
    if missing:
        raise ConfigError(f"missing model fields {sorted(missing)}")
    try:
        vals = {k: float(obj[k]) for k in keys}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model parameters must be numbers: {exc}") from None
    try:
        if kind == "perfect":
            return PerfectGas(vals["gamma0"])
        if kind == "vdw":
            return VanDerWaals(vals["gamma0"], vals["b"])
        return PSystem(vals["gamma"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def pressure(model, rho):
    return model.pressure(rho)


def sound_speed(model, rho):
    return model.sound_speed(rho)


def enthalpy_H(model, rho):
    return model.enthalpy(rho)


def enthalpy_H_inverse(model, h):
    return model.enthalpy_inverse(h)


def fundamental_derivative(model, rho):
    return model.fundamental_derivative(rho)


def thermo_coefficients(model, rho):
    return model.thermo_coefficients(rho)


def validate_bethe_weyl(model, rho_range, n=2001):
    """Sample the admissibility conditions on a log-uniform grid of ``rho_range``."""
    lo, hi = (float(x) for x in rho_range)
    if not (0 < lo < hi) or hi >= model.rho_max:
        raise DomainError(f"invalid density range [{lo}, {hi}] for rho_max={model.rho_max}")
    rho = np.geomspace(lo, hi, n)
    G = model.fundamental_derivative(rho)
    checks, margins, notes = {}, {}, []
    if isinstance(model, PSystem):
        gam = np.full_like(rho, model.gamma)
        notes.append("p-system: only gamma and G are defined; Gruneisen/delta checks skipped")
    else:
        co = [model.thermo_coefficients(x) for x in rho]
        gam = np.array([c.gamma for c in co])
        gru = np.array([c.grueneisen for c in co])
        dlt = np.array([c.delta for c in co])
        checks["grueneisen>0"] = bool(np.all(gru > 0))
        margins["grueneisen>0"] = float(gru.min())
        checks["gamma*delta>=grueneisen^2"] = bool(np.all(gam * dlt >= gru**2 * (1 - 1e-12)))
        margins["gamma*delta>=grueneisen^2"] = float(np.min(gam * dlt - gru**2))
    checks["gamma>0"] = bool(np.all(gam > 0))
    margins["gamma>0"] = float(gam.min())
    checks["G>0"] = bool(np.all(G > 0))
    margins["G>0"] = float(G.min())
    checks["1<G<2"] = bool(np.all((G > 1) & (G < 2)))
    margins["1<G<2"] = float(min(np.min(G - 1), np.min(2 - G)))
    # c/rho ~ rho^((gamma-3)/2) near 0, integrable iff gamma > 1
    checks["c/rho integrable at 0"] = model.params[1] > 1
    margins["c/rho integrable at 0"] = (model.params[1] - 3) / 2 + 1
    checks["p diverges at rho_max"] = bool(np.isfinite(model.rho_max))
    if not np.isfinite(model.rho_max):
        notes.append("no maximal density: pressure divergence condition not applicable")
    required = [k for k in checks if k != "p diverges at rho_max"]
    return ValidationReport(all(checks[k] for k in required), checks, margins, notes)
