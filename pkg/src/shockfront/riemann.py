"""Riemann invariants, characteristic speeds and the geometric source."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, GridError

VACUUM_TOL = 1e-12


class FluidState(NamedTuple):
    rho: float
    u: float


class RiemannState(NamedTuple):
    w1: float
    w2: float


@dataclass(frozen=True)
class SymmetryConfig:
    d: int = 3

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError("d must be 1, 2 or 3")


def to_riemann(model, state):
    rho, u = np.asarray(state[0], float), np.asarray(state[1], float)
    H = model.enthalpy(rho)
    return RiemannState(u - H, u + H)


def density(model, w):
    w1, w2 = np.asarray(w[0], float), np.asarray(w[1], float)
    gap = w2 - w1
    if np.any(~(gap >= VACUUM_TOL)):
        raise DomainError("w2 - w1 below vacuum threshold")
    return model.enthalpy_inverse(0.5 * gap)


def from_riemann(model, w):
    w1, w2 = np.asarray(w[0], float), np.asarray(w[1], float)
    return FluidState(density(model, w), 0.5 * (w1 + w2))


def lambdas(model, w):
    rho, u = from_riemann(model, w)
    c = model.sound_speed(rho)
    return u - c, u + c


def source_f(model, cfg, r, w):
    r = np.asarray(r, float)
    if np.any(~(r > 0)):
        raise DomainError("source term needs r > 0")
    rho, u = from_riemann(model, w)
    if cfg.d == 1:
        return np.zeros(np.broadcast(r, u).shape)[()]
    return (cfg.d - 1) * u * model.sound_speed(rho) / r


def reduced_residual(model, cfg, t, r, w1, w2):
    """Centered-difference residual of both characteristic equations.

    ``w1`` and ``w2`` have shape ``(len(t), len(r))``; boundary rows/columns
    and nodes with NaN neighbours come back as NaN.
    """
    t = np.asarray(t, float)
    r = np.asarray(r, float)
    w1 = np.asarray(w1, float)
    w2 = np.asarray(w2, float)
    if t.ndim != 1 or r.ndim != 1 or len(t) < 3 or len(r) < 3:
        raise GridError("residual needs at least 3 points in t and r")
    if w1.shape != (len(t), len(r)) or w2.shape != w1.shape:
        raise GridError(f"field shape {w1.shape} does not match grid {(len(t), len(r))}")
    if np.any(np.diff(t) <= 0) or np.any(np.diff(r) <= 0):
        raise GridError("grid coordinates must be strictly increasing")
    res1 = np.full(w1.shape, np.nan)
    res2 = np.full(w1.shape, np.nan)
    dt = (t[2:] - t[:-2])[:, None]
    dr = (r[2:] - r[:-2])[None, :]
    c1, c2 = w1[1:-1, 1:-1], w2[1:-1, 1:-1]
    ok = np.isfinite(c1) & np.isfinite(c2) & (c2 - c1 > VACUUM_TOL)
    c1 = np.where(ok, c1, 0.0)
    c2 = np.where(ok, c2, 1.0)
    rr = np.broadcast_to(r[None, 1:-1], c1.shape)
    l1, l2 = lambdas(model, (c1, c2))
    f = source_f(model, cfg, rr, (c1, c2))
    with np.errstate(invalid="ignore"):
        r1 = (w1[2:, 1:-1] - w1[:-2, 1:-1]) / dt + l1 * (w1[1:-1, 2:] - w1[1:-1, :-2]) / dr - f
        r2 = (w2[2:, 1:-1] - w2[:-2, 1:-1]) / dt + l2 * (w2[1:-1, 2:] - w2[1:-1, :-2]) / dr + f
    res1[1:-1, 1:-1] = np.where(ok, r1, np.nan)
    res2[1:-1, 1:-1] = np.where(ok, r2, np.nan)
    return res1, res2
