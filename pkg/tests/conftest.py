import numpy as np
import pytest

from shockfront.eos import PerfectGas, PSystem, VanDerWaals
from shockfront.riemann import SymmetryConfig


@pytest.fixture
def pg2():
    return PerfectGas(2.0)


@pytest.fixture
def sph():
    return SymmetryConfig(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ALL_MODELS = [PerfectGas(1.4), PerfectGas(2.0), PerfectGas(2.5), VanDerWaals(2.0, 0.05), VanDerWaals(2.0, 0.1),
              PSystem(2.0)]


def model_id(m):
    return f"{m.kind}-{'-'.join(f'{p:g}' for p in m.params)}"


def constant_data(model, rho, u):
    from shockfront.riemann import to_riemann
    w = to_riemann(model, (rho, u))
    return lambda r: (np.full(np.shape(r), float(w.w1)), np.full(np.shape(r), float(w.w2)))


WIND_LEFT = {"type": "stationary", "rho": 20.0, "u": "jump", "range": [0.8, 30.0],
             "bump": {"center": 0.93, "width": 0.05, "amplitude": 5.0, "component": "w1"}}
WIND_RIGHT = {"type": "constant", "rho": 1.0, "u": 0.0}
WIND_NUMERICS = {"left_lo": 0.85, "left_boundary": "frozen", "extend_left": "natural", "extend_right": "natural"}


def wind_specs(model, cfg):
    """Supersonic wind with a compressive bump running into gas at rest (data in s = r/R0)."""
    from shockfront.scenario import parse_data
    right = parse_data(model, cfg, WIND_RIGHT, "right")
    left = parse_data(model, cfg, WIND_LEFT, "left",
                      jump_from=lambda s: tuple(float(np.ravel(x)[0]) for x in right.profile(np.array([s]))))
    return left, right


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
