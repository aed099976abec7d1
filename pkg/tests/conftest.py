from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scalar_tail.fields import ChargeParams
from scalar_tail.minkowski import Worldline


def hyperbolic_kinematics(alpha: float):
    """Rest until tau = 0, then constant proper acceleration alpha along x."""

    def kin(t):
        if t < 0:
            return np.array([t, 0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(4)
        ch, sh = np.cosh(alpha * t), np.sinh(alpha * t)
        z = np.array([sh / alpha, (ch - 1.0) / alpha, 0.0, 0.0])
        return z, np.array([ch, sh, 0.0, 0.0]), alpha * np.array([sh, ch, 0.0, 0.0])

    return kin


def hyperbolic_worldline(alpha=0.5, tau_end=3.0, n=31) -> Worldline:
    return Worldline.from_function(hyperbolic_kinematics(alpha), np.linspace(0.0, tau_end, n))


@pytest.fixture
def hyperbolic():
    return hyperbolic_worldline()


@pytest.fixture
def params():
    return ChargeParams(1.0, 0.7, 1.3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
