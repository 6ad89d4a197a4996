import warnings

import numpy as np
import pytest

from heraldshape.filters import lorentzian
from heraldshape.heralding import apply_filter
from heraldshape.sources import FiniteWindowExponential, default_window_grid, joint_amplitude

# 150:10:1 windowed scenario at t_c/8
T_C, T_M, T_U = 1.0, 10.0, 150.0
STEP = 0.125


@pytest.fixture(scope="session")
def window_model():
    return FiniteWindowExponential(T_C, T_U)


@pytest.fixture(scope="session")
def window_joint(window_model):
    return joint_amplitude(window_model, default_window_grid(window_model, STEP))


@pytest.fixture(scope="session")
def window_filtered(window_joint):
    return apply_filter(window_joint, lorentzian(T_M))


@pytest.fixture
def no_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        yield


def l2_rel(a, b, step=1.0):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2) / np.sum(np.abs(b) ** 2)))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"criterion {criterion:<5} {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
