import numpy as np
import pytest

from fastgreen import KernelEvaluator, Medium, SamplingConfig, build_plan

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def vacuum():
    return Medium(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def demo_plan(vacuum):
    """lambda0 = 1 m, r in [1e-4, 1], 1000 samples per wavelength, default refinement."""
    return build_plan(SamplingConfig(r_min=1e-4, r_max=1.0), vacuum)


@pytest.fixture(scope="session")
def demo_ev(demo_plan):
    return KernelEvaluator.from_plan(demo_plan)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
