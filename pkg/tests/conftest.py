import numpy as np
import pytest

from collapse_sim.config import load_preset
from collapse_sim.pde_solver import SchemeConfig, StopRule, make_nonsymmetric, make_selfsimilar_ic, run

MATCHED_TIMES = tuple(0.03 * k for k in range(1, 11))

# filled by test_acceptance.report and echoed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def block_ic():
    return load_preset("figure1").initial_condition()


@pytest.fixture(scope="session")
def block_explicit(block_ic):
    cfg = SchemeConfig(on_stability="adapt", snapshot_every=5000, snapshot_times=MATCHED_TIMES)
    return run(block_ic, 1.75, cfg)


@pytest.fixture(scope="session")
def block_implicit(block_ic):
    return run(block_ic, 1.75, SchemeConfig(scheme="implicit", snapshot_times=MATCHED_TIMES))


@pytest.fixture(scope="session")
def nonsym_run():
    return run(make_nonsymmetric(), 1.75, SchemeConfig(on_stability="adapt", snapshot_every=2500))


@pytest.fixture(scope="session")
def selfsim_run():
    ic = make_selfsimilar_ic(B=1.0, t0=1.0, t_start=0.0, c=1.75)
    return run(ic, 1.75, SchemeConfig(N=202, dt=1e-5, snapshot_every=2000))


@pytest.fixture(scope="session")
def selfsim_pair():
    """Coarse and refined runs to a common time for the refinement study."""
    ic = make_selfsimilar_ic(B=1.0, t0=1.0, t_start=0.0, c=1.75)
    stop = StopRule(max_time=0.6)
    coarse = run(ic, 1.75, SchemeConfig(N=202, dt=1e-5, stop=stop, snapshot_every=2000))
    fine = run(ic, 1.75, SchemeConfig(N=404, dt=2.5e-6, stop=stop, snapshot_every=8000))
    return coarse, fine


def reproduction_error(series, t0=1.0, B=1.0):
    """Largest deviation from the exact c = 1.75 dome: scaled profile, x_f and h_max."""
    tau = t0 - series.t
    xf_err = np.max(np.abs(series.x_f / (B * tau**1.5) - 1.0))
    hm_err = np.max(np.abs(series.h_max / (B * B * tau**2) - 1.0))
    prof = max(np.max(np.abs(s.h / s.h.max() - (1.0 - s.xi**2))) for s in series.snapshots)
    return max(xf_err, hm_err, prof)
