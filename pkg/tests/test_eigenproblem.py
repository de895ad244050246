import numpy as np
import pytest

from collapse_sim.eigenproblem import (
    BracketError,
    IntegrationBreakdown,
    ShootingConfig,
    integrate_from_interface,
    ode_residual,
    solve_eigenvalue,
    start_coefficient,
)
from collapse_sim.physmap import DomainError
from collapse_sim.selfsimilar import mu_of_c, profile_F


def test_start_coefficient_matches_parabola():
    # (1 - xi^2)/(2(c-1)) = s/(c-1) - s^2/(2(c-1)) with s = 1 - xi
    for c in (1.6, 1.75, 3.0, 10.0):
        assert start_coefficient(c, mu_of_c(c)) == pytest.approx(-1 / (2 * (c - 1)), rel=1e-12)


def test_config_validation():
    for kw in (dict(c=1.5), dict(c=1.75, start_offset=2e-3), dict(c=1.75, ode_step=2e-3), dict(c=1.75, mu_bracket=(2.0, 1.0))):
        with pytest.raises(DomainError):
            ShootingConfig(**kw)


def test_integrate_at_true_eigenvalue():
    cfg = ShootingConfig(c=1.75)
    xi, F, _, g0 = integrate_from_interface(1.75, 1.5, cfg)
    assert xi[-1] == 0.0
    assert abs(g0) < 1e-6
    assert F[-1] == pytest.approx(2 / 3, abs=1e-6)


def _side(c, mu):
    try:
        return np.sign(integrate_from_interface(c, mu, ShootingConfig(c=c))[3])
    except IntegrationBreakdown as exc:
        return exc.direction


def test_sign_structure_around_eigenvalue():
    # below the eigenvalue F'(0) < 0, above it the trajectory turns down
    assert _side(1.75, 1.2) == -1
    assert _side(1.75, 3.0) == +1


@pytest.mark.parametrize("c", [1.75, 2.0, 5.0])
def test_solve_eigenvalue_examples(c):
    sol = solve_eigenvalue(c)
    assert abs(sol.mu_numeric - mu_of_c(c)) < 1e-6
    assert np.all(sol.profile >= 0)
    assert sol.xi[0] == 0.0 and sol.xi[-1] == pytest.approx(1 - 1e-3)


def test_resonant_case_recovers_start_coefficient():
    sol = solve_eigenvalue(2.0)
    assert sol.resonant and sol.mu_numeric == 1.0
    assert any(abs(cand["root"] + 0.5) < 1e-8 for cand in sol.candidates)


def test_log_spaced_sweep():
    for c in np.geomspace(1.6, 50.0, 20):
        sol = solve_eigenvalue(float(c))
        assert abs(sol.mu_numeric - mu_of_c(c)) < 1e-5, c
        assert np.max(np.abs(sol.profile - profile_F(sol.xi, c))) < 1e-5, c


@pytest.mark.parametrize("c", [1.75, 3.0])
def test_eigenvalue_independent_of_start_offset(c):
    mus = []
    for delta in (1e-3, 1e-4, 1e-5):
        mus.append(solve_eigenvalue(c, ShootingConfig(c=c, start_offset=delta, ode_step=delta / 10)).mu_numeric)
    assert max(mus) - min(mus) < 1e-5


def test_integrator_order():
    # away from the eigenvalue there is no polynomial solution, so the
    # step-halving differences expose the integration error
    vals = []
    for h in (1e-3, 5e-4, 2.5e-4):
        vals.append(integrate_from_interface(1.75, 1.4, ShootingConfig(c=1.75, ode_step=h))[1][-1])
    ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
    assert ratio > 4.0


def test_all_sign_changes_reported():
    sol = solve_eigenvalue(5.0)
    assert len(sol.candidates) >= 1
    chosen = [cand for cand in sol.candidates if abs(cand["best"] - sol.mu_numeric) < 1e-12]
    assert chosen and chosen[0]["drift"] == min(cand["drift"] for cand in sol.candidates)


def test_bracket_without_root():
    with pytest.raises(BracketError):
        solve_eigenvalue(1.75, ShootingConfig(c=1.75, mu_bracket=(0.8, 0.9)))


def test_config_c_mismatch():
    with pytest.raises(DomainError):
        solve_eigenvalue(2.5, ShootingConfig(c=1.75))


def test_ode_residual_examples():
    xi = np.linspace(0.0, 1.0, 1001)
    F = profile_F(xi, 1.75)
    assert ode_residual(xi, F, 1.5, 1.75) < 1e-6
    assert ode_residual(xi, F + 1e-2 * xi**2, 1.5, 1.75) > 1e-3
    assert ode_residual(xi, np.zeros_like(xi), 1.5, 1.75) == 0.0
