import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitwave import covariance, slit_beam
from slitwave.model import ReducedParams
from slitwave.moments import sigma_pp2, sigma_pp2_variant
from slitwave.oracle import (OracleConvergenceError, QuadratureSpec, fit_beam, oracle_moments, oracle_psi_slit,
                             oracle_psi_total, relative_l2, spread_packet, validate)
from slitwave.wavefunction import default_grid, psi_slit, psi_total


def test_spread_width_at_tau0():
    x = np.linspace(-12, 12, 4001)
    rho = np.abs(spread_packet(x, 1.0)) ** 2
    width2 = 2 * np.trapezoid(x * x * rho, x) / np.trapezoid(rho, x)  # |psi|^2 ~ exp(-x^2/b^2)
    assert math.sqrt(width2) == pytest.approx(math.sqrt(2), abs=1e-9)


@pytest.mark.parametrize("t, tau", [(0.2, 18.0), (1.42, 18.0), (18.0, 30.0), (0.0, 18.0)])
def test_single_slit_agreement(neutron, t, tau):
    x = default_grid(neutron, t, tau)
    assert relative_l2(psi_slit(neutron, x, t, tau), oracle_psi_slit(neutron, x, t, tau)) <= 1e-6


def test_superposition_agreement(neutron):
    x = default_grid(neutron, 1.42, 18.0)
    assert relative_l2(psi_total(neutron, x, 1.42, 18.0), oracle_psi_total(neutron, x, 1.42, 18.0)) <= 1e-6


def test_node_doubling_converged(neutron):
    x = default_grid(neutron, 1.42, 18.0)
    _, info = oracle_psi_slit(neutron, x, 1.42, 18.0, return_info=True)
    assert info["residual"] < 1e-9


@pytest.mark.parametrize("t", [0.52, 1.42, 8.0])
def test_numerical_first_stage(neutron, t):
    x = default_grid(neutron, t, 18.0, 513)
    deep = oracle_psi_slit(neutron, x, t, 18.0, stage_a="quadrature")
    assert relative_l2(psi_slit(neutron, x, t, 18.0), deep) <= 1e-6


def test_numerical_first_stage_needs_spreading(neutron):
    with pytest.raises(ValueError):
        oracle_psi_slit(neutron, np.zeros(3), 0.05, 18.0, stage_a="quadrature")


def test_frozen_fit(neutron):
    # values read off the oracle wave; test_model checks the closed forms against them
    fb = fit_beam(neutron, 18.0, 18.0)
    assert fb.B == pytest.approx(18.13759610968433, rel=1e-9)
    assert fb.R == pytest.approx(18.109591354272187, rel=1e-8)
    assert fb.Delta == pytest.approx(0.4384281856425068, rel=1e-9)
    assert fb.D == pytest.approx(31.903806827119592, rel=1e-9)


@pytest.mark.parametrize("t, tau", [(0.2, 18.0), (4.0, 10.0), (18.0, 30.0)])
def test_fitted_curvature_matches_closed_form(neutron, t, tau):
    fb = fit_beam(neutron, t, tau)
    sb = slit_beam(neutron, t, tau)
    assert fb.R == pytest.approx(sb.R, rel=1e-7)
    assert fb.B == pytest.approx(sb.B, rel=1e-8)


def test_means_vanish(neutron):
    g = oracle_moments(neutron, 1.42, 18.0)
    assert abs(g.mean_x) <= 1e-10 and abs(g.mean_p) <= 1e-10
    assert g.norm == pytest.approx(1.0, abs=1e-10)


def test_gaussian_saturation(single):
    g = oracle_moments(single, 2.0, 18.0)
    assert g.sigma_xx2 * g.sigma_pp2 - g.sigma_xp**2 == pytest.approx(0.25, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0, 10), tau=st.floats(0.5, 50), beta=st.floats(0.5, 2), d=st.floats(0.2, 8))
def test_moments_with_overlapping_packets(t, tau, beta, d):
    p = ReducedParams(beta_r=beta, d_r=d)
    g = oracle_moments(p, t, tau)
    c = covariance(p, t, tau)
    assert c.sigma_xx2 == pytest.approx(g.sigma_xx2, rel=1e-9)
    assert c.sigma_pp2 == pytest.approx(g.sigma_pp2, rel=1e-9)
    assert c.sigma_xp == pytest.approx(g.sigma_xp, rel=1e-9)
    assert c.det >= 0.25 * (1 - 1e-9)


def test_variant_overlap_term_misses_grid():
    # packets overlapping strongly: the variant overlap term misses the grid value by 1.6 %
    p = ReducedParams(beta_r=1.0, d_r=1.0)
    g = oracle_moments(p, 0.0, 1.0)
    assert sigma_pp2(p, 0.0, 1.0) == pytest.approx(g.sigma_pp2, rel=1e-12)
    assert abs(sigma_pp2_variant(p, 0.0, 1.0) / g.sigma_pp2 - 1) > 1e-2


@pytest.mark.parametrize("t, tau", [(0.2, 18.0), (18.0, 30.0), (1.4196516022, 18.0)])
def test_validate_points(neutron, t, tau):
    rep = validate(neutron, t, tau, fit=False)
    assert rep.passed()
    assert max(rep.moment_rel_errors) <= 1e-7 and rep.norm_error <= 1e-7


def test_report_carries_both_curvatures(neutron):
    rep = validate(neutron, 1.42, 18.0)
    assert set(rep.closed_beam) == set(rep.fitted_beam) == {"B", "R", "Delta", "D"}
    assert rep.fitted_beam["R"] == pytest.approx(rep.closed_beam["R"], rel=1e-8)


def test_quadrature_limits():
    with pytest.raises(ValueError):
        QuadratureSpec(nodes=100)
    with pytest.raises(ValueError):
        QuadratureSpec(half_width=4)
    with pytest.raises(ValueError):
        QuadratureSpec(grid_points=1000)


def test_bad_arguments(neutron):
    with pytest.raises(ValueError):
        oracle_psi_slit(neutron, [0.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        oracle_psi_slit(neutron, [0.0], 1.0, 1.0, slit=0)


def test_convergence_error_carries_residual():
    err = OracleConvergenceError("no", 3e-7)
    assert err.residual == 3e-7 and isinstance(err, RuntimeError)
