import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitwave import covariance, sigma_pp2, sigma_xp, sigma_xx2, slit_beam, xp_terms
from slitwave.extrema import find_tmax
from slitwave.model import ReducedParams

# grid moments of the closed-form wave with p = -i d/dx applied exactly (oracle_moments)
FROZEN = {
    (0.2, 18.0): (655.0024670629364, 1.6073173065228383, 32.18976151133189),
    (1.42, 18.0): (3499.6225881430105, 8.774506944810406, 175.1659297589296),
    (18.0, 18.0): (418.949418834561, 0.6988079603381712, 16.140353681081823),
}


@pytest.mark.parametrize("point", sorted(FROZEN))
def test_frozen_grid_moments(neutron, point):
    c = covariance(neutron, *point)
    for got, want in zip((c.sigma_xx2, c.sigma_pp2, c.sigma_xp), FROZEN[point]):
        assert got == pytest.approx(want, rel=1e-8)


def test_plateau_values(neutron):
    assert sigma_xp(neutron, 4.0, 18.0) == pytest.approx(82.0, abs=2.0)
    assert covariance(neutron, 0.05, 18.0).det == pytest.approx(16.0, abs=1.0)
    assert covariance(neutron, 20.0, 18.0).det == pytest.approx(33.0, abs=1.0)


def test_second_term_dominates_at_peak(neutron):
    t = find_tmax(neutron, "sigma_xp", 18.0)
    terms = np.abs(xp_terms(neutron, t, 18.0))
    assert terms[1] == terms.max()


@settings(max_examples=100, deadline=None)
@given(t=st.floats(0, 40), tau=st.floats(0.5, 200))
def test_terms_sum_exactly(neutron, t, tau):
    t1, t2, t3, t4 = xp_terms(neutron, t, tau)
    assert sigma_xp(neutron, t, tau) == ((t1 + t2) + t3) + t4
    assert covariance(neutron, t, tau).sigma_xp == sigma_xp(neutron, t, tau)


@settings(max_examples=100, deadline=None)
@given(t=st.floats(0, 30), tau=st.floats(0.5, 100), beta=st.floats(0.3, 3), d=st.floats(1, 40))
def test_determinant_exceeds_gaussian_bound(t, tau, beta, d):
    assert covariance(ReducedParams(beta_r=beta, d_r=d), t, tau).det > 0.25


@settings(max_examples=100, deadline=None)
@given(t=st.floats(0, 30), tau=st.floats(0.5, 100), beta=st.floats(0.3, 3))
def test_single_gaussian_saturates(t, tau, beta):
    p = ReducedParams(beta_r=beta, d_r=0.0)
    assert covariance(p, t, tau).det == pytest.approx(0.25, rel=1e-10)


def test_single_gaussian_closed_forms(single):
    sb = slit_beam(single, 2.0, 18.0)
    assert sigma_xx2(single, 2.0, 18.0) == pytest.approx(sb.B**2 / 2, rel=1e-15)
    assert sigma_pp2(single, 2.0, 18.0) == pytest.approx(1 / (2 * sb.B**2) + sb.B**2 / (2 * sb.R**2), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(t=st.floats(0, 30))
def test_momentum_spread_ignores_tau(neutron, t):
    ref = sigma_pp2(neutron, t, 18.0)
    for tau in (2.0, 100.0):
        assert sigma_pp2(neutron, t, tau) == pytest.approx(ref, rel=1e-10)


def test_determinant_on_scan_grid(neutron):
    t = np.linspace(0, 30, 3001)[:, None]
    for tau in (2.0, 8.0, 18.0, 50.0):
        assert np.all(covariance(neutron, t, tau).det > 0.25)


def test_far_apart_packets_stay_finite():
    # overlap exponent z ~ 1e5: logistic factors must not overflow
    p = ReducedParams(beta_r=0.5, d_r=3000.0)
    with np.errstate(over="raise", invalid="raise"):
        c = covariance(p, 0.5, 2.0)
    assert np.isfinite([c.sigma_xx2, c.sigma_pp2, c.sigma_xp, c.det]).all()


def test_vectorised(neutron):
    t = np.array([0.2, 1.42, 18.0])
    c = covariance(neutron, t, 18.0)
    assert c.sigma_xp.shape == (3,)
    assert c.sigma_xp[1] == sigma_xp(neutron, 1.42, 18.0)
