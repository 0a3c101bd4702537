import numpy as np
import pytest

from slitwave import sigma_xp
from slitwave.extrema import (TABLE_TAUS, NoInteriorExtremum, extrema_row, find_tinf, find_tmax, slope, table1)
from slitwave.model import ReducedParams

TABLE = {
    2: (1.568109061, 1.984545314, 1.392356020, 0.4720349103),
    8: (1.450312552, 1.525841616, 1.392356020, 0.4990240822),
    18: (1.419651602, 1.450522331, 1.392356020, 0.5049187153),
    50: (1.402487095, 1.413088513, 1.392356020, 0.5080737518),
    100: (1.397465783, 1.402693625, 1.392356020, 0.5089789150),
    1000: (1.392871030, 1.393387225, 1.392356020, 0.5098004574),
}


@pytest.fixture(scope="module")
def rows(neutron):
    return {int(r.tau): r for r in table1(neutron)}


@pytest.mark.parametrize("quantity, tau, expected", [("sigma_xp", 2.0, 1.568109061), ("sigma_pp", 50.0, 1.392356020),
                                                     ("sigma_xx", 1000.0, 1.393387225)])
def test_single_maxima(neutron, quantity, tau, expected):
    assert find_tmax(neutron, quantity, tau) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("tau, expected", [(2.0, 0.4720349103), (100.0, 0.5089789150), (18.0, 0.5049187153)])
def test_inflection(neutron, tau, expected):
    assert find_tinf(neutron, tau) == pytest.approx(expected, abs=1e-4)


def test_row_for_tau_8(rows):
    r = rows[8]
    got = (r.t_max_xp, r.t_max_xx, r.t_max_pp, r.t_inf_xp)
    for g, want, tol in zip(got, TABLE[8], (1e-5, 1e-5, 1e-5, 1e-4)):
        assert g == pytest.approx(want, abs=tol)


def test_ordering(rows):
    for r in rows.values():
        assert r.t_max_pp <= r.t_max_xp <= r.t_max_xx


def test_maximum_moves_left_with_tau(rows):
    t = [rows[int(tau)].t_max_xp for tau in TABLE_TAUS]
    assert all(a > b for a, b in zip(t, t[1:]))


def test_maxima_merge_for_long_flights(rows):
    assert abs(rows[1000].t_max_xp - rows[1000].t_max_xx) < 1e-3


def test_slope_vanishes_at_maximum(neutron):
    for tau in TABLE_TAUS:
        t = find_tmax(neutron, "sigma_xp", tau)
        assert abs(slope(lambda s: float(sigma_xp(neutron, s, tau)), t)) < 1e-6


def test_deterministic(neutron):
    a = extrema_row(neutron, 18.0)
    b = extrema_row(neutron, 18.0)
    assert (a.t_max_xp, a.t_max_xx, a.t_max_pp, a.t_inf_xp) == (b.t_max_xp, b.t_max_xx, b.t_max_pp, b.t_inf_xp)


def test_achieved_values_recorded(rows):
    r = rows[18]
    assert r.achieved_values["sigma_xp"] == pytest.approx(float(sigma_xp(ReducedParams(1.0, 125 / 7.8), r.t_max_xp,
                                                                           18.0)))
    assert r.achieved_values["sigma_xp"] > r.achieved_values["sigma_xp_at_inflection"]


def test_single_interior_peak_on_scan(neutron):
    t = np.linspace(0.01, 10, 1000)
    v = sigma_xp(neutron, t, 18.0)
    k = int(np.argmax(v))
    assert np.all(np.diff(v[: k + 1]) > 0) and np.all(np.diff(v[k:]) < 0)
    assert v[k] > sigma_xp(neutron, 0.2, 18.0) and v[k] > sigma_xp(neutron, 18.0, 18.0)


def test_edge_maximum_reported(neutron):
    with pytest.raises(NoInteriorExtremum) as err:
        find_tmax(neutron, "sigma_xp", 18.0, t_end=1.0)
    assert err.value.t_edge == pytest.approx(1.0)


def test_unknown_quantity(neutron):
    with pytest.raises(ValueError, match="quantity"):
        find_tmax(neutron, "sigma_zz", 18.0)
