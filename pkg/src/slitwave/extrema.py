"""Times of maximum and inflection of the screen moments as functions of ``t``.

All times are in units of tau0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, brentq, minimize_scalar

from .model import ReducedParams
from .moments import QUANTITIES, sigma_xp

TABLE_TAUS = (2.0, 8.0, 18.0, 50.0, 100.0, 1000.0)

SCAN_STEP = 0.01
SCAN_END = 10.0
XTOL = 1e-9
SLOPE_STEP = 1e-5
CURVATURE_STEP = 1e-4
INFLECTION_XTOL = 1e-7


class NoInteriorExtremum(RuntimeError):
    """The coarse scan found the extremum on the edge of the search interval."""

    def __init__(self, message, t_edge):
        super().__init__(message)
        self.t_edge = t_edge


def _quantity(name):
    try:
        return QUANTITIES[name]
    except KeyError:
        raise ValueError(f"quantity must be one of {sorted(QUANTITIES)}, got {name!r}") from None


def slope(f, t, h=SLOPE_STEP):
    return (f(t + h) - f(t - h)) / (2 * h)


def curvature(f, t, h=CURVATURE_STEP):
    return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)


def find_tmax(params: ReducedParams, quantity: str, tau: float, *, step: float = SCAN_STEP,
              t_end: float = SCAN_END, xtol: float = XTOL) -> float:
    """Time ``t`` at which ``quantity`` (``sigma_xp``, ``sigma_xx`` or ``sigma_pp``) peaks at fixed ``tau``.

    A coarse scan of ``(0, t_end]`` brackets the largest sample; Brent's
    golden-section/parabolic search refines it, and the result is polished
    on the zero of the central-difference slope, which resolves the flat
    top better than comparing function values.
    """
    q = _quantity(quantity)
    f = lambda s: float(q(params, s, tau))
    ts = np.arange(1, int(round(t_end / step)) + 1) * step
    vals = q(params, ts, tau)
    k = int(np.argmax(vals))
    if k == 0 or k == ts.size - 1:
        raise NoInteriorExtremum(f"{quantity} at tau={tau} peaks on the scan edge t={ts[k]}", ts[k])
    a, b, c = ts[k - 1], ts[k], ts[k + 1]
    res = minimize_scalar(lambda s: -f(s), bracket=(a, b, c), method="brent",
                          options={"xtol": xtol / max(b, 1.0)})
    t_best = float(res.x)
    g = lambda s: slope(f, s)
    lo, hi = t_best - 100 * xtol, t_best + 100 * xtol
    glo, ghi = g(lo), g(hi)
    if glo > 0 > ghi:
        t_best = brentq(g, lo, hi, xtol=1e-13)
    return t_best


def find_tinf(params: ReducedParams, tau: float, *, step: float = SCAN_STEP, xtol: float = INFLECTION_XTOL) -> float:
    """Inflection time of ``sigma_xp`` before its maximum (curvature turns from up to down)."""
    t_max = find_tmax(params, "sigma_xp", tau)
    f = lambda s: float(sigma_xp(params, s, tau))
    g = lambda s: curvature(f, s)
    ts = np.arange(1, int(np.floor(t_max / step)) + 1) * step
    ts = ts[(ts > CURVATURE_STEP) & (ts < t_max)]
    gs = np.array([g(s) for s in ts])
    flips = np.nonzero((gs[:-1] > 0) & (gs[1:] <= 0))[0]
    if flips.size == 0:
        raise NoInteriorExtremum(f"sigma_xp curvature does not change sign on (0, {t_max}) at tau={tau}", t_max)
    i = int(flips[0])
    return bisect(g, ts[i], ts[i + 1], xtol=xtol)


@dataclass(frozen=True)
class ExtremaRow:
    tau: float
    t_max_xp: float
    t_max_xx: float
    t_max_pp: float
    t_inf_xp: float
    achieved_values: dict


def extrema_row(params: ReducedParams, tau: float) -> ExtremaRow:
    t_xp = find_tmax(params, "sigma_xp", tau)
    t_xx = find_tmax(params, "sigma_xx", tau)
    t_pp = find_tmax(params, "sigma_pp", tau)
    t_inf = find_tinf(params, tau)
    values = {
        "sigma_xp": float(sigma_xp(params, t_xp, tau)),
        "sigma_xx2": float(QUANTITIES["sigma_xx"](params, t_xx, tau)),
        "sigma_pp2": float(QUANTITIES["sigma_pp"](params, t_pp, tau)),
        "sigma_xp_at_inflection": float(sigma_xp(params, t_inf, tau)),
    }
    return ExtremaRow(tau=float(tau), t_max_xp=t_xp, t_max_xx=t_xx, t_max_pp=t_pp, t_inf_xp=t_inf,
                      achieved_values=values)


def table1(params: ReducedParams, taus=TABLE_TAUS) -> list[ExtremaRow]:
    """Extremum and inflection times for each ``tau``, in input order."""
    return [extrema_row(params, tau) for tau in taus]
