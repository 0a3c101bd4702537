"""Closed-form screen wavefunctions and intensity.

All positions are in units of sigma0 and amplitudes in sigma0**-1/2 (see
:mod:`slitwave.model`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .model import ReducedParams, _beam_terms, _nonnegative, _positive

UNIT_AREA = "unit-area"
UNIT_PEAK = "unit-peak"
NORMALIZATIONS = (UNIT_AREA, UNIT_PEAK)

DEFAULT_POINTS = 4097
DEFAULT_MARGIN = 8.0


def _signed_d(params, slit):
    if slit == 1:
        return params.d_r
    if slit == 2:
        return -params.d_r
    raise ValueError(f"slit must be 1 or 2, got {slit!r}")


def _beam(params, t, tau, d_r):
    t = _nonnegative("t", t)
    tau = _positive("tau", tau)
    return _beam_terms(t, tau, params.beta_r, d_r)


def psi_slit(params: ReducedParams, x, t, tau, slit: int = 1, phases: bool = True):
    """Normalised packet transmitted by one slit.

    Slit 2 is slit 1 with ``d -> -d``.  With ``phases=False`` the constant
    phases ``theta`` and ``mu`` are dropped.
    """
    B2, R, Delta, D, theta, mu = _beam(params, t, tau, _signed_d(params, slit))
    x = np.asarray(x, dtype=float)
    env = (np.pi * B2) ** -0.25 * np.exp(-((x + D / 2) ** 2) / (2 * B2))
    phase = x * x / (2 * R) + Delta * x
    if phases:
        phase = phase + theta + mu
    return env * np.exp(1j * phase)


def dpsi_slit(params: ReducedParams, x, t, tau, slit: int = 1):
    """Exact x-derivative of :func:`psi_slit`."""
    B2, R, Delta, D, _, _ = _beam(params, t, tau, _signed_d(params, slit))
    x = np.asarray(x, dtype=float)
    return psi_slit(params, x, t, tau, slit) * (-(x + D / 2) / B2 + 1j * (x / R + Delta))


def overlap_exponent(params: ReducedParams, t, tau):
    """``z = (D / 2B)**2 + (Delta B)**2``; the two packets overlap as ``exp(-z)``."""
    B2, _, Delta, D, _, _ = _beam(params, t, tau, params.d_r)
    return D * D / (4 * B2) + Delta * Delta * B2


def norm_constant(params: ReducedParams, t, tau):
    """``sqrt(2 + 2 exp(-z))``, bounded because ``z >= 0``."""
    return np.sqrt(2.0 + 2.0 * np.exp(-overlap_exponent(params, t, tau)))


def psi_total(params: ReducedParams, x, t, tau, phases: bool = True):
    return (psi_slit(params, x, t, tau, 1, phases) + psi_slit(params, x, t, tau, 2, phases)) / norm_constant(
        params, t, tau
    )


def dpsi_total(params: ReducedParams, x, t, tau):
    return (dpsi_slit(params, x, t, tau, 1) + dpsi_slit(params, x, t, tau, 2)) / norm_constant(params, t, tau)


def sech(u):
    """``1 / cosh(u)`` without overflow."""
    e = np.exp(-2.0 * np.abs(u))
    return 2.0 * np.sqrt(e) / (1.0 + e)


def envelope(params: ReducedParams, x, t, tau, i0: float = 1.0):
    """``F = i0 exp(-(x**2 + D**2/4)/B**2) cosh(D x / B**2)``, written as two Gaussians."""
    B2, _, _, D, _, _ = _beam(params, t, tau, params.d_r)
    x = np.asarray(x, dtype=float)
    return 0.5 * i0 * (np.exp(-((x - D / 2) ** 2) / B2) + np.exp(-((x + D / 2) ** 2) / B2))


def _unit_area_i0(params, t, tau):
    B2, _, _, _, _, _ = _beam(params, t, tau, params.d_r)
    z = overlap_exponent(params, t, tau)
    return 1.0 / (np.sqrt(np.pi * B2) * (1.0 + np.exp(-z)))


def _intensity(params, x, t, tau, i0):
    B2, _, Delta, D, _, _ = _beam(params, t, tau, params.d_r)
    x = np.asarray(x, dtype=float)
    F = envelope(params, x, t, tau, i0)
    return F * (1.0 + np.cos(2 * Delta * x) * sech(D * x / B2))


def default_half_width(params: ReducedParams, t, tau, margin: float = DEFAULT_MARGIN) -> float:
    B2, _, _, D, _, _ = _beam(params, t, tau, params.d_r)
    return float(D / 2 + margin * np.sqrt(B2))


def default_grid(params: ReducedParams, t, tau, points: int = DEFAULT_POINTS, margin: float = DEFAULT_MARGIN):
    """Symmetric grid ``[-(D/2 + margin B), D/2 + margin B]``.

    ``points`` should be odd so that ``x = 0`` is a sample: otherwise the
    central fringe is split between two samples equal up to rounding.
    """
    L = default_half_width(params, t, tau, margin)
    return np.linspace(-L, L, points)


def peak_intensity(params: ReducedParams, t, tau) -> float:
    """Global maximum of the unit-area intensity."""
    L = default_half_width(params, t, tau)
    x = np.linspace(0.0, L, 4097)  # intensity is even in x
    I = _intensity(params, x, t, tau, _unit_area_i0(params, t, tau))
    k = int(np.argmax(I))
    lo, hi = x[max(k - 1, 0)], x[min(k + 1, x.size - 1)]
    if hi == lo:
        return float(I[k])
    i0 = _unit_area_i0(params, t, tau)
    res = minimize_scalar(lambda s: -_intensity(params, s, t, tau, i0), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(max(I[k], -res.fun))


def intensity_scale(params: ReducedParams, t, tau, normalization: str = UNIT_AREA) -> float:
    """Prefactor ``i0`` of the envelope under the chosen normalisation."""
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    i0 = float(_unit_area_i0(params, t, tau))
    if normalization == UNIT_PEAK:
        i0 = i0 / peak_intensity(params, t, tau)
    return i0


def intensity(params: ReducedParams, x, t, tau, normalization: str = UNIT_AREA):
    """Screen intensity ``F [1 + cos(2 Delta x) / cosh(D x / B**2)]``.

    ``unit-area`` integrates to one (equals ``|psi_total|**2``);
    ``unit-peak`` has global maximum one.
    """
    return _intensity(params, x, t, tau, intensity_scale(params, t, tau, normalization))


@dataclass(frozen=True)
class IntensityProfile:
    x: np.ndarray
    intensity: np.ndarray
    envelope: np.ndarray
    normalization: str


def intensity_profile(params: ReducedParams, t, tau, x=None, normalization: str = UNIT_AREA,
                      points: int = DEFAULT_POINTS) -> IntensityProfile:
    """Sample intensity and envelope on a symmetric grid (default: :func:`default_grid`)."""
    if x is None:
        x = default_grid(params, t, tau, points)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing")
    scale = max(abs(x[0]), abs(x[-1]))
    if not np.allclose(x, -x[::-1], rtol=0, atol=1e-12 * scale):
        raise ValueError("grid must be symmetric about x = 0")
    i0 = intensity_scale(params, t, tau, normalization)
    return IntensityProfile(x=x, intensity=_intensity(params, x, t, tau, i0), envelope=envelope(params, x, t, tau, i0),
                            normalization=normalization)
