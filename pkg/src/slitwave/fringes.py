"""Visibility, predictability and fringe counting."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ReducedParams, _beam_terms, _nonnegative, _positive
from .wavefunction import IntensityProfile, default_grid, psi_slit, sech

NU_CONSTANT = 0.264
PEAK_THRESHOLD = 1e-4


def _contrast_argument(params, x, t, tau):
    t = _nonnegative("t", t)
    tau = _positive("tau", tau)
    B2, _, _, D, _, _ = _beam_terms(t, tau, params.beta_r, params.d_r)
    return D * np.asarray(x, dtype=float) / B2


def visibility(params: ReducedParams, x, t, tau):
    """Local fringe contrast ``1 / cosh(D x / B**2)``."""
    return sech(_contrast_argument(params, x, t, tau))[()]


def predictability(params: ReducedParams, x, t, tau):
    """Which-slit predictability ``|tanh(D x / B**2)|``."""
    return np.abs(np.tanh(_contrast_argument(params, x, t, tau)))[()]


def predictability_from_populations(params: ReducedParams, x, t, tau):
    """``||psi1|**2 - |psi2|**2| / (|psi1|**2 + |psi2|**2)`` from the slit wavefunctions."""
    p1 = np.abs(psi_slit(params, x, t, tau, 1)) ** 2
    p2 = np.abs(psi_slit(params, x, t, tau, 2)) ** 2
    return np.abs(p1 - p2) / (p1 + p2)


@dataclass(frozen=True)
class FringeProfile:
    x: np.ndarray
    V: np.ndarray
    P: np.ndarray
    duality_residual: np.ndarray
    nu: float


def fringe_profile(params: ReducedParams, t, tau, x=None) -> FringeProfile:
    if x is None:
        x = default_grid(params, t, tau)
    x = np.asarray(x, dtype=float)
    V = visibility(params, x, t, tau)
    P = predictability(params, x, t, tau)
    return FringeProfile(x=x, V=V, P=P, duality_residual=np.abs(P * P + V * V - 1.0),
                         nu=fringe_index(params, t, tau))


def fringe_index(params: ReducedParams, t: float, tau: float) -> float:
    """Effective fringe number ``0.264 / (D / 2 Delta B**2)``.

    Returns ``inf`` for coincident slits (``d = 0``), where the ratio degenerates.
    """
    B2, _, Delta, D, _, _ = _beam_terms(_nonnegative("t", t), _positive("tau", tau), params.beta_r, params.d_r)
    if D == 0:
        return math.inf
    return float(NU_CONSTANT * 2 * Delta * B2 / D)


def count_fringes(profile, threshold: float = PEAK_THRESHOLD) -> int:
    """Number of strict local maxima of the intensity above ``threshold`` times the global peak.

    Accepts an :class:`~slitwave.wavefunction.IntensityProfile` or a bare
    array of intensities.
    """
    I = np.asarray(profile.intensity if isinstance(profile, IntensityProfile) else profile, dtype=float)
    if I.ndim != 1 or I.size < 3:
        raise ValueError("need at least 3 samples to locate local maxima")
    mid = I[1:-1]
    peaks = (mid > I[:-2]) & (mid > I[2:]) & (mid > threshold * I.max())
    return int(np.count_nonzero(peaks))


def measured_visibility(intensity, x0: float, period: float, samples: int = 4001) -> float:
    """Contrast ``(Imax - Imin)/(Imax + Imin)`` read off one fringe period centred on the minimum ``x0``.

    ``intensity`` is a callable of position.  ``Imax`` averages the maxima on
    either side of ``x0``, so a linear tilt of the envelope cancels.
    """
    xs = np.linspace(x0 - period / 2, x0 + period / 2, samples)
    I = np.asarray(intensity(xs), dtype=float)
    h = samples // 2
    i_max = 0.5 * (I[:h].max() + I[h + 1:].max())
    i_min = I.min()
    return float((i_max - i_min) / (i_max + i_min))
