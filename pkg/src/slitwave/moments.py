"""Second moments of the two-slit superposition on the screen.

Results are in reduced units: ``sigma_xx2`` in sigma0**2, ``sigma_pp2`` in
(hbar/sigma0)**2, ``sigma_xp`` in hbar and the determinant in hbar**2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ReducedParams, _beam_terms, _nonnegative, _positive


def _parts(params, t, tau):
    t = _nonnegative("t", t)
    tau = _positive("tau", tau)
    B2, R, Delta, D, _, _ = _beam_terms(t, tau, params.beta_r, params.d_r)
    z = D * D / (4 * B2) + Delta * Delta * B2
    e = np.exp(-z)
    # 1/(4 + 4 e^-z) and 1/(1 + e^z) = e^-z/(1 + e^-z); both bounded for z >= 0.
    near = 1.0 / (4.0 + 4.0 * e)
    far = e / (1.0 + e)
    return B2, R, Delta, D, near, far


def xp_terms(params: ReducedParams, t, tau):
    """The four signed contributions to ``sigma_xp``.

    Each is a momentum times a position: ``(m B/R) B``, ``(m D/R) D``,
    ``(hbar Delta) D`` and ``(m Delta**2 B**3/R) B``, weighted by the
    packet overlap.
    """
    B2, R, Delta, D, near, far = _parts(params, t, tau)
    t1 = B2 / (2 * R)
    t2 = D * D / R * near
    t3 = -Delta * D / 2
    t4 = -Delta * Delta * B2 * B2 / R * far
    return t1[()], t2[()], t3[()], t4[()]


def _sum_terms(terms):
    t1, t2, t3, t4 = terms
    return ((t1 + t2) + t3) + t4


def sigma_xp(params: ReducedParams, t, tau):
    """Symmetrised covariance ``<xp + px>/2 - <x><p>``."""
    return _sum_terms(xp_terms(params, t, tau))


def _corrections(params, t, tau):
    # each moment is its single-Gaussian value plus a two-slit correction
    B2, R, Delta, D, near, far = _parts(params, t, tau)
    gauss = (B2 / 2, 1 / (2 * B2) + B2 / (2 * R * R), B2 / (2 * R))
    X = D * D * near - Delta * Delta * B2 * B2 * far
    Y = (D / R - 2 * Delta) ** 2 * near - (D * D / (4 * B2 * B2) + Delta * D / R + (Delta * B2 / R) ** 2) * far
    Z = D * D / R * near - Delta * D / 2 - Delta * Delta * B2 * B2 / R * far
    return gauss, (X, Y, Z)


def sigma_xx2(params: ReducedParams, t, tau):
    B2, _, Delta, D, near, far = _parts(params, t, tau)
    # 4 Delta^2 B^4 e^-z / (4 + 4 e^-z) == Delta^2 B^4 * far
    return (B2 / 2 + D * D * near - Delta * Delta * B2 * B2 * far)[()]


def sigma_pp2(params: ReducedParams, t, tau):
    """Momentum variance of the superposition.

    The overlap term is ``(D**2/4B**4 + Delta D/R + Delta**2 B**4/R**2)``
    weighted by ``1/(1 + e**z)``; it follows from ``<p**2> = int |psi'|**2``
    and agrees with grid quadrature for strongly overlapping packets, where
    :func:`sigma_pp2_variant` does not.
    """
    (_, g, _), (_, Y, _) = _corrections(params, t, tau)
    return (g + Y)[()]


def sigma_pp2_variant(params: ReducedParams, t, tau):
    """Variant with overlap term ``D**2/B**4 + 2 Delta (Delta + D/R)``.

    Identical to :func:`sigma_pp2` up to ``exp(-z)`` corrections, which are
    below 1e-20 for the neutron set, but wrong for overlapping packets (it
    can even drop the determinant under 1/4).  Kept for comparison.
    """
    B2, R, Delta, D, near, far = _parts(params, t, tau)
    pure = 1 / (2 * B2) + B2 / (2 * R * R)
    return (pure + (D / R - 2 * Delta) ** 2 * near - (D * D / (B2 * B2) + 2 * Delta * (Delta + D / R)) * far)[()]


@dataclass(frozen=True)
class CovarianceSummary:
    sigma_xx2: float
    sigma_pp2: float
    sigma_xp: float
    xp_terms: tuple
    det: float


def determinant(sxx2, spp2, sxp):
    """Robertson-Schroedinger determinant; ``>= 1/4`` for any state, ``= 1/4`` for Gaussians."""
    return sxx2 * spp2 - sxp * sxp


def covariance(params: ReducedParams, t, tau) -> CovarianceSummary:
    """All three moments, the ``sigma_xp`` terms and the determinant.

    The determinant is expanded around the single-Gaussian value 1/4 so
    that it does not lose digits when ``B**2/R`` is large.
    """
    terms = xp_terms(params, t, tau)
    sxp = _sum_terms(terms)
    (gx, gp, gxp), (X, Y, Z) = _corrections(params, t, tau)
    det = 0.25 + gx * Y + X * gp + X * Y - 2 * gxp * Z - Z * Z
    return CovarianceSummary(sigma_xx2=sigma_xx2(params, t, tau), sigma_pp2=(gp + Y)[()], sigma_xp=sxp,
                             xp_terms=terms, det=det[()])


QUANTITIES = {
    "sigma_xp": sigma_xp,
    "sigma_xx": sigma_xx2,
    "sigma_pp": sigma_pp2,
}
