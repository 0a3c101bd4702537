"""Experiment parameters, unit reduction and the Gaussian beam parameters.

Everything downstream of this module works in a dimensionless system:
lengths in units of the initial packet width ``sigma0``, times in units of
``tau0 = m sigma0**2 / hbar``, momenta in ``hbar / sigma0`` and actions in
``hbar``.  In these units ``m = hbar = 1`` and the free-flight phase of a
wave with curvature time ``R`` is ``x**2 / (2 R)``.

The curvature time of the free beam diverges at ``t = 0``, so only its
reciprocal ``inv_r`` is ever stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

HBAR = constants.hbar
PLANCK = constants.h


@dataclass(frozen=True)
class ExperimentParams:
    """Physical configuration in SI units.

    Parameters
    ----------
    mass : float
        Particle mass [kg].
    sigma0 : float
        Transverse width of the packet prepared at the source [m].
    beta : float
        Gaussian width of each slit aperture [m].
    d : float
        Slit separation [m].
    lambda_dB : float, optional
        de Broglie wavelength [m]; only used to turn flight times into
        distances.
    hbar : float
        Reduced Planck constant [J s].
    """

    mass: float
    sigma0: float
    beta: float
    d: float
    lambda_dB: float | None = None
    hbar: float = HBAR

    def __post_init__(self):
        for name in ("mass", "sigma0", "beta", "hbar"):
            _require_positive(name, getattr(self, name))
        _require_finite("d", self.d)
        if self.d < 0:
            raise ValueError(f"d must be >= 0, got {self.d!r}")
        if self.lambda_dB is not None:
            _require_positive("lambda_dB", self.lambda_dB)

    @property
    def tau0(self) -> float:
        """Spreading time ``m sigma0**2 / hbar`` [s]."""
        return self.mass * self.sigma0**2 / self.hbar

    @property
    def velocity(self) -> float:
        """Longitudinal velocity ``h / (m lambda_dB)`` [m/s]."""
        if self.lambda_dB is None:
            raise ValueError("lambda_dB is not set; longitudinal velocity is undefined")
        return 2 * math.pi * self.hbar / (self.mass * self.lambda_dB)

    def reduce(self) -> "ReducedParams":
        return reduce(self)


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless configuration.

    ``sigma0`` and ``tau0`` are the SI scales used to convert results back;
    they default to 1 so a ``ReducedParams`` built by hand reports results
    in reduced units.
    """

    beta_r: float
    d_r: float
    sigma0: float = 1.0
    tau0: float = 1.0

    def __post_init__(self):
        _require_positive("beta_r", self.beta_r)
        _require_finite("d_r", self.d_r)
        if self.d_r < 0:
            raise ValueError(f"d_r must be >= 0, got {self.d_r!r}")
        _require_positive("sigma0", self.sigma0)
        _require_positive("tau0", self.tau0)

    @property
    def momentum_unit(self) -> float:
        """``hbar / sigma0`` expressed through the stored scales (``m sigma0 / tau0``)."""
        return self.sigma0 / self.tau0

    def to_si(self, mass: float, hbar: float = HBAR, lambda_dB: float | None = None) -> ExperimentParams:
        """Rebuild SI parameters; ``mass`` and ``hbar`` must be those used to reduce."""
        return ExperimentParams(
            mass=mass,
            sigma0=self.sigma0,
            beta=self.beta_r * self.sigma0,
            d=self.d_r * self.sigma0,
            lambda_dB=lambda_dB,
            hbar=hbar,
        )


def reduce(params: ExperimentParams) -> ReducedParams:
    return ReducedParams(
        beta_r=params.beta / params.sigma0,
        d_r=params.d / params.sigma0,
        sigma0=params.sigma0,
        tau0=params.tau0,
    )


@dataclass(frozen=True)
class FreeBeam:
    """Width ``b`` and reciprocal curvature time ``inv_r`` of the freely spreading packet."""

    b: float
    inv_r: float

    @property
    def r(self):
        with np.errstate(divide="ignore"):
            return np.where(self.inv_r == 0, np.inf, 1.0 / np.asarray(self.inv_r, dtype=float))[()]


@dataclass(frozen=True)
class SlitBeam:
    """Parameters of the packet leaving one slit, evaluated on the screen.

    Attributes
    ----------
    B : width of the envelope.
    R : curvature time of the quadratic phase ``x**2 / (2 R)``.
    Delta : linear phase coefficient; fringe period is ``pi / Delta``.
    D : separation of the two packet centres.
    theta, mu : constant phases (``mu`` is the Gouy phase).
    """

    B: float
    R: float
    Delta: float
    D: float
    theta: float
    mu: float

    def to_si(self, scales: ReducedParams) -> "SlitBeam":
        s, T = scales.sigma0, scales.tau0
        return SlitBeam(B=self.B * s, R=self.R * T, Delta=self.Delta / s, D=self.D * s,
                        theta=self.theta, mu=self.mu)


def free_beam(t) -> FreeBeam:
    """Free spreading of the source packet after time ``t`` (units of tau0)."""
    t = _nonnegative("t", t)
    b2 = 1.0 + t * t
    return FreeBeam(b=np.sqrt(b2)[()], inv_r=(t / b2)[()])


def _beam_terms(t, tau, beta_r, d_r):
    # d_r may be negative here: the second slit is the first with d -> -d.
    b2 = 1.0 + t * t
    inv_r = t / b2
    A = 1.0 / beta_r**2 + 1.0 / b2
    K = 1.0 / tau + inv_r
    AK = A * A + K * K
    B2 = tau * tau * AK / A
    R = tau * AK / (A * A + t / b2 * K)
    Delta = tau * d_r / (2.0 * beta_r**2 * B2)
    D = d_r * (1.0 + tau * inv_r) / (1.0 + beta_r**2 / b2)
    theta = d_r**2 * K / (8.0 * beta_r**4 * AK)
    mu = -0.5 * np.arctan2(t + A / K, 1.0 - t * A / K)
    return B2, R, Delta, D, theta, mu


def slit_beam(params: ReducedParams, t, tau) -> SlitBeam:
    """Screen-plane beam parameters for flight times ``t`` (source to slits) and ``tau`` (slits to screen).

    Arrays broadcast.  ``mu`` uses the two-argument arctangent, which keeps it
    continuous in ``t`` and inside ``(-pi/2, 0)``.
    """
    t = _nonnegative("t", t)
    tau = _positive("tau", tau)
    B2, R, Delta, D, theta, mu = _beam_terms(t, tau, params.beta_r, params.d_r)
    return SlitBeam(B=np.sqrt(B2)[()], R=R[()], Delta=Delta[()], D=D[()], theta=theta[()], mu=mu[()])


def slit_beam_si(params: ExperimentParams, t: float, tau: float) -> SlitBeam:
    """Same quantities evaluated directly in SI units (``t``, ``tau`` in seconds).

    Independent of the reduced path; used to check the unit reduction.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau!r}")
    m, hb, s0, beta, d = params.mass, params.hbar, params.sigma0, params.beta, params.d
    tau0 = m * s0**2 / hb
    b2 = s0**2 * (1 + (t / tau0) ** 2)
    inv_r = t / (t * t + tau0 * tau0)
    A = 1 / beta**2 + 1 / b2
    K = 1 / tau + inv_r
    m_h = m / hb
    B2 = (A**2 + m_h**2 * K**2) / ((m_h / tau) ** 2 * A)
    R = tau * (A**2 + m_h**2 * K**2) / (A**2 + t / (s0**2 * b2) * K)
    Delta = tau * s0**2 * d / (2 * tau0 * beta**2 * B2)
    D = (1 + tau * inv_r) / (1 + beta**2 / b2) * d
    theta = m * d**2 * K / (8 * hb * beta**4 * (A**2 + m_h**2 * K**2))
    inv_mK = 1 / (m_h * K)  # hbar tau r / (m (tau + r))
    mu = -0.5 * math.atan2(t / tau0 + inv_mK * A, 1 - (t / tau0) * inv_mK * A)
    return SlitBeam(B=math.sqrt(B2), R=R, Delta=Delta, D=D, theta=theta, mu=mu)


def _require_positive(name, value):
    _require_finite(name, value)
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


def _require_finite(name, value):
    if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
        raise ValueError(f"{name} must be a finite number, got {value!r}")


def _nonnegative(name, value):
    a = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a < 0):
        raise ValueError(f"{name} must be finite and >= 0")
    return a


def _positive(name, value):
    a = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise ValueError(f"{name} must be finite and > 0")
    return a


# Neutron double slit: m = 1.67e-27 kg, sigma0 = beta = 7.8 um, d = 125 um, lambda = 2 nm.
NEUTRON = ExperimentParams(mass=1.67e-27, sigma0=7.8e-6, beta=7.8e-6, d=125e-6, lambda_dB=2e-9)
