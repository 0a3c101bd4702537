"""Gaussian matter-wave double-slit interference: beam parameters, moments and fringes."""
from .model import NEUTRON, ExperimentParams, FreeBeam, ReducedParams, SlitBeam, free_beam, reduce, slit_beam
from .moments import CovarianceSummary, covariance, sigma_pp2, sigma_xp, sigma_xx2, xp_terms

__all__ = [
    "NEUTRON",
    "ExperimentParams",
    "ReducedParams",
    "FreeBeam",
    "SlitBeam",
    "free_beam",
    "reduce",
    "slit_beam",
    "CovarianceSummary",
    "covariance",
    "sigma_xp",
    "sigma_xx2",
    "sigma_pp2",
    "xp_terms",
]
