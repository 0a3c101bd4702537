"""Brute-force ground truth for the closed forms.

The screen wave of each slit is rebuilt from its definition: the source
packet spreads freely for ``t``, is multiplied by a Gaussian aperture and
propagates freely for ``tau``.  The first free flight is a Gaussian
integral done analytically (or, optionally, by quadrature); the second is
done by Gauss-Legendre quadrature over the aperture plane.  Nothing here
uses the beam parameters of :mod:`slitwave.model`; :func:`validate`
only reports them next to values fitted from the oracle wave.

Moments are computed by trapezoidal quadrature of the closed-form
wavefunction and its exact derivative.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .model import ReducedParams, free_beam, slit_beam
from .moments import covariance
from .wavefunction import default_half_width, dpsi_total, norm_constant, psi_slit, psi_total

MAX_NODES = 2**16
CONVERGENCE_RTOL = 1e-9
TAIL_MASS = 1e-10
_CHUNK = 2**22  # complex entries per quadrature matrix block


class OracleConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class QuadratureSpec:
    """Cut-off ``half_width`` (in local packet widths), node count per stage, and grid size for moments."""

    half_width: float = 10.0
    nodes: int = 256
    grid_points: int = 8193

    def __post_init__(self):
        if self.nodes < 200:
            raise ValueError(f"nodes must be >= 200, got {self.nodes}")
        if self.half_width < 8:
            raise ValueError(f"half_width must be >= 8, got {self.half_width}")
        if self.grid_points < 4096:
            raise ValueError(f"grid_points must be >= 4096, got {self.grid_points}")


def source_packet(x):
    """Normalised Gaussian of unit width at ``t = 0``."""
    return np.pi**-0.25 * np.exp(-np.asarray(x, dtype=float) ** 2 / 2)


def spread_packet(x, t):
    """Source packet after free flight ``t``: ``(1 + i t)**-1/2 exp(-x**2 / 2(1 + i t))``."""
    q = 1.0 + 1j * t
    return np.pi**-0.25 / np.sqrt(q) * np.exp(-np.asarray(x, dtype=float) ** 2 / (2 * q))


def aperture(x, centre, beta_r):
    """Gaussian slit transmission ``(beta sqrt(pi))**-1/2 exp(-(x - centre)**2 / 2 beta**2)``."""
    return (beta_r * np.sqrt(np.pi)) ** -0.5 * np.exp(-((x - centre) ** 2) / (2 * beta_r**2))


def _propagate(values_at_nodes, nodes, weights, x, tau):
    """``int G(x - u; tau) f(u) du`` by quadrature; ``G = (2 pi i tau)**-1/2 exp(i (x-u)**2 / 2 tau)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    pref = 1.0 / np.sqrt(2j * np.pi * tau)
    fw = values_at_nodes * weights
    out = np.empty(x.shape, dtype=complex)
    step = max(1, _CHUNK // max(nodes.size, 1))
    for i in range(0, x.size, step):
        xs = x[i:i + step, None]
        out[i:i + step] = pref * (np.exp(1j * (xs - nodes) ** 2 / (2 * tau)) @ fw)
    return out


@lru_cache(maxsize=32)
def _legendre(n):
    u, w = roots_legendre(n)
    u.flags.writeable = False
    w.flags.writeable = False
    return u, w


def _gauss_nodes(n, centre, half):
    u, w = _legendre(n)
    return centre + half * u, half * w


def _stage_a_quadrature(xj, t, half_width, n_a):
    xi, wi = _gauss_nodes(n_a, 0.0, half_width)
    return _propagate(source_packet(xi), xi, wi, xj, t)


def _slit_interval(params, t, slit, half_width):
    # |aperture * incoming| is a Gaussian of precision 1/beta^2 + 1/b^2; integrate over half_width of its widths.
    centre = -params.d_r / 2 if slit == 1 else params.d_r / 2
    b = float(free_beam(t).b)
    precision = 1 / params.beta_r**2 + 1 / b**2
    return centre, centre / (params.beta_r**2 * precision), half_width / np.sqrt(precision)


def _stage_b_nodes_needed(x, t, tau, mid, half):
    # Largest phase rate of the integrand across the aperture interval, in radians per unit length.
    xmax = np.max(np.abs(x))
    umax = abs(mid) + half
    rate = (xmax + umax) / tau + t * umax / (1 + t * t)
    return int(np.ceil(2.0 * rate * 2 * half / np.pi))


def _after_slit(params, u, t, centre, stage_a, spec, n_a):
    if stage_a == "analytic":
        incoming = source_packet(u) if t == 0 else spread_packet(u, t)
    elif stage_a == "quadrature":
        if t < 0.1:
            raise ValueError("numerical first stage needs t >= 0.1 tau0")
        incoming = _stage_a_quadrature(u, t, spec.half_width, n_a)
    else:
        raise ValueError(f"stage_a must be 'analytic' or 'quadrature', got {stage_a!r}")
    return aperture(u, centre, params.beta_r) * incoming


def oracle_psi_slit(params: ReducedParams, x, t: float, tau: float, slit: int = 1,
                    spec: QuadratureSpec = QuadratureSpec(), stage_a: str = "analytic",
                    normalize: bool = True, return_info: bool = False):
    """Screen wave of one slit by direct propagation.

    With ``normalize=True`` the result is divided by the norm of the wave
    just behind the slit (free flight conserves it), so it is comparable with
    the normalised closed form including its phase.  Node counts double until
    successive results differ by less than 1e-9 (relative L2).
    """
    if slit not in (1, 2):
        raise ValueError(f"slit must be 1 or 2, got {slit!r}")
    if t < 0 or tau <= 0:
        raise ValueError("need t >= 0 and tau > 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    centre, mid, half = _slit_interval(params, t, slit, spec.half_width)
    n = max(spec.nodes, _stage_b_nodes_needed(x, t, tau, mid, half))
    n_a = spec.nodes
    if stage_a == "quadrature":
        # phase of the first-stage kernel sweeps (|u| + L)^2 / 2t over the source interval
        umax = abs(mid) + half + spec.half_width
        n_a = max(n_a, int(np.ceil(2.0 * umax * 2 * spec.half_width / (np.pi * t))))

    def evaluate(n_b, n_a):
        u, w = _gauss_nodes(n_b, mid, half)
        g = _after_slit(params, u, t, centre, stage_a, spec, n_a)
        psi = _propagate(g, u, w, x, tau)
        norm2 = float(np.sum(w * np.abs(g) ** 2))
        return psi, norm2

    psi, norm2 = evaluate(n, n_a)
    history = []
    while True:
        n2, na2 = 2 * n, (2 * n_a if stage_a == "quadrature" else n_a)
        if n2 > MAX_NODES or na2 > MAX_NODES:
            raise OracleConvergenceError(
                f"oracle did not converge within {MAX_NODES} nodes (residual {history[-1]:.3e})", history[-1])
        psi2, norm2b = evaluate(n2, na2)
        residual = float(np.linalg.norm(psi2 - psi) / np.linalg.norm(psi2))
        history.append(residual)
        psi, norm2, n, n_a = psi2, norm2b, n2, na2
        if residual < CONVERGENCE_RTOL:
            break
        # Past the resolution estimate Gauss-Legendre converges geometrically; a flat
        # residual means rounding noise dominates (e.g. cancellation in far tails).
        if len(history) >= 3 and history[-1] > 0.5 * history[-3]:
            raise OracleConvergenceError(
                f"oracle residual stagnated at {residual:.3e} with {n} nodes", residual)
    if normalize:
        psi = psi / np.sqrt(norm2)
    if return_info:
        return psi, {"nodes": n, "stage_a_nodes": n_a, "residual": residual, "norm2": norm2}
    return psi


def oracle_psi_total(params: ReducedParams, x, t, tau, spec: QuadratureSpec = QuadratureSpec(),
                     stage_a: str = "analytic"):
    """Oracle superposition, normalised with the closed-form overlap constant."""
    p1 = oracle_psi_slit(params, x, t, tau, 1, spec, stage_a)
    p2 = oracle_psi_slit(params, x, t, tau, 2, spec, stage_a)
    return (p1 + p2) / norm_constant(params, t, tau)


def relative_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


@dataclass(frozen=True)
class GridMoments:
    mean_x: float
    mean_p: float
    sigma_xx2: float
    sigma_pp2: float
    sigma_xp: float
    norm: float
    half_width: float


def oracle_moments(params: ReducedParams, t: float, tau: float, spec: QuadratureSpec = QuadratureSpec()) -> GridMoments:
    """Moments of ``psi_total`` on a grid with ``p = -i d/dx`` applied exactly.

    The grid covers ``D/2 + half_width B`` on each side and is widened while
    the probability mass in the outer 5 % of the grid exceeds 1e-10.
    """
    margin = spec.half_width
    for _ in range(6):
        L = default_half_width(params, t, tau, margin)
        x = np.linspace(-L, L, spec.grid_points)
        psi = psi_total(params, x, t, tau)
        rho = np.abs(psi) ** 2
        edge = np.abs(x) > 0.95 * L
        tail = np.trapezoid(np.where(edge, rho, 0.0), x)
        if tail <= TAIL_MASS:
            break
        margin *= 1.5
    else:
        raise OracleConvergenceError(f"grid tail mass {tail:.3e} exceeds {TAIL_MASS}", tail)
    ppsi = -1j * dpsi_total(params, x, t, tau)
    norm = np.trapezoid(rho, x)
    mx = np.trapezoid(x * rho, x) / norm
    mx2 = np.trapezoid(x * x * rho, x) / norm
    mp = np.trapezoid((np.conj(psi) * ppsi).real, x) / norm
    mp2 = np.trapezoid(np.abs(ppsi) ** 2, x) / norm
    # Re <psi| x p |psi> equals <(xp + px)/2>
    mxp = np.trapezoid((x * np.conj(psi) * ppsi).real, x) / norm
    return GridMoments(mean_x=float(mx), mean_p=float(mp), sigma_xx2=float(mx2 - mx * mx),
                       sigma_pp2=float(mp2 - mp * mp), sigma_xp=float(mxp - mx * mp), norm=float(norm),
                       half_width=float(L))


@dataclass(frozen=True)
class FittedBeam:
    """Beam parameters read off the oracle wave of slit 1 by polynomial fits."""

    B: float
    R: float
    Delta: float
    D: float


def fit_beam(params: ReducedParams, t: float, tau: float, spec: QuadratureSpec = QuadratureSpec(),
             points: int = 801) -> FittedBeam:
    """Fit ``log|psi1|`` and the unwrapped phase of the oracle wave with quadratics.

    ``log|psi1| = c - (x + D/2)**2 / 2B**2`` gives ``B`` and ``D``; the phase
    ``x**2/2R + Delta x + const`` gives ``R`` and ``Delta``.
    """
    # locate the packet from a coarse oracle sample, then fit within +-3 widths of it
    L = default_half_width(params, t, tau, spec.half_width)
    coarse = np.linspace(-L, L, 2001)
    amp = np.abs(oracle_psi_slit(params, coarse, t, tau, 1, spec))
    w = amp**2 / np.sum(amp**2)
    c = float(np.sum(w * coarse))
    s = float(np.sqrt(np.sum(w * (coarse - c) ** 2)))
    x = np.linspace(c - 3 * s, c + 3 * s, points)
    psi = oracle_psi_slit(params, x, t, tau, 1, spec)
    a2, a1, _ = np.polyfit(x, np.log(np.abs(psi)), 2)
    B2 = -1 / (2 * a2)
    D = -2 * a1 * B2  # -(x + D/2)^2/(2B^2) has linear coefficient -D/(2B^2)
    p2, p1, _ = np.polyfit(x, np.unwrap(np.angle(psi)), 2)
    return FittedBeam(B=float(np.sqrt(B2)), R=float(1 / (2 * p2)), Delta=float(p1), D=float(D))


@dataclass(frozen=True)
class ValidationReport:
    rel_l2_psi: float
    moment_rel_errors: tuple
    norm_error: float
    params_echo: tuple
    slit_rel_l2: tuple = ()
    closed_beam: dict = field(default_factory=dict)
    fitted_beam: dict = field(default_factory=dict)

    def passed(self, psi_tol: float = 1e-6, moment_tol: float = 1e-7, norm_tol: float = 1e-7) -> bool:
        return (self.rel_l2_psi <= psi_tol and max(self.moment_rel_errors) <= moment_tol
                and self.norm_error <= norm_tol)


def validate(params: ReducedParams, t: float, tau: float, spec: QuadratureSpec = QuadratureSpec(),
             fit: bool = True) -> ValidationReport:
    """Compare closed forms against the oracle at one ``(t, tau)``."""
    L = default_half_width(params, t, tau)
    x = np.linspace(-L, L, 4097)
    slit_errors = []
    oracle_slits = []
    for slit in (1, 2):
        o = oracle_psi_slit(params, x, t, tau, slit, spec)
        oracle_slits.append(o)
        slit_errors.append(relative_l2(psi_slit(params, x, t, tau, slit), o))
    o_total = (oracle_slits[0] + oracle_slits[1]) / norm_constant(params, t, tau)
    rel_total = relative_l2(psi_total(params, x, t, tau), o_total)
    norm_error = abs(float(np.trapezoid(np.abs(o_total) ** 2, x)) - 1.0)

    g = oracle_moments(params, t, tau, spec)
    c = covariance(params, t, tau)
    errs = tuple(abs(a - b) / abs(b) for a, b in
                 ((c.sigma_xx2, g.sigma_xx2), (c.sigma_pp2, g.sigma_pp2), (c.sigma_xp, g.sigma_xp)))

    sb = slit_beam(params, t, tau)
    closed = {"B": float(sb.B), "R": float(sb.R), "Delta": float(sb.Delta), "D": float(sb.D)}
    fitted = {}
    if fit:
        fb = fit_beam(params, t, tau, spec)
        fitted = {"B": fb.B, "R": fb.R, "Delta": fb.Delta, "D": fb.D}
    return ValidationReport(rel_l2_psi=max(max(slit_errors), rel_total), moment_rel_errors=errs,
                            norm_error=norm_error, params_echo=(float(t), float(tau), params),
                            slit_rel_l2=tuple(slit_errors), closed_beam=closed, fitted_beam=fitted)
