"""Command-line front end: parameter I/O, sweeps and CSV output.

Every CSV starts with ``#`` metadata lines echoing the run parameters,
followed by one header row and data rows with 17 significant digits.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from contextlib import contextmanager

import numpy as np

from . import extrema, fringes, moments, oracle
from .model import HBAR, NEUTRON, ExperimentParams, free_beam, slit_beam
from .wavefunction import (UNIT_AREA, UNIT_PEAK, default_half_width, envelope, intensity, intensity_profile,
                           intensity_scale)

COMMANDS = ("derived", "scan-xp", "surface", "table1", "intensity", "fringes", "duality-scan", "validate",
            "feasibility")

VALIDATION_TIMES = (0.2, 0.52, 1.42, 4.0, 18.0)
VALIDATION_TAUS = (10.0, 18.0, 30.0)

_LENGTH_UNITS = {"um": 1e-6, "mm": 1e-3, "m": 1.0}
_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


class UsageError(ValueError):
    pass


def parse_length(text: str) -> float:
    """``'7.8um'``, ``'0.125mm'``, ``'2e-9m'`` or a bare number of metres."""
    m = re.fullmatch(rf"\s*({_NUMBER})\s*(um|mm|m)?\s*", str(text))
    if not m:
        raise UsageError(f"cannot parse length {text!r} (use um, mm or m)")
    return float(m.group(1)) * _LENGTH_UNITS[m.group(2) or "m"]


def parse_time(text: str, tau0: float) -> float:
    """Time in units of tau0: ``'18tau0'``, ``'18'`` or ``'0.018s'``."""
    m = re.fullmatch(rf"\s*({_NUMBER})\s*(tau0|s)?\s*", str(text))
    if not m:
        raise UsageError(f"cannot parse time {text!r} (use tau0 or s)")
    value = float(m.group(1))
    return value / tau0 if m.group(2) == "s" else value


def parse_range(text: str, convert):
    """``'a:b:n'`` -> ``n`` evenly spaced values from ``a`` to ``b`` inclusive."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"range must look like a:b:n, got {text!r}")
    a, b = convert(parts[0]), convert(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"range count must be an integer, got {parts[2]!r}") from None
    if n < 1 or not b > a:
        raise UsageError(f"range {text!r} must have b > a and n >= 1")
    return np.linspace(a, b, n)


def fmt(value) -> str:
    if isinstance(value, (str, np.str_)):
        return str(value)
    return format(float(value), ".17g")


class CsvWriter:
    def __init__(self, stream):
        self.stream = stream

    def meta(self, key, value):
        self.stream.write(f"# {key} = {value if isinstance(value, str) else fmt(value)}\n")

    def header(self, *names):
        self.stream.write(",".join(names) + "\n")

    def row(self, *values):
        self.stream.write(",".join(fmt(v) for v in values) + "\n")


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slitwave", description="Gaussian matter-wave double-slit calculations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="file of key=value lines mirroring the long option names")
    p.add_argument("--mass", type=float, default=NEUTRON.mass, help="particle mass [kg]")
    p.add_argument("--sigma0", type=parse_length, default=NEUTRON.sigma0, help="source packet width")
    p.add_argument("--beta", type=parse_length, default=NEUTRON.beta, help="slit width")
    p.add_argument("--d", type=parse_length, default=NEUTRON.d, help="slit separation")
    p.add_argument("--lambda", dest="lambda_dB", type=parse_length, default=NEUTRON.lambda_dB,
                   help="de Broglie wavelength")
    p.add_argument("--hbar", type=float, default=HBAR, help="reduced Planck constant [J s]")
    p.add_argument("--t", help="source-to-slit flight time (tau0 units, or suffix s)")
    p.add_argument("--tau", help="slit-to-screen flight time (tau0 units, or suffix s)")
    p.add_argument("--t-range", help="a:b:n sweep of t")
    p.add_argument("--tau-range", help="a:b:n sweep of tau")
    p.add_argument("--x-range", help="a:b:n screen positions (lengths)")
    p.add_argument("--x-values", default="0.01mm,0.05mm,0.1mm", help="comma-separated screen positions")
    p.add_argument("--taus", default=",".join(str(int(x)) for x in extrema.TABLE_TAUS),
                   help="comma-separated tau list for table1")
    p.add_argument("--quantity", default="sigma_xp", choices=("sigma_xp", "sigma_xx2", "sigma_pp2", "det"))
    p.add_argument("--v", type=float, help="longitudinal velocity [m/s] (default: from --lambda)")
    p.add_argument("--normalization", choices=(UNIT_AREA, UNIT_PEAK), default=UNIT_PEAK)
    p.add_argument("--out", help="output file (default: standard output)")
    return p


def read_config(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            dest = "lambda_dB" if key == "lambda" else key.replace("-", "_")
            values[dest] = value
    return values


def parse_args(argv=None):
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    if pre.config:
        config = read_config(pre.config)
        known = {a.dest for a in parser._actions}
        unknown = sorted(set(config) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        parser.set_defaults(**config)
    return parser.parse_args(argv)


def _params(args) -> ExperimentParams:
    return ExperimentParams(mass=args.mass, sigma0=args.sigma0, beta=args.beta, d=args.d,
                            lambda_dB=args.lambda_dB, hbar=args.hbar)


def _time(args, name, default):
    text = getattr(args, name)
    value = default if text is None else parse_time(text, _params(args).tau0)
    return value


def _echo(out: CsvWriter, args, params: ExperimentParams):
    out.meta("command", args.command)
    out.meta("mass_kg", params.mass)
    out.meta("sigma0_m", params.sigma0)
    out.meta("beta_m", params.beta)
    out.meta("d_m", params.d)
    if params.lambda_dB is not None:
        out.meta("lambda_m", params.lambda_dB)
    out.meta("hbar_Js", params.hbar)
    out.meta("tau0_s", params.tau0)


def cmd_derived(args, out):
    params = _params(args)
    red = params.reduce()
    t = _time(args, "t", 18.0)
    tau = _time(args, "tau", 18.0)
    fb = free_beam(t)
    sb = slit_beam(red, t, tau).to_si(red)
    _echo(out, args, params)
    out.header("t_tau0", "tau_tau0", "b_m", "inv_r_per_s", "B_m", "R_s", "Delta_per_m", "D_m", "theta_rad",
               "mu_rad", "tau0_s")
    out.row(t, tau, fb.b * red.sigma0, fb.inv_r / red.tau0, sb.B, sb.R, sb.Delta, sb.D, sb.theta, sb.mu, red.tau0)


def cmd_scan_xp(args, out):
    params = _params(args)
    red = params.reduce()
    tau = _time(args, "tau", 18.0)
    tau0 = params.tau0
    ts = (parse_range(args.t_range, lambda s: parse_time(s, tau0)) if args.t_range
          else np.linspace(6.0 / 2000, 6.0, 2000))
    _echo(out, args, params)
    out.meta("tau_tau0", tau)
    out.header("t_tau0", "sigma_xp_hbar", "abs_term1_hbar", "abs_term2_hbar", "abs_term3_hbar", "abs_term4_hbar",
               "sigma_xx_sigma0", "sigma_pp_hbar_per_sigma0", "det_hbar2")
    c = moments.covariance(red, ts, tau)
    terms = [np.broadcast_to(np.abs(term), ts.shape) for term in c.xp_terms]
    for i, t in enumerate(ts):
        out.row(t, c.sigma_xp[i], *(term[i] for term in terms), math.sqrt(c.sigma_xx2[i]),
                math.sqrt(c.sigma_pp2[i]), c.det[i])


def cmd_surface(args, out):
    params = _params(args)
    red = params.reduce()
    tau0 = params.tau0
    ts = (parse_range(args.t_range, lambda s: parse_time(s, tau0)) if args.t_range
          else np.linspace(6.0 / 300, 6.0, 300))
    taus = (parse_range(args.tau_range, lambda s: parse_time(s, tau0)) if args.tau_range
            else np.linspace(2.0, 100.0, 300))
    T, TAU = np.meshgrid(ts, taus, indexing="ij")
    c = moments.covariance(red, T, TAU)
    unit = {"sigma_xp": "hbar", "sigma_xx2": "sigma0sq", "sigma_pp2": "hbarsq_per_sigma0sq", "det": "hbar2"}
    Z = getattr(c, args.quantity)
    _echo(out, args, params)
    out.header("t_tau0", "tau_tau0", f"{args.quantity}_{unit[args.quantity]}")
    for i in range(ts.size):
        for j in range(taus.size):
            out.row(T[i, j], TAU[i, j], Z[i, j])


def cmd_table1(args, out):
    params = _params(args)
    try:
        taus = [float(s) for s in args.taus.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--taus must be comma-separated numbers, got {args.taus!r}") from None
    if not taus or min(taus) <= 0:
        raise UsageError("--taus must be positive")
    rows = extrema.table1(params.reduce(), taus)
    _echo(out, args, params)
    out.header("tau_tau0", "t_max_sigma_xp_tau0", "t_max_sigma_xx_tau0", "t_max_sigma_pp_tau0", "t_inf_sigma_xp_tau0")
    for r in rows:
        out.row(r.tau, r.t_max_xp, r.t_max_xx, r.t_max_pp, r.t_inf_xp)


def _screen_setup(args):
    params = _params(args)
    red = params.reduce()
    t = _time(args, "t", 18.0)
    tau = _time(args, "tau", 18.0)
    if args.x_range:
        x_m = parse_range(args.x_range, parse_length)
    else:
        x_m = np.linspace(0.0, default_half_width(red, t, tau), 2049) * red.sigma0
    return params, red, t, tau, x_m


def _screen_meta(out, args, params, red, t, tau):
    _echo(out, args, params)
    out.meta("t_tau0", t)
    out.meta("tau_tau0", tau)
    out.meta("normalization", args.normalization)
    out.meta("fringe_count_default_grid", fringes.count_fringes(intensity_profile(red, t, tau)))
    out.meta("fringe_index_nu", fringes.fringe_index(red, t, tau))


def cmd_intensity(args, out):
    params, red, t, tau, x_m = _screen_setup(args)
    x = x_m / red.sigma0
    prof = _profile_values(red, x, t, tau, args.normalization)
    _screen_meta(out, args, params, red, t, tau)
    out.header("x_m", "x_sigma0", "I", "F")
    for i in range(x.size):
        out.row(x_m[i], x[i], prof[0][i], prof[1][i])


def _profile_values(red, x, t, tau, normalization):
    i0 = intensity_scale(red, t, tau, normalization)
    I = intensity(red, x, t, tau, normalization)
    return I, envelope(red, x, t, tau, i0)


def cmd_fringes(args, out):
    params, red, t, tau, x_m = _screen_setup(args)
    x = x_m / red.sigma0
    I, F = _profile_values(red, x, t, tau, args.normalization)
    fp = fringes.fringe_profile(red, t, tau, x)
    _screen_meta(out, args, params, red, t, tau)
    out.header("x_m", "x_sigma0", "I", "F", "V", "P", "P2_plus_V2")
    for i in range(x.size):
        out.row(x_m[i], x[i], I[i], F[i], fp.V[i], fp.P[i], fp.P[i] ** 2 + fp.V[i] ** 2)


def cmd_duality_scan(args, out):
    params = _params(args)
    red = params.reduce()
    tau = _time(args, "tau", 10.0)
    ts = (parse_range(args.t_range, lambda s: parse_time(s, params.tau0)) if args.t_range
          else np.linspace(0.05, 30.0, 600))
    xs_m = [parse_length(s) for s in args.x_values.split(",") if s.strip()]
    if not xs_m:
        raise UsageError("--x-values is empty")
    _echo(out, args, params)
    out.meta("tau_tau0", tau)
    out.header("t_tau0", "x_m", "V", "P", "P2_plus_V2")
    for x_m in xs_m:
        x = x_m / red.sigma0
        V = fringes.visibility(red, x, ts, tau)
        P = fringes.predictability(red, x, ts, tau)
        for i, t in enumerate(ts):
            out.row(t, x_m, V[i], P[i], P[i] ** 2 + V[i] ** 2)


def cmd_validate(args, out):
    params = _params(args)
    red = params.reduce()
    if args.t is not None or args.tau is not None:
        points = [(_time(args, "t", 1.42), _time(args, "tau", 18.0))]
    else:
        points = [(t, tau) for t in VALIDATION_TIMES for tau in VALIDATION_TAUS]
    _echo(out, args, params)
    out.meta("psi_tolerance", 1e-6)
    out.meta("moment_tolerance", 1e-7)
    out.header("t_tau0", "tau_tau0", "rel_l2_psi", "rel_err_sigma_xx2", "rel_err_sigma_pp2", "rel_err_sigma_xp",
               "norm_error", "B_closed", "B_fit", "R_closed", "R_fit", "Delta_closed", "Delta_fit", "D_closed",
               "D_fit", "passed")
    ok = True
    for t, tau in points:
        rep = oracle.validate(red, t, tau)
        passed = rep.passed()
        ok &= passed
        pb, fb = rep.closed_beam, rep.fitted_beam
        out.row(t, tau, rep.rel_l2_psi, *rep.moment_rel_errors, rep.norm_error, pb["B"], fb["B"], pb["R"], fb["R"],
                pb["Delta"], fb["Delta"], pb["D"], fb["D"], "yes" if passed else "no")
    return 0 if ok else 1


def feasibility(params: ExperimentParams, t: float, tau: float, velocity: float | None = None) -> dict:
    """Flight times and distances for a given configuration; ``t``, ``tau`` in tau0."""
    v = params.velocity if velocity is None else velocity
    if not v > 0:
        raise UsageError(f"velocity must be > 0, got {v!r}")
    tau0 = params.tau0
    return {"tau0_s": tau0, "t_s": t * tau0, "tau_s": tau * tau0, "v_m_per_s": v,
            "z_t_m": v * t * tau0, "z_tau_m": v * tau * tau0}


def cmd_feasibility(args, out):
    params = _params(args)
    t = _time(args, "t", 18.0)
    tau = _time(args, "tau", 18.0)
    rep = feasibility(params, t, tau, args.v)
    _echo(out, args, params)
    out.meta("t_tau0", t)
    out.meta("tau_tau0", tau)
    out.header("quantity", "value")
    for key, value in rep.items():
        out.row(key, value)


_HANDLERS = {
    "derived": cmd_derived,
    "scan-xp": cmd_scan_xp,
    "surface": cmd_surface,
    "table1": cmd_table1,
    "intensity": cmd_intensity,
    "fringes": cmd_fringes,
    "duality-scan": cmd_duality_scan,
    "validate": cmd_validate,
    "feasibility": cmd_feasibility,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        with _output(args.out) as stream:
            status = _HANDLERS[args.command](args, CsvWriter(stream))
    except (UsageError, ValueError, OSError) as exc:
        print(f"slitwave: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse reports bad flags this way
        return exc.code if isinstance(exc.code, int) else 2
    return status or 0


if __name__ == "__main__":
    sys.exit(main())
