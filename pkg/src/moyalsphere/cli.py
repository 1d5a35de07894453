"""Command-line front end: figure data tables and verification suites.

Subcommands::

    curvature     eta (2D) or Lambda (4D) profiles against r
    gauss-bonnet  direct and telescoped total-curvature sums
    area          gamma_M(lambda) for several M
    epsilon       h^-2/h0^-2 ratio and closed-form ODE residual for several radii
    verify        invariant suites with a pass/fail table

Exit status is 0 on success, 1 when a verification fails and 2 for invalid
input.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Callable

import numpy as np

from . import area as _area
from . import curvature as _curv
from . import gauss_bonnet as _gb
from . import radial_calculus as _rc
from .errors import MoyalError, ParameterWindowError, PoleError
from .params import SphereParams
from .tables import CurveTable

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_LAMBDAS = (2.5, 5.0, 10.0, 100.0)
DEFAULT_RADII = (0.5, 1.0, 2.0, 5.0)


class UsageError(Exception):
    pass


def _label(x) -> str:
    return f"{x:g}"


# table builders -------------------------------------------------------------------


def cmd_curvature(dim, theta, r_min, r_max, samples, lambdas=None, radii=None, mu=0.0, allow=False) -> CurveTable:
    """Normalized curvature profile (eta in 2D, Lambda in 4D) per lambda.

    Each curve gets two columns: the profile, and the exact level coefficient
    at the level nearest to ``r`` divided by the classical curvature.
    Profile values on a pole are written as NaN.
    """
    if dim not in (2, 4):
        raise UsageError("--dim must be 2 or 4")
    if dim == 2 and mu:
        raise UsageError("--mu applies to the 4D sphere only")
    theta_eff = math.hypot(theta, mu)
    if lambdas is None and radii is None:
        lambdas = DEFAULT_LAMBDAS
    if radii is not None:
        lambdas = [A * A / theta_eff for A in radii]
    if samples < 1:
        raise UsageError("--samples must be >= 1")
    r = np.linspace(r_min, r_max, samples) if samples > 1 else np.array([float(r_min)])
    if np.any(r < 0):
        raise UsageError("radii must be nonnegative")
    half = dim // 2
    cols, data = [("r", "length")], [r]
    profile = _curv.eta if dim == 2 else _curv.lambda_big
    name = "eta" if dim == 2 else "Lambda"
    for lam in lambdas:
        A = math.sqrt(lam * theta_eff)
        p = SphereParams(A, theta_eff, 0.0, half, allow)
        data.append(_safe_profile(profile, r, lam, theta_eff))
        s = (_curv.s2_coeffs if dim == 2 else _curv.s4_coeffs)(p)
        levels = _curv.nearest_level(r, theta_eff, half)
        with np.errstate(divide="ignore", invalid="ignore"):
            data.append(s.coeff(levels) / s.classical)
        cols += [(f"{name}_lam{_label(lam)}", "1"), (f"level_lam{_label(lam)}", "1")]
    meta = {
        "command": "curvature",
        "dim": dim,
        "theta": theta,
        "mu": mu,
        "lambda": list(lambdas),
        "r_min": r_min,
        "r_max": r_max,
        "samples": samples,
    }
    return CurveTable(cols, np.column_stack(data), meta)


def _safe_profile(fn, r, lam, theta):
    try:
        return np.atleast_1d(fn(r, lam, theta))
    except PoleError:
        out = np.empty_like(r)
        for i, ri in enumerate(r):
            try:
                out[i] = fn(ri, lam, theta)
            except PoleError:
                out[i] = np.nan
        return out


def cmd_gauss_bonnet(A, theta, n_terms, allow=False):
    """Direct and telescoped partial sums at checkpoints ``1, 10, ..., N``.

    Returns ``(table, ok)`` with ``ok`` true iff the bracketed estimate at
    ``N`` lies within its tail bound of ``8 pi``.
    """
    if n_terms < 0:
        raise UsageError("--trunc must be >= 0")
    p = SphereParams(A, theta, allow_out_of_window=allow)
    checkpoints = sorted({min(10 ** k, n_terms) for k in range(int(math.log10(max(n_terms, 1))) + 1)} | {n_terms})
    rows = []
    for n in checkpoints:
        res = _gb.gb_direct(p, n)
        tele = _gb.gb_telescoped(p, n - 1) if n >= 1 else 0.0
        rows.append([n, res.partial, tele, abs(res.partial - tele), res.tail_bound])
    final = _gb.gb_direct(p, n_terms)
    dev = abs(final.value - _gb.EIGHT_PI)
    ok = dev <= final.tail_bound
    meta = {
        "command": "gauss-bonnet",
        "A": A,
        "theta": theta,
        "trunc": n_terms,
        "estimate": final.value,
        "deviation_from_8pi": dev,
        "tail_bound": final.tail_bound,
        "limit": _gb.gb_limit(p),
        "within_bound": bool(ok),
    }
    cols = [
        ("terms", "1"),
        ("partial_direct", "1"),
        ("partial_telescoped", "1"),
        ("abs_diff", "1"),
        ("tail_bound", "1"),
    ]
    return CurveTable(cols, np.array(rows, dtype=float), meta), ok


def cmd_area(M_list, lambdas, tol=1e-13) -> CurveTable:
    """``gamma_M`` by series for each ``M``; closed forms and their deviation for ``M <= 2``."""
    if not M_list:
        raise UsageError("need at least one M")
    if any(int(M) != M or M < 1 for M in M_list):
        raise UsageError("M must be positive integers")
    lam = np.asarray(lambdas, dtype=float)
    if lam.size == 0 or np.any(lam <= 0):
        raise UsageError("lambda values must be positive")
    cols, data = [("lambda", "1")], [lam]
    for M in M_list:
        cols.append((f"gamma_M{M}", "1"))
        data.append(np.array([_area.gamma_m_series(M, x, tol) for x in lam]))
    for M in M_list:
        if M in (1, 2):
            closed = (_area.gamma1_closed if M == 1 else _area.gamma2_closed)(lam)
            series = data[1 + list(M_list).index(M)]
            cols += [(f"closed_M{M}", "1"), (f"abs_diff_M{M}", "1")]
            data += [closed, np.abs(closed - series)]
    meta = {"command": "area", "M": list(M_list), "lambda_count": int(lam.size), "tol": tol,
            "lambda_min": float(lam.min()), "lambda_max": float(lam.max())}
    return CurveTable(cols, np.column_stack(data), meta)


def cmd_epsilon(radii, theta, r_min, r_max, samples, mu=0.0, allow=False) -> CurveTable:
    """Ratio ``h^-2/h0^-2`` and the closed-form ODE residual per radius."""
    if not radii:
        raise UsageError("need at least one radius")
    theta_eff = math.hypot(theta, mu)
    for A in radii:
        if A <= 0:
            raise UsageError("radii must be positive")
        if not allow and not theta_eff < A * A / 2:
            raise ParameterWindowError(f"theta={theta_eff} outside (0, A^2/2) for A={A}")
    r = np.linspace(r_min, r_max, samples) if samples > 1 else np.array([float(r_min)])
    if np.any(r < 0):
        raise UsageError("radii must be nonnegative")
    cols, data = [("r", "length")], [r]
    for A in radii:
        cols.append((f"ratio_A{_label(A)}", "1"))
        data.append(np.atleast_1d(_rc.h_ratio(r, A, theta_eff)))
    for A in radii:
        ode = _rc.epsilon_ode("4d", A)
        cols.append((f"ode_residual_A{_label(A)}", "length^-6"))
        data.append(np.atleast_1d(ode.residual_of(_rc.epsilon_radial(A), r)))
    meta = {
        "command": "epsilon",
        "A": list(radii),
        "theta": theta,
        "mu": mu,
        "C1": "-(13+12 ln A)/(30 A^6)",
        "C2": "1/(15 A^8)",
        "r_min": r_min,
        "r_max": r_max,
        "samples": samples,
    }
    return CurveTable(cols, np.column_stack(data), meta)


# verification suites -----------------------------------------------------------------


def _suite_algebra():
    from .band_matrix import BandMatrix, bm_del, bm_star_mul
    from .diag_series import DiagSeries, ds_eval

    rng = np.random.default_rng(0)
    n, th = 8, 0.3

    def leibniz():
        a = BandMatrix(th, rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), n)
        b = BandMatrix(th, rng.normal(size=(n, n)), n)
        lhs = bm_del(bm_star_mul(a, b)).entries
        rhs = (bm_star_mul(bm_del(a), b) + bm_star_mul(a, bm_del(b))).entries
        err = float(np.max(np.abs(lhs - rhs)))
        return err <= 1e-12, f"max err {err:.2e}"

    def brute_product():
        a, b = rng.normal(size=(n, n)), rng.normal(size=(n, n))
        c = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                c[i, j] = sum(a[i, k] * b[k, j] for k in range(n))
        got = bm_star_mul(BandMatrix(th, a, n), BandMatrix(th, b, n)).entries.real
        err = float(np.max(np.abs(got - c)))
        return err <= 1e-12, f"max err {err:.2e}"

    def eval_unit():
        r = np.array([0.5, 1.3, 2.0])
        one = ds_eval(DiagSeries.unit(0.1, 1, 400), r)
        lev = ds_eval(DiagSeries.from_rule(lambda m: m, 0.1, 1, 400), r)
        err = max(np.max(np.abs(one - 1)), np.max(np.abs(lev - (r * r / 0.1 - 1) / 2)))
        return err <= 1e-8, f"max err {err:.2e}"

    return [("leibniz N=8", leibniz), ("product brute force N=8", brute_product), ("ds_eval identities", eval_unit)]


def _suite_curvature():
    from .band_matrix import BandMatrix, scalar_curvature_generic

    def generic_vs_closed():
        A, th, N = 1.0, 0.2, 64
        p = SphereParams(A, th)
        m = np.arange(N)
        h = BandMatrix(th, np.diag((2 * th * m + th + A * A) / (2 * A * A)), N)
        S = scalar_curvature_generic(h).entries.diagonal()[:33].real
        err = float(np.max(np.abs(S - _curv.s2_coeffs(p).coeff(np.arange(33)))))
        return err <= 1e-9, f"max err {err:.2e}"

    def classical():
        errs = []
        for th in (1e-2, 1e-3, 1e-4):
            p2, p4 = SphereParams(1.0, th), SphereParams(1.0, th, half_dim=2)
            errs.append(max(abs(_curv.s2_coeffs(p2)(3) - 2), abs(_curv.s4_coeffs(p4)(3) - 12)))
        slope = math.log(errs[0] / errs[2]) / math.log(100)
        return slope >= 1.0, f"slope {slope:.2f}"

    return [("generic frame formula vs closed form", generic_vs_closed), ("classical limit", classical)]


def _suite_gb():
    out = []
    for A, th in ((1, 0.1), (1, 0.4), (2, 0.3), (5, 1.0)):

        def case(A=A, th=th):
            r = _gb.gb_direct(SphereParams(A, th), 10 ** 6)
            dev = abs(r.value - _gb.EIGHT_PI)
            ok = dev <= r.tail_bound <= 1e-5
            return ok, f"dev {dev:.2e} bound {r.tail_bound:.2e}"

        out.append((f"8pi A={A} theta={th}", case))
    return out


def _suite_area():
    def closed():
        err = max(
            abs(_area.gamma_m_series(M, lam) - float(f(lam)))
            for M, f in ((1, _area.gamma1_closed), (2, _area.gamma2_closed))
            for lam in (0.1, 1, 10, 100)
        )
        return err <= 1e-10, f"max diff {err:.2e}"

    def limits():
        ok = all(
            _area.gamma_m_series(M, 1e4) >= 0.999 and _area.gamma_m_series(M, 1e-3) <= 1e-2 for M in (1, 2, 4, 6)
        )
        return ok, "gamma(1e4)>=0.999, gamma(1e-3)<=1e-2"

    def deformed():
        a = _area.deformed_area(1, 1.0, 0.03, 0.04)
        b = _area.sphere_area(SphereParams(1.0, 0.05, half_dim=2))
        return a.area == b.area, f"{a.area!r} vs {b.area!r}"

    return [("closed forms vs series", closed), ("limits", limits), ("deformed reduction", deformed)]


def _suite_ode():
    def closed_residual():
        r = np.geomspace(1e-3, 10, 400)
        err = max(float(np.max(np.abs(_rc.epsilon_ode("4d", A).residual_of(_rc.epsilon_radial(A), r)))) for A in (0.5, 1, 2))
        return err <= 1e-8, f"max residual {err:.2e}"

    def solver():
        tab = _rc.ode_solve(_rc.epsilon_ode("4d", 1.0), 5.0)
        r, e = tab.column("r"), tab.column("eps")
        keep = r >= 0.01
        c = _rc.epsilon_closed_4d(r[keep], 1.0)
        dev = float(np.max(np.abs(e[keep] - c)) / np.max(np.abs(c)))
        return dev <= 1e-6, f"relative deviation {dev:.2e}"

    def theta4():
        r = np.array([0.5, 1.0, 2.0])
        res = [_rc.constant_curvature_residual(1.0, th, r, return_all=True) for th in (0.1, 0.05, 0.025)]
        slope = float(np.min(np.log(np.abs(res[0]) / np.abs(res[2])) / math.log(4)))
        return slope >= 3.5, f"min slope {slope:.2f}"

    return [("closed-form residual", closed_residual), ("solver vs closed form", solver), ("theta^4 law", theta4)]


SUITES: dict[str, Callable] = {
    "algebra": _suite_algebra,
    "curvature": _suite_curvature,
    "gb": _suite_gb,
    "area": _suite_area,
    "ode": _suite_ode,
}


def cmd_verify(suite: str, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}")
    names = list(SUITES) if suite == "all" else [suite]
    failures = 0
    for name in names:
        for label, check in SUITES[name]():
            try:
                ok, detail = check()
            except MoyalError as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            failures += not ok
            stream.write(f"{'PASS' if ok else 'FAIL'}  {name:<9} {label:<40} {detail}\n")
    stream.write(f"{'all passed' if not failures else f'{failures} failed'}\n")
    return EXIT_OK if not failures else EXIT_FAIL


# argument parsing -------------------------------------------------------------------


def _positive_float(s):
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _nonneg_float(s):
    v = float(s)
    if v < 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moyalsphere", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def output(p):
        p.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--allow-out-of-window", action="store_true", help="skip the theta < A^2/2 check")

    c = sub.add_parser("curvature", help="eta / Lambda curvature profiles")
    c.add_argument("--dim", type=int, choices=(2, 4), default=2)
    c.add_argument("--theta", type=_positive_float, default=0.1)
    c.add_argument("--mu", type=_nonneg_float, default=0.0)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lambdas", type=_positive_float, nargs="+", help=f"default {DEFAULT_LAMBDAS}")
    g.add_argument("--A", dest="radii", type=_positive_float, nargs="+")
    c.add_argument("--r-min", type=_nonneg_float, default=0.0)
    c.add_argument("--r-max", type=_nonneg_float, default=5.0)
    c.add_argument("--samples", type=int, default=101)
    output(c)

    b = sub.add_parser("gauss-bonnet", help="total curvature of the 2D sphere")
    b.add_argument("--A", type=_positive_float, default=1.0)
    b.add_argument("--theta", type=_positive_float, default=0.1)
    b.add_argument("--trunc", type=int, default=10 ** 6, help="number of levels N")
    output(b)

    a = sub.add_parser("area", help="area factor gamma_M(lambda)")
    a.add_argument("--M", type=int, nargs="*", default=[1, 2, 4, 6])
    a.add_argument("--lambda", dest="lambdas", type=_positive_float, nargs="+",
                   help="explicit lambda values (default: log grid from 1e-2 to 1e3)")
    a.add_argument("--samples", type=int, default=51, help="size of the default lambda grid")
    a.add_argument("--tol", type=_positive_float, default=1e-13)
    output(a)

    e = sub.add_parser("epsilon", help="h^-2/h0^-2 ratio for several radii")
    e.add_argument("--A", dest="radii", type=_positive_float, nargs="*", default=list(DEFAULT_RADII))
    e.add_argument("--theta", type=_nonneg_float, default=0.1)
    e.add_argument("--mu", type=_nonneg_float, default=0.0)
    e.add_argument("--r-min", type=_nonneg_float, default=0.0)
    e.add_argument("--r-max", type=_nonneg_float, default=5.0)
    e.add_argument("--samples", type=int, default=101)
    output(e)

    v = sub.add_parser("verify", help="run invariant suites")
    v.add_argument("suite", nargs="?", default="all", help="all | " + " | ".join(SUITES))
    return ap


def _emit(table: CurveTable, args):
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args.suite)
        allow = args.allow_out_of_window
        if args.command == "curvature":
            table = cmd_curvature(args.dim, args.theta, args.r_min, args.r_max, args.samples,
                                  args.lambdas, args.radii, args.mu, allow)
            status = EXIT_OK
        elif args.command == "gauss-bonnet":
            table, ok = cmd_gauss_bonnet(args.A, args.theta, args.trunc, allow)
            status = EXIT_OK if ok else EXIT_FAIL
        elif args.command == "area":
            lam = args.lambdas if args.lambdas else np.logspace(-2, 3, args.samples)
            table = cmd_area(args.M, lam, args.tol)
            status = EXIT_OK
        else:
            table = cmd_epsilon(args.radii, args.theta, args.r_min, args.r_max, args.samples, args.mu, allow)
            status = EXIT_OK
    except (UsageError, ParameterWindowError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    _emit(table, args)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
