"""Command-line front end.

Every command writes one CSV file plus ``<out>.manifest.json``. Exit codes:
0 success, 1 usage error, 2 numeric error, 3 empty result.

Examples::

    complex-quartic scan-theta --k 1 --br 2 --energy 1 --mn-max 3 --out theta_k1.csv
    complex-quartic discretize-energy --k 1 --b-re 1 --b-im 1 --m 1 --n 2 \\
        --e-min -1 --e-max 1 --out e_12.csv
    complex-quartic trace --k 1 --b-re 1 --b-im 1 --energy 0.71624 --out orbit.csv
    complex-quartic pure-quartic --mn-max 2 --mu-r 1 --energy 1 --verify --out pq.csv
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
import time
from importlib import metadata
from typing import Optional, Sequence

import numpy as np
import scipy

from .exceptions import QuarticError
from .periodicity import build_context, period, pure_quartic_angle, pure_quartic_period
from .quartic import LABELINGS, QuarticSystem
from .scan import (
    ScanConfig,
    coprime_pairs,
    discretize_energy,
    pure_quartic_rows,
    scan_theta,
)
from .trajectory import analytic_trajectory, closure_residual, ode_trajectory, pure_quartic_closure

log = logging.getLogger("complex_quartic")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_EMPTY = 0, 1, 2, 3

# a requested energy is only snapped onto a nearby periodic one when it is
# already this close to periodic (relative imaginary part of the period)
_NEAR_PERIODIC = 1e-3
_CLOSURE_SPAN = 1.15


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- output helpers ----------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\r\n".join(lines) + "\r\n")


def _versions() -> str:
    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return f"artifact {own}; numpy {np.__version__}; scipy {scipy.__version__}; python {sys.version.split()[0]}"


def write_manifest(out: str, command: str, args, outputs, t0: float, extra=None) -> str:
    params = {k: str(v) for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    manifest = {
        "command": command,
        "parameters": params,
        "outputs": list(outputs),
        "versions": _versions(),
        "wall_time": time.perf_counter() - t0,
    }
    if extra:
        manifest.update(extra)
    path = out + ".manifest.json"
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# -- commands ----------------------------------------------------------------


def cmd_scan_theta(args) -> int:
    t0 = time.perf_counter()
    cfg = ScanConfig(a=args.a, b_r=args.br, k=args.k, E=args.energy, mn_max=args.mn_max,
                     grid_points=args.grid)
    sols = sorted(scan_theta(cfg), key=lambda s: (s.located_parameter, s.m, s.n))
    rows = [(s.located_parameter, s.r, s.m, s.n, s.T_p, s.residual) for s in sols]
    write_csv(args.out, ("theta", "r", "m", "n", "period", "residual"), rows)
    write_manifest(args.out, "scan-theta", args, [args.out], t0, {"n_points": len(rows)})
    return EXIT_OK if rows else EXIT_EMPTY


def cmd_discretize_energy(args) -> int:
    t0 = time.perf_counter()
    if (args.m, args.n) == (0, 0):
        raise UsageError("(m, n) = (0, 0) is not a valid pair")
    if not args.e_min < args.e_max:
        raise UsageError("--e-min must be below --e-max")
    cfg = ScanConfig(a=args.a, k=args.k, b=complex(args.b_re, args.b_im), grid_points=args.grid)
    sols = discretize_energy(cfg, args.m, args.n, (args.e_min, args.e_max))
    rows = [(s.m, s.n, s.located_parameter, s.T_p, s.labeling, s.residual) for s in sols]
    write_csv(args.out, ("m", "n", "E", "period", "relabeling", "residual"), rows)
    write_manifest(args.out, "discretize-energy", args, [args.out], t0, {"n_roots": len(rows)})
    return EXIT_OK if rows else EXIT_EMPTY


def _best_candidate(sys_: QuarticSystem, mn_max: int, pair=None):
    """(relative Im T, |T|, labeling, m, n) with the most nearly real period."""
    pairs = [pair] if pair is not None else coprime_pairs(mn_max)
    cands = []
    for li, perm in enumerate(LABELINGS):
        ctx = build_context(sys_, perm)
        for m, n in pairs:
            T = period(ctx, m, n)
            cands.append((abs(T.imag) / abs(T), abs(T), li, m, n))
    # multiples of the primitive real period share the relative residual;
    # prefer the shortest among the nearly equal ones
    floor = min(c[0] for c in cands)
    near = [c for c in cands if c[0] <= 1.5 * floor + 1e-13]
    return min(near, key=lambda c: (c[1], c[2]))


def _refine_energy(args, li, m, n) -> Optional[float]:
    window = args.refine_window * max(1.0, abs(args.energy))
    cfg = ScanConfig(a=args.a, k=args.k, b=complex(args.b_re, args.b_im), grid_points=100)
    sols = discretize_energy(cfg, m, n, (args.energy - window, args.energy + window), labelings=[li],
                             include_escaping=True)
    if not sols:
        return None
    return min(sols, key=lambda s: abs(s.located_parameter - args.energy)).located_parameter


def cmd_trace(args) -> int:
    t0 = time.perf_counter()
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    if args.periods <= 0:
        raise UsageError("--periods must be positive")
    if (args.m is None) != (args.n is None):
        raise UsageError("--m and --n must be given together")
    if (args.m, args.n) == (0, 0):
        raise UsageError("(m, n) = (0, 0) is not a valid pair")
    b = complex(args.b_re, args.b_im)
    pair = None if args.m is None else (args.m, args.n)
    energy = args.energy
    sys_ = QuarticSystem(args.a, b, args.k, energy)
    rel, _, li, m, n = _best_candidate(sys_, args.mn_max, pair)
    periodic = rel <= _NEAR_PERIODIC
    if periodic and not args.no_refine and rel > 1e-12:
        refined = _refine_energy(args, li, m, n)
        if refined is not None:
            energy = refined
            sys_ = sys_.with_energy(energy)
    ctx = build_context(sys_, LABELINGS[li])
    T = period(ctx, m, n)
    if periodic:
        T_p = abs(T.real)
        t_end = args.periods * T_p
    else:
        T_p = None
        t_end = args.t_end
        log.warning("no nearly real period for |m|, |n| <= %d; tracing to t = %g", args.mn_max, t_end)

    t = np.linspace(0.0, t_end, args.samples)
    x1 = ctx.tp[1]
    header = ["t", "re_x", "im_x", "re_p", "im_p"]
    cols = [t]
    extra = {
        "energy_used": energy,
        "m": m,
        "n": n,
        "relabeling": li,
        "period": _json_safe(T_p) if T_p is not None else None,
        "period_relative_imag": abs(T.imag) / abs(T),
    }
    ode = None
    if args.method in ("analytic", "both"):
        ana = analytic_trajectory(ctx, sys_, t)
        cols += [ana.x.real, ana.x.imag, ana.p.real, ana.p.imag]
    if args.method in ("ode", "both"):
        ode = ode_trajectory(sys_, x1, 0.0, t_end, t_eval=t, rtol=1e-12, atol=1e-12)
        if args.method == "ode":
            cols += [ode.x.real, ode.x.imag, ode.p.real, ode.p.imag]
        else:
            header += ["re_x_ode", "im_x_ode", "re_p_ode", "im_p_ode"]
            cols += [ode.x.real, ode.x.imag, ode.p.real, ode.p.imag]
            dev = np.max(np.abs(ana.x - ode.x) + np.abs(ana.p - ode.p)) / ana.scale
            extra["max_deviation"] = float(dev)
        extra["max_energy_drift"] = ode.max_energy_drift
    if T_p is not None:
        check = ode_trajectory(sys_, x1, 0.0, _CLOSURE_SPAN * T_p, rtol=1e-12, atol=1e-12)
        extra["closure_residual"] = closure_residual(check, T_p)

    write_csv(args.out, header, zip(*cols))
    tp_path = args.out + ".turning_points.json"
    tp_doc = {
        "labeling": list(LABELINGS[li]),
        "start": "x1",
        "turning_points": [[r.real, r.imag] for r in ctx.tp.roots],
    }
    _atomic_write(tp_path, json.dumps(tp_doc, indent=2) + "\n")
    write_manifest(args.out, "trace", args, [args.out, tp_path], t0, extra)
    return EXIT_OK


def cmd_pure_quartic(args) -> int:
    t0 = time.perf_counter()
    if args.mu_r <= 0 or args.energy <= 0:
        raise UsageError("--mu-r and --energy must be positive")
    rows = []
    header = ["m", "n", "theta", "period"]
    if args.verify:
        header.append("closure_residual")
    for m, n, theta, _flag, T in pure_quartic_rows(args.mn_max, args.mu_r, args.energy):
        row = [m, n, theta, T]
        if args.verify:
            res, _ = pure_quartic_closure(args.mu_r * np.exp(1j * theta), args.energy, T)
            row.append(res)
        rows.append(row)
    write_csv(args.out, header, rows)
    plus = pure_quartic_period(4 * args.mu_r, args.energy, 1, 0)
    minus = pure_quartic_period(args.mu_r, args.energy, 0, 1)
    extra = {
        "isospectral_check": {
            "T_plus_4mu": plus,
            "T_minus_mu": minus,
            "abs_difference": abs(plus - minus),
        },
        "wrong_sign_angle": pure_quartic_angle(0, 1),
    }
    write_manifest(args.out, "pure-quartic", args, [args.out], t0, extra)
    return EXIT_OK if rows else EXIT_EMPTY


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="complex-quartic", description="Periodic complex classical orbits of quartic Hamiltonians.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scan-theta", help="phases of b giving real periods at fixed E")
    s.add_argument("--k", type=int, choices=(1, 2), default=1)
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--br", type=float, default=1.0, help="modulus of b")
    s.add_argument("--energy", type=float, default=1.0)
    s.add_argument("--mn-max", type=int, default=3)
    s.add_argument("--grid", type=int, default=2000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scan_theta)

    d = sub.add_parser("discretize-energy", help="real energies with a real (m, n) period")
    d.add_argument("--k", type=int, choices=(1, 2), default=1)
    d.add_argument("--a", type=float, default=1.0)
    d.add_argument("--b-re", type=float, default=1.0)
    d.add_argument("--b-im", type=float, default=1.0)
    d.add_argument("--m", type=int, required=True)
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--e-min", type=float, default=-5.0)
    d.add_argument("--e-max", type=float, default=5.0)
    d.add_argument("--grid", type=int, default=2000)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_discretize_energy)

    t = sub.add_parser("trace", help="trajectory samples from the closed form and/or the ODE")
    t.add_argument("--k", type=int, choices=(1, 2), default=1)
    t.add_argument("--a", type=float, default=1.0)
    t.add_argument("--b-re", type=float, default=1.0)
    t.add_argument("--b-im", type=float, default=1.0)
    t.add_argument("--energy", type=float, required=True)
    t.add_argument("--periods", type=float, default=1.0)
    t.add_argument("--samples", type=int, default=1001)
    t.add_argument("--method", choices=("analytic", "ode", "both"), default="both")
    t.add_argument("--m", type=int, default=None, help="force this (m, n) instead of detecting it")
    t.add_argument("--n", type=int, default=None)
    t.add_argument("--mn-max", type=int, default=6, help="search bound when detecting (m, n)")
    t.add_argument("--no-refine", action="store_true", help="use --energy exactly as given")
    t.add_argument("--refine-window", type=float, default=1e-3)
    t.add_argument("--t-end", type=float, default=10.0, help="time span when no real period is found")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_trace)

    q = sub.add_parser("pure-quartic", help="quantized angles and periods of p^2 + mu x^4")
    q.add_argument("--mn-max", type=int, default=4)
    q.add_argument("--mu-r", type=float, default=1.0)
    q.add_argument("--energy", type=float, default=1.0)
    q.add_argument("--verify", action="store_true", help="integrate each row and add its closure residual")
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_pure_quartic)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"complex-quartic: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuarticError as exc:
        print(f"complex-quartic: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
