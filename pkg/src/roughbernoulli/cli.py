"""Command-line driver: ``roughbern {cell,radial,solve,table,figure,metrics}``.

Every command writes plain CSV files (``#`` header lines carry the full
parameter set) into ``--out``.  A ``--config FILE`` of ``key = value``
lines overrides command-line flags, which override defaults.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import ast
import logging
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, radial
from .bernoulli import (
    BernoulliParams,
    compare_to_effective,
    mesh_for_spacing,
    solve_free_boundary,
)
from .cell import compute_b0, decay_check, mode_slopes, solve_cell, trace_mean
from .elliptic import write_field, write_matrix
from .errors import (
    InvalidEpsilonError,
    InvalidProfileError,
    RoughBernoulliError,
)
from .geometry import (
    TWO_PI,
    AnnulusBounds,
    RoughnessProfile,
    StarCurve,
    metric_d1,
    metric_d2,
    metric_hausdorff,
    read_curve,
)
from .io import fmt, write_csv, write_records

logger = logging.getLogger("roughbernoulli")

DEFAULT_LAMBDA = "2*exp(-1/2)"
DEFAULT_TABLE_DX = "6e-3,3e-3,1.5e-3"

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- numeric expressions such as "8*exp(-1/8)" ---------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"exp": math.exp, "log": math.log, "sqrt": math.sqrt}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_number(text: str) -> float:
    """Float literal or arithmetic expression using exp/log/sqrt, pi, e."""
    try:
        return float(text)
    except ValueError:
        pass

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return _FUNCS[node.func.id](*(ev(a) for a in node.args))
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        raise ValueError(f"unsupported expression: {text!r}")

    try:
        return float(ev(ast.parse(text, mode="eval")))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse number {text!r}: {exc}") from exc


def parse_list(text: str) -> list[float]:
    return [parse_number(t) for t in str(text).split(",") if t.strip()]


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` (or ``key=value``) file; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


_CONFIG_ALIASES = {"lambda": "lam"}
_INT_OPTIONS = {"nr", "ntheta", "max_iter", "cell_n", "jobs"}


def apply_config(args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    for k, v in read_config(args.config).items():
        k = _CONFIG_ALIASES.get(k, k)
        if k in ("command", "func", "config"):
            continue
        if not hasattr(args, k):
            raise UsageError(f"config key {k!r} is not an option of '{args.command}'")
        cur = getattr(args, k)
        if isinstance(cur, bool):
            v = v.lower() in ("1", "true", "yes", "on")
        elif k in _INT_OPTIONS:
            try:
                v = int(v)
            except ValueError:
                raise UsageError(f"config key {k!r} needs an integer, got {v!r}") from None
        setattr(args, k, v)
    return args


# --- shared helpers -----------------------------------------------------

def _profile(args) -> RoughnessProfile:
    try:
        return RoughnessProfile.from_name(args.shape)
    except InvalidProfileError as exc:
        raise UsageError(str(exc)) from exc


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _lam(args) -> float:
    lam = parse_number(str(args.lam))
    if not lam > 0.0:
        raise UsageError(f"--lambda must be positive, got {lam}")
    return lam


def _clean(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def wall_law(profile: RoughnessProfile, lam: float, m_trunc: float, n: int) -> tuple[float, float]:
    """``(mean_trace, B0)`` from a cell solve at ``n x n`` nodes."""
    mean = trace_mean(solve_cell(profile, m_trunc, n, n))
    rho0 = radial.solve_radius(lam, 1.0)
    return mean, compute_b0(lam, rho0, mean).b0


def _params(args, profile, lam, eps, nr=None, ntheta=None, dx=None) -> BernoulliParams:
    if nr is None or ntheta is None:
        dx = parse_number(str(args.dx)) if dx is None else dx
        nr_d, nt_d = mesh_for_spacing(dx, eps, lam, profile)
        nr = nr if nr is not None else nr_d
        ntheta = ntheta if ntheta is not None else nt_d
    return BernoulliParams(lam=lam, profile=profile, eps=eps, nr=int(nr), ntheta=int(ntheta),
                           tau=float(args.tau), tol=parse_number(str(args.tol)),
                           max_iter=int(args.max_iter), smooth=bool(args.smooth))


def _base_meta(args, **extra) -> dict:
    meta = {"roughbern": __version__, "command": args.command}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "command", "verbose"):
            continue
        meta[k] = v
    meta.update(extra)
    return meta


def _curve_csv(path, curve: StarCurve, meta) -> None:
    write_csv(path, ["theta", "rho"], [curve.theta, curve.radii], meta)


# --- commands -------------------------------------------------------------

def cmd_cell(args) -> int:
    profile = _profile(args)
    lam = _lam(args)
    m = parse_number(str(args.mtrunc))
    nr = int(args.nr) if args.nr else 256
    nt = int(args.ntheta) if args.ntheta else 256
    sol = solve_cell(profile, m, nr, nt)
    mean = trace_mean(sol)
    rho0 = radial.solve_radius(lam, 1.0)
    wl = compute_b0(lam, rho0, mean)
    mu = parse_number(str(args.mu))
    rep = decay_check(sol, mu)
    out = _out(args)
    meta = _base_meta(args, n_r=nr, n_theta=nt, m_trunc=m)
    tag = profile.name
    write_csv(out / f"cell_{tag}_trace.csv", ["Theta", "u_at_R0"], [sol.theta, sol.at_height(0.0)], meta)
    write_csv(out / f"cell_{tag}_decay.csv", ["R", "max_deviation", "bound"],
              [rep.heights, rep.deviations, rep.constant * np.exp(-mu * rep.heights)],
              {**meta, "C": fmt(rep.constant), "monotone": rep.monotone})
    rows = [("mean_trace", mean), ("b0", wl.b0), ("lambda", lam), ("rho0", rho0),
            ("decay_mu", mu), ("decay_C", rep.constant), ("decay_monotone", str(rep.monotone))]
    if np.any(profile(sol.theta)):
        for k, slope in mode_slopes(sol, (1, 2, 3)).items():
            rows.append((f"slope_k{k}", slope))
    write_records(out / f"cell_{tag}_summary.csv", ["key", "value"], rows, meta)
    if args.dump_field:
        write_matrix(sol.values, out / f"cell_{tag}_field.txt")
    print(f"mean_trace {_clean(mean, 5)}")
    print(f"B0 {_clean(wl.b0, 5)}")
    return EXIT_OK


def cmd_radial(args) -> int:
    lam = _lam(args)
    rho0 = radial.solve_radius(lam, 1.0)
    print(f"rho0 {rho0:.12g}")
    b0 = parse_number(str(args.b0)) if args.b0 is not None else None
    if b0 is not None:
        eps = parse_number(str(args.eps))
        sol = radial.effective_solution(lam, b0, eps)
        print(f"rho_eps0 {sol.rho:.12g}")
    else:
        sol = radial.radial_solution(lam)
    if args.out:
        r = np.linspace(1.0, sol.rho, 101)
        write_csv(_out(args) / "radial_profile.csv", ["r", "u"], [r, radial.eval_u(sol, r)],
                  _base_meta(args, rho=fmt(sol.rho)))
    return EXIT_OK


def _b0_for(args, profile, lam) -> tuple[float, float]:
    if getattr(args, "b0", None) is not None:
        return float("nan"), parse_number(str(args.b0))
    return wall_law(profile, lam, parse_number(str(args.mtrunc)), int(args.cell_n))


def _solve_one(args, profile, lam, eps, b0, nr=None, ntheta=None, dx=None):
    p = _params(args, profile, lam, eps, nr, ntheta, dx)
    state = solve_free_boundary(p, b0)
    return p, state, compare_to_effective(state, p, b0)


def cmd_solve(args) -> int:
    profile = _profile(args)
    lam = _lam(args)
    eps = parse_number(str(args.eps))
    mean, b0 = _b0_for(args, profile, lam)
    p, state, cmp = _solve_one(args, profile, lam, eps, b0, args.nr, args.ntheta)
    out = _out(args)
    meta = _base_meta(args, nr_used=p.nr, ntheta_used=p.ntheta, b0_used=fmt(b0),
                      mean_trace=fmt(mean), smoothing=state.metadata["smoothing"],
                      preconditioner=state.metadata["preconditioner"])
    _curve_csv(out / "boundary.csv", state.outer, meta)
    _curve_csv(out / "inner.csv", state.inner, meta)
    write_csv(out / "residual_history.csv", ["iteration", "residual"],
              [np.arange(len(state.history)), state.history], meta)
    write_records(out / "comparison.csv", ["key", "value"],
                  [(k, v) for k, v in vars(cmp).items()], meta)
    if args.dump_field:
        write_field(state.field, out / "field.txt")
    print(f"iterations {state.iteration} residual {state.residual:.3e}")
    print(f"dh {cmp.dh:.6e} dh/eps^2 {cmp.dh_over_eps2:.6f} dh0/eps {cmp.dh0_over_eps:.6f}")
    return EXIT_OK


def _table_cell(job):
    args, profile, lam, eps, b0, dx = job
    try:
        p, state, cmp = _solve_one(args, profile, lam, eps, b0, dx=dx)
        return (p.nr, p.ntheta, cmp.dh_over_eps2, cmp.dh0_over_eps, state.iteration)
    except RoughBernoulliError as exc:
        logger.error("table cell eps=%s dx=%s failed: %s", eps, dx, exc)
        return None


def cmd_table(args) -> int:
    profile = _profile(args)
    lam = _lam(args)
    eps_list = parse_list(args.eps)
    dx_list = parse_list(args.dx)
    if not eps_list or not dx_list:
        raise UsageError("need at least one --eps and one --dx value")
    for e in eps_list:
        mesh_for_spacing(dx_list[0], e, lam, profile)  # validates eps early
    mean, b0 = _b0_for(args, profile, lam)
    jobs = [(args, profile, lam, e, b0, dx) for dx in dx_list for e in eps_list]
    if int(args.jobs) > 1:
        with ProcessPoolExecutor(int(args.jobs)) as ex:
            results = list(ex.map(_table_cell, jobs))
    else:
        results = [_table_cell(j) for j in jobs]

    names = ["dx"] + [f"dh_over_eps2[eps={e:g}]" for e in eps_list] \
        + [f"dh0_over_eps[eps={e:g}]" for e in eps_list]
    rows, mesh_meta, failed = [], {}, False
    for a, dx in enumerate(dx_list):
        chunk = results[a * len(eps_list):(a + 1) * len(eps_list)]
        row = [dx] + ["FAILED" if r is None else r[2] for r in chunk] \
            + ["FAILED" if r is None else r[3] for r in chunk]
        failed |= any(r is None for r in chunk)
        rows.append(row)
        for e, r in zip(eps_list, chunk):
            if r is not None:
                mesh_meta[f"mesh[dx={dx:g},eps={e:g}]"] = f"nr={r[0]} ntheta={r[1]} iterations={r[4]}"
    meta = _base_meta(args, b0_used=fmt(b0), mean_trace=fmt(mean),
                      mesh_mapping="ntheta = (1/eps) * round(2 pi eps / dx); nr = ceil(width / dx) + 1",
                      **mesh_meta)
    out = _out(args)
    write_records(out / f"table_{profile.name}.csv", names, rows, meta)
    for row in rows:
        print(",".join(v if isinstance(v, str) else f"{v:.4f}" for v in row))
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_figure(args) -> int:
    profile = _profile(args)
    lam = _lam(args)
    eps = parse_number(str(args.eps))
    mean, b0 = _b0_for(args, profile, lam)
    p, state, cmp = _solve_one(args, profile, lam, eps, b0, args.nr, args.ntheta)
    inner, outer = state.inner, state.outer
    # zoom: two roughness periods centred on theta = 0
    half = 2.0 * np.pi * eps
    t = outer.theta
    sel = (t <= half) | (t >= TWO_PI - half)
    pts = np.vstack([inner.xy()[sel], outer.xy()[sel]])
    pad = 0.1 * np.ptp(pts, axis=0).max()
    lo, hi = pts.min(axis=0) - pad, pts.max(axis=0) + pad
    amp = float(np.ptp(outer.radii))
    meta = _base_meta(args, nr_used=p.nr, ntheta_used=p.ntheta, b0_used=fmt(b0),
                      zoom_window=f"{fmt(lo[0])} {fmt(hi[0])} {fmt(lo[1])} {fmt(hi[1])}",
                      outer_oscillation=fmt(amp))
    out = _out(args)
    for name, c in (("inner", inner), ("outer", outer)):
        xy = c.xy()
        xy = np.vstack([xy, xy[:1]])
        write_csv(out / f"figure_{name}.csv", ["x", "y"], [xy[:, 0], xy[:, 1]], meta)
    print(f"outer_oscillation {amp:.6e}")
    print(f"zoom_window {lo[0]:.6f} {hi[0]:.6f} {lo[1]:.6f} {hi[1]:.6f}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    a, b = read_curve(args.curve_a), read_curve(args.curve_b)
    d1, d2, dh = metric_d1(a, b), metric_d2(a, b), metric_hausdorff(a, b)
    bounds = AnnulusBounds(parse_number(str(args.delta)), parse_number(str(args.mbound)))
    print(f"d1 {d1:.12g}")
    print(f"d2 {d2:.12g}")
    print(f"dh {dh:.12g}")
    for k, v in bounds.slack(d1, d2, dh).items():
        print(f"slack_{k} {v:.12g}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------

def _add_common(sp, *, shape=True, solve=False):
    if shape:
        sp.add_argument("--shape", default="h1", help="h1, h2, zero or file:PATH")
    sp.add_argument("--lambda", dest="lam", default=DEFAULT_LAMBDA,
                    help="Bernoulli constant (number or expression, default 2*exp(-1/2))")
    sp.add_argument("--out", default="out", help="output directory")
    sp.add_argument("--config", help="key=value file overriding flags")
    if solve:
        sp.add_argument("--mtrunc", default="6", help="cell truncation height")
        sp.add_argument("--cell-n", dest="cell_n", type=int, default=256,
                        help="cell grid size used to compute B0")
        sp.add_argument("--b0", default=None, help="use this B0 instead of solving the cell problem")
        sp.add_argument("--dx", default="3e-3", help="target mesh spacing when --nr/--ntheta are absent")
        sp.add_argument("--nr", type=int, default=None)
        sp.add_argument("--ntheta", type=int, default=None)
        sp.add_argument("--tau", type=float, default=1.0)
        sp.add_argument("--tol", default="1e-8")
        sp.add_argument("--max-iter", dest="max_iter", type=int, default=100)
        sp.add_argument("--smooth", action="store_true", help="3-point filter on the gradient trace")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roughbern", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("cell", help="truncated cell problem, trace mean and B0")
    _add_common(sp)
    sp.add_argument("--mtrunc", default="6")
    sp.add_argument("--nr", type=int, default=None)
    sp.add_argument("--ntheta", type=int, default=None)
    sp.add_argument("--mu", default="0.9", help="decay exponent for the decay report")
    sp.add_argument("--dump-field", dest="dump_field", action="store_true")
    sp.set_defaults(func=cmd_cell)

    sp = sub.add_parser("radial", help="closed-form disc radii")
    _add_common(sp, shape=False)
    sp.add_argument("--eps", default="0.1")
    sp.add_argument("--b0", default=None)
    sp.set_defaults(func=cmd_radial, out=None)

    sp = sub.add_parser("solve", help="one rough free-boundary solve")
    _add_common(sp, solve=True)
    sp.add_argument("--eps", default="0.1")
    sp.add_argument("--dump-field", dest="dump_field", action="store_true")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("table", help="D_H/eps^2 table over eps and mesh spacing")
    _add_common(sp, solve=True)
    sp.add_argument("--eps", default="0.1,0.05,0.025", help="comma-separated list")
    sp.set_defaults(func=cmd_table, dx=DEFAULT_TABLE_DX, tol="1e-6")
    sp.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    sp = sub.add_parser("figure", help="inner and outer boundary polylines")
    _add_common(sp, solve=True)
    sp.add_argument("--eps", default="0.1")
    sp.set_defaults(func=cmd_figure, dx="6e-3")

    sp = sub.add_parser("metrics", help="d1, d2 and Hausdorff distance of two curve files")
    sp.add_argument("curve_a")
    sp.add_argument("curve_b")
    sp.add_argument("--delta", default="0.5")
    sp.add_argument("--mbound", default="4")
    sp.add_argument("--config")
    sp.set_defaults(func=cmd_metrics)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        apply_config(args)
        return args.func(args)
    except (UsageError, InvalidProfileError, InvalidEpsilonError) as exc:
        print(f"roughbern {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RoughBernoulliError, ValueError, ArithmeticError) as exc:
        print(f"roughbern {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
