"""Rotationally symmetric Bernoulli solutions on the unit disc.

For the annulus ``1 < r < rho`` with ``u = rhs + offset`` at ``r = 1`` and
``u = offset`` at ``r = rho``, the harmonic radial solution is

    u(r) = rhs * (ln rho - ln r) / ln rho + offset,

and ``|u'(rho)| = lambda`` holds exactly when ``lambda * rho * ln rho = rhs``.
``rhs = 1, offset = 0`` is the unperturbed problem; ``rhs = 1 + eps * B0``,
``offset = -eps * B0`` is the wall-law corrected one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoSolutionError, NonConvergenceError


@dataclass(frozen=True)
class RadialSolution:
    lam: float
    rhs: float
    rho: float
    offset: float = 0.0


def solve_radius(lam: float, rhs: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Unique ``rho > 1`` with ``lam * rho * ln(rho) = rhs``.

    Newton steps safeguarded by the bracket ``[1, exp(rhs/lam) + 1]``;
    a step leaving the bracket is replaced by bisection.
    """
    if not (lam > 0.0):
        raise NoSolutionError(f"lambda must be positive, got {lam}")
    if not (rhs > 0.0):
        raise NoSolutionError(f"no radius > 1 solves lambda rho ln rho = {rhs}")

    def g(x):
        return lam * x * math.log(x) - rhs

    lo, hi = 1.0 + 1e-12, math.exp(min(rhs / lam, 700.0)) + 1.0
    x = min(max(1.0 + rhs / lam, lo), hi)
    for _ in range(max_iter):
        gx = g(x)
        if gx > 0.0:
            hi = x
        else:
            lo = x
        dg = lam * (math.log(x) + 1.0)
        step = gx / dg
        if abs(step) <= tol * max(1.0, x):
            return x - step
        xn = x - step
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return xn
        x = xn
    raise NonConvergenceError(f"radius solve did not converge (lam={lam}, rhs={rhs})")


def radial_solution(lam: float, rhs: float = 1.0, offset: float = 0.0) -> RadialSolution:
    return RadialSolution(lam, rhs, solve_radius(lam, rhs), offset)


def effective_solution(lam: float, b0: float, eps: float) -> RadialSolution:
    """Disc solution of the corrected problem (outer Dirichlet value ``-eps*B0``)."""
    return radial_solution(lam, 1.0 + b0 * eps, -b0 * eps)


def eval_u(sol: RadialSolution, r):
    r_arr = np.asarray(r, dtype=float)
    tol = 1e-12 * sol.rho
    if np.any(r_arr < 1.0 - tol) or np.any(r_arr > sol.rho + tol):
        raise ValueError(f"r must lie in [1, {sol.rho}]")
    lr = math.log(sol.rho)
    out = sol.rhs * (lr - np.log(r_arr)) / lr + sol.offset
    return float(out) if np.ndim(out) == 0 else out


def eval_du(sol: RadialSolution, r):
    """Radial derivative ``u'(r)``."""
    r_arr = np.asarray(r, dtype=float)
    out = -sol.rhs / (r_arr * math.log(sol.rho))
    return float(out) if np.ndim(out) == 0 else out
