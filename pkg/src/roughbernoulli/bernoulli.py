"""Exterior Bernoulli free-boundary problem around a rough disc.

The outer boundary ``r = rho(theta)`` is found by a damped fixed point on
the gradient mismatch: solve the Dirichlet problem (``u = 1`` inside,
``u = 0`` outside) on the current annulus, then rescale

    rho <- rho * (1 + tau * P[|grad u| / lam - 1])

where ``P`` is either the identity (``preconditioner="none"``) or the
inverse of the linearized response of the relative gradient to a relative
boundary displacement around a circular annulus
(``preconditioner="dtn"``): mode ``k`` is divided by
``1 + k coth(k ln(rho/r_in))`` (``1 + 1/ln(rho/r_in)`` for ``k = 0``).
Without it, angular mode ``k`` is amplified by ``|1 - tau (1 + k)|`` per
step, so fine angular grids force ``tau < 2 / ntheta``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import radial
from .elliptic import GridField, boundary_gradient, build_mesh, solve_dirichlet
from .errors import GeometryError, MeshError, NonConvergenceError
from .geometry import (
    RoughnessProfile,
    StarCurve,
    check_epsilon,
    inner_boundary,
    metric_d1,
    metric_d2,
    metric_hausdorff,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BernoulliParams:
    lam: float
    profile: RoughnessProfile
    eps: float
    nr: int
    ntheta: int
    tau: float = 1.0
    tol: float = 1e-8
    max_iter: int = 100
    preconditioner: str = "dtn"
    smooth: bool = False
    linear_solver: str = "auto"
    m_bound: float = 10.0

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValueError(f"lambda must be positive, got {self.lam}")
        k = check_epsilon(self.eps)
        if self.ntheta % k:
            raise GeometryError(f"ntheta={self.ntheta} must be a multiple of 1/eps={k}")
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau}")
        if self.preconditioner not in ("dtn", "none"):
            raise ValueError(f"unknown preconditioner {self.preconditioner!r}")

    def inner(self) -> StarCurve:
        return inner_boundary(self.profile, self.eps, self.ntheta)


@dataclass
class FreeBoundaryState:
    outer: StarCurve
    field: GridField
    gradient: np.ndarray
    residual: float
    iteration: int
    history: list[float] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def inner(self) -> StarCurve:
        return self.field.mesh.inner


def mesh_for_spacing(dx: float, eps: float, lam: float, profile: RoughnessProfile,
                     min_per_period: int = 8) -> tuple[int, int]:
    """``(nr, ntheta)`` whose boundary arc spacing and radial spacing are about ``dx``.

    ``ntheta`` is rounded to a multiple of ``1/eps`` so every roughness
    period holds the same number of nodes.
    """
    k = check_epsilon(eps)
    per = max(min_per_period, int(round(2.0 * math.pi / (dx * k))))
    ntheta = per * k
    rho0 = radial.solve_radius(lam, 1.0)
    width = rho0 - 1.0 + eps * profile.max_value
    nr = max(8, int(math.ceil(width / dx)) + 1)
    return nr, ntheta


def _precondition(r: np.ndarray, outer: StarCurve, inner: StarCurve) -> np.ndarray:
    n = r.size
    k = np.abs(np.fft.fftfreq(n, 1.0 / n))
    aspect = math.log(float(np.mean(outer.radii)) / float(np.mean(inner.radii)))
    kk = np.maximum(k, 1.0)
    sigma = np.where(k == 0, 1.0 + 1.0 / aspect, 1.0 + k / np.tanh(kk * aspect))
    return np.real(np.fft.ifft(np.fft.fft(r) / sigma))


def _smooth3(g: np.ndarray) -> np.ndarray:
    return 0.25 * np.roll(g, 1) + 0.5 * g + 0.25 * np.roll(g, -1)


def trial_solve(inner: StarCurve, outer: StarCurve, nr: int, *, smooth: bool = False,
                linear_solver: str = "auto") -> tuple[GridField, np.ndarray]:
    """Dirichlet solve on the current annulus and the outer ``|grad u|``."""
    mesh = build_mesh(inner, outer, nr, inner.n)
    fld = solve_dirichlet(mesh, 1.0, 0.0, method=linear_solver)
    g = boundary_gradient(fld, "outer")
    if smooth:
        g = _smooth3(g)
    return fld, g


def update_outer(outer: StarCurve, inner: StarCurve, gradient: np.ndarray, lam: float,
                 tau: float, preconditioner: str = "dtn") -> StarCurve:
    """One damped fixed-point step on the outer boundary."""
    r = gradient / lam - 1.0
    if preconditioner == "dtn":
        r = _precondition(r, outer, inner)
    factor = 1.0 + tau * r
    if np.any(factor <= 0.0):
        raise GeometryError("update would make outer radii nonpositive")
    return StarCurve(outer.radii * factor)


def residual(state: FreeBoundaryState, lam: float) -> float:
    """``sup |(|grad u| - lam)| / lam`` on the outer boundary."""
    return float(np.max(np.abs(state.gradient - lam)) / lam)


def initial_radius(lam: float, eps: float, b0: float | None) -> float:
    if b0 is None:
        return radial.solve_radius(lam, 1.0)
    return radial.solve_radius(lam, 1.0 + b0 * eps)


def solve_free_boundary(p: BernoulliParams, b0: float | None = None,
                        initial: StarCurve | None = None) -> FreeBoundaryState:
    """Iterate the trial-boundary update until the gradient residual is below ``p.tol``.

    Starts from the corrected disc radius when ``b0`` is given, else from the
    unperturbed radius.  ``tau`` is halved whenever the residual grows.
    """
    inner = p.inner()
    if initial is None:
        outer = StarCurve.circle(initial_radius(p.lam, p.eps, b0), p.ntheta)
    else:
        outer = initial.resample(p.ntheta)
    tau = p.tau
    history: list[float] = []
    taus: list[float] = []
    for it in range(p.max_iter + 1):
        if np.any(outer.radii <= inner.radii) or np.any(outer.radii >= p.m_bound):
            raise GeometryError(f"iterate {it} left the admissible annulus (1, {p.m_bound})")
        try:
            fld, g = trial_solve(inner, outer, p.nr, smooth=p.smooth, linear_solver=p.linear_solver)
        except MeshError as exc:
            raise GeometryError(f"iterate {it}: {exc}") from exc
        res = float(np.max(np.abs(g - p.lam)) / p.lam)
        history.append(res)
        logger.info("free boundary it=%d residual=%.3e tau=%.3g", it, res, tau)
        state = FreeBoundaryState(outer, fld, g, res, it, history,
                                  {"smoothing": "3-point" if p.smooth else "none",
                                   "preconditioner": p.preconditioner, "tau": taus})
        if res <= p.tol:
            return state
        if it == p.max_iter:
            break
        if len(history) > 1 and res > history[-2]:
            tau *= 0.5
        taus.append(tau)
        outer = update_outer(outer, inner, g, p.lam, tau, p.preconditioner)
    raise NonConvergenceError(
        f"free boundary not converged after {p.max_iter} iterations (residual {history[-1]:.3e})",
        history,
    )


@dataclass(frozen=True)
class EffectiveComparison:
    eps: float
    rho_eff: float
    rho0: float
    dh: float
    d1: float
    d2: float
    dh_over_eps: float
    dh_over_eps2: float
    dh0: float
    dh0_over_eps: float


def compare_to_effective(state: FreeBoundaryState, p: BernoulliParams, b0: float) -> EffectiveComparison:
    """Distances from the computed boundary to the corrected and uncorrected discs."""
    rho_eff = radial.solve_radius(p.lam, 1.0 + b0 * p.eps)
    rho0 = radial.solve_radius(p.lam, 1.0)
    n = state.outer.n
    eff = StarCurve.circle(rho_eff, n)
    base = StarCurve.circle(rho0, n)
    dh = metric_hausdorff(state.outer, eff)
    dh0 = metric_hausdorff(state.outer, base)
    e = p.eps
    return EffectiveComparison(
        eps=e, rho_eff=rho_eff, rho0=rho0, dh=dh,
        d1=metric_d1(state.outer, eff), d2=metric_d2(state.outer, eff),
        dh_over_eps=dh / e, dh_over_eps2=dh / e**2, dh0=dh0, dh0_over_eps=dh0 / e,
    )
