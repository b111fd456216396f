"""Periodic boundary-layer cell problem and the wall-law constant.

The cell strip ``-h(T) < R < M`` (``T`` periodic) is mapped to
``S = (R + h(T)) / (M + h(T)) in [0, 1]``.  The discrete solution takes the
value ``-h`` on the rough bottom, has zero normal flux on the cap ``R = M``
and is harmonic in between.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _mapped
from .geometry import TWO_PI, RoughnessProfile

logger = logging.getLogger(__name__)

DEFAULT_M_TRUNC = 6.0
DEFAULT_N = 256


@dataclass(frozen=True, eq=False)
class CellSolution:
    profile: RoughnessProfile
    m_trunc: float
    values: np.ndarray  # shape (n_r, n_theta), rows are S-levels

    @property
    def n_r(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_theta) / self.n_theta

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_r)

    @property
    def heights(self) -> np.ndarray:
        return self.profile(self.theta)

    @property
    def R(self) -> np.ndarray:
        """Physical height of every node, shape ``(n_r, n_theta)``."""
        h = self.heights
        return -h[None, :] + self.s[:, None] * (self.m_trunc + h)[None, :]

    def at_height(self, R: float) -> np.ndarray:
        """Values along the line ``R = const`` by cubic interpolation in S."""
        h = self.heights
        S = (R + h) / (self.m_trunc + h)
        if np.any(S < -1e-12) or np.any(S > 1.0 + 1e-12):
            raise ValueError(f"R={R} leaves the cell domain")
        n = self.n_r - 1
        x = np.clip(S, 0.0, 1.0) * n
        # 4-point stencil j0..j0+3 around x
        j0 = np.clip(np.floor(x).astype(int) - 1, 0, n - 3)
        t = x - j0
        cols = np.arange(self.n_theta)
        out = np.zeros(self.n_theta)
        for m in range(4):
            w = np.ones_like(t)
            for q in range(4):
                if q != m:
                    w *= (t - q) / (m - q)
            out += w * self.values[j0 + m, cols]
        return out


@dataclass(frozen=True)
class WallLawConstant:
    mean_trace: float
    b0: float
    lam: float
    rho0: float


@dataclass(frozen=True)
class DecayReport:
    mu: float
    constant: float
    monotone: bool
    heights: np.ndarray
    deviations: np.ndarray


def solve_cell(p: RoughnessProfile, m_trunc: float = DEFAULT_M_TRUNC,
               n_r: int = DEFAULT_N, n_theta: int = DEFAULT_N, *, method: str = "direct",
               tol: float = 1e-12) -> CellSolution:
    """Solve the truncated cell problem on an ``n_r x n_theta`` node grid.

    ``n_theta`` must be even so that ``T = pi`` (the h2 corner) is a node.
    """
    if not (m_trunc > 0.0):
        raise ValueError(f"m_trunc must be positive, got {m_trunc}")
    if n_theta % 2 or n_theta < 8:
        raise ValueError(f"n_theta must be even and >= 8, got {n_theta}")
    if n_r < 4:
        raise ValueError(f"n_r must be >= 4, got {n_r}")
    theta = TWO_PI * np.arange(n_theta) / n_theta
    h = p(theta)
    K = _mapped.assemble("flat", -h, m_trunc + h, n_r)
    fixed = np.zeros((n_r, n_theta), dtype=bool)
    fixed[0] = True
    if not np.any(h):
        u = np.zeros(n_r * n_theta)
    else:
        u = _mapped.solve_system(K, fixed.ravel(), -h, tol=tol, method=method)
    u = u.reshape(n_r, n_theta)
    u.setflags(write=False)
    return CellSolution(p, float(m_trunc), u)


def trace_mean(c: CellSolution) -> float:
    """Normalized torus average of the solution along ``R = 0``."""
    return float(np.mean(c.at_height(0.0)))


def compute_b0(lam: float, rho0: float, mean_trace: float) -> WallLawConstant:
    if not (lam > 0.0) or not (rho0 > 1.0):
        raise ValueError(f"need lam > 0 and rho0 > 1, got {lam}, {rho0}")
    return WallLawConstant(mean_trace, lam * rho0 * mean_trace, lam, rho0)


def fourier_trace(c: CellSolution, R: float) -> np.ndarray:
    """FFT coefficients (numpy ordering, normalized by ``n_theta``) at height ``R``."""
    if not (0.0 <= R <= c.m_trunc - 1.0):
        raise ValueError(f"R must lie in [0, {c.m_trunc - 1}], got {R}")
    return np.fft.fft(c.at_height(R)) / c.n_theta


def mode_slopes(c: CellSolution, ks=(1, 2, 3), r_min: float = 1.0, r_max: float = 4.0,
                n_samples: int = 13) -> dict[int, float]:
    """Least-squares slope of ``ln|coef_k(R)|`` over ``[r_min, r_max]``."""
    heights = np.linspace(r_min, r_max, n_samples)
    coefs = np.array([fourier_trace(c, R) for R in heights])
    out = {}
    for k in ks:
        amp = np.abs(coefs[:, k])
        if np.any(amp == 0.0):
            out[k] = float("nan")
            continue
        out[k] = float(np.polyfit(heights, np.log(amp), 1)[0])
    return out


def decay_check(c: CellSolution, mu: float, n_samples: int = 41) -> DecayReport:
    """Estimate the constant in ``sup_T |u(R,T) - mean| <= C exp(-mu R)``."""
    if not (0.0 < mu < 1.0):
        raise ValueError(f"mu must lie in (0, 1), got {mu}")
    mean = trace_mean(c)
    heights = np.linspace(0.0, c.m_trunc - 1.0, n_samples)
    dev = np.array([np.max(np.abs(c.at_height(R) - mean)) for R in heights])
    const = float(np.max(np.exp(mu * heights) * dev))
    # ignore noise once the deviation is at rounding level
    floor = 1e-12 * max(1.0, float(np.max(np.abs(c.values))))
    d = dev[dev > floor]
    monotone = bool(np.all(np.diff(d) <= 1e-14))
    return DecayReport(mu, const, monotone, heights, dev)


def converged_trace_mean(p: RoughnessProfile, m_trunc: float = DEFAULT_M_TRUNC,
                         n_start: int = DEFAULT_N, n_max: int = 512,
                         rtol: float = 1e-4) -> tuple[float, int]:
    """Refine ``n_r = n_theta`` by doubling until the trace mean settles.

    Returns ``(mean, n)`` for the finest grid used.
    """
    n = n_start
    prev = trace_mean(solve_cell(p, m_trunc, n, n))
    while 2 * n <= n_max:
        n *= 2
        cur = trace_mean(solve_cell(p, m_trunc, n, n))
        logger.info("cell %s n=%d mean=%.8f change=%.2e", p.name, n, cur, cur - prev)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur, n
        prev = cur
    return prev, n


__all__ = [
    "CellSolution", "WallLawConstant", "DecayReport", "solve_cell", "trace_mean",
    "compute_b0", "fourier_trace", "mode_slopes", "decay_check", "converged_trace_mean",
]
