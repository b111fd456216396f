"""Laplace solver on the annulus between two star curves.

The region ``f_in(theta) < r < f_out(theta)`` is mapped to the rectangle
``(s, theta) in [0, 1] x T`` by ``r = (1 - s) f_in + s f_out``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _mapped
from .errors import MeshError
from .geometry import StarCurve


@dataclass(frozen=True, eq=False)
class AnnularMesh:
    inner: StarCurve
    outer: StarCurve
    nr: int
    ntheta: int

    @property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nr)

    @property
    def theta(self) -> np.ndarray:
        return self.inner.theta

    @property
    def ds(self) -> float:
        return 1.0 / (self.nr - 1)

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.ntheta

    @property
    def gap(self) -> np.ndarray:
        return self.outer.radii - self.inner.radii

    @property
    def radii(self) -> np.ndarray:
        """Node radii, shape ``(nr, ntheta)``."""
        return self.inner.radii[None, :] + self.s[:, None] * self.gap[None, :]

    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        r = self.radii
        return r * np.cos(self.theta), r * np.sin(self.theta)


@dataclass(frozen=True, eq=False)
class GridField:
    mesh: AnnularMesh
    values: np.ndarray


def build_mesh(inner: StarCurve, outer: StarCurve, nr: int, ntheta: int) -> AnnularMesh:
    if nr < 3 or ntheta < 8:
        raise MeshError(f"need nr >= 3 and ntheta >= 8, got {nr}, {ntheta}")
    if inner.n != ntheta or outer.n != ntheta:
        raise MeshError(f"curves have {inner.n}/{outer.n} samples, mesh expects ntheta={ntheta}")
    gap = outer.radii - inner.radii
    if np.any(gap <= 0.0):
        i = int(np.argmin(gap))
        raise MeshError(f"outer curve does not enclose inner curve (theta index {i}, gap {gap[i]:.3e})")
    return AnnularMesh(inner, outer, int(nr), int(ntheta))


def _boundary_values(g, n: int, name: str) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim == 0:
        g = np.full(n, float(g))
    if g.shape != (n,):
        raise MeshError(f"{name} has shape {g.shape}, expected ({n},)")
    return g


def solve_dirichlet(mesh: AnnularMesh, g_inner, g_outer, *, tol: float = 1e-10,
                    method: str = "auto") -> GridField:
    """Harmonic function on the annulus with the given boundary traces.

    ``g_inner`` / ``g_outer`` are scalars or per-angle arrays.  Raises
    :class:`~roughbernoulli.errors.SolverError` if the linear solve fails.
    """
    nt = mesh.ntheta
    gi = _boundary_values(g_inner, nt, "g_inner")
    go = _boundary_values(g_outer, nt, "g_outer")
    K = _mapped.assemble("polar", mesh.inner.radii, mesh.gap, mesh.nr)
    fixed = np.zeros((mesh.nr, nt), dtype=bool)
    fixed[0] = fixed[-1] = True
    u = _mapped.solve_system(K, fixed.ravel(), np.concatenate([gi, go]), tol=tol, method=method)
    u = u.reshape(mesh.nr, nt)
    u.setflags(write=False)
    return GridField(mesh, u)


def boundary_gradient(field: GridField, side: str = "outer") -> np.ndarray:
    """``|grad u|`` at the nodes of the inner or outer boundary.

    One-sided second-order differences across the boundary, central
    differences along it, recombined through the Jacobian of the map.
    """
    m = field.mesh
    u = field.values
    if side == "outer":
        us = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * m.ds)
        ub, s = u[-1], 1.0
    elif side == "inner":
        us = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * m.ds)
        ub, s = u[0], 0.0
    else:
        raise ValueError(f"side must be 'inner' or 'outer', got {side!r}")
    dt = m.dtheta
    ut = (np.roll(ub, -1) - np.roll(ub, 1)) / (2.0 * dt)
    a = m.inner.radii
    L = m.gap
    da = (np.roll(a, -1) - np.roll(a, 1)) / (2.0 * dt)
    dL = (np.roll(L, -1) - np.roll(L, 1)) / (2.0 * dt)
    r = a + s * L
    c = -(da + s * dL) / L
    return np.hypot(us / L, (ut + c * us) / r)


def write_field(field: GridField, path) -> None:
    """Text dump: header line ``nr ntheta`` then row-major values."""
    write_matrix(field.values, path)


def write_matrix(u: np.ndarray, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{u.shape[0]} {u.shape[1]}\n")
        np.savetxt(fh, u, fmt="%.12g")


def read_field_values(path) -> np.ndarray:
    with open(path) as fh:
        nr, nt = (int(x) for x in fh.readline().split())
        vals = np.loadtxt(fh, ndmin=2)
    if vals.shape != (nr, nt):
        raise ValueError(f"{path}: header says {nr}x{nt}, found {vals.shape}")
    return vals
