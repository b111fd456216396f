"""Star-shaped curves, rough disc boundaries and curve metrics.

A star-shaped curve is stored by its polar radius on a uniform angular grid
``theta_i = 2 pi i / N``.  Between samples the curve is the straight
polyline through the sample points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDomainError,
    GeometryError,
    InvalidEpsilonError,
    InvalidProfileError,
)

TWO_PI = 2.0 * np.pi

PROFILE_KINDS = ("h1", "h2", "zero", "tabulated")


@dataclass(frozen=True)
class RoughnessProfile:
    """Nonnegative 2*pi-periodic roughness shape ``h``.

    Built-ins: ``h1(a) = 1 - cos a``, ``h2(a) = pi - |a - pi|`` and the
    flat profile ``zero``.  Tabulated profiles are piecewise-linear through
    ``(angles, values)`` on one period and wrap periodically.
    """

    kind: str
    angles: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None
    lipschitz_bound: float = field(default=0.0)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise InvalidProfileError(f"unknown profile kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.angles is None or self.values is None:
                raise InvalidProfileError("tabulated profile needs angles and values")
            t = np.asarray(self.angles, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 1:
                raise InvalidProfileError("angles and values must be 1-D of equal length")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
                raise InvalidProfileError("non-finite sample in tabulated profile")
            if t[0] < 0.0 or t[-1] >= TWO_PI or np.any(np.diff(t) <= 0.0):
                raise InvalidProfileError("sample angles must be strictly increasing in [0, 2pi)")
            if np.any(v < 0.0):
                raise InvalidProfileError("roughness samples must be nonnegative")
            tt = np.append(t, t[0] + TWO_PI)
            vv = np.append(v, v[0])
            lip = float(np.max(np.abs(np.diff(vv) / np.diff(tt)))) if t.size > 1 else 0.0
            object.__setattr__(self, "lipschitz_bound", lip)
        else:
            lip = {"h1": 1.0, "h2": 1.0, "zero": 0.0}[self.kind]
            object.__setattr__(self, "lipschitz_bound", lip)

    @classmethod
    def h1(cls) -> "RoughnessProfile":
        return cls("h1")

    @classmethod
    def h2(cls) -> "RoughnessProfile":
        return cls("h2")

    @classmethod
    def zero(cls) -> "RoughnessProfile":
        return cls("zero")

    @classmethod
    def tabulated(cls, angles, values) -> "RoughnessProfile":
        return cls("tabulated", tuple(map(float, angles)), tuple(map(float, values)))

    @classmethod
    def constant(cls, c: float) -> "RoughnessProfile":
        return cls.tabulated([0.0], [c])

    @classmethod
    def from_name(cls, name: str) -> "RoughnessProfile":
        """Parse ``h1``, ``h2``, ``zero`` or ``file:PATH``."""
        if name in ("h1", "h2", "zero"):
            return cls(name)
        if name.startswith("file:"):
            return read_profile(name[5:])
        raise InvalidProfileError(f"unknown shape {name!r}; use h1, h2, zero or file:PATH")

    def __call__(self, theta):
        t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        if self.kind == "h1":
            return 1.0 - np.cos(t)
        if self.kind == "h2":
            return np.pi - np.abs(t - np.pi)
        if self.kind == "zero":
            return np.zeros_like(t)
        return np.interp(t, self.angles, self.values, period=TWO_PI)

    @property
    def max_value(self) -> float:
        if self.kind == "h1":
            return 2.0
        if self.kind == "h2":
            return float(np.pi)
        if self.kind == "zero":
            return 0.0
        return float(max(self.values))

    @property
    def name(self) -> str:
        return self.kind if self.kind != "tabulated" else f"tabulated[{len(self.values)}]"


def eval_profile(p: RoughnessProfile, theta):
    """Value of the roughness profile at torus angle(s) ``theta``."""
    return p(theta)


def read_profile(path) -> RoughnessProfile:
    """Read a two-column ``angle value`` table (``#`` starts a comment)."""
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InvalidProfileError(f"cannot read profile table {path}: {exc}") from exc
    if data.shape[1] != 2:
        raise InvalidProfileError(f"{path}: expected two columns, got {data.shape[1]}")
    return RoughnessProfile.tabulated(data[:, 0], data[:, 1])


def write_profile(p: RoughnessProfile, path, n: int = 256) -> None:
    if p.kind == "tabulated":
        t, v = np.asarray(p.angles), np.asarray(p.values)
    else:
        t = TWO_PI * np.arange(n) / n
        v = p(t)
    np.savetxt(path, np.column_stack([t, v]), fmt="%.12g", header=f"roughness profile {p.name}")


@dataclass(frozen=True, eq=False)
class StarCurve:
    """Star-shaped closed curve ``r = f(theta)`` sampled at ``2 pi i / N``."""

    radii: np.ndarray

    def __post_init__(self):
        r = np.array(self.radii, dtype=float).ravel()
        if r.size < 3:
            raise GeometryError("a star curve needs at least 3 samples")
        if not np.all(np.isfinite(r)) or np.any(r <= 0.0):
            raise GeometryError("star curve radii must be finite and strictly positive")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    @classmethod
    def circle(cls, radius: float, n: int) -> "StarCurve":
        return cls(np.full(n, float(radius)))

    @classmethod
    def from_function(cls, f, n: int) -> "StarCurve":
        return cls(f(TWO_PI * np.arange(n) / n))

    @property
    def n(self) -> int:
        return self.radii.size

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    def xy(self) -> np.ndarray:
        t = self.theta
        return np.column_stack([self.radii * np.cos(t), self.radii * np.sin(t)])

    def resample(self, n: int) -> "StarCurve":
        """Linear interpolation in theta onto an ``n``-point grid."""
        if n == self.n:
            return self
        t = TWO_PI * np.arange(n) / n
        return StarCurve(np.interp(t, self.theta, self.radii, period=TWO_PI))

    def scaled(self, c: float) -> "StarCurve":
        return StarCurve(c * self.radii)

    def __eq__(self, other):
        return isinstance(other, StarCurve) and np.array_equal(self.radii, other.radii)

    __hash__ = None


@dataclass(frozen=True)
class AnnulusBounds:
    """Curve class: starlike w.r.t. every point of B(0, delta), inside B(0, m_bound)."""

    delta: float
    m_bound: float

    def __post_init__(self):
        if not (0.0 < self.delta < self.m_bound):
            raise GeometryError(f"need 0 < delta < m_bound, got {self.delta}, {self.m_bound}")

    def contains(self, c: StarCurve) -> bool:
        """True when the polyline lies in the class.

        A closed polygon around the origin is starlike with respect to the
        whole ball B(0, delta) iff every edge's supporting line stays at
        distance >= delta from the origin (origin on the inner side).
        """
        if np.any(c.radii > self.m_bound):
            return False
        p = c.xy()
        q = np.roll(p, -1, axis=0)
        cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
        edge = np.hypot(*(q - p).T)
        return bool(np.all(cross / edge >= self.delta))

    def slack(self, d1: float, d2: float, dh: float) -> dict[str, float]:
        """Nonnegative slack of the three equivalence inequalities."""
        m, dl = self.m_bound, self.delta
        return {
            "dh_le_d1": d1 - dh,
            "d2_le_c_dh": (m / dl**2) * dh - d2,
            "d1_le_c_d2": (m**2 / dl) * d2 - d1,
        }


def check_epsilon(eps: float) -> int:
    """Return ``1/eps`` as an int, raising if ``eps`` is not its reciprocal."""
    if not (eps > 0.0) or not math.isfinite(eps):
        raise InvalidEpsilonError(f"eps must be positive, got {eps}")
    inv = 1.0 / eps
    k = int(round(inv))
    if k < 1 or abs(inv - k) > 1e-9 * max(1.0, inv):
        raise InvalidEpsilonError(f"1/eps must be a positive integer, got 1/{eps} = {inv}")
    return k


def inner_boundary(p: RoughnessProfile, eps: float, n: int) -> StarCurve:
    """Rough disc boundary ``r = 1 - eps h(theta / eps)`` on ``n`` angles."""
    k = check_epsilon(eps)
    if eps * p.max_value >= 1.0:
        raise DegenerateDomainError(f"eps * max h = {eps * p.max_value:g} >= 1")
    if n % k:
        raise GeometryError(f"n={n} must be a multiple of 1/eps={k}")
    # theta/eps = 2 pi (i k mod n)/n keeps roughness nodes exact (e.g. the h2 corner)
    big = TWO_PI * np.mod(np.arange(n) * k, n) / n
    return StarCurve(1.0 - eps * p(big))


def _common(a: StarCurve, b: StarCurve) -> tuple[np.ndarray, np.ndarray]:
    n = max(a.n, b.n)
    return a.resample(n).radii, b.resample(n).radii


def metric_d1(a: StarCurve, b: StarCurve) -> float:
    """Sup-norm distance between the polar parametrizations."""
    fa, fb = _common(a, b)
    return float(np.max(np.abs(fb - fa)))


def metric_d2(a: StarCurve, b: StarCurve) -> float:
    """Largest ``|ln lam|`` such that ``lam * a`` meets ``b``.

    For polylines sharing an angular grid the scaled copy meets ``b`` in a
    sector exactly when ``lam * f_a - f_b`` changes sign between the sector
    ends, so the admissible scalings fill ``[min f_b/f_a, max f_b/f_a]``.
    """
    fa, fb = _common(a, b)
    return float(np.max(np.abs(np.log(fb / fa))))


def _directed(pa: np.ndarray, pb: np.ndarray, chunk: int = 256) -> float:
    """sup over vertices of ``pa`` of the distance to the closed polyline ``pb``."""
    q0 = pb
    d = np.roll(pb, -1, axis=0) - pb
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd > 0.0, dd, 1.0)
    best = 0.0
    for start in range(0, len(pa), chunk):
        x = pa[start:start + chunk, None, :]
        w = x - q0[None, :, :]
        t = np.clip(np.einsum("mnj,nj->mn", w, d) / dd, 0.0, 1.0)
        r = w - t[:, :, None] * d[None, :, :]
        dist = np.sqrt(np.min(np.einsum("mnj,mnj->mn", r, r), axis=1))
        best = max(best, float(dist.max()))
    return best


def _with_midpoints(p: np.ndarray) -> np.ndarray:
    return np.vstack([p, 0.5 * (p + np.roll(p, -1, axis=0))])


def metric_hausdorff(a: StarCurve, b: StarCurve) -> float:
    """Hausdorff distance between the two polylines.

    Vertices and edge midpoints of each polyline are measured against the
    segments of the other one.
    """
    pa, pb = a.xy(), b.xy()
    if pa.shape == pb.shape and np.array_equal(pa, pb):
        return 0.0
    return max(_directed(_with_midpoints(pa), pb), _directed(_with_midpoints(pb), pa))


def read_curve(path) -> StarCurve:
    """Read a ``theta, rho`` CSV (``#`` comments) on a uniform grid."""
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise GeometryError(f"cannot parse curve file {path}: {exc}") from exc
    if data.shape[1] < 2 or data.shape[0] < 3:
        raise GeometryError(f"{path}: need >= 3 rows of 'theta, rho'")
    n = data.shape[0]
    grid = TWO_PI * np.arange(n) / n
    if not np.allclose(data[:, 0], grid, atol=1e-9):
        return StarCurve(np.interp(grid, data[:, 0], data[:, 1], period=TWO_PI))
    return StarCurve(data[:, 1])
