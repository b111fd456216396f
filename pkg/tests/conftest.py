import numpy as np
import pytest

from roughbernoulli.cell import solve_cell
from roughbernoulli.geometry import AnnulusBounds, RoughnessProfile, StarCurve

LAM = 2.0 * np.exp(-0.5)
LAM_FIG = 8.0 * np.exp(-1.0 / 8.0)


def random_star_curve(rng, n, bounds: AnnulusBounds, modes=6, tries=200):
    """Smooth random curve whose polyline lies in the class of ``bounds``."""
    t = 2.0 * np.pi * np.arange(n) / n
    lo, hi = bounds.delta, bounds.m_bound
    for _ in range(tries):
        c0 = rng.uniform(lo + 0.3 * (hi - lo), lo + 0.7 * (hi - lo))
        f = np.full(n, c0)
        for k in range(1, modes + 1):
            amp = rng.uniform(0.0, 0.6) * c0 / k**2
            f += amp * np.cos(k * t + rng.uniform(0, 2 * np.pi))
        if f.min() <= 0:
            continue
        c = StarCurve(f)
        if bounds.contains(c):
            return c
    raise RuntimeError("could not draw a curve in the class")


@pytest.fixture(scope="session")
def h1_cell():
    return solve_cell(RoughnessProfile.h1(), 6.0, 256, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


BOUNDS_CLI = AnnulusBounds(0.5, 4.0)
