import math

import numpy as np
import pytest

from roughbernoulli import _mapped
from roughbernoulli.cell import (
    compute_b0,
    decay_check,
    fourier_trace,
    mode_slopes,
    solve_cell,
    trace_mean,
)
from roughbernoulli.geometry import RoughnessProfile

from conftest import LAM

RHO0 = math.exp(0.5)


def capped_mode(R, T, k, M):
    # harmonic, zero R-derivative at R = M
    return np.cosh(k * (M - R)) * np.cos(k * T) / np.cosh(k * M)


def capped_mode_error(n, k=2, M=3.0):
    T = 2 * np.pi * np.arange(4 * n) / (4 * n)
    h = 0.4 * (1 - np.cos(T))
    K = _mapped.assemble("flat", -h, M + h, n + 1)
    S = np.linspace(0, 1, n + 1)[:, None]
    R = -h + S * (M + h)
    exact = capped_mode(R, T, k, M)
    fixed = np.zeros_like(exact, dtype=bool)
    fixed[0] = True
    u = _mapped.solve_system(K, fixed.ravel(), exact[0], tol=1e-12, method="direct")
    return np.abs(u.reshape(exact.shape) - exact).max()


def test_zero_profile_gives_zero():
    c = solve_cell(RoughnessProfile.zero(), 6.0, 32, 32)
    assert np.all(c.values == 0.0)
    assert trace_mean(c) == 0.0


def test_constant_profile_gives_minus_constant():
    c = solve_cell(RoughnessProfile.constant(0.3), 6.0, 32, 32)
    np.testing.assert_allclose(c.values, -0.3, atol=1e-12)
    assert trace_mean(c) == pytest.approx(-0.3, abs=1e-12)


def test_bottom_trace_is_minus_h(h1_cell):
    np.testing.assert_array_equal(h1_cell.values[0], -h1_cell.heights)


def test_cap_has_zero_normal_derivative(h1_cell):
    u = h1_cell.values
    # one-sided second-order difference in S at the cap
    du = 3 * u[-1] - 4 * u[-2] + u[-3]
    assert np.abs(du).max() < 1e-5


def test_neumann_cap_manufactured_second_order():
    errs = [capped_mode_error(n) for n in (16, 32, 64)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_cell_arguments_validated():
    with pytest.raises(ValueError):
        solve_cell(RoughnessProfile.h1(), 6.0, 32, 33)
    with pytest.raises(ValueError):
        solve_cell(RoughnessProfile.h1(), 0.0, 32, 32)


def test_h1_trace_mean(h1_cell):
    assert trace_mean(h1_cell) == pytest.approx(-0.58738, abs=5e-3)


def test_trace_mean_mesh_convergence():
    p = RoughnessProfile.h1()
    m = [trace_mean(solve_cell(p, 6.0, n, n)) for n in (64, 128, 256)]
    ratio = (m[0] - m[1]) / (m[1] - m[2])
    assert 3.0 <= ratio <= 5.0


def test_truncation_insensitive():
    p = RoughnessProfile.h1()
    a = trace_mean(solve_cell(p, 6.0, 192, 192))
    b = trace_mean(solve_cell(p, 8.0, 256, 192))
    assert abs(a - b) <= 1e-4


@pytest.mark.parametrize("mean,expected", [(-0.58738, -1.17476), (-0.87754, -1.75508), (0.0, 0.0)])
def test_compute_b0_examples(mean, expected):
    w = compute_b0(LAM, RHO0, mean)
    assert w.b0 == pytest.approx(expected, abs=1e-5)
    assert w.b0 == LAM * RHO0 * mean


@pytest.mark.parametrize("lam,rho0", [(0.0, 2.0), (1.0, 1.0)])
def test_compute_b0_preconditions(lam, rho0):
    with pytest.raises(ValueError):
        compute_b0(lam, rho0, -0.5)


def test_fourier_trace_zero_profile():
    c = solve_cell(RoughnessProfile.zero(), 6.0, 16, 16)
    assert np.all(fourier_trace(c, 1.0) == 0)


def test_fourier_mean_mode_equals_trace_mean(h1_cell):
    assert fourier_trace(h1_cell, 0.0)[0].real == pytest.approx(trace_mean(h1_cell), abs=1e-14)


def test_first_mode_decays_like_exp_minus_R(h1_cell):
    c1, c2 = fourier_trace(h1_cell, 1.0), fourier_trace(h1_cell, 2.0)
    for k in (1, -1):
        assert abs(c2[k]) / abs(c1[k]) == pytest.approx(math.exp(-1), rel=0.05)


def test_fourier_trace_range(h1_cell):
    for R in (-0.1, 5.5):
        with pytest.raises(ValueError):
            fourier_trace(h1_cell, R)


def test_mean_mode_flat_to_discretization_order():
    spreads = []
    for n in (64, 128, 256):
        c = solve_cell(RoughnessProfile.h1(), 6.0, n, n)
        m = [fourier_trace(c, R)[0].real for R in np.linspace(0, 5, 21)]
        spreads.append(np.ptp(m))
    assert spreads[-1] < 1e-4
    assert spreads[0] / spreads[1] > 3.5 and spreads[1] / spreads[2] > 3.5


def test_nonzero_modes_decay_at_rate_k(h1_cell):
    slopes = mode_slopes(h1_cell, ks=(1, 2, 3, 4))
    for k, s in slopes.items():
        assert s == pytest.approx(-k, rel=0.05)


@pytest.mark.parametrize("p", [RoughnessProfile.zero(), RoughnessProfile.constant(0.5)])
def test_decay_constant_vanishes_for_flat_profiles(p):
    r = decay_check(solve_cell(p, 6.0, 32, 32), 0.9)
    assert r.constant == pytest.approx(0.0, abs=1e-11)


def test_decay_h1(h1_cell):
    r = decay_check(h1_cell, 0.9)
    assert math.isfinite(r.constant) and r.constant > 0
    i4 = int(np.argmin(np.abs(r.heights - 4.0)))
    assert r.heights[i4] == pytest.approx(4.0)
    assert r.deviations[i4] < 0.02 * r.deviations[0]
    assert r.monotone


def test_decay_mu_validated(h1_cell):
    with pytest.raises(ValueError):
        decay_check(h1_cell, 1.0)
