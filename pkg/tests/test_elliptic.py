import math

import numpy as np
import pytest

from roughbernoulli import _mapped
from roughbernoulli.elliptic import (
    boundary_gradient,
    build_mesh,
    read_field_values,
    solve_dirichlet,
    write_field,
)
from roughbernoulli.errors import MeshError, SolverError
from roughbernoulli.geometry import RoughnessProfile, StarCurve, inner_boundary

from conftest import LAM

RHO0 = math.exp(0.5)


def curve(f, n):
    return StarCurve.from_function(f, n)


def wavy_mesh(n, nr=None):
    inner = curve(lambda t: 1 + 0.2 * np.cos(3 * t), n)
    outer = curve(lambda t: 2.5 + 0.3 * np.sin(2 * t), n)
    return build_mesh(inner, outer, nr or n // 4 + 1, n)


def harmonic(x, y):
    # Re(z) + Re(z^2): manufactured harmonic function
    return x + x * x - y * y


def mms_error(n):
    m = wavy_mesh(4 * n, n + 1)
    x, y = m.xy()
    u = solve_dirichlet(m, harmonic(*[v[0] for v in (x, y)]), harmonic(*[v[-1] for v in (x, y)]))
    return np.abs(u.values - harmonic(x, y)).max()


def radial_error(n):
    m = build_mesh(StarCurve.circle(1.0, 4 * n), StarCurve.circle(RHO0, 4 * n), n + 1, 4 * n)
    u = solve_dirichlet(m, 1.0, 0.0)
    return np.abs(u.values - (0.5 - np.log(m.radii)) / 0.5).max(), u


def test_build_mesh_linear_blend():
    m = build_mesh(StarCurve.circle(1.0, 16), StarCurve.circle(2.0, 16), 3, 16)
    np.testing.assert_allclose(m.radii, np.repeat([[1.0], [1.5], [2.0]], 16, axis=1))


def test_build_mesh_mismatched_ntheta():
    with pytest.raises(MeshError):
        build_mesh(StarCurve.circle(1.0, 16), StarCurve.circle(2.0, 32), 5, 16)


def test_build_mesh_crossing():
    outer = StarCurve(np.r_[np.full(15, 2.0), 0.9])
    with pytest.raises(MeshError):
        build_mesh(StarCurve.circle(1.0, 16), outer, 5, 16)


def test_build_mesh_rough_inner_reproduced():
    inner = inner_boundary(RoughnessProfile.h1(), 0.1, 160)
    m = build_mesh(inner, StarCurve.circle(RHO0, 160), 9, 160)
    np.testing.assert_array_equal(m.radii[0], inner.radii)


def test_constant_data_gives_constant():
    u = solve_dirichlet(wavy_mesh(64), 0.7, 0.7)
    np.testing.assert_allclose(u.values, 0.7, atol=1e-12)


def test_radial_solution_second_order():
    errs = [radial_error(n)[0] for n in (16, 32, 64)]
    assert errs[-1] < 1e-5
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_manufactured_solution_second_order():
    errs = [mms_error(n) for n in (16, 32, 64)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5


def test_outer_gradient_of_radial_solution():
    errs = []
    for n in (16, 32, 64):
        _, u = radial_error(n)
        errs.append(np.abs(boundary_gradient(u, "outer") - LAM).max())
    assert errs[-1] < 1e-4
    assert errs[0] / errs[1] > 3 and errs[1] / errs[2] > 3


def test_gradient_of_constant_is_zero():
    u = solve_dirichlet(wavy_mesh(64), 2.0, 2.0)
    np.testing.assert_allclose(boundary_gradient(u, "outer"), 0.0, atol=1e-9)
    np.testing.assert_allclose(boundary_gradient(u, "inner"), 0.0, atol=1e-9)


def test_gradient_of_linear_field_on_unit_circle():
    errs = {"outer": [], "inner": []}
    for n in (64, 128, 256):
        inner = curve(lambda t: 0.5 + 0.05 * np.cos(4 * t), n)
        m = build_mesh(inner, StarCurve.circle(1.0, n), n // 4 + 1, n)
        x, y = m.xy()
        u = solve_dirichlet(m, x[0], x[-1])
        for side in errs:
            errs[side].append(np.abs(boundary_gradient(u, side) - 1.0).max())
    for e in errs.values():
        assert e[-1] < 1e-3
        assert e[0] / e[1] > 3.5 and e[1] / e[2] > 3.5


def test_gradient_side_validated():
    u = solve_dirichlet(wavy_mesh(32), 1.0, 0.0)
    with pytest.raises(ValueError):
        boundary_gradient(u, "middle")


def test_discrete_maximum_principle(rng):
    for _ in range(20):
        n = int(rng.choice([32, 48, 64]))
        t = 2 * np.pi * np.arange(n) / n
        k1, k2 = rng.integers(1, 5, size=2)
        inner = StarCurve(1 + rng.uniform(0, 0.15) * np.cos(k1 * t + rng.uniform(0, 6)))
        outer = StarCurve(2 + rng.uniform(0, 0.3) * np.sin(k2 * t + rng.uniform(0, 6)))
        m = build_mesh(inner, outer, int(rng.integers(5, 30)), n)
        gi, go = rng.normal(size=n), rng.normal(size=n)
        u = solve_dirichlet(m, gi, go).values
        lo, hi = min(gi.min(), go.min()), max(gi.max(), go.max())
        assert u.min() >= lo - 1e-12 and u.max() <= hi + 1e-12


def test_rotational_equivariance(rng):
    n = 48
    inner = StarCurve(1 + 0.1 * rng.random(n))
    outer = StarCurve(2 + 0.2 * rng.random(n))
    gi, go = rng.normal(size=n), rng.normal(size=n)
    m = build_mesh(inner, outer, 17, n)
    m_rot = build_mesh(StarCurve(np.roll(inner.radii, 1)), StarCurve(np.roll(outer.radii, 1)), 17, n)
    u = solve_dirichlet(m, gi, go).values
    u_rot = solve_dirichlet(m_rot, np.roll(gi, 1), np.roll(go, 1)).values
    np.testing.assert_allclose(u_rot, np.roll(u, 1, axis=1), atol=1e-12)


def test_boundary_data_imposed_exactly(rng):
    m = wavy_mesh(32)
    gi, go = rng.normal(size=32), rng.normal(size=32)
    u = solve_dirichlet(m, gi, go).values
    np.testing.assert_array_equal(u[0], gi)
    np.testing.assert_array_equal(u[-1], go)


def test_boundary_data_shape_checked():
    with pytest.raises(MeshError):
        solve_dirichlet(wavy_mesh(32), np.ones(31), 0.0)


def test_stiffness_symmetric():
    m = wavy_mesh(32)
    K = _mapped.assemble("polar", m.inner.radii, m.gap, m.nr)
    assert abs(K - K.T).max() < 1e-12


def test_cg_and_direct_agree():
    m = wavy_mesh(64)
    K = _mapped.assemble("polar", m.inner.radii, m.gap, m.nr)
    fixed = np.zeros((m.nr, m.ntheta), bool)
    fixed[0] = fixed[-1] = True
    vals = np.r_[np.ones(64), np.zeros(64)]
    a = _mapped.solve_system(K, fixed.ravel(), vals, method="direct")
    b = _mapped.solve_system(K, fixed.ravel(), vals, method="cg", tol=1e-12)
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_solver_error_carries_residual():
    m = wavy_mesh(64)
    K = _mapped.assemble("polar", m.inner.radii, m.gap, m.nr)
    fixed = np.zeros((m.nr, m.ntheta), bool)
    fixed[0] = fixed[-1] = True
    with pytest.raises(SolverError) as info:
        _mapped.solve_system(K, fixed.ravel(), np.r_[np.ones(64), np.zeros(64)],
                             method="cg", tol=1e-14, maxiter=1)
    assert info.value.residual > 1e-14


def test_field_dump_roundtrip(tmp_path):
    u = solve_dirichlet(wavy_mesh(32), 1.0, 0.0)
    path = tmp_path / "u.txt"
    write_field(u, path)
    assert path.read_text().splitlines()[0] == f"{u.mesh.nr} 32"
    np.testing.assert_allclose(read_field_values(path), u.values, atol=1e-11)
