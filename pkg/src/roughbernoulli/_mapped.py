"""Second-order finite differences on a periodic strip mapped to a rectangle.

Both the annular Bernoulli domain and the truncated cell strip are regions
of the form ``{(x, t) : a(t) < x < a(t) + L(t)}`` with ``t`` periodic.  The
map ``x = a(t) + s L(t)``, ``s in [0, 1]`` turns them into a rectangle on
which the Laplacian becomes an anisotropic diffusion operator with a mixed
``s``/``t`` term.  The operator is discretized from its quadratic energy:
compact differences on cell edges for the diagonal terms, centered cross
differences at cell centres for the mixed term.  The resulting stencil is
the conservative nine-point scheme and the matrix is symmetric.

``weights`` selects the physical Laplacian:

* ``"polar"``: ``x`` is the radius ``r`` and ``t`` the polar angle,
  energy density ``r u_r^2 + u_t^2 / r``.
* ``"flat"``: Cartesian strip, energy density ``u_x^2 + u_t^2``.
"""

from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import SolverError

logger = logging.getLogger(__name__)

_WEIGHTS = ("polar", "flat")

# above this size the direct factorization is replaced by AMG-preconditioned CG
DIRECT_LIMIT = 300_000


def _w(kind: str, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if kind == "polar":
        return x, 1.0 / x
    if kind == "flat":
        one = np.ones_like(x)
        return one, one
    raise ValueError(f"unknown weights {kind!r}; expected one of {_WEIGHTS}")


def periodic_derivatives(values: np.ndarray, dt: float):
    """Return (d/dt at nodes, midpoint values, d/dt at midpoints).

    Midpoint ``i`` sits between nodes ``i`` and ``i + 1`` (periodic).
    """
    nxt = np.roll(values, -1)
    prv = np.roll(values, 1)
    d_node = (nxt - prv) / (2.0 * dt)
    mid = 0.5 * (values + nxt)
    d_mid = (nxt - values) / dt
    return d_node, mid, d_mid


def coefficients(kind, a, da, L, dL, s):
    """Diffusion tensor (A_ss, A_st, A_tt) of the mapped operator.

    All arguments broadcast; ``a, da, L, dL`` describe the map at the
    angular location, ``s`` the mapped radial coordinate.
    """
    x = a + s * L
    w1, w2 = _w(kind, x)
    c = -(da + s * dL) / L
    a_ss = w1 / L + w2 * L * c * c
    a_st = w2 * L * c
    a_tt = w2 * L
    return a_ss, a_st, a_tt


def assemble(kind: str, a: np.ndarray, L: np.ndarray, nr: int) -> sp.csr_matrix:
    """Assemble the symmetric stiffness matrix on an ``nr x nt`` node grid.

    Node ``(j, i)`` (radial index ``j``, angular index ``i``) has linear
    index ``j * nt + i``.  Rows at ``j = 0`` and ``j = nr - 1`` contain the
    natural (zero-flux) boundary closure; Dirichlet rows are eliminated by
    :func:`solve_system`.
    """
    a = np.asarray(a, dtype=float)
    L = np.asarray(L, dtype=float)
    nt = a.size
    ds = 1.0 / (nr - 1)
    dt = 2.0 * np.pi / nt
    s = np.linspace(0.0, 1.0, nr)
    da_n, a_m, da_m = periodic_derivatives(a, dt)
    dL_n, L_m, dL_m = periodic_derivatives(L, dt)

    idx = np.arange(nr * nt).reshape(nr, nt)
    ip = np.roll(idx, -1, axis=1)
    rows, cols, vals = [], [], []

    def pair(n0, n1, w):
        # w * (u1 - u0)^2 / 2 in the energy
        rows.extend([n0, n1, n0, n1])
        cols.extend([n0, n1, n1, n0])
        vals.extend([w, w, -w, -w])

    # radial edges (j+1/2, i)
    sh = 0.5 * (s[:-1] + s[1:])[:, None]
    a_ss, _, _ = coefficients(kind, a[None, :], da_n[None, :], L[None, :], dL_n[None, :], sh)
    pair(idx[:-1].ravel(), idx[1:].ravel(), (a_ss * dt / ds).ravel())

    # angular edges (j, i+1/2); boundary rows carry half a cell
    _, _, a_tt = coefficients(kind, a_m[None, :], da_m[None, :], L_m[None, :], dL_m[None, :], s[:, None])
    wt = np.ones(nr)
    wt[0] = wt[-1] = 0.5
    pair(idx.ravel(), ip.ravel(), (a_tt * wt[:, None] * ds / dt).ravel())

    # mixed term at cell centres (j+1/2, i+1/2)
    _, a_st, _ = coefficients(kind, a_m[None, :], da_m[None, :], L_m[None, :], dL_m[None, :], sh)
    w = (a_st * ds * dt).ravel()
    corners = (idx[:-1].ravel(), ip[:-1].ravel(), idx[1:].ravel(), ip[1:].ravel())
    p = np.array([-1.0, -1.0, 1.0, 1.0]) / (2.0 * ds)
    q = np.array([-1.0, 1.0, -1.0, 1.0]) / (2.0 * dt)
    outer = np.outer(p, q) + np.outer(q, p)
    for m in range(4):
        for n in range(4):
            if outer[m, n] != 0.0:
                rows.append(corners[m])
                cols.append(corners[n])
                vals.append(w * outer[m, n])

    rows = np.concatenate([np.atleast_1d(r) for r in rows])
    cols = np.concatenate([np.atleast_1d(c) for c in cols])
    vals = np.concatenate([np.atleast_1d(v) for v in vals])
    n = nr * nt
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def solve_system(K, fixed: np.ndarray, fixed_values: np.ndarray, *, tol=1e-10,
                 method="auto", maxiter=2000):
    """Solve ``K u = 0`` on free nodes with ``u[fixed] = fixed_values``.

    ``method`` is ``"direct"`` (sparse LU), ``"cg"`` (CG with a smoothed
    aggregation AMG preconditioner) or ``"auto"`` (direct below
    :data:`DIRECT_LIMIT` unknowns).  Returns the full node vector.
    """
    n = K.shape[0]
    free = ~fixed
    u = np.zeros(n)
    u[fixed] = fixed_values
    Kff = K[free][:, free].tocsr()
    rhs = -(K[free][:, fixed] @ fixed_values)
    nfree = Kff.shape[0]
    if method == "auto":
        method = "direct" if nfree <= DIRECT_LIMIT else "cg"

    bnorm = np.linalg.norm(rhs)
    if method == "direct":
        x = spla.spsolve(Kff.tocsc(), rhs)
    elif method == "cg":
        import pyamg

        ml = pyamg.smoothed_aggregation_solver(Kff, symmetry="symmetric")
        x = ml.solve(rhs, tol=tol, accel="cg", maxiter=maxiter)
    else:
        raise ValueError(f"unknown linear solver {method!r}")

    res = np.linalg.norm(Kff @ x - rhs)
    rel = res / bnorm if bnorm > 0 else res
    if not np.all(np.isfinite(x)) or rel > max(tol, 1e-12) * 10:
        raise SolverError(f"linear solve ({method}) stalled at relative residual {rel:.3e}", rel)
    logger.debug("linear solve %s: n=%d rel.res=%.2e", method, nfree, rel)
    u[free] = x
    return u
