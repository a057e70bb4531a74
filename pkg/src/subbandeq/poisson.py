"""Mixed-boundary Poisson solve on the slab.

-Laplace(U) = rho with U = 0 on the lateral boundary and dU/dz = 0 on the
top and bottom faces.  The operator is assembled as G^T W G for the
forward-difference gradient G and edge quadrature weights W (trapezoid in
z), which makes it symmetric positive definite, gives the mirrored-ghost
Neumann closure for free, and makes the discrete weak-form identity

    int U rho = int |grad U|^2

hold to solver tolerance rather than to discretization order.  The system
is solved matrix-free by Jacobi-preconditioned conjugate gradients with a
fixed traversal order, so results are bitwise reproducible.
"""

from __future__ import annotations

import numpy as np

from .grid import Field3D, Grid, _volume_values


class PoissonConvergenceError(RuntimeError):
    pass


def apply_operator(U: np.ndarray, grid: Grid) -> np.ndarray:
    """Quadrature-weighted 7-point operator (G^T W G) applied to node values."""
    hy1, hy2, hz = grid.hy1, grid.hy2, grid.hz
    wz = grid.z_weights()[None, None, :]
    out = np.zeros_like(U)

    c1 = (hy2 / hy1) * wz
    out += 2.0 * c1 * U
    out[1:, :, :] -= (c1 * U)[:-1, :, :]
    out[:-1, :, :] -= (c1 * U)[1:, :, :]

    c2 = (hy1 / hy2) * wz
    out += 2.0 * c2 * U
    out[:, 1:, :] -= (c2 * U)[:, :-1, :]
    out[:, :-1, :] -= (c2 * U)[:, 1:, :]

    cz = hy1 * hy2 / hz
    dz = np.diff(U, axis=2)
    out[:, :, :-1] -= cz * dz
    out[:, :, 1:] += cz * dz
    return out


def _operator_diagonal(grid: Grid) -> np.ndarray:
    hy1, hy2, hz = grid.hy1, grid.hy2, grid.hz
    wz = grid.z_weights()
    dz_count = np.full(grid.nz + 1, 2.0)
    dz_count[0] = dz_count[-1] = 1.0
    diag = 2.0 * (hy2 / hy1 + hy1 / hy2) * wz + (hy1 * hy2 / hz) * dz_count
    out = np.empty(grid.volume_shape)
    out[:] = diag[None, None, :]
    return out


def solve_poisson(
    rho,
    grid: Grid,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> Field3D:
    """Solve the mixed Dirichlet/Neumann problem for a given density.

    Stops at relative residual <= tol; raises PoissonConvergenceError if the
    iteration cap is exceeded.
    """
    r3 = _volume_values(rho, grid)
    if max_iter is None:
        max_iter = max(500, 30 * max(grid.ny1, grid.ny2, grid.nz))
    b = grid.node_volumes() * r3
    b_norm = float(np.sqrt(np.sum(b * b)))
    if b_norm == 0.0:
        return Field3D(np.zeros(grid.volume_shape))
    diag = _operator_diagonal(grid)
    U = np.zeros(grid.volume_shape)
    r = b.copy()
    z = r / diag
    p = z.copy()
    rz = float(np.sum(r * z))
    for _ in range(max_iter):
        Ap = apply_operator(p, grid)
        alpha = rz / float(np.sum(p * Ap))
        U += alpha * p
        r -= alpha * Ap
        if float(np.sqrt(np.sum(r * r))) <= tol * b_norm:
            return Field3D(U)
        z = r / diag
        rz_new = float(np.sum(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise PoissonConvergenceError(
        f"conjugate gradients did not reach relative residual {tol:g} "
        f"in {max_iter} iterations"
    )


def dirichlet_energy(U, grid: Grid) -> float:
    """Discrete int |grad U|^2 with the same edge weights as the operator."""
    v = _volume_values(U, grid)
    hy1, hy2, hz = grid.hy1, grid.hy2, grid.hz
    wz = grid.z_weights()[None, None, :]

    d1 = np.diff(v, axis=0, prepend=0.0, append=0.0) / hy1
    e1 = float(np.sum(d1 * d1 * (hy1 * hy2 * wz)))
    d2 = np.diff(v, axis=1, prepend=0.0, append=0.0) / hy2
    e2 = float(np.sum(d2 * d2 * (hy1 * hy2 * wz)))
    d3 = np.diff(v, axis=2) / hz
    e3 = float(np.sum(d3 * d3) * hy1 * hy2 * hz)
    return e1 + e2 + e3


def potential_pairing(U, rho, grid: Grid) -> float:
    """Discrete int U rho over the slab (node quadrature)."""
    u = _volume_values(U, grid)
    r = _volume_values(rho, grid)
    return float(np.sum(u * r * grid.node_volumes()))


def gradient_distance(U1, U2, grid: Grid) -> float:
    """|grad(U1 - U2)|_{L2}, the metric in which equilibria are unique."""
    v = _volume_values(U1, grid) - _volume_values(U2, grid)
    return float(np.sqrt(dirichlet_energy(v, grid)))
