"""Confined-direction eigenproblem, solved slice by slice.

On every lateral node the z-profile of the potential defines a 1D
Hamiltonian -(1/2) d^2/dz^2 + W(z) with zero boundary values at z = 0, 1.
Three-point differences on the interior z-nodes give a symmetric
tridiagonal matrix (diagonal 1/hz^2 + W_k, off-diagonal -1/(2 hz^2)) whose
spectrum is real and simple; LAPACK bisection + inverse iteration computes
the lowest J pairs deterministically, and a Rayleigh-quotient polish takes
the eigenvalues to machine accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .grid import Grid


def free_mode_eigenvalue(j, grid: Grid):
    """Discrete eigenvalue of -(1/2) d^2/dz^2 for W = 0: (1 - cos(pi j hz)) / hz^2."""
    hz = grid.hz
    j = np.asarray(j, dtype=float)
    out = (1.0 - np.cos(np.pi * j * hz)) / hz**2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SubbandSpectrum:
    """Lowest J eigenpairs on every lateral slice.

    lam has shape (ny1, ny2, J) with lam[..., j] strictly increasing in j;
    chi has shape (ny1, ny2, J, nz-1), the interior z-samples of the
    L2(0,1)-normalized modes (zero-extended at z = 0, 1), sign-fixed to be
    positive at the first interior node.
    """

    lam: np.ndarray
    chi: np.ndarray

    @property
    def J(self) -> int:
        return self.lam.shape[2]

    def chi_closed(self) -> np.ndarray:
        """Modes on the closed z-node set, zeros prepended/appended."""
        ny1, ny2, J, ni = self.chi.shape
        full = np.zeros((ny1, ny2, J, ni + 2))
        full[..., 1:-1] = self.chi
        return full

    def kinetic_energies(self, grid: Grid) -> np.ndarray:
        """Discrete |d chi/dz|^2 norms, shape (ny1, ny2, J)."""
        return profile_kinetic_energy(self.chi, grid)

    def validate(self, grid: Grid, gap_margin: float = 1e-10) -> None:
        if self.lam.shape[:2] != grid.lateral_shape or self.chi.shape[3] != grid.nz - 1:
            raise ValueError("spectrum shape does not match grid")
        if not np.all(np.diff(self.lam, axis=2) > gap_margin):
            raise ValueError("eigenvalues are not strictly increasing in the band index")
        norms = grid.hz * np.sum(self.chi**2, axis=3)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise ValueError("modes are not L2-normalized")
        gram = grid.hz * np.einsum("abjz,abkz->abjk", self.chi, self.chi)
        off = gram - np.eye(self.J)
        if np.max(np.abs(off)) > 1e-8:
            raise ValueError("modes are not orthonormal per slice")


def profile_kinetic_energy(chi: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward-difference |d/dz|^2 form with zero end values.

    chi holds interior z-samples in its last axis.  This is the quadratic
    form of the discrete Hamiltonian, so eigenvalue = (1/2) * this + int W chi^2
    holds exactly for computed eigenpairs.
    """
    chi = np.asarray(chi, dtype=float)
    d = np.diff(chi, axis=-1)
    edge = np.sum(d * d, axis=-1)
    edge = edge + np.take(chi, 0, axis=-1) ** 2 + np.take(chi, -1, axis=-1) ** 2
    return edge / grid.hz


def solve_slice(W, J: int, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Lowest J eigenpairs of the slice Hamiltonian.

    W: potential samples on the nz-1 interior z-nodes.
    Returns (lam, chi) with lam shape (J,), chi shape (J, nz-1).
    """
    n = grid.nz - 1
    W = np.asarray(W, dtype=float)
    if W.shape != (n,):
        raise ValueError(f"potential profile must have {n} interior samples")
    if not np.all(np.isfinite(W)):
        raise ValueError("potential profile contains non-finite values")
    if not 1 <= J <= n:
        raise ValueError(f"band count {J} out of range 1..{n}")
    hz = grid.hz
    diag = 1.0 / hz**2 + W
    off = np.full(n - 1, -0.5 / hz**2)
    lam, vec = eigh_tridiagonal(diag, off, select="i", select_range=(0, J - 1))
    # Rayleigh-quotient polish: residual-squared accuracy on the eigenvalues.
    Tv = diag[:, None] * vec
    Tv[:-1] += off[:, None] * vec[1:]
    Tv[1:] += off[:, None] * vec[:-1]
    lam = np.einsum("kj,kj->j", vec, Tv) / np.einsum("kj,kj->j", vec, vec)
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    vec = vec[:, order]
    chi = (vec / np.sqrt(hz * np.sum(vec * vec, axis=0))).T
    first = chi[:, 0].copy()
    zero = first == 0.0
    if np.any(zero):
        idx = np.argmax(chi != 0.0, axis=1)
        first[zero] = chi[np.arange(J), idx][zero]
    chi = chi * np.where(first > 0, 1.0, -1.0)[:, None]
    return lam, chi


def solve_slices(W3, J: int, grid: Grid) -> SubbandSpectrum:
    """Eigensolve every lateral slice of a volume potential.

    W3: (ny1, ny2, nz-1) interior-node samples.  Slices are independent;
    results are stored by slice index, so the loop order never matters.
    """
    W3 = np.asarray(W3, dtype=float)
    ny1, ny2 = grid.lateral_shape
    if W3.shape != (ny1, ny2, grid.nz - 1):
        raise ValueError("slice potential has wrong shape")
    lam = np.empty((ny1, ny2, J))
    chi = np.empty((ny1, ny2, J, grid.nz - 1))
    for i in range(ny1):
        for k in range(ny2):
            lam[i, k], chi[i, k] = solve_slice(W3[i, k], J, grid)
    return SubbandSpectrum(lam=lam, chi=chi)


def eigenvalue_stability_gap(W1, W2, J: int, grid: Grid) -> np.ndarray:
    """Per-band eigenvalue shifts |lam_j[W1] - lam_j[W2]| for two slice potentials.

    By the min-max principle the shifts are bounded by max |W1 - W2|; the
    caller asserts that.
    """
    lam1, _ = solve_slice(W1, J, grid)
    lam2, _ = solve_slice(W2, J, grid)
    return np.abs(lam1 - lam2)
