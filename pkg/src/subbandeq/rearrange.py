"""Band-index rearrangements of general admissible pairs.

An admissible pair holds J kinetic occupations f_j(y, |v|) sampled on a radial
speed grid together with per-slice orthonormal z-modes chi_j and their
Rayleigh energies for a supplied slice potential.  Two slice-wise
permutations of the band index matter:

* sorting bands so the confined kinetic energies |d chi_j/dz|^2 do not
  decrease in j (permutes occupations, modes and energies together), and
* sorting the occupations at every (y, speed) point so f_j does not
  increase in j (the permutation depends on the velocity, so only f moves;
  functionals that pair f_j with mode-dependent weights stay invariant
  when evaluated jointly through the permutation).

Both leave mass, entropy, total density and free energy unchanged, band
sums being permutations of the same summands.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import Field3D, Grid
from .occupancy import OccupancyModel
from .poisson import dirichlet_energy, solve_poisson
from .schrodinger import profile_kinetic_energy


@dataclass(frozen=True)
class RadialGrid:
    """Speed samples r_k with weights turning sums into plane integrals.

    weights[k] already contain the 2 pi r Jacobian and the trapezoid rule,
    so  int_{R^2} g(|v|) dv  ~=  sum_k weights[k] * g(r[k]).
    """

    r: np.ndarray
    weights: np.ndarray

    @staticmethod
    def uniform(v_max: float, nv: int) -> "RadialGrid":
        if not (v_max > 0 and nv >= 2):
            raise ValueError("need positive v_max and at least 2 intervals")
        r = np.linspace(0.0, v_max, nv + 1)
        trap = np.full(nv + 1, v_max / nv)
        trap[0] = trap[-1] = 0.5 * v_max / nv
        return RadialGrid(r=r, weights=2.0 * np.pi * r * trap)

    @property
    def n_nodes(self) -> int:
        return self.r.shape[0]


@dataclass(frozen=True)
class AdmissiblePair:
    """General admissible pair with radial velocity sampling.

    f:   (ny1, ny2, J, nv) occupations in [0, 1]
    chi: (ny1, ny2, J, nz-1) interior z-samples, orthonormal per slice
    h:   (ny1, ny2, J) Rayleigh energies of chi for the supplied potential
    """

    f: np.ndarray
    chi: np.ndarray
    h: np.ndarray
    vgrid: RadialGrid

    def __post_init__(self):
        if self.f.ndim != 4 or self.chi.ndim != 4 or self.h.ndim != 3:
            raise ValueError("admissible pair arrays have wrong rank")
        if self.f.shape[:3] != self.chi.shape[:3] or self.f.shape[:3] != self.h.shape:
            raise ValueError("admissible pair arrays disagree on (ny1, ny2, J)")
        if self.f.shape[3] != self.vgrid.n_nodes:
            raise ValueError("occupations do not match the radial grid")
        if np.min(self.f) < 0.0 or np.max(self.f) > 1.0:
            raise ValueError("occupations must lie in [0, 1]")

    @property
    def J(self) -> int:
        return self.f.shape[2]

    def validate_orthonormal(self, grid: Grid, tol: float = 1e-8) -> None:
        gram = grid.hz * np.einsum("abjz,abkz->abjk", self.chi, self.chi)
        if np.max(np.abs(gram - np.eye(self.J))) > tol:
            raise ValueError("modes are not orthonormal per slice")


def rayleigh_energies(chi: np.ndarray, W, grid: Grid) -> np.ndarray:
    """<(-(1/2) d^2/dz^2 + W) chi_j, chi_j> per slice and band.

    W: slice potential on interior z-nodes, shape (ny1, ny2, nz-1) or (nz-1,).
    """
    W = np.asarray(W, dtype=float)
    kin = 0.5 * profile_kinetic_energy(chi, grid)
    if W.ndim == 1:
        pot = grid.hz * np.einsum("z,abjz->abj", W, chi**2)
    else:
        pot = grid.hz * np.einsum("abz,abjz->abj", W, chi**2)
    return kin + pot


# ---- functionals of a pair ---------------------------------------------------


def band_densities(pair: AdmissiblePair) -> np.ndarray:
    """rho_{f_j}(y) = int f_j dv on the radial grid, shape (ny1, ny2, J)."""
    return np.einsum("abjv,v->abj", pair.f, pair.vgrid.weights)


def pair_mass(pair: AdmissiblePair, grid: Grid) -> float:
    return float(np.sum(band_densities(pair)) * grid.hy1 * grid.hy2)


def pair_casimir(pair: AdmissiblePair, grid: Grid, model: OccupancyModel) -> float:
    """sum_j int beta(f_j) dy dv (without the temperature factor)."""
    bsum = np.einsum("abjv,v->", model.beta(pair.f), pair.vgrid.weights)
    return float(bsum * grid.hy1 * grid.hy2)


def pair_density(pair: AdmissiblePair, grid: Grid) -> Field3D:
    """Total density rho(x) = sum_j rho_{f_j}(y) chi_j(x)^2 on closed z-nodes."""
    rho_j = band_densities(pair)
    ny1, ny2, J, ni = pair.chi.shape
    chi2 = np.zeros((ny1, ny2, J, ni + 2))
    chi2[..., 1:-1] = pair.chi**2
    return Field3D(np.einsum("abj,abjz->abz", rho_j, chi2))


def velocity_kinetic(pair: AdmissiblePair, grid: Grid) -> float:
    """sum_j int (|v|^2/2) f_j dy dv."""
    u = 0.5 * pair.vgrid.r**2
    return float(
        np.einsum("abjv,v->", pair.f, pair.vgrid.weights * u) * grid.hy1 * grid.hy2
    )


def confined_kinetic(pair: AdmissiblePair, grid: Grid) -> float:
    """(1/2) sum_j int |d chi_j/dz|^2 rho_{f_j} dy."""
    k = profile_kinetic_energy(pair.chi, grid)
    return float(0.5 * np.sum(k * band_densities(pair)) * grid.hy1 * grid.hy2)


def pair_free_energy(
    pair: AdmissiblePair,
    grid: Grid,
    model: OccupancyModel,
    vext: Field3D | None = None,
    poisson_tol: float = 1e-11,
) -> tuple[float, Field3D]:
    """Free energy of a pair and the potential its density induces.

    Kinetic + confined kinetic + external pairing + field + T * Casimir,
    all on the pair's own quadratures.
    """
    rho = pair_density(pair, grid)
    U = solve_poisson(rho, grid, tol=poisson_tol)
    total = (
        velocity_kinetic(pair, grid)
        + confined_kinetic(pair, grid)
        + 0.5 * dirichlet_energy(U, grid)
        + model.T * pair_casimir(pair, grid, model)
    )
    if vext is not None:
        ny1, ny2, J, ni = pair.chi.shape
        chi2 = np.zeros((ny1, ny2, J, ni + 2))
        chi2[..., 1:-1] = pair.chi**2
        vw = vext.values * grid.z_weights()[None, None, :]
        vchi = np.einsum("abz,abjz->abj", vw, chi2)
        total += float(np.sum(vchi * band_densities(pair)) * grid.hy1 * grid.hy2)
    return float(total), U


# ---- the two rearrangements --------------------------------------------------


def rearrange_energy_increasing(pair: AdmissiblePair, grid: Grid) -> AdmissiblePair:
    """Per slice, permute bands so |d chi_j/dz|^2 is nondecreasing in j.

    Occupations, modes and Rayleigh energies move together.  Stable sort
    with index tie-break, hence deterministic under equal energies.
    """
    k = profile_kinetic_energy(pair.chi, grid)
    order = np.argsort(k, axis=2, kind="stable")
    f = np.take_along_axis(pair.f, order[..., None], axis=2)
    chi = np.take_along_axis(pair.chi, order[..., None], axis=2)
    h = np.take_along_axis(pair.h, order, axis=2)
    return replace(pair, f=f, chi=chi, h=h)


def occupation_sort_permutation(pair: AdmissiblePair) -> np.ndarray:
    """Band permutation making f_j nonincreasing at each (y, speed) point."""
    return np.argsort(-pair.f, axis=2, kind="stable")


def rearrange_occupation_decreasing(pair: AdmissiblePair) -> AdmissiblePair:
    """Sort the J occupations nonincreasing at every (y, speed) point.

    The permutation varies with the speed, so only f is reordered; modes
    and energies keep their band labels.
    """
    order = occupation_sort_permutation(pair)
    f = np.take_along_axis(pair.f, order, axis=2)
    return replace(pair, f=f)


def is_energy_sorted(pair: AdmissiblePair, grid: Grid) -> bool:
    k = profile_kinetic_energy(pair.chi, grid)
    return bool(np.all(np.diff(k, axis=2) >= 0.0))


def is_occupation_sorted(pair: AdmissiblePair) -> bool:
    return bool(np.all(np.diff(pair.f, axis=2) <= 0.0))


def joint_density_through(pair: AdmissiblePair, order: np.ndarray, grid: Grid) -> Field3D:
    """Total density when f and the chi^2 weights are permuted jointly.

    order has the shape of f and gives, at each (y, speed) point, the band
    whose (occupation, mode) pair lands at slot j.  Used to verify that a
    speed-dependent rearrangement leaves the density untouched.
    """
    f_perm = np.take_along_axis(pair.f, order, axis=2)
    ny1, ny2, J, ni = pair.chi.shape
    chi2 = np.zeros((ny1, ny2, J, ni + 2))
    chi2[..., 1:-1] = pair.chi**2
    # sum over speed first: the chi^2 factor follows the same permutation
    rho = np.zeros((ny1, ny2, ni + 2))
    w = pair.vgrid.weights
    for v in range(pair.vgrid.n_nodes):
        chi2_perm = np.take_along_axis(chi2, order[..., v][..., None], axis=2)
        rho += w[v] * np.einsum("abj,abjz->abz", f_perm[..., v], chi2_perm)
    return Field3D(rho)
