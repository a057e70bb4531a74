"""Executable checks of the structural inequalities on states and test pairs.

Assertions only use constants the theory states explicitly (3/pi^2, 6/pi^2,
4/M, 1/2, 1 + mu); bounds with unspecified constants are monitored as
ratio families instead of asserted.  All randomized inputs come from a
seeded generator, so every report is reproducible.

The coercivity and stability-gap checks compare a perturbed pair against a
base pair that is re-converged under the same radial-grid quadrature used
for the perturbation.  Mixing the exact profile integrals of the solver
with grid sums would inject quadrature mismatch far above the asserted
slack; with one consistent quadrature the inequalities hold to solver
tolerance, which is what gets verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from dataclasses import replace as dc_replace

import numpy as np

from .equilibrium import (
    EquilibriumState,
    SolverConfig,
    external_potential,
    solve_equilibrium,
)
from .grid import Field3D, Grid, l2_norm_volume
from .occupancy import OccupancyModel
from .poisson import dirichlet_energy, solve_poisson
from .rearrange import (
    RadialGrid,
    AdmissiblePair,
    band_densities,
    confined_kinetic,
    is_energy_sorted,
    is_occupation_sorted,
    joint_density_through,
    occupation_sort_permutation,
    pair_casimir,
    pair_density,
    pair_free_energy,
    pair_mass,
    rayleigh_energies,
    rearrange_energy_increasing,
    rearrange_occupation_decreasing,
    velocity_kinetic,
)
from .schrodinger import profile_kinetic_energy, solve_slices


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    lhs: float
    rhs: float
    ratio: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "details": self.details,
        }


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0 and rhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    return lhs / rhs


# ---- seeded pair generation ---------------------------------------------------


def _sine_modes(J: int, grid: Grid) -> np.ndarray:
    """First J discrete sine modes; exactly orthonormal on the interior nodes."""
    z = grid.z_nodes()[1:-1]
    j = np.arange(1, J + 1)[:, None]
    return math.sqrt(2.0) * np.sin(np.pi * j * z[None, :])


def random_test_pair(
    grid: Grid,
    J: int,
    vgrid: RadialGrid,
    seed: int,
    W=None,
) -> AdmissiblePair:
    """Admissible pair with randomly mixed modes and random occupations.

    Modes are per-slice orthogonal mixes of sine modes (orthonormality is
    inherited exactly); occupations are smooth seeded bumps clipped to
    [0, 1] that taper to zero at the edge of the speed grid.
    """
    rng = np.random.default_rng(seed)
    ny1, ny2 = grid.lateral_shape
    base = _sine_modes(J, grid)
    chi = np.empty((ny1, ny2, J, grid.nz - 1))
    for i in range(ny1):
        for k in range(ny2):
            q, _ = np.linalg.qr(rng.standard_normal((J, J)))
            chi[i, k] = q @ base
    r = vgrid.r
    taper = np.clip(1.0 - (r / r[-1]) ** 2, 0.0, 1.0)
    y1 = grid.y1_nodes()[:, None] / grid.L1
    y2 = grid.y2_nodes()[None, :] / grid.L2
    f = np.empty((ny1, ny2, J, vgrid.n_nodes))
    for j in range(J):
        amp = rng.uniform(0.2, 1.0) / (1 + j)
        r0 = rng.uniform(0.0, 0.6 * r[-1])
        width = rng.uniform(0.2, 0.6) * r[-1]
        lateral = np.sin(np.pi * y1 * rng.integers(1, 3)) * np.sin(
            np.pi * y2 * rng.integers(1, 3)
        )
        radial = np.exp(-((r - r0) ** 2) / (2 * width**2)) * taper
        f[:, :, j, :] = amp * np.abs(lateral)[..., None] * radial[None, None, :]
    f = np.clip(f, 0.0, 1.0)
    if W is None:
        W = np.zeros(grid.nz - 1)
    h = rayleigh_energies(chi, W, grid)
    return AdmissiblePair(f=f, chi=chi, h=h, vgrid=vgrid)


def speed_grid_for(mu: float, lam_min: float, nv: int = 128) -> RadialGrid:
    """Radial grid covering the occupied disk with headroom."""
    r_star = math.sqrt(2.0 * max(mu - lam_min, 0.0))
    return RadialGrid.uniform(max(1.25 * r_star, 1.0) + 0.25, nv)


# ---- weighted l1 bound ---------------------------------------------------------


def check_weighted_l1(
    pair: AdmissiblePair,
    grid: Grid,
    model: OccupancyModel | None = None,
    slack: float = 1e-6,
) -> CheckReport:
    """Energy-sorted pairs: sum_j j^2 ||f_j|| <= (3/pi^2) sum int |dchi|^2 rho
    <= (6/pi^2) F.  Errors out if the pair is not energy-sorted."""
    if not is_energy_sorted(pair, grid):
        raise ValueError("pair is not sorted by confined kinetic energy")
    if model is None:
        model = OccupancyModel(T=0.0)
    area_w = grid.hy1 * grid.hy2
    rho_j = band_densities(pair)
    band_l1 = np.sum(rho_j, axis=(0, 1)) * area_w
    j2 = np.arange(1, pair.J + 1) ** 2
    lhs = float(np.sum(j2 * band_l1))
    k = profile_kinetic_energy(pair.chi, grid)
    mid = float(3.0 / math.pi**2 * np.sum(k * rho_j) * area_w)
    F, _ = pair_free_energy(pair, grid, model)
    rhs = float(6.0 / math.pi**2 * F)
    ok = lhs <= mid * (1.0 + slack) and mid <= rhs * (1.0 + slack)
    return CheckReport(
        name="weighted_l1",
        passed=ok,
        lhs=lhs,
        rhs=rhs,
        ratio=_ratio(lhs, rhs),
        details={"middle": mid, "free_energy": F},
    )


# ---- kinetic interpolation (monitor) -------------------------------------------


def check_kinetic_interpolation(
    pair: AdmissiblePair, s: float, grid: Grid, holder_slack: float = 1e-9
) -> CheckReport:
    """Ratio monitor for the density interpolation bound at exponent s in [1, 3).

    The constant is unspecified, so only finiteness is asserted here; the
    explicit Holder step in the band index is asserted with its exact
    constant.  At s = 1 the bound collapses to ||rho||_1 = mass, asserted.
    """
    if not 1.0 <= s < 3.0:
        raise ValueError("exponent must lie in [1, 3)")
    area_w = grid.hy1 * grid.hy2
    q = (5.0 * s - 3.0) / (3.0 * s - 1.0)
    rho = pair_density(pair, grid).values
    lhs = float(np.sum(rho**q * grid.node_volumes()) ** (1.0 / q))
    fs = np.einsum("abjv,v->j", pair.f**s, pair.vgrid.weights) * area_w
    fs_norms = fs ** (1.0 / s)
    u2 = pair.vgrid.r**2
    vel2 = float(np.einsum("abjv,v->", pair.f, pair.vgrid.weights * u2) * area_w)
    rho_j = band_densities(pair)
    k = profile_kinetic_energy(pair.chi, grid)
    kin_mix = float(np.sum(k * rho_j) * area_w)
    e1 = 2.0 * s / (5.0 * s - 3.0)
    e2 = 2.0 * (s - 1.0) / (5.0 * s - 3.0)
    e3 = (s - 1.0) / (5.0 * s - 3.0)

    def powz(x, e):
        return 1.0 if e == 0.0 else x**e

    rhs = powz(float(np.sum(fs_norms)), e1) * powz(vel2, e2) * powz(kin_mix, e3)
    ratio = _ratio(lhs, rhs)
    passed = math.isfinite(ratio)
    details: dict = {}
    if s == 1.0:
        mass = pair_mass(pair, grid)
        details["mass_identity_error"] = abs(lhs - mass)
        passed = passed and abs(lhs - mass) <= 1e-12 * max(1.0, mass)
    else:
        j_arr = np.arange(1, pair.J + 1, dtype=float)
        band_l1 = np.sum(rho_j, axis=(0, 1)) * area_w
        holder_lhs = float(np.sum(fs_norms))
        holder_rhs = float(
            np.sum(j_arr ** (-2.0 / (s - 1.0))) ** ((s - 1.0) / s)
            * np.sum(j_arr**2 * band_l1) ** (1.0 / s)
        )
        details["holder_lhs"] = holder_lhs
        details["holder_rhs"] = holder_rhs
        passed = passed and holder_lhs <= holder_rhs * (1.0 + holder_slack)
    return CheckReport(
        name=f"kinetic_interpolation_s{s:g}",
        passed=passed,
        lhs=lhs,
        rhs=float(rhs),
        ratio=ratio,
        details=details,
    )


# ---- grid-consistent base for coercivity and stability --------------------------


@dataclass(frozen=True)
class GridBase:
    """Equilibrium structure re-converged under radial-grid quadrature.

    pair carries the ansatz occupations sampled on the speed grid; U is
    the potential of the pair's own (grid-quadrature) density; lam are the
    eigenvalues of the matching slice Hamiltonians.
    """

    pair: AdmissiblePair
    U: Field3D
    lam: np.ndarray
    mu: float
    F: float
    mass: float
    model: OccupancyModel
    vext: Field3D
    grid: Grid


def _base_occupations(
    model: OccupancyModel, mu: float, lam: np.ndarray, vgrid: RadialGrid
) -> np.ndarray:
    """Ansatz occupations on the speed grid, shaped (ny1, ny2, J, nv).

    At T > 0 these are pointwise values of the occupation law.  At T = 0
    the law is an indicator, whose raw samples make the self-consistency
    map discontinuous in the potential; instead each node carries the
    average of the indicator over its energy cell, which is the same
    admissible, band-monotone pair but depends continuously (piecewise
    linearly) on the spectrum.
    """
    u = 0.5 * vgrid.r**2
    a = mu - lam[..., None]
    if model.T > 0.0:
        return model.occupancy(a - u[None, None, None, :])
    lo = np.empty_like(u)
    hi = np.empty_like(u)
    lo[0], lo[1:] = u[0], 0.5 * (u[:-1] + u[1:])
    hi[:-1], hi[-1] = lo[1:], u[-1]
    width = np.maximum(hi - lo, 1e-300)
    return np.clip((a - lo[None, None, None, :]) / width, 0.0, 1.0)


def _solve_mu_on_grid(
    M: float,
    lam: np.ndarray,
    vgrid: RadialGrid,
    grid: Grid,
    model: OccupancyModel,
    rel_tol: float = 1e-10,
) -> float:
    """Invert the speed-grid mass function (continuous, nondecreasing)."""

    def mass(mu):
        f = _base_occupations(model, mu, lam, vgrid)
        return float(
            np.einsum("abjv,v->", f, vgrid.weights) * grid.hy1 * grid.hy2
        )

    lo = float(np.min(lam[:, :, 0]))
    offset = 1.0
    for _ in range(200):
        if mass(lo + offset) >= M:
            break
        offset *= 2.0
    else:
        raise RuntimeError("failed to bracket mu on the speed grid")
    hi = lo + offset
    tol = max(rel_tol * M, 64.0 * np.finfo(float).eps * max(1.0, abs(hi)))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = mass(mid)
        if abs(m - M) <= tol:
            return mid
        if m < M:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def grid_consistent_base(
    state: EquilibriumState,
    vext: Field3D,
    grid: Grid,
    model: OccupancyModel,
    M_target: float | None = None,
    vgrid: RadialGrid | None = None,
    fp_tol: float = 1e-9,
    theta: float = 0.5,
    max_iter: int = 400,
) -> GridBase:
    """Re-converge a solved state with all velocity integrals on a speed grid.

    Iterates eigensolve -> grid-mass chemical potential -> occupations ->
    grid density -> Poisson until the potential is a fixed point of that
    loop, so the discrete coercivity chain closes to solver tolerance.
    """
    if M_target is None:
        M_target = float(np.sum(state.rho_j) * grid.hy1 * grid.hy2)
    J = state.spectrum.J
    if vgrid is None:
        vgrid = speed_grid_for(state.mu, float(np.min(state.spectrum.lam[:, :, 0])))
    U = state.U.values.copy()
    for _ in range(max_iter):
        spec = solve_slices((U + vext.values)[:, :, 1:-1], J, grid)
        mu = _solve_mu_on_grid(M_target, spec.lam, vgrid, grid, model)
        f = _base_occupations(model, mu, spec.lam, vgrid)
        pair = AdmissiblePair(f=f, chi=spec.chi, h=spec.lam.copy(), vgrid=vgrid)
        rho = pair_density(pair, grid)
        U_new = solve_poisson(rho, grid, tol=1e-12).values
        res = l2_norm_volume(U_new - U, grid) / (1.0 + l2_norm_volume(U, grid))
        if res <= fp_tol:
            break
        U = (1.0 - theta) * U + theta * U_new
    else:
        raise RuntimeError(
            f"grid-consistent base did not re-converge to {fp_tol:g} "
            f"in {max_iter} iterations"
        )
    U_b = solve_poisson(pair_density(pair, grid), grid, tol=1e-12)
    F, _ = pair_free_energy(pair, grid, model, vext=vext, poisson_tol=1e-12)
    return GridBase(
        pair=pair,
        U=U_b,
        lam=spec.lam,
        mu=mu,
        F=F,
        mass=pair_mass(pair, grid),
        model=model,
        vext=vext,
        grid=grid,
    )


# ---- perturbation families ------------------------------------------------------


def occupation_bump(base: GridBase, eps: float, seed: int) -> AdmissiblePair:
    """Clipped random occupation perturbation, sorted nonincreasing in j.

    At T = 0 the bump vanishes at speed nodes where any band of the base
    holds a fractional cell-averaged occupation, so the multiplier term of
    the stability chain keeps its exact sign structure node by node.
    """
    rng = np.random.default_rng(seed)
    grid, vgrid = base.grid, base.pair.vgrid
    r = vgrid.r
    y1 = grid.y1_nodes()[:, None] / grid.L1
    y2 = grid.y2_nodes()[None, :] / grid.L2
    g = np.zeros_like(base.pair.f)
    for j in range(base.pair.J):
        r0 = rng.uniform(0.1, 0.8) * r[-1]
        width = rng.uniform(0.1, 0.3) * r[-1]
        radial = np.exp(-((r - r0) ** 2) / (2 * width**2))
        m1, m2 = rng.integers(1, 4), rng.integers(1, 4)
        lateral = np.sin(m1 * np.pi * y1) * np.sin(m2 * np.pi * y2)
        g[:, :, j, :] = rng.uniform(-1.0, 1.0) * lateral[..., None] * radial
    if base.model.T == 0.0:
        f0 = base.pair.f
        fractional = np.any((f0 > 0.0) & (f0 < 1.0), axis=2, keepdims=True)
        g = np.where(fractional, 0.0, g)
    f = np.clip(base.pair.f + eps * g, 0.0, 1.0)
    pert = AdmissiblePair(f=f, chi=base.pair.chi, h=base.pair.h, vgrid=vgrid)
    return rearrange_occupation_decreasing(pert)


def mode_rotation(base: GridBase, angle: float, bands: tuple[int, int] = (0, 1)) -> AdmissiblePair:
    """Rotate two modes inside their span; occupations unchanged."""
    j0, j1 = bands
    c, s = math.cos(angle), math.sin(angle)
    chi = base.pair.chi.copy()
    a, b = chi[:, :, j0, :].copy(), chi[:, :, j1, :].copy()
    chi[:, :, j0, :] = c * a + s * b
    chi[:, :, j1, :] = -s * a + c * b
    W = (base.U.values + base.vext.values)[:, :, 1:-1]
    h = rayleigh_energies(chi, W, base.grid)
    return AdmissiblePair(f=base.pair.f.copy(), chi=chi, h=h, vgrid=base.pair.vgrid)


# ---- coercivity and stability ----------------------------------------------------


def _entropy_weight(base: GridBase) -> np.ndarray:
    """w(y, v, j) = |v|^2/2 + lambda_j(y) + T beta'(f_j(y, v)) for the base."""
    u = 0.5 * base.pair.vgrid.r**2
    slope = base.model.T * base.model.beta_prime(base.pair.f)
    return u[None, None, None, :] + base.lam[..., None] + slope


def check_coercivity(base: GridBase, pert: AdmissiblePair) -> CheckReport:
    """Free-energy excess dominates the field gap plus the multiplier term.

    pert must be occupation-sorted (use rearrange_occupation_decreasing);
    slack is 1e-6 * (1 + |LHS|) absolute.
    """
    if not is_occupation_sorted(pert):
        raise ValueError("perturbed pair must be occupation-sorted")
    pert.validate_orthonormal(base.grid)
    grid, model = base.grid, base.model
    F_pert, U_pert = pair_free_energy(pert, grid, model, vext=base.vext, poisson_tol=1e-12)
    lhs = F_pert - base.F
    w = _entropy_weight(base)
    wsum = np.einsum(
        "abjv,abjv,v->", w, pert.f - base.pair.f, base.pair.vgrid.weights
    ) * grid.hy1 * grid.hy2
    gap = 0.5 * dirichlet_energy(U_pert.values - base.U.values, grid)
    rhs = gap + float(wsum)
    tol = 1e-6 * (1.0 + abs(lhs))
    return CheckReport(
        name="coercivity",
        passed=lhs >= rhs - tol,
        lhs=float(lhs),
        rhs=float(rhs),
        ratio=_ratio(rhs, lhs),
        details={"field_gap": float(gap), "multiplier_term": float(wsum)},
    )


def check_stability_gap(base: GridBase, pert: AdmissiblePair) -> CheckReport:
    """(1 + mu) * delta dominates half the squared field gradient gap,
    with delta = |F(pert) - F| + mu |M(pert) - M|."""
    if not is_occupation_sorted(pert):
        raise ValueError("perturbed pair must be occupation-sorted")
    grid, model = base.grid, base.model
    F_pert, U_pert = pair_free_energy(pert, grid, model, vext=base.vext, poisson_tol=1e-12)
    delta = abs(F_pert - base.F) + base.mu * abs(pair_mass(pert, grid) - base.mass)
    gap = 0.5 * dirichlet_energy(U_pert.values - base.U.values, grid)
    rhs = (1.0 + base.mu) * delta
    return CheckReport(
        name="stability_gap",
        passed=gap <= rhs * (1.0 + 1e-6),
        lhs=float(gap),
        rhs=float(rhs),
        ratio=_ratio(gap, rhs),
        details={"delta": float(delta)},
    )


# ---- state-level checks -----------------------------------------------------------


def check_mu_bound(
    state: EquilibriumState, model: OccupancyModel, M: float
) -> CheckReport:
    """0 < mu <= (4/M) (F + T beta'(1) M), with 1e-9 relative slack."""
    F = state.energy.total_direct
    bound = 4.0 / M * (F + model.T * float(model.beta_prime(1.0)) * M)
    ok = 0.0 < state.mu <= bound * (1.0 + 1e-9)
    return CheckReport(
        name="mu_bound",
        passed=ok,
        lhs=state.mu,
        rhs=bound,
        ratio=_ratio(state.mu, bound),
        details={"free_energy": F},
    )


def check_subband_structure(state: EquilibriumState) -> CheckReport:
    """Active-band cap sqrt(3 mu)/pi + 1 and strict spectral ordering."""
    gaps = state.mu - state.spectrum.lam
    j_active = int(np.sum(np.max(gaps, axis=(0, 1)) > 0.0))
    bound = math.sqrt(3.0 * max(state.mu, 0.0)) / math.pi + 1.0
    min_gap = float(np.min(np.diff(state.spectrum.lam, axis=2)))
    ok = j_active < bound and min_gap > 1e-10
    return CheckReport(
        name="subband_structure",
        passed=ok,
        lhs=float(j_active),
        rhs=bound,
        ratio=_ratio(j_active, bound),
        details={"min_band_gap": min_gap},
    )


def check_energy_agreement(state: EquilibriumState) -> CheckReport:
    """The band-resolved and direct free-energy routes agree on converged states."""
    primal = state.energy.total_primal
    direct = state.energy.total_direct
    err = abs(primal - direct)
    tol = 1e-6 * (1.0 + abs(direct))
    return CheckReport(
        name="energy_agreement",
        passed=err <= tol,
        lhs=primal,
        rhs=direct,
        ratio=_ratio(err, tol),
        details={"difference": err},
    )


def check_uniqueness(cfg: SolverConfig, n_seeds: int = 3) -> CheckReport:
    """Pairwise gradient agreement of solves started from different potentials."""
    configs = [dc_replace(cfg, init_kind="zero", init_potential=None)]
    for s in range(1, n_seeds):
        configs.append(dc_replace(cfg, init_kind="random", init_seed=s))
    fields = []
    for c in configs:
        state, trace = solve_equilibrium(c)
        if not trace.converged:
            raise RuntimeError("a uniqueness run failed to converge")
        fields.append(state.U.values)
    worst = 0.0
    grads = [math.sqrt(dirichlet_energy(f, cfg.grid)) for f in fields]
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            d = math.sqrt(dirichlet_energy(fields[a] - fields[b], cfg.grid))
            rel = d / (1.0 + grads[a])
            worst = max(worst, rel)
    return CheckReport(
        name="uniqueness",
        passed=worst <= 1e-6,
        lhs=worst,
        rhs=1e-6,
        ratio=_ratio(worst, 1e-6),
        details={"n_initializations": n_seeds},
    )


def check_rearrangement_invariance(
    pair: AdmissiblePair, grid: Grid, model: OccupancyModel, tol: float = 1e-12
) -> CheckReport:
    """Mass, Casimir, density and free energy unchanged by both rearrangements.

    The energy rearrangement is speed-independent, so its invariants are
    evaluated directly on the rearranged pair.  The occupation sort
    permutes bands per speed point, so the density and energy invariants
    are evaluated jointly through the permutation, pairing each occupation
    with the mode it traveled with.
    """
    scale = max(1.0, pair_mass(pair, grid))
    errs = {}
    up = rearrange_energy_increasing(pair, grid)
    errs["mass_up"] = abs(pair_mass(up, grid) - pair_mass(pair, grid))
    errs["casimir_up"] = abs(pair_casimir(up, grid, model) - pair_casimir(pair, grid, model))
    errs["density_up"] = float(
        np.max(np.abs(pair_density(up, grid).values - pair_density(pair, grid).values))
    )

    def energy_terms(p):
        return (
            velocity_kinetic(p, grid)
            + confined_kinetic(p, grid)
            + model.T * pair_casimir(p, grid, model)
        )

    errs["energy_up"] = abs(energy_terms(up) - energy_terms(pair))
    down = rearrange_occupation_decreasing(pair)
    errs["mass_down"] = abs(pair_mass(down, grid) - pair_mass(pair, grid))
    errs["casimir_down"] = abs(
        pair_casimir(down, grid, model) - pair_casimir(pair, grid, model)
    )
    order = occupation_sort_permutation(pair)
    joint = joint_density_through(pair, order, grid).values
    errs["density_down_joint"] = float(
        np.max(np.abs(joint - pair_density(pair, grid).values))
    )
    k = profile_kinetic_energy(pair.chi, grid)
    k_over_bands = np.broadcast_to(k[..., None], pair.f.shape)
    f_perm = np.take_along_axis(pair.f, order, axis=2)
    k_perm = np.take_along_axis(k_over_bands, order, axis=2)
    qkin_joint = 0.5 * np.einsum("abjv,abjv,v->", k_perm, f_perm, pair.vgrid.weights)
    qkin_plain = 0.5 * np.einsum("abjv,abjv,v->", k_over_bands, pair.f, pair.vgrid.weights)
    errs["energy_down_joint"] = abs(qkin_joint - qkin_plain) * grid.hy1 * grid.hy2
    idem_up = rearrange_energy_increasing(up, grid)
    idem_down = rearrange_occupation_decreasing(down)
    errs["idempotent_up"] = float(np.max(np.abs(idem_up.chi - up.chi)))
    errs["idempotent_down"] = float(np.max(np.abs(idem_down.f - down.f)))
    worst = max(errs.values())
    return CheckReport(
        name="rearrangement_invariance",
        passed=worst <= tol * scale,
        lhs=worst,
        rhs=tol * scale,
        ratio=_ratio(worst, tol * scale),
        details=errs,
    )


# ---- orchestration -----------------------------------------------------------------


def run_verification(
    cfg: SolverConfig,
    seed: int = 42,
    n_pairs: int = 10,
    n_perturbations: int = 12,
    include_unsorted_probe: bool = False,
) -> list[CheckReport]:
    """Solve, then run every check; returns one report per check family."""
    state, trace = solve_equilibrium(cfg)
    if not trace.converged:
        raise RuntimeError("equilibrium solve did not converge; cannot verify")
    grid, model = cfg.grid, cfg.model
    vext = external_potential(cfg)
    reports = [
        check_energy_agreement(state),
        check_subband_structure(state),
        check_mu_bound(state, model, cfg.M_target),
    ]

    vgrid = RadialGrid.uniform(3.0, 96)
    wl_reports = []
    ki_reports = []
    ri_reports = []
    for i in range(n_pairs):
        pair = random_test_pair(grid, 4, vgrid, seed + i)
        sorted_pair = rearrange_energy_increasing(pair, grid)
        wl_reports.append(check_weighted_l1(sorted_pair, grid, model))
        ki_reports.append(check_kinetic_interpolation(pair, 2.0, grid))
        ri_reports.append(check_rearrangement_invariance(pair, grid, model))
    reports.append(_aggregate("weighted_l1", wl_reports))
    ratios = [r.ratio for r in ki_reports if r.ratio > 0.0]
    spread = max(ratios) / min(ratios) if ratios else 0.0
    reports.append(
        CheckReport(
            name="kinetic_interpolation_family",
            passed=all(r.passed for r in ki_reports) and spread < 1e3,
            lhs=max(ratios) if ratios else 0.0,
            rhs=min(ratios) if ratios else 0.0,
            ratio=spread,
            details={"n_pairs": len(ki_reports), "exponent": 2.0},
        )
    )
    reports.append(_aggregate("rearrangement_invariance", ri_reports))

    if include_unsorted_probe:
        # Deliberately violates the sortedness precondition; must raise.
        probe = rearrange_energy_increasing(
            random_test_pair(grid, 4, vgrid, seed + 999), grid
        )
        probe = dc_replace(probe, chi=probe.chi[:, :, ::-1, :], f=probe.f[:, :, ::-1, :])
        check_weighted_l1(probe, grid, model)

    base = grid_consistent_base(state, vext, grid, model)
    co_reports = []
    st_reports = []
    for i in range(n_perturbations):
        kind = i % 3
        if kind == 0:
            pert = occupation_bump(base, 1e-1, seed + 100 + i)
        elif kind == 1:
            pert = occupation_bump(base, 1e-2, seed + 100 + i)
        else:
            pert = mode_rotation(base, 0.05 + 0.01 * i)
        co_reports.append(check_coercivity(base, pert))
        st_reports.append(check_stability_gap(base, pert))
    reports.append(_aggregate("coercivity", co_reports))
    reports.append(_aggregate("stability_gap", st_reports))

    reports.append(check_uniqueness(cfg, n_seeds=3))
    return reports


def _aggregate(name: str, reports: list[CheckReport]) -> CheckReport:
    worst = max(reports, key=lambda r: r.ratio if math.isfinite(r.ratio) else -1.0)
    return CheckReport(
        name=name,
        passed=all(r.passed for r in reports),
        lhs=worst.lhs,
        rhs=worst.rhs,
        ratio=worst.ratio,
        details={"n_cases": len(reports), "worst_case_details": worst.details},
    )
