import numpy as np
import pytest

from subbandeq.grid import Grid
from subbandeq.occupancy import (
    OccupancyModel,
    profiles_by_quadrature,
    solve_mu,
    subband_mass,
)
from subbandeq.schrodinger import SubbandSpectrum


def flat_spectrum(grid, levels):
    """Constant-in-y synthetic spectrum with unit sine modes (unused by mass)."""
    ny1, ny2 = grid.lateral_shape
    lam = np.empty((ny1, ny2, len(levels)))
    lam[:] = np.asarray(levels)
    z = grid.z_nodes()[1:-1]
    chi = np.empty((ny1, ny2, len(levels), grid.nz - 1))
    for j in range(len(levels)):
        chi[:, :, j, :] = np.sqrt(2.0) * np.sin((j + 1) * np.pi * z)
    return SubbandSpectrum(lam=lam, chi=chi)


def random_levels(grid, J, seed):
    rng = np.random.default_rng(seed)
    ny1, ny2 = grid.lateral_shape
    base = np.sort(rng.uniform(1.0, 30.0, size=J))
    lam = base[None, None, :] + 0.5 * rng.standard_normal((ny1, ny2, J))
    lam = np.sort(lam, axis=2)
    gaps = np.diff(lam, axis=2)
    lam[:, :, 1:] += np.cumsum(np.maximum(0.05 - gaps, 0.0), axis=2)
    return lam


class TestOccupationLaw:
    def test_zero_temperature_indicator(self):
        m = OccupancyModel(T=0.0)
        assert m.occupancy(-0.5) == 0.0
        assert m.occupancy(0.7) == 1.0
        assert m.occupancy(0.0) == 1.0

    def test_power_family_hand_inverted(self):
        # beta(s) = s^2/2, beta'(s) = s, so occ(s) = min(s/T, 1)
        m = OccupancyModel(T=0.5, p=2.0)
        assert m.occupancy(0.25) == pytest.approx(0.5, abs=1e-15)
        assert m.occupancy(0.5) == pytest.approx(1.0)
        assert m.occupancy(2.0) == 1.0
        assert m.occupancy(-1e-12) == 0.0

    def test_range_and_monotonicity(self):
        s = np.linspace(-2, 5, 301)
        for model in (OccupancyModel(T=0.0), OccupancyModel(T=0.3, p=1.5),
                      OccupancyModel(T=1.0, p=3.0)):
            vals = model.occupancy(s)
            assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
            assert np.all(np.diff(vals) >= -1e-15)

    def test_invalid_models(self):
        with pytest.raises(ValueError):
            OccupancyModel(T=-0.1)
        with pytest.raises(ValueError):
            OccupancyModel(T=1.0, p=1.0)
        with pytest.raises(ValueError):
            OccupancyModel(T=1.0, beta_fn=lambda s: s**2)


class TestProfiles:
    def test_zero_temperature_values(self):
        m = OccupancyModel(T=0.0, p=2.0)
        assert m.profile_g(0.8) == pytest.approx(0.8)
        assert m.profile_g(-1.0) == 0.0
        assert m.profile_k(1.0) == pytest.approx(0.5)
        assert m.profile_b(1.0) == pytest.approx(0.5)  # beta(1) = 1/p
        assert m.profile_k(-2.0) == 0.0 and m.profile_b(-2.0) == 0.0

    def test_spec_point_values(self):
        m = OccupancyModel(T=0.5, p=2.0)
        assert m.profile_g(0.25) == pytest.approx(0.0625, abs=1e-14)
        assert m.profile_k(0.25) == pytest.approx(0.25**3 / (0.5 * 6.0), abs=1e-14)

    def test_vanish_on_nonpositive_gap(self):
        for model in (OccupancyModel(T=0.0), OccupancyModel(T=0.4, p=2.5)):
            a = np.array([-3.0, -1e-9, 0.0])
            assert np.all(model.profile_g(a) == 0.0)
            assert np.all(model.profile_k(a) == 0.0)
            assert np.all(model.profile_b(a) == 0.0)
            assert np.all(model.profile_w(a) == 0.0)

    def test_monotonicity_and_k_bound(self):
        a = np.linspace(-1.0, 10.0, 200)
        for model in (OccupancyModel(T=0.0), OccupancyModel(T=0.1, p=1.5),
                      OccupancyModel(T=1.0, p=3.0)):
            g = model.profile_g(a)
            assert np.all(np.diff(g) >= -1e-14)
            pos = a > 0
            assert np.all(model.profile_k(a[pos]) <= a[pos] * g[pos] + 1e-14)

    @pytest.mark.parametrize("T", [0.0, 0.1, 1.0])
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_closed_forms_match_quadrature(self, T, p):
        model = OccupancyModel(T=T, p=p)
        for a in np.linspace(-1.0, 10.0, 23):
            g, k, b = profiles_by_quadrature(model, float(a))
            assert model.profile_g(a) == pytest.approx(g, abs=1e-10)
            assert model.profile_k(a) == pytest.approx(k, abs=1e-10)
            assert model.profile_b(a) == pytest.approx(b, abs=1e-10)

    def test_custom_callbacks_route_through_quadrature(self):
        p = 2.0
        custom = OccupancyModel(
            T=0.5,
            beta_fn=lambda s: s**p / p,
            beta_prime_fn=lambda s: s ** (p - 1),
            beta_prime_inv_fn=lambda u: u ** (1.0 / (p - 1)),
        )
        reference = OccupancyModel(T=0.5, p=p)
        for a in (0.1, 0.25, 0.7, 3.0):
            assert custom.profile_g(a) == pytest.approx(reference.profile_g(a), abs=1e-10)
            assert custom.profile_k(a) == pytest.approx(reference.profile_k(a), abs=1e-10)
            assert custom.profile_b(a) == pytest.approx(reference.profile_b(a), abs=1e-10)
            assert custom.profile_w(a) == pytest.approx(reference.profile_w(a), abs=1e-10)


class TestMass:
    def test_zero_below_bottom(self):
        g = Grid(6, 6, 16)
        spec = flat_spectrum(g, [2.0, 5.0])
        assert subband_mass(1.9, spec, g, OccupancyModel(T=0.0)) == 0.0

    def test_flat_level_closed_form(self):
        # single reachable level at T = 0: M = 2 pi A (mu - c)+
        g = Grid(10, 10, 16)
        c = 2.0
        spec = flat_spectrum(g, [c, 50.0])
        model = OccupancyModel(T=0.0)
        area = g.lateral_area()
        for mu in (2.5, 3.7):
            expected = 2.0 * np.pi * area * (mu - c)
            assert subband_mass(mu, spec, g, model) == pytest.approx(expected, rel=1e-13)

    def test_monotone_in_mu(self):
        g = Grid(6, 6, 16)
        lam = random_levels(g, 4, seed=3)
        spec_like = type("S", (), {"lam": lam})()
        model = OccupancyModel(T=0.3, p=2.0)
        mus = np.linspace(0.0, 40.0, 50)
        masses = [subband_mass(m, spec_like, g, model) for m in mus]
        assert all(b >= a for a, b in zip(masses, masses[1:]))

    def test_zero_temperature_formula_random_spectra(self):
        # explicit ramp formula, same quadrature on both sides
        g = Grid(8, 8, 16)
        model = OccupancyModel(T=0.0)
        for seed in range(20):
            lam = random_levels(g, 5, seed)
            spec_like = type("S", (), {"lam": lam})()
            mu = float(np.median(lam))
            direct = 2.0 * np.pi * np.sum(np.maximum(mu - lam, 0.0)) * g.hy1 * g.hy2
            assert subband_mass(mu, spec_like, g, model) == pytest.approx(
                direct, rel=1e-12, abs=1e-300
            )


class TestSolveMu:
    def test_flat_level_inversion(self):
        g = Grid(10, 10, 16)
        c = 2.0
        spec = flat_spectrum(g, [c, 50.0])
        model = OccupancyModel(T=0.0)
        M = 1.3
        mu = solve_mu(M, spec, g, model)
        assert mu == pytest.approx(c + M / (2.0 * np.pi * g.lateral_area()), rel=1e-9)

    @pytest.mark.parametrize("T,p", [(0.0, 2.0), (0.4, 2.0), (0.2, 1.5)])
    def test_round_trip(self, T, p):
        g = Grid(6, 6, 16)
        model = OccupancyModel(T=T, p=p)
        for seed in range(5):
            lam = random_levels(g, 4, seed)
            spec_like = type("S", (), {"lam": lam})()
            mu0 = float(np.min(lam)) + 1.7
            M = subband_mass(mu0, spec_like, g, model)
            mu = solve_mu(M, spec_like, g, model)
            assert mu == pytest.approx(mu0, abs=1e-9 * max(1.0, mu0))

    def test_small_mass_limit(self):
        g = Grid(6, 6, 16)
        lam = random_levels(g, 3, seed=9)
        spec_like = type("S", (), {"lam": lam})()
        model = OccupancyModel(T=0.0)
        bottom = float(np.min(lam[:, :, 0]))
        mu = solve_mu(1e-9, spec_like, g, model)
        assert bottom < mu < bottom + 1e-3

    def test_errors(self):
        g = Grid(6, 6, 16)
        spec = flat_spectrum(g, [2.0])
        with pytest.raises(ValueError):
            solve_mu(0.0, spec, g, OccupancyModel(T=0.0))
        bad = type("S", (), {"lam": np.full((6, 6, 2), np.nan)})()
        with pytest.raises(ValueError):
            solve_mu(1.0, bad, g, OccupancyModel(T=0.0))
