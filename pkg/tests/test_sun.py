"""Tests for the circle-branched harmonic function construction."""
import numpy as np
import pytest

from z2forms.errors import (DegreeTooLarge, FitIllConditioned, GridTooCoarse,
                            NoNullDirection)
from z2forms.fd import fd_laplacian
from z2forms.sun import (Cutoff, DoubleCoverGrid, RadialBump, SunPipeline,
                         ZonalPoly, extract_a1, manufactured_error,
                         null_combination, ring_rms_slope, source_meridian,
                         zonal, zonal_meridian)

RNG = np.random.default_rng(2718)


# --------------------------------------------------------------------------
# zonal harmonics


class TestZonal:
    def test_low_degrees_closed_form(self):
        x = np.array([0.3, -0.4, 0.7])
        rho2 = float(x @ x)
        assert zonal(0, x) == pytest.approx(1.0)
        assert zonal(1, x) == pytest.approx(x[2])
        assert zonal(2, x) == pytest.approx(0.5 * (3 * x[2] ** 2 - rho2))

    @pytest.mark.parametrize("k", range(5))
    def test_harmonic_in_r3(self, k):
        for _ in range(5):
            x = RNG.uniform(-2, 2, size=3)
            lap = fd_laplacian(lambda y, k=k: zonal(k, y), x, 1e-3)
            assert abs(lap) < 1e-5 * max(1.0, np.linalg.norm(x) ** max(k - 2, 0))

    def test_degree_budget(self):
        with pytest.raises(DegreeTooLarge):
            zonal(13, np.ones(3))
        with pytest.raises(DegreeTooLarge):
            ZonalPoly(((13, 1.0),))

    def test_poly_combination(self):
        p = ZonalPoly(((0, 2.0), (2, -1.0)))
        assert p.value(0.0, 1.0) == pytest.approx(2.0 - 1.0)
        assert p.value_3d([1.0, 0.0, 0.0]) == pytest.approx(2.0 + 0.5)

    def test_meridian_matches_3d(self):
        x = np.array([0.6, 0.8, -0.5])
        s = np.hypot(x[0], x[1])
        for k in range(6):
            assert zonal_meridian(k, s, x[2]) == pytest.approx(zonal(k, x))


# --------------------------------------------------------------------------
# cutoff and source


class TestCutoff:
    @pytest.mark.parametrize("kind", ["quintic", "cubic"])
    def test_endpoints(self, kind):
        chi = Cutoff(kind=kind)
        assert chi.chi(chi.r1) == 0.0
        assert chi.chi(chi.r2) == 1.0
        assert chi.chi(2.0) == 0.0 and chi.chi(7.0) == 1.0
        assert chi.dchi(2.9) == 0.0 and chi.dchi(5.1) == 0.0

    @pytest.mark.parametrize("kind", ["quintic", "cubic"])
    def test_derivatives_match_fd(self, kind):
        chi = Cutoff(kind=kind)
        for rho in np.linspace(3.1, 4.9, 7):
            h = 1e-6
            d1 = (chi.chi(rho + h) - chi.chi(rho - h)) / (2 * h)
            d2 = (chi.dchi(rho + h) - chi.dchi(rho - h)) / (2 * h)
            assert chi.dchi(rho) == pytest.approx(d1, abs=1e-7)
            assert chi.d2chi(rho) == pytest.approx(d2, abs=1e-6)

    def test_validation(self):
        with pytest.raises(ValueError):
            Cutoff(r1=5.0, r2=3.0)
        with pytest.raises(ValueError):
            Cutoff(kind="septic")


class TestSource:
    def test_supported_in_shell(self):
        p, chi = ZonalPoly.single(2), Cutoff()
        assert source_meridian(p, chi, 2.0, 0.0) == 0.0
        assert source_meridian(p, chi, 6.0, 0.0) == 0.0
        assert source_meridian(p, chi, 4.0, 0.0) != 0.0

    @pytest.mark.parametrize("k", range(4))
    def test_equals_laplacian_of_cut_harmonic(self, k):
        """Oracle: H must equal the 3-D Laplacian of chi(rho) * p(x)."""
        p, chi = ZonalPoly.single(k), Cutoff()

        def f(x):
            return chi.chi(np.linalg.norm(x)) * p.value_3d(x)

        for _ in range(6):
            x = RNG.uniform(-1, 1, size=3)
            x *= RNG.uniform(3.2, 4.8) / np.linalg.norm(x)
            want = fd_laplacian(f, x, 1e-3)
            got = source_meridian(p, chi, float(np.hypot(x[0], x[1])),
                                  float(x[2]))
            assert got == pytest.approx(want, rel=1e-4, abs=1e-6)


# --------------------------------------------------------------------------
# grid and solve


class TestGrid:
    def test_active_region(self):
        g = DoubleCoverGrid(n=96)
        assert not g.active[g.s <= 0].any()
        assert not g.active[g.rho >= g.truncation].any()
        # active nodes never sit on the outer edge of the chart square
        assert not g.active[0].any() and not g.active[-1].any()

    def test_solve_linearity(self):
        g = DoubleCoverGrid(n=96)
        r1 = RNG.normal(size=int(g.active.sum()))
        r2 = RNG.normal(size=int(g.active.sum()))
        v = g.solve(2.0 * r1 - 3.0 * r2)
        want = 2.0 * g.solve(r1) - 3.0 * g.solve(r2)
        assert np.max(np.abs(v - want)) < 1e-9 * np.max(np.abs(want))

    def test_ring_window_guard(self):
        with pytest.raises(GridTooCoarse):
            DoubleCoverGrid(n=24).ring_window()

    def test_manufactured_convergence_order(self):
        coarse = manufactured_error(DoubleCoverGrid(n=160), rms=True)
        fine = manufactured_error(DoubleCoverGrid(n=320), rms=True)
        assert np.log2(coarse / fine) >= 1.8

    def test_manufactured_small_error(self):
        assert manufactured_error(DoubleCoverGrid(n=320)) < 5e-3


# --------------------------------------------------------------------------
# extraction


class TestExtraction:
    def test_recovers_synthetic_coefficients(self):
        radii = np.geomspace(1e-3, 0.1, 12)

        def u(r, t):
            return (2.0 * np.cos(t / 2) - 1.5 * np.sin(t / 2)) * np.sqrt(r) \
                + 0.3 * r**1.5 * np.cos(3 * t / 2)

        c = extract_a1(u, radii)
        assert c.a_plus == pytest.approx(2.0, abs=1e-12)
        assert c.a_minus == pytest.approx(-1.5, abs=1e-12)

    def test_orthogonal_mode_gives_zero(self):
        radii = np.geomspace(1e-3, 0.1, 12)
        c = extract_a1(lambda r, t: np.sqrt(r) * np.cos(3 * t / 2), radii)
        assert abs(c.a_plus) < 1e-12 and abs(c.a_minus) < 1e-12

    def test_wrong_power_is_flagged(self):
        radii = np.geomspace(1e-3, 0.5, 12)
        with pytest.raises(FitIllConditioned):
            extract_a1(lambda r, t: np.cos(t / 2) * r**1.5, radii)

    def test_slope_of_synthetic_power(self):
        radii = np.geomspace(1e-3, 0.05, 10)
        s = ring_rms_slope(lambda r, t: np.cos(t / 2) * r**1.5, radii)
        assert s == pytest.approx(1.5, abs=1e-6)

    def test_null_combination(self):
        a = np.array([[1.0, 0.0, 2.0], [0.0, 1.0, 3.0]])
        c = null_combination(a)
        assert np.linalg.norm(a @ c) < 1e-12
        assert np.linalg.norm(c) == pytest.approx(1.0)
        with pytest.raises(NoNullDirection):
            null_combination(np.eye(2))


# --------------------------------------------------------------------------
# pipeline

N_TEST = 192


@pytest.fixture(scope="module")
def pipeline():
    return SunPipeline(grid=DoubleCoverGrid(n=N_TEST))


class TestPipeline:
    def test_parity(self, pipeline):
        """Even zonal degrees excite only cos(theta/2); odd only sin."""
        for k, which in ((0, "plus"), (1, "minus"), (2, "plus")):
            c = pipeline.a1_of(pipeline.solve_for(ZonalPoly.single(k)))
            big, small = ((c.a_plus, c.a_minus) if which == "plus"
                          else (c.a_minus, c.a_plus))
            assert abs(big) > 0.1
            assert abs(small) < 1e-10 * abs(big)

    def test_superposition_linearity(self, pipeline):
        v0 = pipeline.solve_for(ZonalPoly.single(0))
        v2 = pipeline.solve_for(ZonalPoly.single(2))
        mixed = pipeline.solve_for(ZonalPoly(((0, 0.7), (2, -1.3))))
        a = pipeline.a1_of(mixed).as_array()
        want = 0.7 * pipeline.a1_of(v0).as_array() \
            - 1.3 * pipeline.a1_of(v2).as_array()
        assert np.linalg.norm(a - want) <= 1e-4 * np.linalg.norm(want)

    def test_half_integer_leading_power(self, pipeline):
        """a(r)/sqrt(r) stays bounded across rings: the sqrt branch, not 1/sqrt."""
        c_fn = pipeline.near_circle_fn(pipeline.solve_for(ZonalPoly.single(2)))
        radii = pipeline.ring_radii()
        theta = 4.0 * np.pi * np.arange(128) / 128
        ratios = []
        for r in radii:
            u = np.array([c_fn(r, t) for t in theta])
            ratios.append(2.0 * np.mean(u * np.cos(theta / 2)) / np.sqrt(r))
        ratios = np.abs(ratios)
        assert ratios.max() / ratios.min() < 1.5

    def test_null_combination_kills_leading_term(self, pipeline):
        out = pipeline.run(range(5))
        norms = np.linalg.norm(out["a1_matrix"], axis=0)
        combo = np.linalg.norm(out["combo_a1"].as_array())
        assert norms.max() / max(combo, 1e-300) >= 10.0
        assert out["decay_slope"] >= 1.4

    def test_cubic_cutoff_same_phenomenon(self):
        pipe = SunPipeline(grid=DoubleCoverGrid(n=N_TEST),
                           cutoff=Cutoff(kind="cubic"))
        out = pipe.run(range(5))
        norms = np.linalg.norm(out["a1_matrix"], axis=0)
        combo = np.linalg.norm(out["combo_a1"].as_array())
        assert norms.max() / max(combo, 1e-300) >= 10.0
        assert out["decay_slope"] >= 1.4

    def test_evaluate_3d_axisymmetric(self, pipeline):
        p = ZonalPoly.single(2)
        v = pipeline.solve_for(p)
        base = np.array([1.4, 0.0, 0.3])
        u0 = pipeline.evaluate_3d(base, v, p)
        for ang in (0.7, 2.1, 4.0):
            rot = np.array([base[0] * np.cos(ang), base[0] * np.sin(ang),
                            base[2]])
            assert pipeline.evaluate_3d(rot, v, p) == pytest.approx(u0,
                                                                    rel=1e-12)

    def test_evaluate_3d_sheet_antisymmetric(self, pipeline):
        p = ZonalPoly.single(2)
        v = pipeline.solve_for(p)
        x = np.array([1.6, -0.2, 0.4])
        up = pipeline.evaluate_3d(x, v, p, sheet=+1)
        dn = pipeline.evaluate_3d(x, v, p, sheet=-1)
        assert dn == pytest.approx(-up, rel=1e-6, abs=1e-10)

    def test_far_field_matches_cut_polynomial(self, pipeline):
        """Outside the cutoff u ~ +-p up to the O(1/rho) correction V."""
        p = ZonalPoly.single(1)
        v = pipeline.solve_for(p)
        x = np.array([4.5, 0.0, 4.5])  # rho ~ 6.4, chi = 1
        u = pipeline.evaluate_3d(x, v, p)
        assert u == pytest.approx(p.value_3d(x), rel=0.2)
