import numpy as np
import pytest

from z2forms import Polyline, UnivariatePolynomial, circle
from z2forms.branch import winding_number
from z2forms.errors import (CurvesTooClose, ImageAtInfinity, NotInTube,
                            NotOnSphere, SingularFiber)
from z2forms.fd import fd_jacobian
from z2forms.forms import PlanarForm
from z2forms.morphisms import (ComposedGerm, core_fiber, covering_degree,
                               fiber, fiber_windings, gauss_linking, hopf,
                               hopf_chart_map, hopf_sphere_map, identity_map,
                               laplace_beltrami_residual, lb_cross_oracle,
                               linking_on_sphere, pullback, pullback_form,
                               seifert_value, stereo_s2_chart, stereo_s3_chart,
                               stereographic_pole, stereographic_project)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


class TestHopf:
    def test_first_pole(self):
        np.testing.assert_allclose(hopf(1, 0), [1, 0, 0], atol=1e-14)

    def test_second_pole(self):
        np.testing.assert_allclose(hopf(0, 1), [-1, 0, 0], atol=1e-14)

    def test_equator(self):
        np.testing.assert_allclose(hopf(INV_SQRT2, INV_SQRT2), [0, 1, 0],
                                   atol=1e-14)

    def test_off_sphere_rejected(self):
        with pytest.raises(NotOnSphere):
            hopf(1.0, 0.5)

    def test_unit_image(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            v = rng.normal(size=4)
            v /= np.linalg.norm(v)
            img = hopf(complex(v[0], v[1]), complex(v[2], v[3]))
            assert np.linalg.norm(img) == pytest.approx(1.0)


class TestPullback:
    def test_identity_chart(self):
        p = UnivariatePolynomial((0.0, 1.0))
        form = PlanarForm(p)
        out = pullback_form(identity_map(2), form, [1.0, 0.0])
        np.testing.assert_allclose(out, [1, 0], atol=1e-14)

    def test_closed_form_vs_fd_jacobian(self):
        p = UnivariatePolynomial((0.5, 1.0))
        form = PlanarForm(p)
        hc = hopf_chart_map()
        x = np.array([0.5, -0.2, 0.6, 0.0])
        x /= np.linalg.norm(x)
        closed = pullback_form(hc, form, x)
        J_fd = fd_jacobian(lambda q: hc(q), x)
        from z2forms.branch import principal_state
        v = form.eval_omega(principal_state(p, hc(x)))
        np.testing.assert_allclose(closed, J_fd.T @ v, rtol=1e-6, atol=1e-6)

    def test_linearity(self):
        p1 = UnivariatePolynomial((0.5, 1.0))
        p2 = UnivariatePolynomial((1.0, 0.0, 1.0))
        hc = hopf_chart_map()
        x = np.array([0.5, -0.2, 0.6, 0.0])
        x /= np.linalg.norm(x)

        def cov(form):
            def f(img):
                from z2forms.branch import principal_state
                return form.eval_omega(principal_state(form.p, img))
            return f

        a, b = 2.0, -0.7
        combo = pullback(hc, lambda img: a * cov(PlanarForm(p1))(img)
                         + b * cov(PlanarForm(p2))(img), x)
        parts = a * pullback(hc, cov(PlanarForm(p1)), x) \
            + b * pullback(hc, cov(PlanarForm(p2)), x)
        np.testing.assert_allclose(combo, parts, atol=1e-10)

    def test_pulled_back_monodromy_around_core(self):
        # loop linking {z = 0} once; germ p(zeta) = zeta pulled through z/w
        germ = ComposedGerm(UnivariatePolynomial((0.0, 1.0)), hopf_chart_map())
        t = 2.0 * np.pi * np.arange(64) / 64
        r = 0.5
        z = r * np.exp(1j * t)
        w = np.sqrt(1 - r * r) * np.ones_like(z)
        loop = Polyline(np.column_stack([z.real, z.imag, w.real, w.imag]),
                        closed=True)
        assert winding_number(germ, loop) == 1

    def test_chart_pole_rejected(self):
        with pytest.raises(ImageAtInfinity):
            hopf_chart_map()(np.array([1.0, 0, 0, 0]))


class TestFibers:
    def test_hopf_fiber_is_great_circle(self):
        fb = fiber(1, 1, 0.7 + 0.3j, n=256)
        # spans a 2-plane through the origin and has radius 1
        u, s, vt = np.linalg.svd(fb.points)
        assert s[2] < 1e-10
        np.testing.assert_allclose(np.linalg.norm(fb.points, axis=1), 1.0,
                                   atol=1e-12)

    def test_fiber_invariance(self):
        fb = fiber(2, 3, 0.8 + 0.1j, n=512)
        vals = np.array([seifert_value(2, 3, p) for p in fb.points])
        assert np.max(np.abs(vals - vals[0])) < 1e-10

    def test_fiber_on_torus(self):
        fb = fiber(2, 3, 0.8 + 0.1j, n=512)
        r1 = np.hypot(fb.points[:, 0], fb.points[:, 1])
        r2 = np.hypot(fb.points[:, 2], fb.points[:, 3])
        assert np.ptp(r1) < 1e-12 and np.ptp(r2) < 1e-12

    def test_windings_2_3(self):
        fb = fiber(2, 3, 0.8 + 0.1j)
        assert fiber_windings(fb) == (3, 2)

    def test_windings_3_2(self):
        fb = fiber(3, 2, 0.8 + 0.1j)
        assert fiber_windings(fb) == (2, 3)

    def test_singular_fiber_is_planar_circle(self):
        fb = core_fiber(0, n=128)
        u, s, vt = np.linalg.svd(fb.points)
        assert s[2] < 1e-12

    def test_singular_base_rejected(self):
        with pytest.raises(SingularFiber):
            fiber(2, 3, 0.0)

    def test_noncoprime_rejected(self):
        with pytest.raises(ValueError):
            fiber(2, 4, 1.0)


class TestLinking:
    def test_unlinked_circles(self):
        c1 = circle([0, 0, 0], 1.0, n=256, plane=(0, 1), dim=3)
        c2 = circle([5, 0, 0], 1.0, n=256, plane=(1, 2), dim=3)
        assert abs(gauss_linking(c1, c2)) < 0.05

    def test_standard_hopf_link(self):
        c1 = circle([0, 0, 0], 1.0, n=512, plane=(0, 1), dim=3)
        c2 = circle([1, 0, 0], 1.0, n=512, plane=(0, 2), dim=3)
        assert abs(abs(gauss_linking(c1, c2)) - 1.0) < 0.05

    def test_hopf_fibers_link_once(self):
        f1 = fiber(1, 1, 0.5 + 0.2j, n=512)
        f2 = fiber(1, 1, -2.0 + 1.0j, n=512)
        assert abs(abs(linking_on_sphere(f1, f2)) - 1.0) < 0.05

    def test_pi23_regular_fibers_link_pq(self):
        lk = {n: linking_on_sphere(fiber(2, 3, 0.8 + 0.1j, n=n),
                                   fiber(2, 3, -3.0 + 2.0j, n=n))
              for n in (1024, 2048)}
        assert abs(abs(lk[1024]) - 6.0) < 0.1
        assert abs(abs(lk[2048]) - 6.0) < 0.1
        assert abs(lk[1024] - lk[2048]) < 0.05

    def test_fiber_vs_singular_fibers(self):
        # a regular fiber of pi_{2,3} links {z1 = 0} q = 3 times and
        # {z2 = 0} p = 2 times (Gauss oracle at two resolutions)
        for n in (1024, 2048):
            fb = fiber(2, 3, 100.0 + 0j, n=n)
            assert abs(abs(linking_on_sphere(fb, core_fiber(1, n=n))) - 3.0) < 0.05
            assert abs(abs(linking_on_sphere(fb, core_fiber(0, n=n))) - 2.0) < 0.05

    def test_too_close_rejected(self):
        c1 = circle([0, 0, 0], 1.0, n=64, plane=(0, 1), dim=3)
        c2 = circle([0, 0, 1e-5], 1.0, n=64, plane=(0, 1), dim=3)
        with pytest.raises(CurvesTooClose):
            gauss_linking(c1, c2)

    def test_projection_preserves_pole_distance(self):
        fb = fiber(1, 1, 0.5 + 0.2j, n=128)
        pole = stereographic_pole([fb.points])
        proj = stereographic_project(fb.points, pole)
        assert np.all(np.isfinite(proj))


class TestCoveringDegree:
    @pytest.mark.parametrize("p,q", [(2, 3), (3, 2), (1, 1)])
    def test_near_z2_core(self, p, q):
        fb = fiber(p, q, 5e3 + 0j, n=2048)
        assert covering_degree(fb, core_fiber(0, n=1024)) == q

    def test_degeneration_toward_core(self):
        # covering degree is q for every fiber inside the 0.2-tube
        for mod in (1e3, 1e4, 1e6):
            fb = fiber(2, 3, mod * np.exp(0.7j), n=2048)
            d = np.min(np.linalg.norm(
                fb.points[:, None, :] - core_fiber(0, n=512).points[None, :, :],
                axis=2), axis=1).max()
            if d < 0.2:
                assert covering_degree(fb, core_fiber(0, n=512)) == 3

    def test_not_in_tube_rejected(self):
        fb = fiber(2, 3, 1.0 + 0j, n=512)
        with pytest.raises(NotInTube):
            covering_degree(fb, core_fiber(0, n=256))


class TestLaplaceBeltrami:
    def test_constant_field(self):
        chart = stereo_s2_chart()
        res = laplace_beltrami_residual(chart, lambda y: 3.7, [0.2, -0.1])
        assert abs(res) < 1e-9

    def test_s2_harmonic_in_conformal_chart(self):
        chart = stereo_s2_chart()
        # locally harmonic: 2D Laplacian is conformally invariant
        field = lambda y: np.log(np.hypot(y[0] - 3.0, y[1]))
        r1 = laplace_beltrami_residual(chart, field, [0.2, -0.1], step=2e-2)
        r2 = laplace_beltrami_residual(chart, field, [0.2, -0.1], step=1e-2)
        assert abs(r1) < 1e-3 and 3.4 < r1 / r2 < 4.6

    def test_spd_check(self):
        stereo_s3_chart().check_spd([[0.1, 0.2, -0.3], [1.0, 0.0, 0.0]])

    def test_hopf_pullback_harmonic_on_s3(self):
        chart = stereo_s3_chart()
        hc = hopf_chart_map()

        def field(y):
            zeta = hc(chart.embed(y))
            return complex(zeta[0], zeta[1]).real  # Re(z/w), locally harmonic

        y0 = np.array([0.4, -0.3, 0.25])
        r1 = laplace_beltrami_residual(chart, field, y0, step=2e-2)
        r2 = laplace_beltrami_residual(chart, field, y0, step=1e-2)
        assert 3.4 < r1 / r2 < 4.6

    def test_cross_oracle_agreement(self):
        def field(x):
            return x[0] ** 2 * x[1] + x[2] * x[3] + 0.3 * x[1] ** 3

        x0 = np.array([0.5, -0.2, 0.6, 0.0])
        x0 /= np.linalg.norm(x0)
        a, b = lb_cross_oracle(field, x0)
        assert abs(a - b) <= 1e-6 * max(abs(a), abs(b))
