import numpy as np
import numpy.testing as npt
import pytest

from confsym.fields import (
    GaussianMultiplet,
    field_strength_from_potential,
    fd_gradient,
    make_gauge_function,
    make_plane_wave_scalar,
    make_plane_wave_vector,
)
from confsym.geometry import (
    Metric,
    basis_generators,
    dilation,
    special_conformal,
    translation,
)
from confsym.noether import (
    CheckReport,
    DualScalarModel,
    MaxwellModel,
    MultipletModel,
    action_variation_identity,
    bessel_hagen_current,
    bessel_hagen_divergence,
    current_divergence_identity,
    field_virial,
    gauge_shift_divergence,
    gauge_shift_scale_current,
    improvement_coefficient,
    improved_scalar_stress,
    improved_scalar_stress_divergence,
    improved_scalar_stress_trace,
    lagrangian_value,
    linear_scalar_model,
    maxwell_stress,
    maxwell_stress_divergence,
    maxwell_stress_trace,
    maxwell_virial_first_principles,
    noether_scale_current_maxwell_divergence,
    offshell_trace_law,
    quadratic_scalar_model,
    scalar_stress,
    scalar_stress_divergence,
    scale_current_maxwell,
    scale_current_maxwell_divergence,
)
from confsym import sampling


def _f_squared(F, metric):
    up = metric.diag[:, None] * F * metric.diag[None, :]
    return float(np.sum(up * F))


class TestLagrangianValues:
    def test_maxwell_constant_potential(self, metric4, rng):
        A = make_plane_wave_vector(np.zeros(4), rng.normal(size=4), 0.0, metric4)
        assert lagrangian_value(MaxwellModel(4), A, rng.normal(size=4), metric4) == 0.0

    def test_dual_scalar_closed_form(self, metric3, rng):
        # density by direct substitution: -(a^2 k.k / 2) sin^2(k.x + ph)
        k = rng.normal(size=3)
        phi = make_plane_wave_scalar(k, [1.2], 0.3, metric3).component(0)
        model = DualScalarModel()
        for x in sampling.points(rng, 3, 6):
            phase = metric3.dot(k, x) + 0.3
            expected = -0.5 * 1.2**2 * metric3.norm2(k) * np.sin(phase) ** 2
            assert lagrangian_value(model, phi, x, metric3) == pytest.approx(
                expected, abs=1e-12
            )
            # and through the field strength: minus a quarter of F squared
            from confsym.dual3 import field_strength_from_dual

            F = field_strength_from_dual(phi, x, metric3).F
            assert lagrangian_value(model, phi, x, metric3) == pytest.approx(
                -0.25 * _f_squared(F, metric3), abs=1e-12
            )

    def test_multiplet_free_limit(self, metric4, rng):
        phi = sampling.random_plane_wave_multiplet(rng, metric4, 2)
        free = MultipletModel(4, 2, 0.0)
        x = rng.normal(size=4)
        grad = phi.grad(x)
        kinetic = 0.5 * float(np.einsum("m,im,im->", metric4.diag, grad, grad))
        assert lagrangian_value(free, phi, x, metric4) == pytest.approx(kinetic)


class TestMaxwellStress:
    def test_vanishes_for_zero_field(self, metric4, rng):
        A = make_plane_wave_vector(np.zeros(4), rng.normal(size=4), 0.0, metric4)
        npt.assert_array_equal(maxwell_stress(A, rng.normal(size=4), metric4), 0.0)

    def test_trace_law(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        dim = metric.dim
        for x in sampling.points(rng, dim, 8):
            F = field_strength_from_potential(A, x).F
            expected = (-1.0 + dim / 4.0) * _f_squared(F, metric)
            assert maxwell_stress_trace(A, x, metric) == pytest.approx(
                expected, abs=1e-12
            )

    def test_traceless_only_at_four_dimensions(self, rng):
        for dim in (3, 4, 5):
            g = Metric(dim)
            A = sampling.random_offshell_potential(rng, g)
            x = rng.normal(size=dim)
            tr = maxwell_stress_trace(A, x, g)
            if dim == 4:
                assert abs(tr) < 1e-12
            else:
                assert abs(tr) > 1e-4

    def test_conserved_on_shell(self, metric, rng):
        A = sampling.random_onshell_potential(rng, metric)
        for x in sampling.points(rng, metric.dim, 8):
            assert np.max(np.abs(maxwell_stress_divergence(A, x, metric))) < 1e-10

    def test_symmetric(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        theta = maxwell_stress(A, rng.normal(size=metric.dim), metric)
        npt.assert_allclose(theta, theta.T, atol=1e-12)


class TestScalarStress:
    def test_constant_free_field_vanishes(self, metric4, rng):
        phi = make_plane_wave_scalar(np.zeros(4), [1.5], 0.0, metric4)
        npt.assert_array_equal(scalar_stress(phi, rng.normal(size=4), metric4), 0.0)

    def test_conserved_on_shell_three_dimensions(self, rng):
        g = Metric(3)
        phi = sampling.random_plane_wave_multiplet(rng, g, 1, null=True)
        for x in sampling.points(rng, 3, 8):
            assert np.max(np.abs(scalar_stress_divergence(phi, x, g))) < 1e-10

    def test_energy_density_nonnegative(self, metric, rng):
        phi = sampling.random_plane_wave_multiplet(rng, metric, 2)
        for x in sampling.points(rng, metric.dim, 8):
            assert scalar_stress(phi, x, metric)[0, 0] >= 0.0


class TestImprovedStress:
    def test_improvement_coefficient_values(self):
        assert improvement_coefficient(3) == pytest.approx(1.0 / 8.0)
        assert improvement_coefficient(4) == pytest.approx(1.0 / 6.0)
        assert improvement_coefficient(6) == pytest.approx(1.0 / 5.0)

    def test_three_dimensional_form_reproduced(self, metric3, rng):
        # at D = 3 the improvement is exactly one eighth of (g box - dd) phi^2
        phi = sampling.random_plane_wave_multiplet(rng, metric3, 1)
        x = rng.normal(size=3)
        theta = scalar_stress(phi, x, metric3)
        value = phi.value(x)[0]
        grad = phi.grad(x)[0]
        hess = phi.hess(x)[0]
        s_hess = 2.0 * (np.outer(grad, grad) + value * hess)
        box_s = float(np.einsum("m,mm->", metric3.diag, s_hess))
        up = metric3.diag[:, None] * s_hess * metric3.diag[None, :]
        expected = theta + (np.diag(metric3.diag) * box_s - up) / 8.0
        npt.assert_allclose(improved_scalar_stress(phi, x, metric3), expected, atol=1e-13)

    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_traceless_on_shell(self, dim, rng):
        g = Metric(dim)
        phi = sampling.random_plane_wave_multiplet(rng, g, 1, null=True)
        for x in sampling.points(rng, dim, 8):
            assert abs(improved_scalar_stress_trace(phi, x, g)) < 1e-10

    def test_conserved_on_shell(self, metric, rng):
        phi = sampling.random_plane_wave_multiplet(rng, metric, 2, null=True)
        for x in sampling.points(rng, metric.dim, 8):
            div = improved_scalar_stress_divergence(phi, x, metric)
            assert np.max(np.abs(div)) < 1e-10

    def test_offshell_trace_closed_form(self, metric, rng):
        # hand-derived law: trace = D U + (D-2)/2 Phi.box(Phi), any coupling
        phi = sampling.random_polynomial_multiplet(rng, metric.dim, 2)
        for lam in (0.0, 0.7):
            for x in sampling.points(rng, metric.dim, 5):
                lhs = improved_scalar_stress_trace(phi, x, metric, lam)
                rhs = offshell_trace_law(phi, x, metric, lam)
                assert lhs == pytest.approx(rhs, abs=1e-10)


class TestVirial:
    def test_maxwell_vanishes_at_four_dimensions(self, rng):
        g = Metric(4)
        A = sampling.random_offshell_potential(rng, g)
        info = field_virial(MaxwellModel(4), A, rng.normal(size=4), g)
        npt.assert_allclose(info.value, 0.0, atol=1e-14)
        assert info.is_total_divergence

    @pytest.mark.parametrize("dim", [3, 5, 6])
    def test_maxwell_matches_first_principles(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_offshell_potential(rng, g)
        model = MaxwellModel(dim)
        for x in sampling.points(rng, dim, 8):
            info = field_virial(model, A, x, g)
            direct = maxwell_virial_first_principles(A, x, g)
            npt.assert_allclose(info.value, direct, atol=1e-12)
            assert not info.is_total_divergence

    def test_free_scalar_total_divergence(self, metric, rng):
        phi = sampling.random_plane_wave_multiplet(rng, metric, 2)
        model = MultipletModel(metric.dim, 2, 0.0)
        for x in sampling.points(rng, metric.dim, 5):
            info = field_virial(model, phi, x, metric)
            assert info.is_total_divergence
            fd = fd_gradient(info.potential, x, 1e-5)
            npt.assert_allclose(np.einsum("mam->a", fd), info.value, atol=1e-6)

    def test_general_scalar_flags(self, metric4, rng):
        phi = GaussianMultiplet(4, [1.3], rng.normal(0, 0.2, 4), 0.08 * np.eye(4))
        x = rng.normal(size=4)
        lin = field_virial(linear_scalar_model(4, -0.4, 0.5), phi, x, metric4)
        quad = field_virial(quadratic_scalar_model(4), phi, x, metric4)
        assert lin.is_total_divergence
        assert not quad.is_total_divergence
        fd = fd_gradient(lin.potential, x, 1e-5)
        npt.assert_allclose(np.einsum("mam->a", fd), lin.value, atol=1e-6)


class TestScaleCurrent:
    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_conserved_on_shell(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, dim, 8):
            assert abs(scale_current_maxwell_divergence(A, x, g)) < 1e-10

    def test_reduces_to_stress_times_position_at_four(self, rng):
        g = Metric(4)
        A = sampling.random_offshell_potential(rng, g)
        for x in sampling.points(rng, 4, 5):
            expected = maxwell_stress(A, x, g) @ g.lower(x)
            npt.assert_allclose(scale_current_maxwell(A, x, g), expected, atol=1e-13)

    @pytest.mark.parametrize("dim", [3, 5])
    def test_raw_construction_same_divergence(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, dim, 8):
            raw = noether_scale_current_maxwell_divergence(A, x, g)
            improved = scale_current_maxwell_divergence(A, x, g)
            assert raw == pytest.approx(improved, abs=1e-10)


class TestBesselHagen:
    def test_translation_reduces_to_stress_row(self, metric, rng):
        A = sampling.random_onshell_potential(rng, metric)
        a = rng.normal(size=metric.dim)
        gen = translation(a)
        model = MaxwellModel(metric.dim)
        for x in sampling.points(rng, metric.dim, 5):
            expected = maxwell_stress(A, x, metric) @ metric.lower(a)
            npt.assert_allclose(
                bessel_hagen_current(gen, model, A, x, metric), expected, atol=1e-12
            )

    def test_dilation_reproduces_scale_current(self, metric, rng):
        A = sampling.random_onshell_potential(rng, metric)
        gen = dilation(1.0, metric.dim)
        model = MaxwellModel(metric.dim)
        for x in sampling.points(rng, metric.dim, 5):
            npt.assert_allclose(
                bessel_hagen_current(gen, model, A, x, metric),
                scale_current_maxwell(A, x, metric),
                atol=1e-12,
            )

    def test_scalar_conformal_current_conserved(self, rng):
        g = Metric(3)
        phi = sampling.random_plane_wave_multiplet(rng, g, 1, null=True)
        model = MultipletModel(3, 1, 0.0)
        gen = special_conformal(rng.normal(0, 0.4, 3))
        for x in sampling.points(rng, 3, 8):
            assert abs(bessel_hagen_divergence(gen, model, phi, x, g)) < 1e-10

    def test_all_generators_conserved_free_scalar(self, metric, rng):
        phi = sampling.random_plane_wave_multiplet(rng, metric, 1, null=True)
        model = MultipletModel(metric.dim, 1, 0.0)
        for gen in basis_generators(metric.dim):
            for x in sampling.points(rng, metric.dim, 3):
                assert abs(bessel_hagen_divergence(gen, model, phi, x, metric)) < 1e-10


class TestCurrentDivergenceIdentity:
    def test_four_dimensions_both_zero(self, rng):
        g = Metric(4)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, 4, 5):
            lhs, rhs = current_divergence_identity(
                special_conformal(rng.normal(0, 0.4, 4)), A, x, g
            )
            assert abs(lhs) < 1e-10
            assert rhs == 0.0 or abs(rhs) < 1e-10

    def test_five_dimensions_nonzero_anomaly(self, rng):
        g = Metric(5)
        A = sampling.random_onshell_potential(rng, g)
        hit = 0
        for x in sampling.points(rng, 5, 8):
            lhs, rhs = current_divergence_identity(
                special_conformal(rng.normal(0, 0.4, 5)), A, x, g
            )
            assert lhs == pytest.approx(rhs, abs=1e-10)
            hit += abs(rhs) > 1e-3
        assert hit > 4  # generically nonzero

    def test_five_dimensions_scale_still_conserved(self, rng):
        g = Metric(5)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, 5, 8):
            lhs, rhs = current_divergence_identity(dilation(1.0, 5), A, x, g)
            assert rhs == 0.0
            assert abs(lhs) < 1e-10


class TestActionVariationIdentities:
    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_maxwell_scale_identity_offshell(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_offshell_potential(rng, g)
        model = MaxwellModel(dim)
        for x in sampling.points(rng, dim, 6):
            assert abs(action_variation_identity("scale", model, A, x, g)) < 1e-10

    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_maxwell_conformal_anomaly_offshell(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_offshell_potential(rng, g)
        model = MaxwellModel(dim)
        for x in sampling.points(rng, dim, 6):
            for s in range(dim):
                assert (
                    abs(action_variation_identity("conformal", model, A, x, g, s))
                    < 1e-10
                )

    def test_maxwell_assumed_primary_invariance(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        model = MaxwellModel(metric.dim)
        for x in sampling.points(rng, metric.dim, 6):
            for s in range(metric.dim):
                res = action_variation_identity(
                    "conformal-assumed-primary", model, A, x, metric, s
                )
                assert abs(res) < 1e-10

    def test_dual_scalar_conformal_identity(self, metric3, rng):
        # off-shell configuration: generic polynomial
        phi = sampling.random_polynomial_multiplet(rng, 3, 1).component(0)
        model = DualScalarModel()
        for x in sampling.points(rng, 3, 6):
            for s in range(3):
                res = action_variation_identity("conformal", model, phi, x, metric3, s)
                assert abs(res) < 1e-10

    def test_multiplet_identities_any_coupling(self, metric, rng):
        model = MultipletModel(metric.dim, 2, 0.9)
        phi = sampling.random_plane_wave_multiplet(rng, metric, 2)
        for x in sampling.points(rng, metric.dim, 5):
            assert abs(action_variation_identity("scale", model, phi, x, metric)) < 1e-10
            for s in range(metric.dim):
                assert (
                    abs(action_variation_identity("conformal", model, phi, x, metric, s))
                    < 1e-10
                )

    @pytest.mark.parametrize("dim", [3, 4, 5])
    def test_general_scalar_scale_holds_for_any_profile(self, dim, rng):
        g = Metric(dim)
        phi = GaussianMultiplet(dim, [1.3], rng.normal(0, 0.2, dim), 0.08 * np.eye(dim))
        for model in (linear_scalar_model(dim, -0.4, 0.5), quadratic_scalar_model(dim)):
            for x in sampling.points(rng, dim, 5):
                assert abs(action_variation_identity("scale", model, phi, x, g)) < 1e-10

    def test_general_scalar_conformal_obstruction(self, metric4, rng):
        # linear profile passes; the quadratic profile fails strictly
        phi = GaussianMultiplet(4, [1.3], rng.normal(0, 0.2, 4), 0.08 * np.eye(4))
        lin = linear_scalar_model(4, -0.4, 0.5)
        quad = quadratic_scalar_model(4)
        worst_quad = 0.0
        for x in sampling.points(rng, 4, 6):
            for s in range(4):
                assert abs(action_variation_identity("conformal", lin, phi, x, metric4, s)) < 1e-10
                worst_quad = max(
                    worst_quad,
                    abs(action_variation_identity("conformal", quad, phi, x, metric4, s)),
                )
        assert worst_quad > 1e-6

    def test_unknown_kind_rejected(self, metric4, rng):
        with pytest.raises(ValueError):
            action_variation_identity(
                "rotation", MaxwellModel(4),
                sampling.random_offshell_potential(rng, metric4),
                np.zeros(4), metric4,
            )


class TestGaugeShift:
    def test_constant_gauge_function_no_shift(self, metric, rng):
        A = sampling.random_onshell_potential(rng, metric)
        om = make_gauge_function("linear", metric, slope=np.zeros(metric.dim), offset=5.0)
        x = rng.normal(size=metric.dim)
        shift, predicted = gauge_shift_scale_current(A, om, x, metric)
        npt.assert_allclose(shift, 0.0, atol=1e-13)
        npt.assert_allclose(predicted, 0.0, atol=1e-13)

    def test_four_dimensions_no_shift(self, rng):
        g = Metric(4)
        A = sampling.random_onshell_potential(rng, g)
        om = make_gauge_function("plane-wave", g, k=rng.normal(size=4), amplitude=0.8)
        for x in sampling.points(rng, 4, 5):
            shift, _ = gauge_shift_scale_current(A, om, x, g)
            npt.assert_allclose(shift, 0.0, atol=1e-12)

    def test_five_dimensions_shift_conserved(self, rng):
        # time-coordinate gauge function on an on-shell fixture
        g = Metric(5)
        A = sampling.random_onshell_potential(rng, g)
        slope = np.zeros(5)
        slope[0] = 1.0
        om = make_gauge_function("linear", g, slope=slope)
        for x in sampling.points(rng, 5, 6):
            shift, predicted = gauge_shift_scale_current(A, om, x, g)
            npt.assert_allclose(shift, predicted, atol=1e-10)
            assert abs(gauge_shift_divergence(A, om, x, g)) < 1e-10

    def test_shift_matches_prediction_pointwise(self, metric, rng):
        A = sampling.random_onshell_potential(rng, metric)
        om = make_gauge_function("plane-wave", metric, k=rng.normal(0, 0.5, metric.dim),
                                 amplitude=0.8, phase=0.3)
        for x in sampling.points(rng, metric.dim, 6):
            shift, predicted = gauge_shift_scale_current(A, om, x, metric)
            npt.assert_allclose(shift, predicted, atol=1e-10)


class TestCheckReport:
    def test_pass_iff_within_tolerance(self):
        good = CheckReport("demo", 4, 10, 1e-13, 1e-12, 42)
        bad = CheckReport("demo", 4, 10, 1e-11, 1e-12, 42)
        assert good.passed and good.ok
        assert not bad.passed and not bad.ok

    def test_expected_fail_inverts_ok(self):
        xfail = CheckReport("demo", 5, 10, 1.0, 1e-12, 42, expected_fail=True)
        surprise = CheckReport("demo", 5, 10, 0.0, 1e-12, 42, expected_fail=True)
        assert not xfail.passed and xfail.ok
        assert surprise.passed and not surprise.ok

    def test_error_marks_failure(self):
        broken = CheckReport("demo", 4, 0, 0.0, 1e-12, 42, error="boom")
        assert not broken.passed and not broken.ok
        assert broken.to_dict()["error"] == "boom"
