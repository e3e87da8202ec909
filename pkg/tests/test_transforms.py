import numpy as np
import numpy.testing as npt
import pytest

from confsym.clifford import build_gammas
from confsym.errors import SingularMap
from confsym.fields import (
    PolynomialMultiplet,
    field_strength_from_potential,
    make_gauge_function,
    make_plane_wave_scalar,
    make_plane_wave_vector,
    ShiftedPotential,
)
from confsym.geometry import (
    Metric,
    canonical_weight,
    dilation,
    killing_divergence,
    killing_gradient,
    killing_vector,
    special_conformal,
    translation,
)
from confsym.transforms import (
    FiniteScalarTransform,
    FiniteSpinorTransform,
    FiniteVectorTransform,
    commutator_residual,
    decoupled_spinor_residual,
    decoupled_vector_residual,
    decoupling_bracket_residual,
    decoupling_bracket_with,
    delta_field_strength,
    delta_field_strength_primary,
    delta_field_strength_with_gradient,
    delta_scalar,
    delta_scalar_with_gradient,
    delta_spinor,
    delta_vector_potential,
    delta_vector_potential_with_gradient,
    eom_violation_conformal,
    finite_variation_fd,
    lie_derivative_vector,
    scalar_commutator_pair,
    vector_spin_term,
)
from confsym import sampling


class TestDeltaScalar:
    def test_dilation_on_constant_field(self, metric, rng):
        f = make_plane_wave_scalar(np.zeros(metric.dim), [2.0, -0.5], 0.0, metric)
        gen = dilation(1.0, metric.dim)
        x = rng.normal(size=metric.dim)
        npt.assert_allclose(
            delta_scalar(gen, f, x, metric),
            canonical_weight(metric.dim) * f.value(x),
            atol=1e-14,
        )

    def test_translation_on_cosine(self, metric4, rng):
        # closed-form oracle: a contracted with the upper-index derivative
        k = rng.normal(size=4)
        f = make_plane_wave_scalar(k, [1.3], 0.2, metric4)
        a = rng.normal(size=4)
        gen = translation(a)
        for x in sampling.points(rng, 4, 5):
            phase = metric4.dot(k, x) + 0.2
            expected = -metric4.dot(a, k) * 1.3 * np.sin(phase)
            npt.assert_allclose(delta_scalar(gen, f, x, metric4), [expected], atol=1e-12)

    def test_conformal_vanishes_at_origin(self, metric, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric, 2)
        gen = special_conformal(rng.normal(size=metric.dim))
        npt.assert_allclose(
            delta_scalar(gen, f, np.zeros(metric.dim), metric), 0.0, atol=1e-14
        )

    def test_tag_mismatch_rejected(self, metric4, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric4, 1)
        gen = special_conformal(np.ones(4), spin="vector")
        with pytest.raises(ValueError):
            delta_scalar(gen, f, np.zeros(4), metric4)

    def test_gradient_helper_matches_fd(self, metric4, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric4, 2)
        gen = special_conformal(rng.normal(0, 0.3, 4))
        x = rng.normal(size=4)
        _, dout = delta_scalar_with_gradient(gen, f, x, metric4)
        from confsym.fields import fd_gradient

        fd = fd_gradient(lambda y: delta_scalar(gen, f, y, metric4), x, 1e-5)
        npt.assert_allclose(dout, fd, atol=1e-6)


class TestDeltaVector:
    def test_dilation_on_constant_potential(self, metric, rng):
        A = make_plane_wave_vector(
            np.zeros(metric.dim), rng.normal(size=metric.dim), 0.0, metric
        )
        gen = dilation(1.0, metric.dim, spin="vector")
        x = rng.normal(size=metric.dim)
        npt.assert_allclose(
            delta_vector_potential(gen, A, x, metric),
            canonical_weight(metric.dim) * A.value(x),
            atol=1e-14,
        )

    def test_conformal_vanishes_at_origin(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        gen = special_conformal(rng.normal(size=metric.dim), spin="vector")
        npt.assert_allclose(
            delta_vector_potential(gen, A, np.zeros(metric.dim), metric),
            0.0,
            atol=1e-14,
        )

    def test_matches_richardson_of_finite_map(self, metric4, rng):
        # Richardson-extrapolated parameter derivative of the finite transform
        A = sampling.random_offshell_potential(rng, metric4)
        d = canonical_weight(4)
        c = rng.normal(0, 0.3, 4)
        gen = special_conformal(c, spin="vector")
        for x in sampling.timelike_points(rng, 4, 5):
            target = delta_vector_potential(gen, A, x, metric4)
            factory = lambda t: FiniteVectorTransform(A, t * c, d, metric4)
            coarse = finite_variation_fd(factory, x, 2e-2)
            fine = finite_variation_fd(factory, x, 1e-2)
            richardson = (4.0 * fine - coarse) / 3.0
            npt.assert_allclose(richardson, target, atol=1e-6)

    def test_gradient_helper_matches_fd(self, metric4, rng):
        A = sampling.random_offshell_potential(rng, metric4)
        gen = special_conformal(rng.normal(0, 0.3, 4), spin="vector")
        x = rng.normal(size=4)
        _, dout = delta_vector_potential_with_gradient(gen, A, x, metric4)
        from confsym.fields import fd_gradient

        fd = fd_gradient(lambda y: delta_vector_potential(gen, A, y, metric4), x, 1e-5)
        npt.assert_allclose(dout, fd, atol=1e-6)


class TestDeltaFieldStrength:
    def test_primary_and_induced_agree_at_four_dimensions(self, rng):
        g = Metric(4)
        A = sampling.random_offshell_potential(rng, g)
        c = rng.normal(0, 0.4, 4)
        gen = special_conformal(c, spin="vector")
        gen_f = special_conformal(c, weight=2.0, spin="field-strength")
        for x in sampling.points(rng, 4, 6):
            induced = delta_field_strength(gen, A, x, g)
            fs = field_strength_from_potential(A, x)
            primary = delta_field_strength_primary(gen_f, fs, x, g)
            npt.assert_allclose(induced, primary, atol=1e-12)

    @pytest.mark.parametrize("dim", [3, 5, 6])
    def test_discrepancy_closed_form(self, dim, rng):
        g = Metric(dim)
        A = sampling.random_offshell_potential(rng, g)
        c = rng.normal(0, 0.4, dim)
        gen = special_conformal(c, spin="vector")
        gen_f = special_conformal(c, weight=dim / 2.0, spin="field-strength")
        for x in sampling.points(rng, dim, 6):
            induced = delta_field_strength(gen, A, x, g)
            fs = field_strength_from_potential(A, x)
            primary = delta_field_strength_primary(gen_f, fs, x, g)
            cl = g.lower(c)
            val = A.value(x)
            expected = (dim - 4.0) * (np.outer(cl, val) - np.outer(cl, val).T)
            npt.assert_allclose(induced - primary, expected, atol=1e-12)

    def test_dilation_weight_on_field_strength(self, metric, rng):
        # the field strength scales with weight D/2
        A = sampling.random_offshell_potential(rng, metric)
        gen = dilation(1.0, metric.dim, weight=metric.dim / 2.0, spin="field-strength")
        for x in sampling.points(rng, metric.dim, 5):
            fs = field_strength_from_potential(A, x)
            via_primary = delta_field_strength_primary(gen, fs, x, metric)
            expected = np.einsum("abm,m->ab", fs.dF, x) + 0.5 * metric.dim * fs.F
            npt.assert_allclose(via_primary, expected, atol=1e-12)
            # the induced variation agrees: dilations never mix in the potential
            npt.assert_allclose(
                delta_field_strength(gen, A, x, metric), expected, atol=1e-12
            )

    def test_gradient_route_matches_fd(self, metric4, rng):
        A = sampling.random_offshell_potential(rng, metric4)
        gen = special_conformal(rng.normal(0, 0.3, 4), spin="vector")
        x = rng.normal(size=4)
        _, dout = delta_field_strength_with_gradient(gen, A, x, metric4)
        from confsym.fields import fd_gradient

        fd = fd_gradient(lambda y: delta_field_strength(gen, A, y, metric4), x, 1e-5)
        npt.assert_allclose(dout, fd, atol=1e-6)


class TestEomViolation:
    def test_four_dimensions_gives_zero(self, rng):
        g = Metric(4)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, 4, 5):
            lhs, rhs = eom_violation_conformal(A, x, g, rng.normal(0, 0.3, 4))
            npt.assert_allclose(lhs, 0.0, atol=1e-12)
            npt.assert_allclose(rhs, 0.0, atol=1e-12)

    def test_five_dimensions_closed_form(self, rng):
        g = Metric(5)
        A = sampling.random_onshell_potential(rng, g)
        for x in sampling.points(rng, 5, 6):
            lhs, rhs = eom_violation_conformal(A, x, g, rng.normal(0, 0.3, 5))
            assert np.max(np.abs(rhs)) > 1e-3  # genuinely nonzero
            npt.assert_allclose(lhs, rhs, atol=1e-10)

    def test_constant_potential_gives_zero(self, metric, rng):
        comps = [[(float(v), (0,) * metric.dim)] for v in rng.normal(size=metric.dim)]
        from confsym.fields import PolynomialVectorPotential

        A = PolynomialVectorPotential(metric.dim, comps)
        lhs, rhs = eom_violation_conformal(
            A, rng.normal(size=metric.dim), metric, np.ones(metric.dim)
        )
        npt.assert_allclose(lhs, 0.0, atol=1e-14)
        npt.assert_allclose(rhs, 0.0, atol=1e-14)


class TestLieDerivative:
    def test_translation_is_pure_transport(self, metric4, rng):
        A = sampling.random_offshell_potential(rng, metric4)
        a = rng.normal(size=4)
        gen = translation(a, spin="vector")
        for x in sampling.points(rng, 4, 5):
            direct, via_fs = lie_derivative_vector(gen, A, x, metric4)
            expected = A.grad(x) @ a
            npt.assert_allclose(direct, expected, atol=1e-13)
            npt.assert_allclose(via_fs, expected, atol=1e-13)

    def test_both_forms_agree(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        gens = [
            dilation(0.7, metric.dim, spin="vector"),
            special_conformal(rng.normal(0, 0.3, metric.dim), spin="vector"),
        ]
        for x in sampling.points(rng, metric.dim, 5):
            for gen in gens:
                direct, via_fs = lie_derivative_vector(gen, A, x, metric)
                npt.assert_allclose(direct, via_fs, atol=1e-12)

    def test_weight_shift_from_lie_derivative(self, metric, rng):
        dim = metric.dim
        A = sampling.random_offshell_potential(rng, metric)
        gens = [
            dilation(0.7, dim, spin="vector"),
            special_conformal(rng.normal(0, 0.3, dim), spin="vector"),
        ]
        for x in sampling.points(rng, dim, 5):
            for gen in gens:
                lie, _ = lie_derivative_vector(gen, A, x, metric)
                delta = delta_vector_potential(gen, A, x, metric)
                shift = (
                    (dim - 4.0)
                    / (2.0 * dim)
                    * killing_divergence(gen, x, metric)
                    * A.value(x)
                )
                npt.assert_allclose(delta - lie, shift, atol=1e-12)

    def test_gauge_response(self, metric, rng):
        # the delta-minus-Lie piece shifts by its weight factor times dOmega,
        # while the Lie derivative shifts by a pure gauge term
        dim = metric.dim
        A = sampling.random_offshell_potential(rng, metric)
        om = make_gauge_function("plane-wave", metric, k=rng.normal(0, 0.5, dim), amplitude=0.9)
        shifted = ShiftedPotential(A, om)
        gen = special_conformal(rng.normal(0, 0.3, dim), spin="vector")
        for x in sampling.points(rng, dim, 5):
            div = killing_divergence(gen, x, metric)
            d_om = om.grad(x)
            diff_base = (
                delta_vector_potential(gen, A, x, metric)
                - lie_derivative_vector(gen, A, x, metric)[0]
            )
            diff_shifted = (
                delta_vector_potential(gen, shifted, x, metric)
                - lie_derivative_vector(gen, shifted, x, metric)[0]
            )
            npt.assert_allclose(
                diff_shifted - diff_base,
                (dim - 4.0) / (2.0 * dim) * div * d_om,
                atol=1e-12,
            )
            lie_shift = (
                lie_derivative_vector(gen, shifted, x, metric)[0]
                - lie_derivative_vector(gen, A, x, metric)[0]
            )
            f = killing_vector(gen, x, metric)
            df = killing_gradient(gen, x, metric)
            pure_gauge = om.hess(x) @ f + df.T @ d_om  # gradient of f.dOmega
            npt.assert_allclose(lie_shift, pure_gauge, atol=1e-12)


class TestCommutator:
    def test_hand_oracle_on_quadratic(self, rng):
        # phi = x^0 x^1 at D = 3: worked by hand, the bracket value is
        # -2((x^0)^2 + (x^1)^2)
        g = Metric(3)
        phi = PolynomialMultiplet(3, [[(1.0, (1, 1, 0))]])
        for x in sampling.points(rng, 3, 6):
            lhs, rhs = scalar_commutator_pair(0, 1, phi, x, g)
            oracle = -2.0 * (x[0] ** 2 + x[1] ** 2)
            assert abs(lhs[0] - oracle) < 1e-12
            assert abs(rhs[0] - oracle) < 1e-12

    def test_plane_wave_all_pairs(self, metric, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric, 2)
        for x in sampling.points(rng, metric.dim, 4):
            for s in range(metric.dim):
                for t in range(metric.dim):
                    res = commutator_residual(s, t, f, x, metric)
                    assert np.max(np.abs(res)) < 1e-10

    def test_polynomial_fields(self, rng):
        g = Metric(3)
        f = sampling.random_polynomial_multiplet(rng, 3, 2)
        for x in sampling.points(rng, 3, 4):
            for s in range(3):
                for t in range(3):
                    assert np.max(np.abs(commutator_residual(s, t, f, x, g))) < 1e-10

    def test_equal_indices_reduce_to_dilation(self, metric4, rng):
        # no rotation term survives when the two indices coincide
        f = sampling.random_plane_wave_multiplet(rng, metric4, 1)
        d = canonical_weight(4)
        for x in sampling.points(rng, 4, 4):
            for s in range(4):
                lhs, rhs = scalar_commutator_pair(s, s, f, x, metric4)
                dilat = f.grad(x) @ x + d * f.value(x)
                npt.assert_allclose(rhs, -2.0 * metric4.diag[s] * dilat, atol=1e-12)
                npt.assert_allclose(lhs, rhs, atol=1e-10)


class TestFiniteScalar:
    def test_zero_parameter_is_identity(self, metric4, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric4, 2)
        view = FiniteScalarTransform(f, np.zeros(4), 1.0, metric4)
        for x in sampling.points(rng, 4, 5):
            npt.assert_allclose(view.value(x), f.value(x), atol=1e-14)

    def test_composition_law(self, metric, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric, 1)
        d = canonical_weight(metric.dim)
        for x in sampling.points(rng, metric.dim, 10):
            c1 = sampling.small_parameters(rng, metric.dim, 1, scale=0.05)[0]
            c2 = sampling.small_parameters(rng, metric.dim, 1, scale=0.05)[0]
            try:
                once = FiniteScalarTransform(f, c1 + c2, d, metric).value(x)
                steps = FiniteScalarTransform(
                    FiniteScalarTransform(f, c1, d, metric), c2, d, metric
                ).value(x)
            except SingularMap:
                continue
            npt.assert_allclose(steps, once, atol=1e-12)

    def test_small_parameter_limit(self, metric4, rng):
        f = sampling.random_plane_wave_multiplet(rng, metric4, 2)
        d = canonical_weight(4)
        c = rng.normal(0, 0.4, 4)
        gen = special_conformal(c)
        for x in sampling.timelike_points(rng, 4, 4):
            target = delta_scalar(gen, f, x, metric4)
            errs = []
            for eps in (1e-2, 1e-3):
                est = finite_variation_fd(
                    lambda t: FiniteScalarTransform(f, t * c, d, metric4), x, eps
                )
                errs.append(np.max(np.abs(est - target)))
            order = np.log10(errs[0] / errs[1])
            assert order > 1.9

    def test_singular_branch_rejected(self, metric4):
        from confsym.geometry import conformal_factor, special_conformal_map

        f = make_plane_wave_scalar(np.zeros(4), [1.0], 0.0, metric4)
        c = np.array([1.0, 0, 0, 0])
        x = np.array([0.0, 2, 0, 0])
        assert conformal_factor(x, c, metric4) < 0  # negative branch
        y = special_conformal_map(x, c, metric4)
        view = FiniteScalarTransform(f, c, 0.5, metric4)
        with pytest.raises(SingularMap):
            view.value(y)


class TestFiniteVector:
    def test_zero_parameter_is_identity(self, metric4, rng):
        A = sampling.random_offshell_potential(rng, metric4)
        view = FiniteVectorTransform(A, np.zeros(4), 1.0, metric4)
        x = sampling.off_cone_points(rng, 4, 1)[0]
        npt.assert_allclose(view.value(x), A.value(x), atol=1e-14)

    def test_routes_agree(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        count = 0
        xs = sampling.timelike_points(rng, metric.dim, 40)
        cs = sampling.small_parameters(rng, metric.dim, 40, scale=0.08)
        for x, c in zip(xs, cs):
            try:
                a = FiniteVectorTransform(A, c, 1.0, metric, route="jacobian").value(x)
                b = FiniteVectorTransform(A, c, 1.0, metric, route="reflection").value(x)
            except SingularMap:
                continue
            count += 1
            npt.assert_allclose(a, b, atol=1e-12)
        assert count > 10

    def test_small_parameter_limit(self, metric4, rng):
        A = sampling.random_offshell_potential(rng, metric4)
        d = canonical_weight(4)
        c = rng.normal(0, 0.4, 4)
        gen = special_conformal(c, spin="vector")
        for x in sampling.timelike_points(rng, 4, 4):
            target = delta_vector_potential(gen, A, x, metric4)
            errs = []
            for eps in (1e-2, 1e-3):
                est = finite_variation_fd(
                    lambda t: FiniteVectorTransform(A, t * c, d, metric4), x, eps
                )
                errs.append(np.max(np.abs(est - target)))
            assert np.log10(errs[0] / errs[1]) > 1.9


class TestFiniteSpinor:
    def test_zero_parameter_is_identity(self, metric4, rng):
        gammas = build_gammas(4)
        psi = sampling.random_spinor(rng, metric4, gammas.size)
        view = FiniteSpinorTransform(psi, np.zeros(4), 1.0, metric4, gammas)
        x = sampling.timelike_points(rng, 4, 1)[0]
        npt.assert_allclose(view.value(x), psi.value(x), atol=1e-14)

    @pytest.mark.parametrize("dim", [3, 4])
    def test_routes_agree(self, dim, rng):
        g = Metric(dim)
        gammas = build_gammas(dim)
        psi = sampling.random_spinor(rng, g, gammas.size)
        count = 0
        xs = sampling.timelike_points(rng, dim, 40)
        cs = sampling.small_parameters(rng, dim, 40, scale=0.05)
        for x, c in zip(xs, cs):
            try:
                a = FiniteSpinorTransform(psi, c, 1.5, g, gammas, route="pair").value(x)
                b = FiniteSpinorTransform(psi, c, 1.5, g, gammas, route="compact").value(x)
            except Exception:
                continue
            count += 1
            npt.assert_allclose(a, b, atol=1e-12)
        assert count > 10

    def test_small_parameter_limit_with_spin(self, metric4, rng):
        gammas = build_gammas(4)
        psi = sampling.random_spinor(rng, metric4, gammas.size)
        d = canonical_weight(4)
        c = rng.normal(0, 0.3, 4)
        gen = special_conformal(c, spin="spinor")
        for x in sampling.timelike_points(rng, 4, 4):
            target = delta_spinor(gen, psi, x, metric4, gammas)
            errs = []
            for eps in (1e-2, 1e-3):
                est = finite_variation_fd(
                    lambda t: FiniteSpinorTransform(
                        psi, t * c, d, metric4, gammas, route="compact"
                    ),
                    x,
                    eps,
                )
                errs.append(np.max(np.abs(est - target)))
            assert np.log10(errs[0] / errs[1]) > 1.9


class TestDecoupling:
    def test_bracket_vanishes(self, metric, rng):
        xs = sampling.off_cone_points(rng, metric.dim, 30, min_frac=0.1)
        cs = sampling.small_parameters(rng, metric.dim, 30, scale=0.4)
        for x, c in zip(xs, cs):
            res = decoupling_bracket_residual(x, c, metric)
            assert np.max(np.abs(res)) < 1e-10

    def test_zero_parameter_trivial(self, metric4, rng):
        x = sampling.off_cone_points(rng, 4, 1)[0]
        res = decoupling_bracket_residual(x, np.zeros(4), metric4)
        npt.assert_allclose(res, 0.0, atol=1e-15)

    def test_non_killing_field_fails(self, metric4, rng):
        x = sampling.timelike_points(rng, 4, 1)[0]
        bad = np.zeros(4)
        bad[0] = metric4.norm2(x)
        res = decoupling_bracket_with(bad, x, 0.3 * np.ones(4), metric4)
        assert np.max(np.abs(res)) > 0.01

    def test_spin_term_antisymmetric_when_lowered(self, metric4, rng):
        c = rng.normal(size=4)
        x = rng.normal(size=4)
        n = vector_spin_term(c, x, metric4)
        lowered = n * metric4.diag[None, :]
        npt.assert_allclose(lowered, -lowered.T, atol=1e-14)

    def test_reflected_vector_follows_scalar_rule(self, metric, rng):
        A = sampling.random_offshell_potential(rng, metric)
        xs = sampling.off_cone_points(rng, metric.dim, 20, min_frac=0.1)
        cs = sampling.small_parameters(rng, metric.dim, 20, scale=0.4)
        for x, c in zip(xs, cs):
            assert decoupled_vector_residual(A, x, c, metric) < 1e-10

    def test_slashed_spinor_follows_scalar_rule(self, metric, rng):
        gammas = build_gammas(metric.dim)
        psi = sampling.random_spinor(rng, metric, gammas.size)
        xs = sampling.timelike_points(rng, metric.dim, 20)
        cs = sampling.small_parameters(rng, metric.dim, 20, scale=0.4)
        for x, c in zip(xs, cs):
            assert decoupled_spinor_residual(psi, x, c, metric, gammas) < 1e-10
