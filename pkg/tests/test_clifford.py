import numpy as np
import numpy.testing as npt
import pytest

from confsym.clifford import (
    GammaSet,
    anticommutator_residual,
    build_gammas,
    gamma_slash_unit,
    sandwich_identity_residual,
)
from confsym.errors import NonTimelikePoint, UnsupportedDimension
from confsym.geometry import Metric, inversion_matrix
from confsym import sampling


@pytest.mark.parametrize("dim", [2, 3, 4, 5, 6])
def test_defining_relation_exact(dim):
    gammas = build_gammas(dim)
    assert anticommutator_residual(gammas, Metric(dim)) == 0.0


@pytest.mark.parametrize("dim,size", [(2, 2), (3, 2), (4, 4), (5, 4), (6, 8)])
def test_matrix_sizes(dim, size):
    assert build_gammas(dim).size == size


def test_three_dimensional_pauli_oracle():
    # independent explicit representation: sigma_x, -i sigma_y, i sigma_z
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    oracle = GammaSet(3, [sx, -1j * sy, 1j * sz])
    assert anticommutator_residual(oracle, Metric(3)) == 0.0


@pytest.mark.parametrize("dim", [1, 7])
def test_unsupported_dimension(dim):
    with pytest.raises(UnsupportedDimension):
        build_gammas(dim)


def test_spin_matrices_antisymmetric():
    gammas = build_gammas(4)
    for mu in range(4):
        npt.assert_array_equal(gammas.spin_matrix(mu, mu), np.zeros((4, 4)))
        for nu in range(4):
            npt.assert_array_equal(
                gammas.spin_matrix(mu, nu), -gammas.spin_matrix(nu, mu)
            )
            commut = gammas[mu] @ gammas[nu] - gammas[nu] @ gammas[mu]
            npt.assert_array_equal(gammas.spin_matrix(mu, nu), 0.25 * commut)


class TestSlashedUnit:
    def test_rest_frame_is_gamma_zero(self):
        g = Metric(4)
        gammas = build_gammas(4)
        slash = gamma_slash_unit(np.array([1.0, 0, 0, 0]), gammas, g)
        npt.assert_array_equal(slash, gammas[0])
        npt.assert_allclose(slash @ slash, np.eye(4), atol=1e-15)

    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_squares_to_identity(self, dim, rng):
        g = Metric(dim)
        gammas = build_gammas(dim)
        for x in sampling.timelike_points(rng, dim, 20):
            slash = gamma_slash_unit(x, gammas, g)
            npt.assert_allclose(slash @ slash, np.eye(gammas.size), atol=1e-12)

    def test_spacelike_point_rejected(self):
        with pytest.raises(NonTimelikePoint):
            gamma_slash_unit(np.array([0.0, 1, 0, 0]), build_gammas(4), Metric(4))


class TestSandwichIdentity:
    def test_rest_frame_by_hand(self):
        # at x = e_0 the left side for mu = 0 is gamma_0 and the reflection
        # matrix entry is -1, so both sides equal gamma_0 exactly
        g = Metric(4)
        gammas = build_gammas(4)
        assert sandwich_identity_residual(np.array([1.0, 0, 0, 0]), gammas, g) < 1e-15

    @pytest.mark.parametrize("dim", [3, 4, 5, 6])
    def test_random_timelike(self, dim, rng):
        g = Metric(dim)
        gammas = build_gammas(dim)
        for x in sampling.timelike_points(rng, dim, 25):
            assert sandwich_identity_residual(x, gammas, g) < 1e-12

    def test_sign_flip_negative_control(self, rng):
        # flipping the reflection matrix sign must leave a residual of order one
        g = Metric(4)
        gammas = build_gammas(4)
        x = sampling.timelike_points(rng, 4, 1)[0]
        slash = gamma_slash_unit(x, gammas, g)
        imat = -inversion_matrix(x, g)  # corrupted
        worst = 0.0
        for mu in range(4):
            lhs = slash @ (g.diag[mu] * gammas[mu]) @ slash
            rhs = np.zeros_like(lhs)
            for nu in range(4):
                rhs -= imat[mu, nu] * g.diag[nu] * gammas[nu]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        assert worst > 1.0

    def test_spacelike_rejected(self):
        with pytest.raises(NonTimelikePoint):
            sandwich_identity_residual(np.array([0.0, 2, 0, 0]), build_gammas(4), Metric(4))
