"""Gamma matrices in 2..6 dimensions, spin matrices, and the reflection
identity that decouples spinor indices from finite conformal transformations.
"""

from __future__ import annotations

import numpy as np

from .errors import NonTimelikePoint, UnsupportedDimension
from .geometry import Metric, inversion_matrix

MIN_DIM = 2
MAX_DIM = 6

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)


class GammaSet:
    """Gamma matrices satisfying {gamma^mu, gamma^nu} = 2 g^{mu nu} exactly."""

    def __init__(self, dim: int, matrices):
        self.dim = int(dim)
        self.matrices = tuple(np.asarray(m, dtype=complex) for m in matrices)
        self.size = self.matrices[0].shape[0]
        for m in self.matrices:
            m.flags.writeable = False

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.matrices[mu]

    def spin_matrix(self, mu: int, nu: int) -> np.ndarray:
        """Antisymmetric spin matrix, one quarter of the gamma commutator."""
        g_mu, g_nu = self.matrices[mu], self.matrices[nu]
        return 0.25 * (g_mu @ g_nu - g_nu @ g_mu)

    def slash_lower(self, v_lower) -> np.ndarray:
        """Contraction v_mu gamma^mu for a lower-index coefficient vector."""
        v_lower = np.asarray(v_lower)
        out = np.zeros((self.size, self.size), dtype=complex)
        for mu in range(self.dim):
            out += v_lower[mu] * self.matrices[mu]
        return out


def build_gammas(dim: int) -> GammaSet:
    """Recursive tensor-product construction of a gamma set for 2 <= D <= 6.

    Starting from the two-dimensional pair, odd dimensions append the
    normalised product of all matrices so far, and even dimensions tensor the
    set up one Pauli level.  Matrix size is 2^floor(D/2).
    """
    if not MIN_DIM <= dim <= MAX_DIM:
        raise UnsupportedDimension(f"gamma sets support {MIN_DIM} <= D <= {MAX_DIM}")
    gammas = [_SIGMA_X.copy(), -1.0j * _SIGMA_Y]
    while len(gammas) < dim:
        if len(gammas) % 2 == 0:
            prod = gammas[0]
            for m in gammas[1:]:
                prod = prod @ m
            square = prod @ prod
            # spatial matrices must square to -1
            if square[0, 0].real > 0:
                prod = 1.0j * prod
            gammas.append(prod)
        else:
            size = gammas[0].shape[0]
            gammas = [np.kron(_SIGMA_X, m) for m in gammas]
            gammas.append(np.kron(1.0j * _SIGMA_Y, np.eye(size, dtype=complex)))
    return GammaSet(dim, gammas)


def anticommutator_residual(gammas: GammaSet, metric: Metric) -> float:
    """Max-norm violation of the defining relation over all index pairs."""
    worst = 0.0
    eye = np.eye(gammas.size, dtype=complex)
    for mu in range(gammas.dim):
        for nu in range(gammas.dim):
            acomm = gammas[mu] @ gammas[nu] + gammas[nu] @ gammas[mu]
            target = 2.0 * (metric.diag[mu] if mu == nu else 0.0) * eye
            worst = max(worst, float(np.max(np.abs(acomm - target))))
    return worst


def gamma_slash_unit(x, gammas: GammaSet, metric: Metric) -> np.ndarray:
    """gamma_mu x^mu / sqrt(x^2); squares to the identity for timelike x."""
    x = metric._check(x)
    x2 = metric.norm2(x)
    if x2 <= 0:
        raise NonTimelikePoint(f"x^2 = {x2} must be positive")
    return gammas.slash_lower(metric.lower(x) / np.sqrt(x2))


def sandwich_identity_residual(x, gammas: GammaSet, metric: Metric) -> float:
    """Residual of the reflection identity tying the slashed unit vector to
    the inversion matrix:  (slash x) gamma_mu (slash x) = -I_mu^nu gamma_nu.
    """
    slash = gamma_slash_unit(x, gammas, metric)
    imat = inversion_matrix(x, metric)
    worst = 0.0
    for mu in range(gammas.dim):
        gamma_mu_low = metric.diag[mu] * gammas[mu]
        lhs = slash @ gamma_mu_low @ slash
        rhs = np.zeros_like(lhs)
        for nu in range(gammas.dim):
            rhs -= imat[mu, nu] * metric.diag[nu] * gammas[nu]
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
