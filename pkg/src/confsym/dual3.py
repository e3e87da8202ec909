"""Scalar-potential formulation of the D = 3 Maxwell theory.

The antisymmetric field strength is represented through the rank-3 symbol
and the gradient of a single scalar, which interchanges the roles of the
equation of motion and the cyclic (Bianchi) identity: the former becomes an
identity, the latter carries the dynamics.
"""

from __future__ import annotations

import numpy as np

from .errors import OffShellParameters, WrongDimension
from .fields import (
    CosineMultiplet,
    CosineVectorPotential,
    FieldStrengthValue,
    ScalarField,
    VectorPotential,
)
from .geometry import Metric, levi_civita3, levi_civita3_upper
from .noether import improved_scalar_stress, _raise2
from .transforms import (
    delta_field_strength_primary,
    delta_scalar_with_gradient,
)
from .geometry import special_conformal


def _check_dim3(metric: Metric, phi=None):
    if metric.dim != 3:
        raise WrongDimension("the dual scalar formulation lives at D = 3")
    if phi is not None and phi.dim != 3:
        raise WrongDimension("dual scalar field must be three-dimensional")


def field_strength_from_dual(phi: ScalarField, x, metric: Metric) -> FieldStrengthValue:
    """F_{ab} = eps_{abm} d^m phi, with first derivatives."""
    _check_dim3(metric, phi)
    eps = levi_civita3()
    grad_up = metric.raise_index(phi.grad(x))
    hess_up = metric.diag[:, None] * phi.hess(x)  # d^m d_r phi, [m, r]
    F = np.einsum("abm,m->ab", eps, grad_up)
    dF = np.einsum("abm,mr->abr", eps, hess_up)
    return FieldStrengthValue(F, dF)


def dual_roundtrip_residual(phi: ScalarField, x, metric: Metric) -> float:
    """Half the symbol contraction of F must rebuild the raised gradient."""
    _check_dim3(metric, phi)
    fs = field_strength_from_dual(phi, x, metric)
    eps_up = levi_civita3_upper(metric)
    rebuilt = 0.5 * np.einsum("mab,ab->m", eps_up, fs.F)
    return float(np.max(np.abs(rebuilt - metric.raise_index(phi.grad(x)))))


def maxwell_eom_from_dual(phi: ScalarField, x, metric: Metric) -> np.ndarray:
    """d_a F^{ab} for the dual-built F: an identity (zero for any phi)."""
    _check_dim3(metric, phi)
    fs = field_strength_from_dual(phi, x, metric)
    return np.einsum("a,b,aba->b", metric.diag, metric.diag, fs.dF)


def dual_onshell_residual(phi: ScalarField, x, metric: Metric) -> float:
    """The wave operator on phi; the dynamics carried by the cyclic identity."""
    _check_dim3(metric, phi)
    return float(phi.box(x, metric))


def bianchi_pattern_residual(phi: ScalarField, x, metric: Metric) -> float:
    """Cyclic derivative sum of the dual F against its closed form
    eps_{bca} box phi (hand-worked symbol identity)."""
    _check_dim3(metric, phi)
    fs = field_strength_from_dual(phi, x, metric)
    cyc = (
        np.einsum("bca->abc", fs.dF)
        + np.einsum("cab->abc", fs.dF)
        + fs.dF
    )
    eps = levi_civita3()
    expected = np.einsum("bca->abc", eps) * phi.box(x, metric)
    return float(np.max(np.abs(cyc - expected)))


def _sigma_basis_conformal(sigma, metric, weight, spin):
    c = np.zeros(metric.dim)
    c[sigma] = metric.diag[sigma]
    return special_conformal(c, weight=weight, spin=spin)


def primary_rule_F(phi: ScalarField, x, sigma: int, metric: Metric) -> np.ndarray:
    """The pretend-primary conformal rule applied to the dual-built F."""
    _check_dim3(metric, phi)
    gen = _sigma_basis_conformal(sigma, metric, 1.5, "field-strength")
    fs = field_strength_from_dual(phi, x, metric)
    return delta_field_strength_primary(gen, fs, x, metric)


def delta_bar_F(phi: ScalarField, x, sigma: int, metric: Metric) -> np.ndarray:
    """Conformal variation of F induced by the scalar-potential rule.

    Equals the pretend-primary rule plus the inhomogeneous eps_{ab}^sigma phi
    term, so F stays non-primary in the dual formulation as well.
    """
    _check_dim3(metric, phi)
    eps_mixed = levi_civita3()[:, :, sigma] * metric.diag[sigma]
    return primary_rule_F(phi, x, sigma, metric) + eps_mixed * phi.value(x)


def delta_bar_F_chain_rule(phi: ScalarField, x, sigma: int, metric: Metric):
    """Independent route: the symbol contraction of the raised gradient of
    the scalar conformal variation (weight one half)."""
    _check_dim3(metric, phi)
    gen = _sigma_basis_conformal(sigma, metric, 0.5, "scalar")
    _, ddelta = delta_scalar_with_gradient(gen, phi, x, metric)
    d_up = metric.diag * ddelta[0]
    return np.einsum("abm,m->ab", levi_civita3(), d_up)


def nonprimary_shift_residual(phi: ScalarField, x, sigma: int, metric: Metric) -> float:
    """delta-bar F minus the pretend-primary rule minus eps_{ab}^sigma phi."""
    shift = delta_bar_F_chain_rule(phi, x, sigma, metric) - primary_rule_F(
        phi, x, sigma, metric
    )
    eps_mixed = levi_civita3()[:, :, sigma] * metric.diag[sigma]
    return float(np.max(np.abs(shift - eps_mixed * phi.value(x))))


def improved_stress_from_F(phi: ScalarField, x, metric: Metric) -> np.ndarray:
    """The improved, traceless stress tensor written through F and phi.

    -3/4 F^{ma} F^n_a + 1/4 g^{mn} F^2 - phi/16 (d^m W^n + d^n W^m) with
    W^n the symbol contraction of F.  Equals the scalar-form improved tensor
    when phi is on shell (their difference is proportional to box phi).
    """
    _check_dim3(metric, phi)
    fs = field_strength_from_dual(phi, x, metric)
    f_up = _raise2(fs.F, metric)
    mixed = metric.diag[:, None] * fs.F  # F^n_a
    f2 = float(np.sum(f_up * fs.F))
    eps_up = levi_civita3_upper(metric)
    # dW[n, r] = d_r W^n, then raise r
    dW = np.einsum("nab,abr->nr", eps_up, fs.dF)
    dW_up = dW * metric.diag[None, :]
    theta = -0.75 * np.einsum("ma,na->mn", f_up, mixed)
    theta += 0.25 * np.diag(metric.diag) * f2
    theta -= (phi.value(x) / 16.0) * (dW_up + dW_up.T)
    return theta


def improved_stress_scalar_form(phi: ScalarField, x, metric: Metric) -> np.ndarray:
    """The same tensor from the scalar side (canonical plus improvement)."""
    _check_dim3(metric, phi)
    return improved_scalar_stress(phi, x, metric, coupling=0.0)


def duality_mismatch(A: VectorPotential, phi: ScalarField, x, metric: Metric):
    """Diagnostic eps^{mab} d_a A_b - d^m phi.

    Carries no pass/fail contract: the relation between the two formulations
    is non-local and only special pairs satisfy it pointwise.
    """
    _check_dim3(metric, phi)
    if A.dim != 3:
        raise WrongDimension("vector potential must be three-dimensional")
    eps_up = levi_civita3_upper(metric)
    grad_a = A.grad(x)  # grad[b, a] = d_a A_b
    curl = np.einsum("mab,ba->m", eps_up, grad_a)
    return curl - metric.raise_index(phi.grad(x))


def matched_plane_wave_pair(k, amplitude, phase, metric: Metric):
    """(phi, A) plane-wave pair satisfying the duality relation pointwise.

    Solves the algebraic cross-product condition for the polarisation; only
    null wave vectors admit a solution.
    """
    _check_dim3(metric)
    k = metric._check(k)
    if abs(metric.norm2(k)) > 1e-12:
        raise OffShellParameters("matched pair requires a null wave vector")
    eps_up = levi_civita3_upper(metric)
    m = np.einsum("mab,a->mb", eps_up, metric.lower(k))
    rhs = float(amplitude) * k
    w_low, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    if np.max(np.abs(m @ w_low - rhs)) > 1e-10:
        raise OffShellParameters("no polarisation solves the duality condition")
    phi = CosineMultiplet(k, [amplitude], phase, metric).component(0)
    A = CosineVectorPotential(k, metric.raise_index(w_low), phase, metric)
    return phi, A
