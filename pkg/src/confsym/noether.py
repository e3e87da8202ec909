"""Lagrangian models, stress tensors, improvements, virials and currents.

Index conventions follow the rest of the package: stress tensors are stored
with both indices up, ``theta[m, n] = theta^{mn}``, and their analytic
derivative stacks carry the derivative axis last,
``dtheta[m, n, r] = d_r theta^{mn}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnsupportedDimension
from .fields import (
    ScalarField,
    ShiftedPotential,
    VectorPotential,
    field_strength_from_potential,
)
from .geometry import (
    GeneratorAction,
    Metric,
    canonical_weight,
    dilation,
    killing_divergence,
    killing_gradient,
    killing_vector,
    special_conformal,
)
from .transforms import (
    delta_field_strength_primary,
    delta_scalar_with_gradient,
    delta_vector_potential_with_gradient,
)

# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxwellModel:
    """Free electromagnetic field formulated through a vector potential."""

    dim: int


@dataclass(frozen=True)
class MultipletModel:
    """N-component scalar with the scale/conformal-invariant power potential.

    Density: half the kinetic square minus coupling * (Phi.Phi)^(D/(D-2)).
    Requires D >= 3 so the exponent is finite.
    """

    dim: int
    n_comp: int
    coupling: float = 0.0

    def __post_init__(self):
        if self.dim < 3:
            raise UnsupportedDimension("the power potential needs D >= 3")
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")

    @property
    def power(self) -> float:
        return self.dim / (self.dim - 2.0)


@dataclass(frozen=True)
class GeneralScalarModel:
    """Single scalar with density L(z) phi^p, z = (dphi.dphi) / phi^p.

    Scale invariant for every profile L; conformally invariant only when L is
    linear.  ``linear_part`` carries (L0, L1) when the profile is known to be
    linear, which also fixes the closed-form virial potential.
    """

    dim: int
    profile: Callable[[float], float]
    profile_prime: Callable[[float], float]
    linear_part: Optional[tuple] = None

    def __post_init__(self):
        if self.dim < 3:
            raise UnsupportedDimension("the scale-invariant power needs D >= 3")

    @property
    def power(self) -> float:
        return 2.0 * self.dim / (self.dim - 2.0)

    @property
    def kinetic_coefficient(self) -> float:
        """L'(0); the coefficient entering the conformal improvement term."""
        return float(self.profile_prime(0.0))


def linear_scalar_model(dim: int, l0: float, l1: float) -> GeneralScalarModel:
    return GeneralScalarModel(
        dim, lambda z: l0 + l1 * z, lambda z: l1, linear_part=(float(l0), float(l1))
    )


def quadratic_scalar_model(dim: int) -> GeneralScalarModel:
    """The z^2 profile: scale invariant, conformally non-invariant."""
    return GeneralScalarModel(dim, lambda z: z * z, lambda z: 2.0 * z)


@dataclass(frozen=True)
class DualScalarModel:
    """Scalar-potential formulation of the D = 3 Maxwell theory.

    The density is minus half the kinetic square: the duality map fixes this
    sign, and the quadratic improvement term inherits it.
    """

    dim: int = 3

    def __post_init__(self):
        if self.dim != 3:
            raise UnsupportedDimension("the dual scalar formulation lives at D = 3")


# ---------------------------------------------------------------------------
# small index helpers
# ---------------------------------------------------------------------------


def _raise2(T, metric: Metric):
    return metric.diag[:, None] * T * metric.diag[None, :]


def _fs(A, x, with_second=False):
    return field_strength_from_potential(A, x, with_second)


def _f_squared(F, metric: Metric) -> float:
    return float(np.sum(_raise2(F, metric) * F))


def _scalar_stack(phi, x):
    value = np.atleast_1d(phi.value(x))
    grad = np.atleast_2d(phi.grad(x))
    hess = phi.hess(x)
    if hess.ndim == 2:
        hess = hess[None, ...]
    return value, grad, hess


def _scalar_third(phi, x):
    third = phi.third(x)
    if third.ndim == 3:
        third = third[None, ...]
    return third


# ---------------------------------------------------------------------------
# Lagrangian values and gradients
# ---------------------------------------------------------------------------


def _potential(model: MultipletModel, s: float) -> float:
    return model.coupling * s**model.power


def _potential_prime(model: MultipletModel, value) -> np.ndarray:
    """dU/dphi_i for the power potential."""
    s = float(value @ value)
    return 2.0 * model.coupling * model.power * s ** (model.power - 1.0) * value


def lagrangian_value(model, fields, x, metric: Metric) -> float:
    """Pointwise Lagrange density of the given model."""
    if isinstance(model, MaxwellModel):
        F = _fs(fields, x).F
        return -0.25 * _f_squared(F, metric)
    if isinstance(model, MultipletModel):
        value, grad, _ = _scalar_stack(fields, x)
        kinetic = 0.5 * float(np.einsum("m,im,im->", metric.diag, grad, grad))
        return kinetic - _potential(model, float(value @ value))
    if isinstance(model, GeneralScalarModel):
        value, grad, _ = _scalar_stack(fields, x)
        phi = float(value[0])
        power_term = phi**model.power
        s = float(np.einsum("m,m,m->", metric.diag, grad[0], grad[0]))
        return float(model.profile(s / power_term)) * power_term
    if isinstance(model, DualScalarModel):
        value, grad, _ = _scalar_stack(fields, x)
        return -0.5 * float(np.einsum("m,m,m->", metric.diag, grad[0], grad[0]))
    raise TypeError(f"unknown model {model!r}")


def lagrangian_gradient(model, fields, x, metric: Metric) -> np.ndarray:
    """Total derivative d_m L along the field configuration."""
    if isinstance(model, MaxwellModel):
        fs = _fs(fields, x)
        return -0.5 * np.einsum("ab,abm->m", _raise2(fs.F, metric), fs.dF)
    if isinstance(model, MultipletModel):
        value, grad, hess = _scalar_stack(fields, x)
        out = np.einsum("a,ia,iam->m", metric.diag, grad, hess)
        out -= _potential_prime(model, value) @ grad
        return out
    if isinstance(model, GeneralScalarModel):
        value, grad, hess = _scalar_stack(fields, x)
        dl_dphi, mom = _general_scalar_conjugates(model, value, grad, metric)
        return dl_dphi * grad[0] + np.einsum("a,am->m", mom, hess[0])
    if isinstance(model, DualScalarModel):
        value, grad, hess = _scalar_stack(fields, x)
        return -np.einsum("a,a,am->m", metric.diag, grad[0], hess[0])
    raise TypeError(f"unknown model {model!r}")


def _general_scalar_conjugates(model: GeneralScalarModel, value, grad, metric):
    """(dL/dphi, dL/d(d_m phi)) for the profile density."""
    phi = float(value[0])
    p = model.power
    power_term = phi**p
    s = float(np.einsum("m,m,m->", metric.diag, grad[0], grad[0]))
    z = s / power_term
    lp = float(model.profile_prime(z))
    lv = float(model.profile(z))
    dl_dphi = p * phi ** (p - 1.0) * (lv - z * lp)
    mom = 2.0 * lp * metric.diag * grad[0]  # dL/d(d_m phi) carries an upper index
    return dl_dphi, mom


# ---------------------------------------------------------------------------
# stress tensors
# ---------------------------------------------------------------------------


def maxwell_stress(A: VectorPotential, x, metric: Metric) -> np.ndarray:
    """theta^{mn} = -F^{ma} F^n_a + g^{mn} F^2 / 4; symmetric, conserved on
    shell, traceless only at D = 4."""
    F = _fs(A, x).F
    f_up = _raise2(F, metric)
    mixed = metric.diag[:, None] * F  # F^n_a stored [n, a]
    theta = -np.einsum("ma,na->mn", f_up, mixed)
    theta += np.diag(metric.diag) * (0.25 * _f_squared(F, metric))
    return theta


def maxwell_stress_divergence(A: VectorPotential, x, metric: Metric) -> np.ndarray:
    """d_m theta^{mn}; vanishes on shell."""
    fs = _fs(A, x)
    f_up = _raise2(fs.F, metric)
    df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
    mixed = metric.diag[:, None] * fs.F
    dmixed = metric.diag[:, None, None] * fs.dF
    dtheta = -np.einsum("mar,na->mnr", df_up, mixed)
    dtheta -= np.einsum("ma,nar->mnr", f_up, dmixed)
    df2 = 2.0 * np.einsum("ab,abr->r", f_up, fs.dF)
    dtheta += 0.25 * np.einsum("mn,r->mnr", np.diag(metric.diag), df2)
    return np.einsum("mnm->n", dtheta)


def maxwell_stress_trace(A: VectorPotential, x, metric: Metric) -> float:
    """g_{mn} theta^{mn}; equals (-1 + D/4) F^2 identically."""
    theta = maxwell_stress(A, x, metric)
    return float(np.einsum("m,mm->", metric.diag, theta))


def maxwell_eom_residual(A: VectorPotential, x, metric: Metric) -> np.ndarray:
    """d_a F^{ab}; zero exactly on the on-shell plane-wave fixtures."""
    fs = _fs(A, x)
    return np.einsum("a,b,aba->b", metric.diag, metric.diag, fs.dF)


def bianchi_residual(A: VectorPotential, x) -> float:
    """Max-norm of the cyclic derivative sum of F; identically zero when F
    derives from a potential."""
    dF = _fs(A, x).dF
    cyc = (
        np.einsum("bca->abc", dF)
        + np.einsum("cab->abc", dF)
        + np.einsum("abc->abc", dF)
    )
    return float(np.max(np.abs(cyc)))


def scalar_stress(phi, x, metric: Metric, coupling: float = 0.0) -> np.ndarray:
    """Canonical scalar stress tensor d^m Phi . d^n Phi - g^{mn} density.

    ``coupling`` adds the conformal power potential of :class:`MultipletModel`.
    The dual-scalar sector reuses this standard form (the duality map sends
    the Maxwell stress tensor to it, regardless of the sign carried by the
    dual density).
    """
    value, grad, _ = _scalar_stack(phi, x)
    grad_up = grad * metric.diag[None, :]
    theta = np.einsum("im,in->mn", grad_up, grad_up)
    model = MultipletModel(metric.dim, value.shape[0], coupling)
    density = 0.5 * float(np.einsum("m,im,im->", metric.diag, grad, grad))
    density -= _potential(model, float(value @ value))
    theta -= np.diag(metric.diag) * density
    return theta


def scalar_stress_divergence(phi, x, metric: Metric, coupling: float = 0.0):
    """d_m theta^{mn} for the canonical scalar tensor."""
    value, grad, hess = _scalar_stack(phi, x)
    model = MultipletModel(metric.dim, value.shape[0], coupling)
    grad_up = grad * metric.diag[None, :]
    hess_up = hess * metric.diag[None, :, None]
    dtheta = np.einsum("imr,in->mnr", hess_up, grad_up)
    dtheta += np.einsum("im,inr->mnr", grad_up, hess_up)
    dl = np.einsum("a,ia,iar->r", metric.diag, grad, hess)
    dl -= _potential_prime(model, value) @ grad
    dtheta -= np.einsum("mn,r->mnr", np.diag(metric.diag), dl)
    return np.einsum("mnm->n", dtheta)


def improvement_coefficient(dim: int) -> float:
    """(D - 2) / (4 (D - 1)): the unique weight making the improved scalar
    stress tensor traceless on shell in any dimension."""
    return (dim - 2.0) / (4.0 * (dim - 1.0))


def _square_stacks(phi, x, with_third=False):
    """Derivative stacks of S = Phi.Phi, exactly symmetric by construction."""
    value, grad, hess = _scalar_stack(phi, x)
    s_grad = 2.0 * np.einsum("i,im->m", value, grad)
    s_hess = 2.0 * (
        np.einsum("im,in->mn", grad, grad) + np.einsum("i,imn->mn", value, hess)
    )
    if not with_third:
        return s_grad, s_hess, None
    third = _scalar_third(phi, x)
    s_third = 2.0 * (
        np.einsum("imn,ir->mnr", hess, grad)
        + np.einsum("imr,in->mnr", hess, grad)
        + np.einsum("inr,im->mnr", hess, grad)
        + np.einsum("i,imnr->mnr", value, third)
    )
    return s_grad, s_hess, s_third


def improved_scalar_stress(
    phi, x, metric: Metric, coupling: float = 0.0, sign: float = 1.0
) -> np.ndarray:
    """Canonical tensor plus xi (g^{mn} box - d^m d^n) of Phi.Phi.

    ``sign`` scales the improvement term; the dual scalar sector passes the
    same +1 as the standard scalar (its tensor is the standard one).
    """
    xi = improvement_coefficient(metric.dim)
    theta = scalar_stress(phi, x, metric, coupling)
    _, s_hess, _ = _square_stacks(phi, x)
    box_s = float(np.einsum("m,mm->", metric.diag, s_hess))
    improvement = np.diag(metric.diag) * box_s - _raise2(s_hess, metric)
    return theta + sign * xi * improvement


def improved_scalar_stress_divergence(phi, x, metric: Metric, coupling: float = 0.0):
    """d_m theta_improved^{mn}; the improvement part cancels identically."""
    div = scalar_stress_divergence(phi, x, metric, coupling)
    xi = improvement_coefficient(metric.dim)
    _, _, s_third = _square_stacks(phi, x, with_third=True)
    d_box = np.einsum("a,aar->r", metric.diag, s_third)
    box_d = np.einsum("m,mnm->n", metric.diag, s_third)
    return div + xi * (metric.diag * d_box - metric.diag * box_d)


def improved_scalar_stress_trace(phi, x, metric: Metric, coupling: float = 0.0):
    """g_{mn} theta_improved^{mn}; vanishes on shell."""
    theta = improved_scalar_stress(phi, x, metric, coupling)
    return float(np.einsum("m,mm->", metric.diag, theta))


def offshell_trace_law(phi, x, metric: Metric, coupling: float = 0.0) -> float:
    """Closed form of the improved trace valid off shell:
    D * potential + (D - 2)/2 * Phi . box Phi.  Derived by hand; serves as an
    independent oracle for the trace computation."""
    value, grad, hess = _scalar_stack(phi, x)
    dim = metric.dim
    model = MultipletModel(dim, value.shape[0], coupling)
    box = np.einsum("m,imm->i", metric.diag, hess)
    return dim * _potential(model, float(value @ value)) + 0.5 * (dim - 2.0) * float(
        value @ box
    )


# ---------------------------------------------------------------------------
# virials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VirialInfo:
    """Virial value with its total-divergence status.

    When ``is_total_divergence`` the ``potential`` callable returns the
    rank-two tensor sigma[m, a] (indices up) whose divergence d_m sigma^{ma}
    reproduces the virial.
    """

    value: np.ndarray
    is_total_divergence: bool
    potential: Optional[Callable] = None


def field_virial(model, fields, x, metric: Metric) -> VirialInfo:
    """The field virial: the obstruction to promoting scale symmetry to
    conformal symmetry when it fails to be a total divergence."""
    dim = metric.dim
    d = canonical_weight(dim)
    if isinstance(model, MaxwellModel):
        fs = _fs(fields, x)
        value = 0.5 * (4.0 - dim) * (_raise2(fs.F, metric) @ fields.value(x))
        if dim == 4:
            return VirialInfo(value, True, lambda y: np.zeros((dim, dim)))
        return VirialInfo(value, False)
    if isinstance(model, MultipletModel):
        value_f, grad, _ = _scalar_stack(fields, x)
        v = d * metric.diag * np.einsum("i,im->m", value_f, grad)

        def potential(y):
            val = np.atleast_1d(fields.value(y))
            return 0.5 * d * np.diag(metric.diag) * float(val @ val)

        return VirialInfo(v, True, potential)
    if isinstance(model, DualScalarModel):
        value_f, grad, _ = _scalar_stack(fields, x)
        v = -d * metric.diag * np.einsum("i,im->m", value_f, grad)

        def potential(y):
            val = np.atleast_1d(fields.value(y))
            return -0.5 * d * np.diag(metric.diag) * float(val @ val)

        return VirialInfo(v, True, potential)
    if isinstance(model, GeneralScalarModel):
        value_f, grad, _ = _scalar_stack(fields, x)
        # mom is dL/d(d_m phi) and already carries an upper index
        _, mom = _general_scalar_conjugates(model, value_f, grad, metric)
        v = d * float(value_f[0]) * mom
        if model.linear_part is None:
            return VirialInfo(v, False)
        l1 = model.linear_part[1]

        def potential(y):
            val = float(np.atleast_1d(fields.value(y))[0])
            return d * l1 * np.diag(metric.diag) * val * val

        return VirialInfo(v, True, potential)
    raise TypeError(f"unknown model {model!r}")


def maxwell_virial_first_principles(A: VectorPotential, x, metric: Metric):
    """The virial evaluated straight from its definition with the vector spin
    matrix; an independent route to the (4 - D)/2 F A closed form."""
    dim = metric.dim
    d = canonical_weight(dim)
    fs = _fs(A, x)
    value = A.value(x)
    # mom[m, b] = dL / d(d^m A_b) = -F_m^b
    mom = -metric.diag[None, :] * fs.F
    upper = metric.diag * value
    term1 = d * metric.diag * (mom @ value)
    term2 = -np.trace(mom) * upper + mom.T @ upper
    return term1 + term2


# ---------------------------------------------------------------------------
# currents
# ---------------------------------------------------------------------------


def scale_current_maxwell(A: VectorPotential, x, metric: Metric) -> np.ndarray:
    """J^m = theta^m_a x^a + (4 - D)/2 F^{ma} A_a (the improved form)."""
    x = metric._check(x)
    theta = maxwell_stress(A, x, metric)
    fs = _fs(A, x)
    return theta @ metric.lower(x) + 0.5 * (4.0 - metric.dim) * (
        _raise2(fs.F, metric) @ A.value(x)
    )


def scale_current_maxwell_divergence(A: VectorPotential, x, metric: Metric) -> float:
    """d_m J^m for the improved scale current; zero on shell in every D."""
    x = metric._check(x)
    dim = metric.dim
    fs = _fs(A, x)
    theta_div = maxwell_stress_divergence(A, x, metric)
    trace = maxwell_stress_trace(A, x, metric)
    out = float(theta_div @ metric.lower(x)) + trace
    f_up = _raise2(fs.F, metric)
    df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
    div_fa = float(np.einsum("mam,a->", df_up, A.value(x)))
    div_fa += float(np.einsum("ma,am->", f_up, A.grad(x)))
    return out + 0.5 * (4.0 - dim) * div_fa


def noether_scale_current_maxwell(A: VectorPotential, x, metric: Metric):
    """The raw construction before dropping the trivially conserved piece:
    momentum times dilation variation minus x^m times the density."""
    x = metric._check(x)
    gen = dilation(1.0, metric.dim, spin="vector")
    fs = _fs(A, x)
    delta, _ = delta_vector_potential_with_gradient(gen, A, x, metric)
    lag = lagrangian_value(MaxwellModel(metric.dim), A, x, metric)
    return -_raise2(fs.F, metric) @ delta - x * lag


def noether_scale_current_maxwell_divergence(A: VectorPotential, x, metric: Metric):
    """Divergence of the raw current; equals the improved one identically."""
    x = metric._check(x)
    gen = dilation(1.0, metric.dim, spin="vector")
    fs = _fs(A, x)
    delta, ddelta = delta_vector_potential_with_gradient(gen, A, x, metric)
    df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
    f_up = _raise2(fs.F, metric)
    out = -float(np.einsum("mam,a->", df_up, delta))
    out -= float(np.einsum("ma,am->", f_up, ddelta))
    model = MaxwellModel(metric.dim)
    out -= metric.dim * lagrangian_value(model, A, x, metric)
    out -= float(x @ lagrangian_gradient(model, A, x, metric))
    return out


def bessel_hagen_current(gen: GeneratorAction, model, fields, x, metric: Metric):
    """Currents built from the stress tensor and a conformal Killing vector.

    Maxwell: theta^{ma} f_a + (4 - D)/(2D) (d.f) F^{mb} A_b.
    Scalar sectors: theta_improved^{mn} f_n.
    """
    x = metric._check(x)
    f_low = metric.lower(killing_vector(gen, x, metric))
    if isinstance(model, MaxwellModel):
        theta = maxwell_stress(fields, x, metric)
        fs = _fs(fields, x)
        div = killing_divergence(gen, x, metric)
        coeff = (4.0 - metric.dim) / (2.0 * metric.dim)
        return theta @ f_low + coeff * div * (_raise2(fs.F, metric) @ fields.value(x))
    coupling = model.coupling if isinstance(model, MultipletModel) else 0.0
    theta = improved_scalar_stress(fields, x, metric, coupling)
    return theta @ f_low


def bessel_hagen_divergence(gen: GeneratorAction, model, fields, x, metric: Metric):
    """d_m J^m for :func:`bessel_hagen_current`, all derivatives analytic."""
    x = metric._check(x)
    f = killing_vector(gen, x, metric)
    f_low = metric.lower(f)
    df = killing_gradient(gen, x, metric)
    grad_f_low = (metric.diag[:, None] * df).T  # [m, n] = d_m f_n
    if isinstance(model, MaxwellModel):
        dim = metric.dim
        theta = maxwell_stress(fields, x, metric)
        theta_div = maxwell_stress_divergence(fields, x, metric)
        out = float(theta_div @ f_low) + float(np.sum(theta * grad_f_low))
        fs = _fs(fields, x)
        f_up = _raise2(fs.F, metric)
        df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
        coeff = (4.0 - dim) / (2.0 * dim)
        div = killing_divergence(gen, x, metric)
        ddiv = np.zeros(dim)
        if gen.kind == "special-conformal":
            ddiv = 2.0 * dim * metric.lower(gen.param)
        fa = f_up @ fields.value(x)
        div_fa = float(np.einsum("mam,a->", df_up, fields.value(x)))
        div_fa += float(np.einsum("ma,am->", f_up, fields.grad(x)))
        return out + coeff * (float(ddiv @ fa) + div * div_fa)
    coupling = model.coupling if isinstance(model, MultipletModel) else 0.0
    theta = improved_scalar_stress(fields, x, metric, coupling)
    theta_div = improved_scalar_stress_divergence(fields, x, metric, coupling)
    return float(theta_div @ f_low) + float(np.sum(theta * grad_f_low))


def current_divergence_identity(gen: GeneratorAction, A: VectorPotential, x, metric):
    """(computed, predicted) divergence of the Maxwell Killing current.

    The prediction is zero for Poincare and scale transformations and
    (4 - D) c_m F^{mb} A_b for special conformal ones; on shell the computed
    value matches it.
    """
    lhs = bessel_hagen_divergence(gen, MaxwellModel(metric.dim), A, x, metric)
    if gen.kind == "special-conformal":
        fs = _fs(A, x)
        cl = metric.lower(gen.param)
        rhs = (4.0 - metric.dim) * float(cl @ (_raise2(fs.F, metric) @ A.value(x)))
    else:
        rhs = 0.0
    return lhs, rhs


# ---------------------------------------------------------------------------
# gauge response of the scale current
# ---------------------------------------------------------------------------


def gauge_shift_scale_current(A: VectorPotential, gauge: ScalarField, x, metric):
    """(shift, predicted) change of the scale current under A -> A + d Omega.

    ``shift`` is evaluated literally as the difference of the two currents;
    ``predicted`` is the divergence form (4-D)/2 d_a (F^{ma} Omega), which
    matches pointwise on shell.
    """
    x = metric._check(x)
    shifted = ShiftedPotential(A, gauge)
    shift = scale_current_maxwell(shifted, x, metric) - scale_current_maxwell(
        A, x, metric
    )
    fs = _fs(A, x)
    f_up = _raise2(fs.F, metric)
    df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
    omega = gauge.value(x)
    d_omega = gauge.grad(x)
    coeff = 0.5 * (4.0 - metric.dim)
    predicted = coeff * (np.einsum("maa->m", df_up) * omega + f_up @ d_omega)
    return shift, predicted


def gauge_shift_divergence(A: VectorPotential, gauge: ScalarField, x, metric) -> float:
    """d_m of the scale-current shift; trivially conserved on shell."""
    x = metric._check(x)
    fs = _fs(A, x)
    f_up = _raise2(fs.F, metric)
    df_up = metric.diag[:, None, None] * fs.dF * metric.diag[None, :, None]
    d_omega = gauge.grad(x)
    h_omega = gauge.hess(x)
    coeff = 0.5 * (4.0 - metric.dim)
    out = float(np.einsum("mam,a->", df_up, d_omega))
    out += float(np.einsum("ma,am->", f_up, h_omega))
    return coeff * out


# ---------------------------------------------------------------------------
# off-shell action variation identities
# ---------------------------------------------------------------------------


def _conformal_basis_generator(sigma, metric, weight, spin):
    """Parameter choice making the contracted variation equal the
    sigma-indexed one: lower components of c are the sigma basis vector."""
    c = np.zeros(metric.dim)
    c[sigma] = metric.diag[sigma]
    return special_conformal(c, weight=weight, spin=spin)


def _delta_lagrangian_maxwell(gen, A, x, metric):
    fs = _fs(A, x)
    _, ddelta = delta_vector_potential_with_gradient(gen, A, x, metric)
    return -float(np.einsum("ma,am->", _raise2(fs.F, metric), ddelta))


def _delta_lagrangian_scalar(model, gen, phi, x, metric):
    value, grad, _ = _scalar_stack(phi, x)
    delta, ddelta = delta_scalar_with_gradient(gen, phi, x, metric)
    if isinstance(model, MultipletModel):
        mom = grad * metric.diag[None, :]  # dL/d(d_m phi_i) index up
        dl_dphi = -_potential_prime(model, value)
        return float(dl_dphi @ delta) + float(np.sum(mom * ddelta))
    if isinstance(model, GeneralScalarModel):
        dl_dphi, mom = _general_scalar_conjugates(model, value, grad, metric)
        return dl_dphi * float(delta[0]) + float(mom @ ddelta[0])
    if isinstance(model, DualScalarModel):
        mom = -metric.diag * grad[0]
        return float(mom @ ddelta[0])
    raise TypeError(f"unknown model {model!r}")


def _improvement_kappa(model, metric) -> float:
    """Coefficient of the g^{st} Phi^2 improvement in the conformal identity:
    twice the canonical weight times the kinetic coefficient."""
    d = canonical_weight(metric.dim)
    if isinstance(model, MultipletModel):
        return d  # kinetic coefficient 1/2
    if isinstance(model, DualScalarModel):
        return -d  # kinetic coefficient -1/2
    if isinstance(model, GeneralScalarModel):
        return 2.0 * d * model.kinetic_coefficient
    raise TypeError(f"unknown model {model!r}")


def action_variation_identity(
    kind: str, model, fields, x, metric: Metric, sigma: int = 0
) -> float:
    """Residual of an off-shell action variation identity at the point x.

    ``kind``:

    * ``"scale"``: delta_S L minus d_m (x^m L); zero for every model here,
      including the general scalar with arbitrary profile.
    * ``"conformal"``: the sigma-indexed conformal variation of L minus its
      total-derivative form.  For Maxwell the anomaly (4 - D) F^{st} A_t is
      part of the identity; for the scalar family the total derivative
      carries the kappa g^{st} Phi^2 improvement and the residual vanishes
      iff the virial is a total divergence (it is not for nonlinear
      profiles).
    * ``"conformal-assumed-primary"``: Maxwell only; the variation computed
      with the pretend-primary rule for F is a pure total derivative.
    """
    x = metric._check(x)
    dim = metric.dim
    lag = lagrangian_value(model, fields, x, metric)
    dlag = lagrangian_gradient(model, fields, x, metric)

    if kind == "scale":
        if isinstance(model, MaxwellModel):
            gen = dilation(1.0, dim, spin="vector")
            delta_l = _delta_lagrangian_maxwell(gen, fields, x, metric)
        else:
            gen = dilation(1.0, dim, spin="scalar")
            delta_l = _delta_lagrangian_scalar(model, gen, fields, x, metric)
        return delta_l - (dim * lag + float(x @ dlag))

    x2 = metric.norm2(x)
    k_vec = 2.0 * x[sigma] * x - metric.diag[sigma] * _unit_vec(dim, sigma) * x2
    total_derivative = 2.0 * dim * x[sigma] * lag + float(k_vec @ dlag)

    if kind == "conformal":
        if isinstance(model, MaxwellModel):
            gen = _conformal_basis_generator(sigma, metric, canonical_weight(dim), "vector")
            delta_l = _delta_lagrangian_maxwell(gen, fields, x, metric)
            fs = _fs(fields, x)
            anomaly = (4.0 - dim) * float(
                (_raise2(fs.F, metric) @ fields.value(x))[sigma]
            )
            return delta_l - total_derivative - anomaly
        gen = _conformal_basis_generator(sigma, metric, canonical_weight(dim), "scalar")
        delta_l = _delta_lagrangian_scalar(model, gen, fields, x, metric)
        kappa = _improvement_kappa(model, metric)
        value = np.atleast_1d(fields.value(x))
        grad = np.atleast_2d(fields.grad(x))
        d_sq_sigma = 2.0 * metric.diag[sigma] * float(
            np.einsum("i,i->", value, grad[:, sigma])
        )
        return delta_l - total_derivative - kappa * d_sq_sigma

    if kind == "conformal-assumed-primary":
        if not isinstance(model, MaxwellModel):
            raise TypeError("the pretend-primary rule applies to the Maxwell model")
        gen = _conformal_basis_generator(sigma, metric, 0.5 * dim, "field-strength")
        fs = _fs(fields, x)
        delta_f = delta_field_strength_primary(gen, fs, x, metric)
        delta_l = -0.5 * float(np.sum(_raise2(fs.F, metric) * delta_f))
        return delta_l - total_derivative

    raise ValueError(f"unknown identity kind {kind!r}")


def _unit_vec(dim, idx):
    e = np.zeros(dim)
    e[idx] = 1.0
    return e


# ---------------------------------------------------------------------------
# check report
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    """Structured outcome of one verification: residual against tolerance."""

    name: str
    dim: int
    samples: int
    max_residual: float
    tolerance: float
    seed: int
    expected_fail: bool = False
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.max_residual <= self.tolerance

    @property
    def ok(self) -> bool:
        """True when the outcome matches the expectation."""
        if self.expected_fail:
            return self.error is None and not self.passed
        return self.passed

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "expected_fail": self.expected_fail,
            "passed": self.passed,
            "ok": self.ok,
            "error": self.error,
        }
