"""Named verification checks and the suite runner behind the CLI.

Each check exercises one identity through the library API and returns a
:class:`~confsym.noether.CheckReport`.  The mapping from check names to the
identities they verify is tabulated in the README.  Checks draw their samples
from a generator seeded by (suite seed, check name), so a report is
deterministic however the checks are scheduled.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import dual3, sampling
from .clifford import (
    anticommutator_residual,
    build_gammas,
    sandwich_identity_residual,
)
from .errors import ConfsymError
from .fields import (
    GaussianMultiplet,
    field_strength_from_potential,
    make_gauge_function,
    make_onshell_maxwell_plane_wave,
)
from .geometry import (
    Metric,
    basis_generators,
    canonical_weight,
    conformal_factor,
    dilation,
    inversion,
    inversion_matrix,
    killing_residual,
    large_parameter_map,
    map_jacobian,
    special_conformal,
    special_conformal_map,
    special_conformal_map_via_inversion,
)
from .mechanics import (
    MechParams,
    MechState,
    delta_conformal_q,
    delta_scale_q,
    integrate,
    so21_bracket_residuals,
)
from .modelspec import ModelSpec
from .noether import (
    CheckReport,
    DualScalarModel,
    MaxwellModel,
    MultipletModel,
    action_variation_identity,
    bessel_hagen_divergence,
    current_divergence_identity,
    field_virial,
    gauge_shift_divergence,
    gauge_shift_scale_current,
    improved_scalar_stress_divergence,
    improved_scalar_stress_trace,
    linear_scalar_model,
    maxwell_stress_divergence,
    maxwell_stress_trace,
    maxwell_virial_first_principles,
    noether_scale_current_maxwell_divergence,
    offshell_trace_law,
    quadratic_scalar_model,
    scalar_stress_divergence,
    scale_current_maxwell_divergence,
    _f_squared,
)
from .transforms import (
    FiniteScalarTransform,
    FiniteSpinorTransform,
    FiniteVectorTransform,
    commutator_residual,
    decoupled_spinor_residual,
    decoupled_vector_residual,
    decoupling_bracket_residual,
    delta_field_strength,
    delta_field_strength_primary,
    delta_scalar,
    delta_spinor,
    delta_vector_potential,
    eom_violation_conformal,
    finite_variation_fd,
    lie_derivative_vector,
)

try:
    from importlib.metadata import version as _pkg_version

    TOOLKIT_VERSION = _pkg_version("confsym")
except Exception:  # pragma: no cover
    TOOLKIT_VERSION = "0.1.0"

FIELD_KINDS = ("maxwell", "general-scalar", "interacting-multiplet", "dual-scalar-3")


@dataclass(frozen=True)
class CheckDef:
    name: str
    kinds: tuple
    description: str
    fn: Callable


CHECKS: dict = {}


def _register(name, kinds, description):
    def wrap(fn):
        CHECKS[name] = CheckDef(name, tuple(kinds), description, fn)
        return fn

    return wrap


def _rng_for(spec: ModelSpec, name: str) -> np.random.Generator:
    return np.random.default_rng([spec.seed, zlib.crc32(name.encode())])


def _report(spec, name, residual, tolerance, samples, expected_fail=False):
    return CheckReport(
        name=name,
        dim=spec.dimension,
        samples=samples,
        max_residual=float(residual),
        tolerance=float(tolerance),
        seed=spec.seed,
        expected_fail=expected_fail,
    )


# ---------------------------------------------------------------------------
# fixtures from the spec (falling back to seeded random ones)
# ---------------------------------------------------------------------------


def _scalar_fixture(spec, metric, rng, null=False, n_comp=None, positive=False):
    n_comp = n_comp if n_comp is not None else spec.components
    fixture = spec.fixture
    if positive:
        return GaussianMultiplet(
            metric.dim,
            np.full(n_comp, 1.3),
            rng.normal(0.0, 0.2, metric.dim),
            0.08 * np.eye(metric.dim),
        )
    if fixture.get("kind") == "plane-wave" and "k" in fixture and not null:
        amp = fixture.get("amplitude", [1.0])
        amp = (amp * n_comp)[:n_comp]
        return sampling.CosineMultiplet(
            np.asarray(fixture["k"]), amp, fixture.get("phase", 0.0), metric
        )
    return sampling.random_plane_wave_multiplet(rng, metric, n_comp, null=null)


def _onshell_potential(spec, metric, rng):
    fixture = spec.fixture
    if fixture.get("kind") == "plane-wave" and "k" in fixture and "epsilon" in fixture:
        return make_onshell_maxwell_plane_wave(
            np.asarray(fixture["k"]),
            np.asarray(fixture["epsilon"]),
            metric,
            fixture.get("phase", 0.0),
        )
    return sampling.random_onshell_potential(rng, metric)


def _model_for(spec: ModelSpec, metric: Metric):
    if spec.kind == "maxwell":
        return MaxwellModel(metric.dim)
    if spec.kind == "interacting-multiplet":
        return MultipletModel(metric.dim, spec.components, spec.coupling)
    if spec.kind == "dual-scalar-3":
        return DualScalarModel()
    if spec.kind == "general-scalar":
        if spec.profile == "linear":
            return linear_scalar_model(metric.dim, spec.l0, spec.l1)
        return quadratic_scalar_model(metric.dim)
    raise ConfsymError(f"no field model for kind {spec.kind!r}")


def _model_fixture(spec, metric, rng):
    """(model, off-shell fixture) pair appropriate for action identities."""
    model = _model_for(spec, metric)
    if spec.kind == "maxwell":
        return model, sampling.random_offshell_potential(rng, metric)
    if spec.kind == "general-scalar":
        # fractional powers of the field require a positive configuration
        return model, _scalar_fixture(spec, metric, rng, n_comp=1, positive=True).component(0)
    if spec.kind == "dual-scalar-3":
        return model, _scalar_fixture(spec, metric, rng, n_comp=1).component(0)
    return model, _scalar_fixture(spec, metric, rng)


# ---------------------------------------------------------------------------
# geometry / algebra checks (all field kinds)
# ---------------------------------------------------------------------------


@_register("map-composition", FIELD_KINDS, "conformal factor and map compose additively in the parameter")
def _chk_map_composition(spec, metric, rng, tol):
    worst, n = 0.0, 250
    xs, cs = sampling.nonsingular_pairs(rng, metric.dim, n)
    _, cps = sampling.nonsingular_pairs(rng, metric.dim, n)
    for x, c, cp in zip(xs, cs, cps):
        s1 = conformal_factor(x, c, metric)
        xp = special_conformal_map(x, c, metric)
        s2 = conformal_factor(xp, cp, metric)
        if abs(s2) < 0.2 or abs(conformal_factor(x, c + cp, metric)) < 0.2:
            continue
        worst = max(worst, abs(s1 * s2 - conformal_factor(x, c + cp, metric)))
        two_step = special_conformal_map(xp, cp, metric)
        one_step = special_conformal_map(x, c + cp, metric)
        worst = max(worst, float(np.max(np.abs(two_step - one_step))))
    return _report(spec, "map-composition", worst, tol["exact"], n)


@_register("map-inversion-route", FIELD_KINDS, "the map equals invert, translate, invert")
def _chk_map_route(spec, metric, rng, tol):
    worst, n = 0.0, 100
    xs = sampling.off_cone_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n)
    for x, c in zip(xs, cs):
        if abs(conformal_factor(x, c, metric)) < 0.2:
            continue
        a = special_conformal_map(x, c, metric)
        b = special_conformal_map_via_inversion(x, c, metric)
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(spec, "map-inversion-route", worst, tol["exact"], n)


@_register("inversion-involution", FIELD_KINDS, "inversion applied twice is the identity")
def _chk_involution(spec, metric, rng, tol):
    worst, n = 0.0, 100
    for x in sampling.off_cone_points(rng, metric.dim, n):
        worst = max(
            worst, float(np.max(np.abs(inversion(inversion(x, metric), metric) - x)))
        )
    return _report(spec, "inversion-involution", worst, tol["exact"], n)


@_register("reflection-matrix", FIELD_KINDS, "reflection matrix squares to one, preserves the metric, det = -1")
def _chk_reflection(spec, metric, rng, tol):
    worst, n = 0.0, 100
    eye = np.eye(metric.dim)
    for x in sampling.off_cone_points(rng, metric.dim, n):
        imat = inversion_matrix(x, metric)
        worst = max(worst, float(np.max(np.abs(imat @ imat - eye))))
        worst = max(
            worst, float(np.max(np.abs(imat @ metric.matrix @ imat.T - metric.matrix)))
        )
        worst = max(worst, abs(np.linalg.det(imat) + 1.0))
    return _report(spec, "reflection-matrix", worst, tol["exact"], n)


@_register("reflection-derivative", FIELD_KINDS, "reflection matrix equals x^2 times the inversion Jacobian")
def _chk_reflection_fd(spec, metric, rng, tol):
    from .fields import fd_gradient

    worst, n = 0.0, 50
    for x in sampling.off_cone_points(rng, metric.dim, n, min_frac=0.15):
        imat = inversion_matrix(x, metric)
        fd = fd_gradient(lambda y: inversion(y, metric), x, 1e-6)
        worst = max(worst, float(np.max(np.abs(imat - metric.norm2(x) * fd.T))))
    return _report(spec, "reflection-derivative", worst, tol["oracle"], n)


@_register("jacobian-identity", FIELD_KINDS, "map Jacobian factorises through the two reflection matrices")
def _chk_jacobian(spec, metric, rng, tol):
    from .geometry import conformal_jacobian

    worst, n = 0.0, 60
    xs = sampling.off_cone_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n)
    eye = np.eye(metric.dim)
    for x, c in zip(xs, cs):
        if abs(conformal_factor(x, c, metric)) < 0.3:
            continue
        xp = special_conformal_map(x, c, metric)
        if abs(metric.norm2(xp)) < 0.02:
            continue
        fwd, inv = conformal_jacobian(x, c, metric)
        worst = max(worst, float(np.max(np.abs(fwd - map_jacobian(x, c, metric)))))
        worst = max(worst, float(np.max(np.abs(fwd @ inv - eye))))
    return _report(spec, "jacobian-identity", worst, tol["exact"], n)


@_register("jacobian-oracle", FIELD_KINDS, "map Jacobian agrees with central finite differences")
def _chk_jacobian_fd(spec, metric, rng, tol):
    from .fields import fd_gradient

    worst, n = 0.0, 30
    xs = sampling.off_cone_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n)
    for x, c in zip(xs, cs):
        if abs(conformal_factor(x, c, metric)) < 0.3:
            continue
        fwd = map_jacobian(x, c, metric)
        fd = fd_gradient(lambda y: special_conformal_map(y, c, metric), x, 1e-5)
        worst = max(worst, float(np.max(np.abs(fwd - fd))))
    return _report(spec, "jacobian-oracle", worst, tol["oracle"], n)


@_register("killing-equation", FIELD_KINDS, "every generator satisfies the conformal Killing equation")
def _chk_killing(spec, metric, rng, tol):
    worst = 0.0
    gens = basis_generators(metric.dim)
    pts = sampling.points(rng, metric.dim, 20, scale=1.0)
    for gen in gens:
        for x in pts:
            worst = max(worst, killing_residual(gen, x, metric))
    return _report(spec, "killing-equation", worst, tol["exact"], len(gens) * len(pts))


@_register("commutator-algebra", FIELD_KINDS, "translation/conformal commutator closes on dilation plus rotation")
def _chk_commutator(spec, metric, rng, tol):
    wave = _scalar_fixture(spec, metric, rng, n_comp=2)
    poly = sampling.random_polynomial_multiplet(rng, metric.dim, 2)
    worst, count = 0.0, 0
    for f in (wave, poly):
        for x in sampling.points(rng, metric.dim, 4):
            for s in range(metric.dim):
                for t in range(metric.dim):
                    worst = max(
                        worst,
                        float(np.max(np.abs(commutator_residual(s, t, f, x, metric)))),
                    )
                    count += 1
    return _report(spec, "commutator-algebra", worst, tol["identity"], count)


@_register("gamma-reflection", FIELD_KINDS, "gamma algebra holds and slashed units reproduce the reflection matrix")
def _chk_gamma(spec, metric, rng, tol):
    gammas = build_gammas(metric.dim)
    worst = anticommutator_residual(gammas, metric)
    pts = sampling.timelike_points(rng, metric.dim, 50)
    for x in pts:
        worst = max(worst, sandwich_identity_residual(x, gammas, metric))
    return _report(spec, "gamma-reflection", worst, tol["exact"], len(pts))


@_register("decoupling-bracket", FIELD_KINDS, "the reflection-matrix transport bracket vanishes")
def _chk_bracket(spec, metric, rng, tol):
    worst, n = 0.0, 50
    xs = sampling.off_cone_points(rng, metric.dim, n, min_frac=0.1)
    cs = sampling.small_parameters(rng, metric.dim, n, scale=0.4)
    for x, c in zip(xs, cs):
        worst = max(worst, float(np.max(np.abs(decoupling_bracket_residual(x, c, metric)))))
    return _report(spec, "decoupling-bracket", worst, tol["identity"], n)


@_register("vector-decoupling", FIELD_KINDS, "reflected vectors follow the scalar transformation rule")
def _chk_vec_decoupling(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    worst, n = 0.0, 30
    xs = sampling.off_cone_points(rng, metric.dim, n, min_frac=0.1)
    cs = sampling.small_parameters(rng, metric.dim, n, scale=0.4)
    for x, c in zip(xs, cs):
        worst = max(worst, decoupled_vector_residual(A, x, c, metric))
    return _report(spec, "vector-decoupling", worst, tol["identity"], n)


@_register("spinor-decoupling", FIELD_KINDS, "slashed spinors follow the scalar transformation rule")
def _chk_spin_decoupling(spec, metric, rng, tol):
    gammas = build_gammas(metric.dim)
    psi = sampling.random_spinor(rng, metric, gammas.size)
    worst, n = 0.0, 30
    xs = sampling.timelike_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n, scale=0.4)
    for x, c in zip(xs, cs):
        worst = max(worst, decoupled_spinor_residual(psi, x, c, metric, gammas))
    return _report(spec, "spinor-decoupling", worst, tol["identity"], n)


@_register("large-parameter-decay", FIELD_KINDS, "large-parameter map error decays with the inverse parameter cube")
def _chk_large_c(spec, metric, rng, tol):
    worst = 0.0
    for _ in range(5):
        x = sampling.timelike_points(rng, metric.dim, 1)[0]
        c0 = sampling.timelike_points(rng, metric.dim, 1)[0]
        errs = []
        for lam in (10.0, 20.0, 40.0):
            c = lam * c0
            exact = special_conformal_map(x, c, metric)
            errs.append(
                float(np.max(np.abs(exact - large_parameter_map(x, c, metric))))
            )
        for e1, e2 in zip(errs, errs[1:]):
            worst = max(worst, abs(e1 / e2 - 8.0) / 8.0)
    return _report(spec, "large-parameter-decay", worst, 0.2, 5)


def _order_check(spec, metric, rng, tol, name, make_view, variation, points):
    """Observed convergence order of the parameter derivative of a finite
    transform towards the infinitesimal variation; must be >= 1.9."""
    worst = -np.inf
    for x in points:
        c = sampling.small_parameters(rng, metric.dim, 1, scale=0.4)[0]
        target = variation(c, x)
        errs = []
        for eps in (1e-2, 1e-3, 1e-4):
            est = finite_variation_fd(lambda t: make_view(t * c), x, eps)
            errs.append(float(np.max(np.abs(est - target))) + 1e-30)
        order = np.log10(errs[0] / errs[1])
        worst = max(worst, 1.9 - order)
        if errs[2] > 10.0 * errs[1]:
            worst = max(worst, 1.0)  # third magnitude must not regress
    return _report(spec, name, worst, 0.0, len(points))


@_register("finite-infinitesimal-scalar", FIELD_KINDS, "finite scalar transform linearises to the scalar variation")
def _chk_order_scalar(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, n_comp=2)
    d = canonical_weight(metric.dim)
    return _order_check(
        spec, metric, rng, tol, "finite-infinitesimal-scalar",
        lambda c: FiniteScalarTransform(phi, c, d, metric),
        lambda c, x: delta_scalar(special_conformal(c), phi, x, metric),
        sampling.timelike_points(rng, metric.dim, 5),
    )


@_register("finite-infinitesimal-vector", FIELD_KINDS, "finite vector transform linearises to the vector variation")
def _chk_order_vector(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    d = canonical_weight(metric.dim)
    return _order_check(
        spec, metric, rng, tol, "finite-infinitesimal-vector",
        lambda c: FiniteVectorTransform(A, c, d, metric),
        lambda c, x: delta_vector_potential(special_conformal(c, spin="vector"), A, x, metric),
        sampling.timelike_points(rng, metric.dim, 5),
    )


@_register("finite-infinitesimal-spinor", FIELD_KINDS, "finite spinor transform linearises to the spinor variation")
def _chk_order_spinor(spec, metric, rng, tol):
    gammas = build_gammas(metric.dim)
    psi = sampling.random_spinor(rng, metric, gammas.size)
    d = canonical_weight(metric.dim)
    return _order_check(
        spec, metric, rng, tol, "finite-infinitesimal-spinor",
        lambda c: FiniteSpinorTransform(psi, c, d, metric, gammas, route="compact"),
        lambda c, x: delta_spinor(special_conformal(c, spin="spinor"), psi, x, metric, gammas),
        sampling.timelike_points(rng, metric.dim, 5),
    )


@_register("finite-vector-routes", FIELD_KINDS, "Jacobian and double-reflection vector transforms agree")
def _chk_vec_routes(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    worst, n = 0.0, 40
    count = 0
    xs = sampling.timelike_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n, scale=0.08)
    for x, c in zip(xs, cs):
        try:
            a = FiniteVectorTransform(A, c, 1.0, metric, route="jacobian").value(x)
            b = FiniteVectorTransform(A, c, 1.0, metric, route="reflection").value(x)
        except ConfsymError:
            continue
        count += 1
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(spec, "finite-vector-routes", worst, tol["exact"], count)


@_register("finite-spinor-routes", FIELD_KINDS, "paired-slash and compact spinor transforms agree")
def _chk_spinor_routes(spec, metric, rng, tol):
    gammas = build_gammas(metric.dim)
    psi = sampling.random_spinor(rng, metric, gammas.size)
    worst, n, count = 0.0, 40, 0
    xs = sampling.timelike_points(rng, metric.dim, n)
    cs = sampling.small_parameters(rng, metric.dim, n, scale=0.05)
    for x, c in zip(xs, cs):
        try:
            a = FiniteSpinorTransform(psi, c, 1.0, metric, gammas, route="pair").value(x)
            b = FiniteSpinorTransform(psi, c, 1.0, metric, gammas, route="compact").value(x)
        except ConfsymError:
            continue
        count += 1
        worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(spec, "finite-spinor-routes", worst, tol["exact"], count)


@_register("finite-scalar-composition", FIELD_KINDS, "finite scalar transforms compose additively in the parameter")
def _chk_scalar_composition(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, n_comp=1)
    worst, n, count = 0.0, 40, 0
    xs = sampling.points(rng, metric.dim, n)
    for x in xs:
        c1 = sampling.small_parameters(rng, metric.dim, 1, scale=0.06)[0]
        c2 = sampling.small_parameters(rng, metric.dim, 1, scale=0.06)[0]
        try:
            once = FiniteScalarTransform(phi, c1 + c2, 1.0, metric).value(x)
            inner = FiniteScalarTransform(phi, c1, 1.0, metric)
            twice = FiniteScalarTransform(inner, c2, 1.0, metric).value(x)
        except ConfsymError:
            continue
        count += 1
        worst = max(worst, float(np.max(np.abs(once - twice))))
    return _report(spec, "finite-scalar-composition", worst, tol["exact"], count)


# ---------------------------------------------------------------------------
# shared action identities (model built from the spec)
# ---------------------------------------------------------------------------


@_register("action-scale-identity", FIELD_KINDS, "dilation changes the density by a pure total derivative, off shell")
def _chk_action_scale(spec, metric, rng, tol):
    model, fixture = _model_fixture(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 8):
        worst = max(worst, abs(action_variation_identity("scale", model, fixture, x, metric)))
    return _report(spec, "action-scale-identity", worst, tol["identity"], 8)


@_register("action-conformal-identity", FIELD_KINDS, "conformal variation of the density is the stated total derivative")
def _chk_action_conformal(spec, metric, rng, tol):
    model, fixture = _model_fixture(spec, metric, rng)
    expected_fail = spec.kind == "general-scalar" and spec.profile != "linear"
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 8):
        for s in range(metric.dim):
            worst = max(
                worst,
                abs(action_variation_identity("conformal", model, fixture, x, metric, s)),
            )
    return _report(
        spec, "action-conformal-identity", worst, tol["identity"], 8 * metric.dim,
        expected_fail=expected_fail,
    )


@_register("virial-structure", FIELD_KINDS, "virial total-divergence status and its potential check out")
def _chk_virial_structure(spec, metric, rng, tol):
    from .fields import fd_gradient

    model, fixture = _model_fixture(spec, metric, rng)
    expect_flag = {
        "maxwell": metric.dim == 4,
        "interacting-multiplet": True,
        "dual-scalar-3": True,
        "general-scalar": spec.profile == "linear",
    }[spec.kind]
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 6):
        info = field_virial(model, fixture, x, metric)
        if info.is_total_divergence != expect_flag:
            worst = max(worst, 1.0)
        if info.is_total_divergence and info.potential is not None:
            fd = fd_gradient(info.potential, x, 1e-5)  # fd[m, a, r] = d_r sigma^{ma}
            div = np.einsum("mam->a", fd)
            worst = max(worst, float(np.max(np.abs(div - info.value))))
    return _report(spec, "virial-structure", worst, tol["oracle"], 6)


# ---------------------------------------------------------------------------
# Maxwell checks
# ---------------------------------------------------------------------------


@_register("stress-trace-law", ("maxwell",), "stress trace equals (-1 + D/4) F^2 at every point")
def _chk_trace_law(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        F = field_strength_from_potential(A, x).F
        expected = (-1.0 + metric.dim / 4.0) * _f_squared(F, metric)
        worst = max(worst, abs(maxwell_stress_trace(A, x, metric) - expected))
    return _report(spec, "stress-trace-law", worst, tol["exact"], 10)


@_register("stress-conservation", ("maxwell",), "stress tensor is conserved on shell")
def _chk_stress_cons(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(worst, float(np.max(np.abs(maxwell_stress_divergence(A, x, metric)))))
    return _report(spec, "stress-conservation", worst, tol["identity"], 10)


@_register("scale-current-conservation", ("maxwell",), "improved scale current is conserved on shell in every D")
def _chk_scale_current(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(worst, abs(scale_current_maxwell_divergence(A, x, metric)))
    return _report(spec, "scale-current-conservation", worst, tol["identity"], 10)


@_register("current-construction-equivalence", ("maxwell",), "raw and improved scale currents share one divergence")
def _chk_current_equiv(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        raw = noether_scale_current_maxwell_divergence(A, x, metric)
        improved = scale_current_maxwell_divergence(A, x, metric)
        worst = max(worst, abs(raw - improved))
    return _report(spec, "current-construction-equivalence", worst, tol["identity"], 10)


@_register("conformal-current-identity", ("maxwell",), "conformal current divergence equals its closed-form anomaly")
def _chk_conf_current(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        c = rng.normal(0.0, 0.4, metric.dim)
        lhs, rhs = current_divergence_identity(special_conformal(c), A, x, metric)
        worst = max(worst, abs(lhs - rhs))
    return _report(spec, "conformal-current-identity", worst, tol["identity"], 10)


@_register("conformal-current-naive", ("maxwell",), "naive conformal conservation: holds only in four dimensions")
def _chk_conf_naive(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        c = rng.normal(0.0, 0.4, metric.dim)
        lhs, _ = current_divergence_identity(special_conformal(c), A, x, metric)
        worst = max(worst, abs(lhs))
    return _report(
        spec, "conformal-current-naive", worst, tol["identity"], 10,
        expected_fail=(metric.dim != 4),
    )


@_register("virial-closed-form", ("maxwell",), "first-principles virial equals its (4-D)/2 F A closed form")
def _chk_virial(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        info = field_virial(MaxwellModel(metric.dim), A, x, metric)
        direct = maxwell_virial_first_principles(A, x, metric)
        worst = max(worst, float(np.max(np.abs(info.value - direct))))
        if metric.dim == 4:
            worst = max(worst, float(np.max(np.abs(info.value))))
    return _report(spec, "virial-closed-form", worst, tol["exact"], 10)


@_register("action-assumed-primary", ("maxwell",), "pretend-primary conformal rule makes the action invariant")
def _chk_assumed_primary(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    model = MaxwellModel(metric.dim)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 6):
        for s in range(metric.dim):
            worst = max(
                worst,
                abs(action_variation_identity("conformal-assumed-primary", model, A, x, metric, s)),
            )
    return _report(spec, "action-assumed-primary", worst, tol["identity"], 6 * metric.dim)


@_register("gauge-shift-pointwise", ("maxwell",), "gauge change shifts the scale current by the predicted divergence")
def _chk_gauge_shift(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    omega = make_gauge_function(
        "plane-wave", metric, k=rng.normal(0.0, 0.5, metric.dim), amplitude=0.8, phase=0.3
    )
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        shift, predicted = gauge_shift_scale_current(A, omega, x, metric)
        worst = max(worst, float(np.max(np.abs(shift - predicted))))
    return _report(spec, "gauge-shift-pointwise", worst, tol["identity"], 10)


@_register("gauge-shift-conserved", ("maxwell",), "the gauge-induced current shift is trivially conserved on shell")
def _chk_gauge_shift_div(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    omega = make_gauge_function(
        "plane-wave", metric, k=rng.normal(0.0, 0.5, metric.dim), amplitude=0.8, phase=0.3
    )
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(worst, abs(gauge_shift_divergence(A, omega, x, metric)))
    return _report(spec, "gauge-shift-conserved", worst, tol["identity"], 10)


@_register("lie-derivative-forms", ("maxwell",), "transport and gauge-covariant Lie derivative forms agree")
def _chk_lie_forms(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    worst = 0.0
    gens = [
        dilation(0.7, metric.dim, spin="vector"),
        special_conformal(rng.normal(0.0, 0.3, metric.dim), spin="vector"),
    ]
    for x in sampling.points(rng, metric.dim, 8):
        for gen in gens:
            a, b = lie_derivative_vector(gen, A, x, metric)
            worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(spec, "lie-derivative-forms", worst, tol["exact"], 16)


@_register("lie-derivative-weight", ("maxwell",), "field variation differs from the Lie derivative by the weight term")
def _chk_lie_weight(spec, metric, rng, tol):
    from .geometry import killing_divergence

    A = sampling.random_offshell_potential(rng, metric)
    dim = metric.dim
    worst = 0.0
    gens = [
        dilation(0.7, dim, spin="vector"),
        special_conformal(rng.normal(0.0, 0.3, dim), spin="vector"),
    ]
    for x in sampling.points(rng, dim, 8):
        for gen in gens:
            lie, _ = lie_derivative_vector(gen, A, x, metric)
            delta = delta_vector_potential(gen, A, x, metric)
            shift = ((dim - 4.0) / (2.0 * dim)) * killing_divergence(gen, x, metric) * A.value(x)
            worst = max(worst, float(np.max(np.abs(delta - lie - shift))))
    return _report(spec, "lie-derivative-weight", worst, tol["exact"], 16)


@_register("primary-rule-discrepancy", ("maxwell",), "induced and pretend-primary F variations differ by (D-4) potential terms")
def _chk_primary_disc(spec, metric, rng, tol):
    A = sampling.random_offshell_potential(rng, metric)
    dim = metric.dim
    worst = 0.0
    for x in sampling.points(rng, dim, 8):
        c = rng.normal(0.0, 0.3, dim)
        gen = special_conformal(c, spin="vector")
        induced = delta_field_strength(gen, A, x, metric)
        gen_f = special_conformal(c, weight=dim / 2.0, spin="field-strength")
        fs = field_strength_from_potential(A, x)
        primary = delta_field_strength_primary(gen_f, fs, x, metric)
        cl = metric.lower(c)
        val = A.value(x)
        expected = (dim - 4.0) * (np.outer(cl, val) - np.outer(cl, val).T)
        worst = max(worst, float(np.max(np.abs(induced - primary - expected))))
    return _report(spec, "primary-rule-discrepancy", worst, tol["exact"], 8)


@_register("eom-conformal-violation", ("maxwell",), "the varied field strength violates the equations of motion off D = 4")
def _chk_eom_violation(spec, metric, rng, tol):
    A = _onshell_potential(spec, metric, rng)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 8):
        c = rng.normal(0.0, 0.3, metric.dim)
        lhs, rhs = eom_violation_conformal(A, x, metric, c)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return _report(spec, "eom-conformal-violation", worst, tol["identity"], 8)


# ---------------------------------------------------------------------------
# scalar multiplet checks
# ---------------------------------------------------------------------------


@_register("multiplet-stress-conservation", ("interacting-multiplet",), "free canonical stress tensor is conserved on shell")
def _chk_mult_cons(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, null=True)
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(
            worst, float(np.max(np.abs(scalar_stress_divergence(phi, x, metric))))
        )
    return _report(spec, "multiplet-stress-conservation", worst, tol["identity"], 10)


@_register("improved-trace-onshell", ("interacting-multiplet", "dual-scalar-3"), "improved stress tensor is traceless on shell")
def _chk_improved_trace(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, null=True, n_comp=max(1, spec.components))
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(worst, abs(improved_scalar_stress_trace(phi, x, metric)))
    return _report(spec, "improved-trace-onshell", worst, tol["identity"], 10)


@_register("improved-trace-law", ("interacting-multiplet",), "improved trace follows its hand-derived off-shell closed form")
def _chk_trace_law_offshell(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng)
    lam = spec.coupling
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        lhs = improved_scalar_stress_trace(phi, x, metric, lam)
        rhs = offshell_trace_law(phi, x, metric, lam)
        worst = max(worst, abs(lhs - rhs))
    return _report(spec, "improved-trace-law", worst, tol["identity"], 10)


@_register("improved-conservation", ("interacting-multiplet", "dual-scalar-3"), "improved stress tensor stays conserved on shell")
def _chk_improved_cons(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, null=True, n_comp=max(1, spec.components))
    worst = 0.0
    for x in sampling.points(rng, metric.dim, 10):
        worst = max(
            worst,
            float(np.max(np.abs(improved_scalar_stress_divergence(phi, x, metric)))),
        )
    return _report(spec, "improved-conservation", worst, tol["identity"], 10)


@_register("killing-current-conservation", ("interacting-multiplet",), "stress-times-Killing currents are conserved on shell (free)")
def _chk_killing_current(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, null=True)
    model = MultipletModel(metric.dim, spec.components, 0.0)
    worst = 0.0
    gens = basis_generators(metric.dim)
    for x in sampling.points(rng, metric.dim, 4):
        for gen in gens:
            worst = max(worst, abs(bessel_hagen_divergence(gen, model, phi, x, metric)))
    return _report(spec, "killing-current-conservation", worst, tol["identity"], 4 * len(gens))


# ---------------------------------------------------------------------------
# dual-sector checks
# ---------------------------------------------------------------------------


@_register("dual-roundtrip", ("dual-scalar-3",), "the dual map inverts: half the symbol contraction rebuilds the gradient")
def _chk_dual_roundtrip(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, n_comp=1).component(0)
    worst = 0.0
    for x in sampling.points(rng, 3, 10):
        worst = max(worst, dual3.dual_roundtrip_residual(phi, x, metric))
    return _report(spec, "dual-roundtrip", worst, tol["exact"], 10)


@_register("dual-motion-identity", ("dual-scalar-3",), "the field equation holds identically for any dual scalar")
def _chk_dual_motion(spec, metric, rng, tol):
    poly = sampling.random_polynomial_multiplet(rng, 3, 1)
    worst = 0.0
    for phi in (poly.component(0), _scalar_fixture(spec, metric, rng, n_comp=1).component(0)):
        for x in sampling.points(rng, 3, 8):
            worst = max(worst, float(np.max(np.abs(dual3.maxwell_eom_from_dual(phi, x, metric)))))
    return _report(spec, "dual-motion-identity", worst, tol["exact"], 16)


@_register("dual-bianchi-dynamics", ("dual-scalar-3",), "the cyclic identity carries the wave operator of the dual scalar")
def _chk_dual_bianchi(spec, metric, rng, tol):
    poly = sampling.random_polynomial_multiplet(rng, 3, 1)
    phi = poly.component(0)
    worst = 0.0
    for x in sampling.points(rng, 3, 10):
        worst = max(worst, dual3.bianchi_pattern_residual(phi, x, metric))
    return _report(spec, "dual-bianchi-dynamics", worst, tol["exact"], 10)


@_register("dual-nonprimary-shift", ("dual-scalar-3",), "dual F variation exceeds the primary rule by the symbol times phi")
def _chk_dual_nonprimary(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, n_comp=1).component(0)
    worst = 0.0
    for x in sampling.points(rng, 3, 8):
        for s in range(3):
            worst = max(worst, dual3.nonprimary_shift_residual(phi, x, s, metric))
    return _report(spec, "dual-nonprimary-shift", worst, tol["exact"], 24)


@_register("dual-variation-consistency", ("dual-scalar-3",), "explicit dual F variation equals the chain rule through the gradient")
def _chk_dual_chain(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, n_comp=1).component(0)
    worst = 0.0
    for x in sampling.points(rng, 3, 8):
        for s in range(3):
            a = dual3.delta_bar_F(phi, x, s, metric)
            b = dual3.delta_bar_F_chain_rule(phi, x, s, metric)
            worst = max(worst, float(np.max(np.abs(a - b))))
    return _report(spec, "dual-variation-consistency", worst, tol["identity"], 24)


@_register("dual-stress-equality", ("dual-scalar-3",), "F-form and scalar-form improved stress tensors agree on shell")
def _chk_dual_stress(spec, metric, rng, tol):
    phi = _scalar_fixture(spec, metric, rng, null=True, n_comp=1).component(0)
    worst = 0.0
    for x in sampling.points(rng, 3, 10):
        a = dual3.improved_stress_from_F(phi, x, metric)
        b = dual3.improved_stress_scalar_form(phi, x, metric)
        worst = max(worst, float(np.max(np.abs(a - b))))
        worst = max(worst, abs(float(np.einsum("m,mm->", metric.diag, a))))
    return _report(spec, "dual-stress-equality", worst, tol["identity"], 10)


@_register("duality-match", ("dual-scalar-3",), "a matched plane-wave pair satisfies the duality relation pointwise")
def _chk_duality_match(spec, metric, rng, tol):
    k = sampling.null_vector(rng, 3, scale=1.2)
    phi, A = dual3.matched_plane_wave_pair(k, 0.9, 0.4, metric)
    worst = 0.0
    for x in sampling.points(rng, 3, 10):
        worst = max(worst, float(np.max(np.abs(dual3.duality_mismatch(A, phi, x, metric)))))
    return _report(spec, "duality-match", worst, 1e-10, 10)


# ---------------------------------------------------------------------------
# mechanics checks
# ---------------------------------------------------------------------------


def _mech_initial(spec, n, rng):
    mech = spec.mechanics
    if "q0" in mech and "p0" in mech:
        return np.asarray(mech["q0"]), np.asarray(mech["p0"])
    q0 = 1.2 * np.ones(n)
    p0 = 0.3 * (-1.0) ** np.arange(n)
    return q0, p0


@_register("mech-free-motion", ("mechanics",), "the free flow reproduces straight lines to rounding")
def _chk_mech_free(spec, metric, rng, tol):
    q0 = np.array([1.0, 2.0])
    p0 = np.array([0.3, -0.1])
    traj = integrate(MechState.make(0.0, q0, p0), MechParams(2, 0.0), 2.0, 1e-3)
    exact = q0[None, :] + traj.times[:, None] * p0[None, :]
    worst = float(np.max(np.abs(traj.q - exact)))
    return _report(spec, "mech-free-motion", worst, tol["exact"], traj.times.size)


@_register("mech-charge-drift", ("mechanics",), "energy, dilation and conformal charges hold along trajectories")
def _chk_mech_drift(spec, metric, rng, tol):
    mech = spec.mechanics
    t_end = mech.get("t-end", 10.0)
    step = mech.get("step", 1e-3)
    couplings = [spec.coupling] if spec.coupling else [0.0, 0.5, 2.0]
    sizes = [len(mech["q0"])] if "q0" in mech else [1, 2, 3]
    worst, count = 0.0, 0
    for lam in couplings:
        for n in sizes:
            q0, p0 = _mech_initial(spec, n, rng)
            traj = integrate(
                MechState.make(0.0, q0, p0), MechParams(n, lam), t_end, step
            )
            worst = max(worst, float(np.max(traj.charge_drift())))
            count += 1
    return _report(spec, "mech-charge-drift", worst, tol["drift"], count)


@_register("mech-so21", ("mechanics",), "charge Poisson brackets close on the hand-derived table")
def _chk_mech_so21(spec, metric, rng, tol):
    worst = 0.0
    for lam in (0.0, spec.coupling or 1.0):
        for _ in range(10):
            q = rng.normal(0.0, 1.0, 3) + 2.0
            p = rng.normal(0.0, 1.0, 3)
            res = so21_bracket_residuals(MechState.make(0.0, q, p), MechParams(3, lam))
            worst = max(worst, float(np.max(res)))
    return _report(spec, "mech-so21", worst, tol["exact"], 20)


@_register("mech-rk4-order", ("mechanics",), "halving the step cuts the drift sixteenfold")
def _chk_mech_order(spec, metric, rng, tol):
    q0 = np.array([3.0])
    p0 = np.array([-1.0])
    params = MechParams(1, 1.0)
    d1 = integrate(MechState.make(0.0, q0, p0), params, 8.0, 0.05).charge_drift()[0]
    d2 = integrate(MechState.make(0.0, q0, p0), params, 8.0, 0.025).charge_drift()[0]
    order = float(np.log2(d1 / d2))
    return _report(spec, "mech-rk4-order", abs(order - 4.0), 0.5, 2)


@_register("mech-reduction", ("mechanics",), "one-dimensional scalar variations reduce to the mechanics rules")
def _chk_mech_reduction(spec, metric, rng, tol):
    one = Metric(1)
    poly = sampling.random_polynomial_multiplet(rng, 1, 3, degree=4)
    gen_s = dilation(1.0, 1)
    gen_c = special_conformal(np.array([1.0]))
    worst = 0.0
    for t in rng.uniform(-2.0, 2.0, 12):
        x = np.array([t])
        q = poly.value(x)
        p = poly.grad(x)[:, 0]
        state = MechState.make(t, q, p)
        ds = delta_scalar(gen_s, poly, x, one)
        dc = delta_scalar(gen_c, poly, x, one)
        worst = max(worst, float(np.max(np.abs(ds - delta_scale_q(state)))))
        worst = max(worst, float(np.max(np.abs(dc - delta_conformal_q(state)))))
    return _report(spec, "mech-reduction", worst, tol["identity"], 12)


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    """Outcome of one suite run: per-check reports plus provenance."""

    version: str
    spec_echo: dict
    checks: list
    seed: int
    wall_time: float = 0.0

    @property
    def overall_ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "version": self.version,
            "seed": self.seed,
            "spec": self.spec_echo,
            "checks": [check.to_dict() for check in self.checks],
            "overall_ok": self.overall_ok,
        }
        if include_timing:
            out["wall_time_seconds"] = self.wall_time
        return out


def applicable_checks(kind: str) -> list:
    return [name for name, cd in CHECKS.items() if kind in cd.kinds]


def run_suite(spec: ModelSpec) -> RunReport:
    """Execute the selected checks; check failures become failed reports,
    never crashes."""
    names = applicable_checks(spec.kind)
    if spec.checks is not None:
        unknown = [n for n in spec.checks if n not in names]
        if unknown:
            raise ConfsymError(
                f"checks not applicable to kind {spec.kind!r}: {', '.join(unknown)}"
            )
        names = [n for n in names if n in spec.checks]
    metric = Metric(spec.dimension)
    started = time.perf_counter()
    reports = []
    for name in names:
        cd = CHECKS[name]
        rng = _rng_for(spec, name)
        try:
            reports.append(cd.fn(spec, metric, rng, spec.tolerances))
        except Exception as exc:  # deliberate: a broken check must not kill the run
            reports.append(
                CheckReport(
                    name=name,
                    dim=spec.dimension,
                    samples=0,
                    max_residual=0.0,  # meaningless when error is set; keeps json finite
                    tolerance=0.0,
                    seed=spec.seed,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    wall = time.perf_counter() - started
    return RunReport(TOOLKIT_VERSION, spec.echo(), reports, spec.seed, wall)
