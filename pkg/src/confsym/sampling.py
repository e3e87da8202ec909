"""Seeded sample generators shared by the test suite and the CLI checks.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible
from a single recorded seed.
"""

from __future__ import annotations

import numpy as np

from .fields import (
    CosineMultiplet,
    CosineSpinor,
    CosineVectorPotential,
    PolynomialMultiplet,
    PolynomialVectorPotential,
)
from .geometry import Metric, conformal_factor

DEFAULT_SEED = 42


def rng_from_seed(seed: int = DEFAULT_SEED) -> np.random.Generator:
    return np.random.default_rng(seed)


def points(rng, dim: int, n: int, scale: float = 0.6) -> np.ndarray:
    return rng.normal(0.0, scale, size=(n, dim))


def off_cone_points(rng, dim: int, n: int, scale: float = 0.6, min_frac: float = 0.05):
    """Points with |x.x| bounded away from zero relative to their size."""
    metric = Metric(dim)
    out = np.empty((n, dim))
    count = 0
    while count < n:
        x = rng.normal(0.0, scale, size=dim)
        if abs(metric.norm2(x)) > min_frac * (1.0 + float(x @ x)):
            out[count] = x
            count += 1
    return out


def timelike_points(rng, dim: int, n: int, min_square: float = 0.2) -> np.ndarray:
    """Points with x.x comfortably positive (both time orientations)."""
    metric = Metric(dim)
    out = np.empty((n, dim))
    count = 0
    while count < n:
        x = rng.normal(0.0, 0.4, size=dim)
        x[0] = rng.choice([-1.0, 1.0]) * rng.uniform(1.0, 2.0)
        if metric.norm2(x) > min_square:
            out[count] = x
            count += 1
    return out


def small_parameters(rng, dim: int, n: int, scale: float = 0.15) -> np.ndarray:
    return rng.normal(0.0, scale, size=(n, dim))


def nonsingular_pairs(
    rng, dim: int, n: int, point_scale: float = 0.6, param_scale: float = 0.15,
    min_factor: float = 0.2,
):
    """(x, c) samples keeping the conformal factor away from zero."""
    metric = Metric(dim)
    xs = np.empty((n, dim))
    cs = np.empty((n, dim))
    count = 0
    while count < n:
        x = rng.normal(0.0, point_scale, size=dim)
        c = rng.normal(0.0, param_scale, size=dim)
        if abs(conformal_factor(x, c, metric)) > min_factor:
            xs[count] = x
            cs[count] = c
            count += 1
    return xs, cs


def null_vector(rng, dim: int, scale: float = 1.0) -> np.ndarray:
    """A null wave vector with unit-magnitude spatial direction."""
    space = rng.normal(0.0, 1.0, size=dim - 1)
    space /= np.linalg.norm(space)
    k = np.empty(dim)
    k[0] = 1.0
    k[1:] = space
    return scale * k


def transverse_polarisation(rng, k, metric: Metric) -> np.ndarray:
    """A polarisation vector with k.eps = 0 (exact to rounding).

    Subtracts the time-direction component, which never degenerates because a
    null k always has k^0 != 0.
    """
    dim = metric.dim
    ref = np.zeros(dim)
    ref[0] = 1.0
    denom = metric.dot(k, ref)
    while True:
        eps = rng.normal(0.0, 1.0, size=dim)
        eps = eps - ref * metric.dot(k, eps) / denom
        if np.linalg.norm(eps) > 0.1:
            return eps


def random_polynomial_multiplet(
    rng, dim: int, n_comp: int, degree: int = 3, n_terms: int = 6, scale: float = 0.5
) -> PolynomialMultiplet:
    """Random polynomial multiplet of bounded total degree."""
    components = []
    for _ in range(n_comp):
        monos = []
        for _ in range(n_terms):
            while True:
                exps = tuple(int(e) for e in rng.integers(0, degree + 1, size=dim))
                if sum(exps) <= degree:
                    break
            monos.append((float(rng.normal(0.0, scale)), exps))
        components.append(monos)
    return PolynomialMultiplet(dim, components)


def random_polynomial_potential(
    rng, dim: int, degree: int = 3, n_terms: int = 6, scale: float = 0.5
) -> PolynomialVectorPotential:
    comps = random_polynomial_multiplet(rng, dim, dim, degree, n_terms, scale)
    return PolynomialVectorPotential(dim, comps.components)


def random_plane_wave_multiplet(
    rng, metric: Metric, n_comp: int = 1, null: bool = False
) -> CosineMultiplet:
    dim = metric.dim
    if null:
        k = null_vector(rng, dim, scale=rng.uniform(0.5, 1.5))
    else:
        k = rng.normal(0.0, 0.8, size=dim)
    amp = rng.normal(0.0, 1.0, size=n_comp)
    return CosineMultiplet(k, amp, rng.uniform(0.0, 2.0 * np.pi), metric)


def random_onshell_potential(rng, metric: Metric) -> CosineVectorPotential:
    """On-shell Maxwell plane wave: null wave vector, transverse polarisation."""
    k = null_vector(rng, metric.dim, scale=rng.uniform(0.5, 1.5))
    eps = transverse_polarisation(rng, k, metric)
    return CosineVectorPotential(k, eps, rng.uniform(0.0, 2.0 * np.pi), metric)


def random_offshell_potential(rng, metric: Metric) -> CosineVectorPotential:
    """Generic plane-wave potential with no on-shell constraints."""
    k = rng.normal(0.0, 0.8, size=metric.dim)
    eps = rng.normal(0.0, 1.0, size=metric.dim)
    return CosineVectorPotential(k, eps, rng.uniform(0.0, 2.0 * np.pi), metric)


def random_spinor(rng, metric: Metric, size: int) -> CosineSpinor:
    k = rng.normal(0.0, 0.8, size=metric.dim)
    u = rng.normal(0.0, 1.0, size=size) + 1.0j * rng.normal(0.0, 1.0, size=size)
    v = rng.normal(0.0, 1.0, size=size) + 1.0j * rng.normal(0.0, 1.0, size=size)
    return CosineSpinor(k, u, v, rng.uniform(0.0, 2.0 * np.pi), metric)
