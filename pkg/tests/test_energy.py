import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from tphase import coefficients as coef
from tphase.energy import (
    dissipation_rate,
    double_well,
    double_well_prime,
    energy_degenerate,
    energy_matching,
    energy_nondegenerate,
    pin_sigma_scale,
    potential_concentrations,
    potential_forms_discrepancy,
    potential_labels,
)
from tphase.grid import Grid2D
from tphase.params import CALIBRATION, ModelSpec, NumericalParams, PotentialParams, SurfaceTensions, derive_capillary

EPS = 0.02
unit = st.floats(-1.0, 1.0)


def deg_spec(sigmas=(1.0, 1.0, 1.0), **kw):
    return ModelSpec(sigmas=SurfaceTensions(*sigmas), numerics=NumericalParams(epsilon=EPS), **kw)


def strip(nx=1024):
    return Grid2D(nx, 8, 1.0, 0.25)


def tanh_pair(grid, width):
    X, _ = grid.mesh()
    dist = 0.25 - np.abs(grid.periodic_delta(X, 0.5, 1.0))
    return np.tanh(dist / width)


def test_double_well_values():
    assert double_well(1.0) == 0 and double_well_prime(-1.0) == 0
    assert double_well(0.0) == 0.25 and double_well_prime(0.0) == 0
    assert double_well(2.0) == 2.25 and double_well_prime(2.0) == 6.0


def test_pure_phase_energies_vanish():
    g = Grid2D(16, 16)
    one = np.ones(g.shape)
    assert energy_degenerate(one, one, deg_spec(), g).total == pytest.approx(0, abs=1e-14)
    nd = deg_spec(model="nondegenerate")
    assert energy_nondegenerate(one, 0 * one, nd, g).total == pytest.approx(0, abs=1e-14)
    assert energy_matching(one, one, deg_spec(energy_form="matching"), g).total == pytest.approx(0, abs=1e-14)


def test_degenerate_tanh_pair_against_quadrature():
    g = strip()
    width = np.sqrt(2) * EPS
    phi = tanh_pair(g, width)
    W = energy_degenerate(phi, np.ones(g.shape), deg_spec(coefficients="consistent"), g).total

    def density(x):
        d = 0.25 - abs(x - 0.5)
        t = np.tanh(d / width)
        dt = (1 - t * t) / width
        return CALIBRATION * (0.5 * EPS * dt * dt + (1 - t * t) ** 2 / (4 * EPS))

    oracle = quad(density, 0, 1, points=[0.25, 0.75], limit=400)[0] * g.Ly
    assert W == pytest.approx(oracle, rel=1e-8)
    assert W == pytest.approx(2 * g.Ly, rel=0.02)


def test_zero_sigma12_at_psi_one():
    g = Grid2D(32, 32)
    phi = np.sin(2 * np.pi * g.mesh()[0])
    spec = deg_spec(sigmas=(0.0, 1.0, 1.0))
    assert energy_degenerate(phi, np.ones(g.shape), spec, g).total == pytest.approx(0, abs=1e-14)


def test_concentration_tanh_interface():
    g = strip()
    c = 0.5 * (1 + tanh_pair(g, EPS / 2))
    W = energy_nondegenerate(c, 1 - c, deg_spec(model="nondegenerate"), g).total
    assert W == pytest.approx(2 * g.Ly, rel=0.02)


def test_natural_potential_midpoint():
    F = potential_concentrations(0.5, 0.5, 0.0, SurfaceTensions(1.0, 1.0, 1.0))[0]
    assert F == pytest.approx(1 / 16)


@settings(max_examples=30)
@given(unit, unit, st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0.2, 3))
def test_label_potential_partials_match_finite_differences(phi, psi, a, b, c):
    s = SurfaceTensions(a, b, c)
    for mode in ("natural", "consistent"):
        _, Fp, Fq = potential_labels(phi, psi, s, mode, 0.3)
        h = 1e-6
        fd_p = (potential_labels(phi + h, psi, s, mode, 0.3)[0] - potential_labels(phi - h, psi, s, mode, 0.3)[0]) / (2 * h)
        fd_q = (potential_labels(phi, psi + h, s, mode, 0.3)[0] - potential_labels(phi, psi - h, s, mode, 0.3)[0]) / (2 * h)
        assert Fp == pytest.approx(fd_p, rel=1e-6, abs=1e-8)
        assert Fq == pytest.approx(fd_q, rel=1e-6, abs=1e-8)


@settings(max_examples=30)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_concentration_potential_partials(c1, c2, c3):
    s = SurfaceTensions(1.2, 0.9, 1.4)
    pp = PotentialParams(0.5, 0.7, 1.1, 0.4)
    _, *partials = potential_concentrations(c1, c2, c3, s, pp)
    h = 1e-6
    base = np.array([c1, c2, c3])
    for i, p in enumerate(partials):
        e = np.zeros(3)
        e[i] = h
        fd = (potential_concentrations(*(base + e), s, pp)[0] - potential_concentrations(*(base - e), s, pp)[0]) / (2 * h)
        assert p == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_natural_forms_agree():
    assert potential_forms_discrepancy(SurfaceTensions(1.3, 0.8, 1.1)) < 1e-12


def test_corner_values_vanish_for_any_parameters():
    s = SurfaceTensions(1.3, 0.8, 1.1)
    for phi, psi in [(1, 1), (-1, 1), (0.3, -1)]:
        assert potential_labels(phi, psi, s, "consistent", 2.0)[0] == pytest.approx(0, abs=1e-14)
    for c in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
        assert potential_concentrations(*c, s, PotentialParams(3, 4, 5, 6))[0] == 0


def test_pinned_scale_is_capillary():
    s = SurfaceTensions(1.3, 0.8, 1.1)
    t, disc = pin_sigma_scale(s)
    assert t == pytest.approx(1.0, abs=1e-6)
    assert disc < 1e-10
    chi = derive_capillary(s)
    assert potential_forms_discrepancy(s, PotentialParams(*chi.as_tuple(), 0.7)) < 1e-12


def test_too_few_samples_rejected():
    with pytest.raises(ValueError):
        potential_forms_discrepancy(SurfaceTensions(1, 1, 1), samples=10)


def test_relabeling_symmetry():
    g = Grid2D(32, 32)
    rng = np.random.default_rng(5)
    phi = np.tanh(np.sin(2 * np.pi * g.mesh()[0]) + 0.1 * rng.normal(size=g.shape))
    psi = np.tanh(np.cos(2 * np.pi * g.mesh()[1]))
    a = deg_spec(sigmas=(1.0, 1.4, 0.6))
    b = deg_spec(sigmas=(1.0, 0.6, 1.4))
    assert energy_degenerate(phi, psi, a, g).total == pytest.approx(energy_degenerate(-phi, psi, b, g).total, rel=1e-12)


def test_dissipation_rate_is_nonnegative_and_zero_when_flat():
    g = Grid2D(16, 16)
    spec = deg_spec()
    assert dissipation_rate((np.zeros(g.shape), np.zeros(g.shape)), spec, g) == 0
    rng = np.random.default_rng(0)
    assert dissipation_rate(tuple(rng.normal(size=(2, *g.shape))), spec, g) > 0
    nd = dataclasses.replace(spec, model="nondegenerate")
    assert dissipation_rate(tuple(rng.normal(size=(2, *g.shape))), nd, g) > 0


def test_gamma_calibration_matches_binary_constant():
    assert coef.gamma1(1.0, 2.0) == pytest.approx(CALIBRATION * 2.0)
