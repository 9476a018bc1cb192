import dataclasses

import numpy as np
import pytest

from tphase.dynamics import (
    BlowUpError,
    SimState,
    Stepper,
    chem_potentials_degenerate,
    chem_potentials_nondegenerate,
    chemical_potentials,
    diagnostics,
    implicit_coefficients,
    run_to_equilibrium,
    step_degenerate,
    step_nondegenerate,
)
from tphase.energy import mixing_energy
from tphase.experiments import slab_initial
from tphase.grid import Grid2D
from tphase.params import ModelSpec, NumericalParams, SurfaceTensions
from tphase.verification import gradient_check, random_state


def make_spec(model="degenerate", **numerics):
    base = dict(epsilon=0.05, dt=1e-5, t_end=1e-3, Nx=32, Ny=32, output_every=10)
    base.update(numerics)
    return ModelSpec(model=model, sigmas=SurfaceTensions(1.3, 0.8, 1.1), numerics=NumericalParams(**base))


@pytest.fixture
def grid():
    return Grid2D(32, 32)


def test_pure_phase_potentials_vanish(grid):
    one = np.ones(grid.shape)
    for sign in (1, -1):
        z = chem_potentials_degenerate(sign * one, sign * one, make_spec(), grid)
        assert np.max(np.abs(z.first)) < 1e-14 and np.max(np.abs(z.second)) < 1e-14
    pair, beta = chem_potentials_nondegenerate(one, 0 * one, make_spec("nondegenerate"), grid)
    assert np.max(np.abs(pair.first)) < 1e-14 and np.max(np.abs(pair.second)) < 1e-14
    assert np.max(np.abs(beta)) < 1e-14


@pytest.mark.parametrize(
    "variant",
    [
        dict(model="degenerate"),
        dict(model="degenerate", coefficients="inconsistent", sigmas=SurfaceTensions(1.3, 0.9, 0.9)),
        dict(model="degenerate", energy_form="matching"),
        dict(model="nondegenerate"),
        dict(model="nondegenerate", potential="natural"),
    ],
)
def test_chemical_potentials_are_energy_variations(grid, variant):
    spec = dataclasses.replace(make_spec(), **variant)
    u, v = random_state(spec, grid, np.random.default_rng(11))
    assert gradient_check(spec, grid, u, v, stride=(7, 9)) < 1e-6


def test_pure_state_is_a_fixed_point(grid):
    one = np.ones(grid.shape)
    new = step_degenerate(SimState(one, one), make_spec(), grid)
    assert np.max(np.abs(new.u - 1)) < 1e-14 and np.max(np.abs(new.v - 1)) < 1e-14


def test_step_functions_check_the_model(grid):
    s = SimState(np.ones(grid.shape), np.ones(grid.shape))
    with pytest.raises(ValueError):
        step_nondegenerate(s, make_spec(), grid)
    with pytest.raises(ValueError):
        step_degenerate(s, make_spec("nondegenerate"), grid)


def test_uniform_state_converges_in_one_step(grid):
    u = np.full(grid.shape, 0.3)
    run = run_to_equilibrium(SimState(u, u.copy()), make_spec(), grid)
    assert run.converged and run.state.step == 1


@pytest.mark.parametrize("model", ["degenerate", "nondegenerate"])
def test_means_conserved_and_energy_decreases(grid, model):
    spec = make_spec(model, output_every=1, t_end=2e-3)
    u, v = random_state(spec, grid, np.random.default_rng(3))
    run = run_to_equilibrium(SimState(u, v), spec, grid)
    m1 = np.array([r.mass_1 for r in run.history])
    m2 = np.array([r.mass_2 for r in run.history])
    assert np.ptp(m1) < 1e-12 and np.ptp(m2) < 1e-12
    assert np.all(np.diff(run.energies) <= 1e-12)
    assert run.energies[-1] < run.energies[0]


def test_energy_drop_matches_dissipation_rate(grid):
    spec = make_spec(dt=1e-10)
    u, v = random_state(spec, grid, np.random.default_rng(7))
    state = SimState(u, v)
    d0 = diagnostics(state, spec, grid)
    new = Stepper(spec, grid).step(state)
    dE = (mixing_energy(new.u, new.v, spec, grid).total - d0.energy_total) / 1e-10
    assert -dE == pytest.approx(d0.dissipation_rate, rel=1e-2)


def test_binary_equilibrium_energy_per_interface():
    spec = ModelSpec(
        numerics=NumericalParams(epsilon=0.02, dt=1e-5, t_end=2e-3, Nx=256, Ny=8, Ly=0.25, output_every=100)
    )
    g = Grid2D(256, 8, 1.0, 0.25)
    phi, _ = slab_initial(g, spec.interface_width)
    run = run_to_equilibrium(SimState(phi, np.ones(g.shape)), spec, g)
    assert run.history[-1].energy_total / (2 * g.Ly) == pytest.approx(1.0, rel=0.02)


def test_matching_and_concentration_label_updates_coincide():
    # on a binary interface one matching step moves phi by exactly twice the
    # concentration step in c when M_phi = 2 M0
    g = Grid2D(128, 8, 1.0, 0.25)
    num = NumericalParams(epsilon=0.025, dt=5e-6, t_end=5e-6, Nx=128, Ny=8, Ly=0.25)
    nd = ModelSpec(model="nondegenerate", numerics=num)
    m = ModelSpec(energy_form="matching", numerics=num, mobilities=dataclasses.replace(nd.mobilities, M1=2.0, M2=2.0))
    phi, _ = slab_initial(g, nd.interface_width)
    phi = 0.9 * phi
    a = step_degenerate(SimState(phi, np.ones(g.shape)), m, g)
    c = 0.5 * (1 + phi)
    b = step_nondegenerate(SimState(c, 1 - c), nd, g)
    np.testing.assert_allclose(0.5 * (1 + a.u), b.u, atol=1e-12)


def test_implicit_coefficients_positive():
    for spec in (make_spec(), make_spec("nondegenerate"), dataclasses.replace(make_spec(), energy_form="matching")):
        k1, k2 = implicit_coefficients(spec)
        assert k1 > 0 and k2 > 0


def test_unstabilised_large_step_blows_up(grid):
    spec = make_spec(dt=1.0, t_end=10.0, stabilization=0.0)
    u, v = random_state(spec, grid, np.random.default_rng(0))
    with pytest.raises(BlowUpError, match="halvings"):
        run_to_equilibrium(SimState(u, v), spec, grid)


def test_snapshots_and_callback_schedule(grid):
    spec = make_spec(t_end=2e-4, output_every=5, equilibrium_tol=0.0)
    u, v = random_state(spec, grid, np.random.default_rng(1))
    seen = []
    run = run_to_equilibrium(SimState(u, v), spec, grid, snapshot_every=10, callback=lambda s: seen.append(s.step))
    assert seen == [r.step for r in run.history] == [0, 5, 10, 15, 20]
    assert [s.step for s in run.snapshots] == [0, 10, 20]


def test_chemical_potentials_dispatch(grid):
    spec = make_spec("nondegenerate")
    u, v = random_state(spec, grid, np.random.default_rng(2))
    pair, _ = chem_potentials_nondegenerate(u, v, spec, grid)
    z = chemical_potentials(u, v, spec, grid)
    np.testing.assert_array_equal(z.first, pair.first)
