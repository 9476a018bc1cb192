"""Chemical potentials and semi-implicit Cahn-Hilliard time stepping.

Both models are conserved gradient flows u_t = M lap(zeta_u) of their mixing
energy (zero velocity).  The step treats a constant-coefficient fourth-order
part and a linear stabilization term implicitly (diagonal in Fourier space)
and everything else explicitly:

    (1 + dt M k^2 (kappa k^2 + S)) (u^{n+1} - u^n)^ = -dt M k^2 zeta(u^n)^

where kappa bounds the variable gradient coefficient from above and S is the
stabilization constant.  The zero mode is untouched, so field means are
conserved exactly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import coefficients as coef
from .energy import (
    EnergyBreakdown,
    dissipation_rate,
    double_well_prime,
    matching_gradient_coefficients,
    mixing_energy,
    potential_concentrations,
    potential_labels,
)
from .grid import Grid2D
from .params import DEGENERATE, MATCHING, NATURAL, ModelSpec, derive_capillary

log = logging.getLogger(__name__)


class BlowUpError(RuntimeError):
    """A step kept failing after the maximum number of dt halvings."""


class ChemicalPotentialPair(NamedTuple):
    first: np.ndarray
    second: np.ndarray


@dataclass
class SimState:
    u: np.ndarray
    v: np.ndarray
    time: float = 0.0
    step: int = 0
    dt: float | None = None

    def copy(self) -> "SimState":
        return SimState(self.u.copy(), self.v.copy(), self.time, self.step, self.dt)


DIAGNOSTIC_COLUMNS = (
    "step",
    "time",
    "energy_total",
    "energy_gradient",
    "energy_potential",
    "mass_1",
    "mass_2",
    "dissipation_rate",
    "min_1",
    "max_1",
    "min_2",
    "max_2",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    step: int
    time: float
    energy_total: float
    energy_gradient: float
    energy_potential: float
    mass_1: float
    mass_2: float
    dissipation_rate: float
    min_1: float
    max_1: float
    min_2: float
    max_2: float

    def as_row(self) -> tuple:
        return tuple(getattr(self, c) for c in DIAGNOSTIC_COLUMNS)


# --------------------------------------------------------------------------
# chemical potentials


def chem_potentials_degenerate(phi, psi, spec: ModelSpec, grid: Grid2D) -> ChemicalPotentialPair:
    eps, alpha, mode = spec.epsilon, spec.alpha, spec.coefficients
    s12, s13, s23 = spec.sigmas.as_tuple()
    g1 = coef.gamma1(psi, s12, mode, alpha)
    g1p = coef.gamma1_prime(psi, s12, mode, alpha)
    g2 = coef.gamma2(phi, s13, s23, mode, alpha)
    g2p = coef.gamma2_prime(phi, s13, s23, mode, alpha)

    px, py = grid.gradient(phi)
    qx, qy = grid.gradient(psi)
    e_phi = 0.5 * eps * (px * px + py * py) + (phi * phi - 1) ** 2 / (4 * eps)
    e_psi = 0.5 * eps * (qx * qx + qy * qy) + (psi * psi - 1) ** 2 / (4 * eps)

    z_phi = -eps * grid.divergence(g1 * px, g1 * py) + g1 / eps * double_well_prime(phi) + g2p * e_psi
    z_psi = -eps * grid.divergence(g2 * qx, g2 * qy) + g2 / eps * double_well_prime(psi) + g1p * e_phi
    return ChemicalPotentialPair(z_phi, z_psi)


def chem_potentials_matching(phi, psi, spec: ModelSpec, grid: Grid2D) -> ChemicalPotentialPair:
    """First variations of the concentration energy written in (phi, psi)."""
    eps = spec.epsilon
    A, A_psi, B, B_phi, C, C_phi, C_psi = matching_gradient_coefficients(phi, psi, spec.sigmas)
    px, py = grid.gradient(phi)
    qx, qy = grid.gradient(psi)
    dot = px * qx + py * qy
    Lambda = spec.resolved_potential_params().Lambda
    _, F_phi, F_psi = potential_labels(phi, psi, spec.sigmas, spec.potential, Lambda)

    k = 0.1875 * eps
    z_phi = k * (
        -grid.divergence(2 * A * px + C * qx, 2 * A * py + C * qy)
        + B_phi * (qx * qx + qy * qy)
        + C_phi * dot
    ) + 12.0 / eps * F_phi
    z_psi = k * (
        -grid.divergence(2 * B * qx + C * px, 2 * B * qy + C * py)
        + A_psi * (px * px + py * py)
        + C_psi * dot
    ) + 12.0 / eps * F_psi
    return ChemicalPotentialPair(z_phi, z_psi)


def chem_potentials_nondegenerate(c, d, spec: ModelSpec, grid: Grid2D) -> tuple[ChemicalPotentialPair, np.ndarray]:
    """(zeta_c, zeta_d) including the Lagrange multiplier, and the multiplier itself."""
    eps = spec.epsilon
    chi = derive_capillary(spec.sigmas)
    params = None if spec.potential == NATURAL else spec.resolved_potential_params()
    _, F1, F2, F3 = potential_concentrations(c, d, 1 - c - d, spec.sigmas, params)
    beta = -12.0 / eps * chi.chi0 * (F1 / chi.chi1 + F2 / chi.chi2 + F3 / chi.chi3)
    z_c = -0.75 * eps * chi.chi1 * grid.laplacian(c) + 12.0 / eps * F1 + beta
    z_d = -0.75 * eps * chi.chi2 * grid.laplacian(d) + 12.0 / eps * F2 + beta
    return ChemicalPotentialPair(z_c, z_d), beta


def chemical_potentials(u, v, spec: ModelSpec, grid: Grid2D) -> ChemicalPotentialPair:
    if spec.model == DEGENERATE:
        if spec.energy_form == MATCHING:
            return chem_potentials_matching(u, v, spec, grid)
        return chem_potentials_degenerate(u, v, spec, grid)
    return chem_potentials_nondegenerate(u, v, spec, grid)[0]


# --------------------------------------------------------------------------
# stepping


def field_mobilities(spec: ModelSpec) -> tuple[float, float]:
    if spec.model == DEGENERATE:
        return spec.mobilities.M1, spec.mobilities.M2
    M = spec.mobilities.nondegenerate(derive_capillary(spec.sigmas))
    return M[0], M[1]


def implicit_coefficients(spec: ModelSpec) -> tuple[float, float]:
    """Constants bounding the variable gradient coefficients from above."""
    eps, alpha = spec.epsilon, spec.alpha
    s12, s13, s23 = spec.sigmas.as_tuple()
    if spec.model == DEGENERATE:
        if spec.energy_form == MATCHING:
            # diagonal maxima; on binary interfaces these are half the
            # concentration-model constants, so both schemes coincide there
            s = np.linspace(-1.0, 1.0, 201)
            P, Q = np.meshgrid(s, s, indexing="ij")
            A, _, B, _, _, _, _ = matching_gradient_coefficients(P, Q, spec.sigmas)
            k = 0.1875 * eps
            return 2 * k * float(np.max(A)), 2 * k * float(np.max(B))
        return (
            eps * coef.gamma1_max(s12, spec.coefficients, alpha),
            eps * coef.gamma2_max(s13, s23, spec.coefficients, alpha),
        )
    chi = derive_capillary(spec.sigmas)
    return 0.75 * eps * chi.chi1, 0.75 * eps * chi.chi2


class Stepper:
    """Precomputes the implicit symbols for one (spec, grid) pair."""

    def __init__(self, spec: ModelSpec, grid: Grid2D, dealias: bool = False):
        self.spec = spec
        self.grid = grid
        self.dealias = dealias
        self.mobilities = field_mobilities(spec)
        self.kappas = implicit_coefficients(spec)
        self.S = spec.stabilization()
        self._cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def _symbols(self, dt: float):
        sym = self._cache.get(dt)
        if sym is None:
            k2 = self.grid.ksq
            sym = tuple(
                -dt * M * k2 / (1.0 + dt * M * k2 * (kap * k2 + self.S))
                for M, kap in zip(self.mobilities, self.kappas)
            )
            if len(self._cache) > 32:
                self._cache.clear()
            self._cache[dt] = sym
        return sym

    def increments(self, u, v, dt: float, zeta: ChemicalPotentialPair | None = None):
        g = self.grid
        if zeta is None:
            zeta = chemical_potentials(u, v, self.spec, g)
        su, sv = self._symbols(dt)
        zu, zv = g.fft(zeta.first), g.fft(zeta.second)
        if self.dealias:
            zu = zu * g.dealias_mask
            zv = zv * g.dealias_mask
        return g.ifft(su * zu), g.ifft(sv * zv)

    def step(self, state: SimState) -> SimState:
        """Advance one step, halving dt on blow-up (non-finite or huge fields)."""
        n = self.spec.numerics
        dt = state.dt if state.dt is not None else n.dt
        zeta = chemical_potentials(state.u, state.v, self.spec, self.grid)
        for _ in range(n.max_halvings + 1):
            du, dv = self.increments(state.u, state.v, dt, zeta)
            u, v = state.u + du, state.v + dv
            if _healthy(u, n.blowup_threshold) and _healthy(v, n.blowup_threshold):
                return SimState(u, v, state.time + dt, state.step + 1, dt)
            log.warning("step %d rejected at dt=%g; halving", state.step, dt)
            dt *= 0.5
        raise BlowUpError(f"step {state.step} failed after {n.max_halvings} dt halvings")


def _healthy(f: np.ndarray, threshold: float) -> bool:
    m = np.max(np.abs(f))
    return bool(np.isfinite(m) and m <= threshold)


def step_degenerate(state: SimState, spec: ModelSpec, grid: Grid2D) -> SimState:
    if spec.model != DEGENERATE:
        raise ValueError("spec is not a degenerate model")
    return Stepper(spec, grid).step(state)


def step_nondegenerate(state: SimState, spec: ModelSpec, grid: Grid2D) -> SimState:
    if spec.model == DEGENERATE:
        raise ValueError("spec is not a non-degenerate model")
    return Stepper(spec, grid).step(state)


def diagnostics(state: SimState, spec: ModelSpec, grid: Grid2D, zeta: ChemicalPotentialPair | None = None) -> DiagnosticsRecord:
    e: EnergyBreakdown = mixing_energy(state.u, state.v, spec, grid)
    if zeta is None:
        zeta = chemical_potentials(state.u, state.v, spec, grid)
    return DiagnosticsRecord(
        step=state.step,
        time=state.time,
        energy_total=e.total,
        energy_gradient=e.gradient_part,
        energy_potential=e.potential_part,
        mass_1=grid.integrate(state.u),
        mass_2=grid.integrate(state.v),
        dissipation_rate=dissipation_rate(zeta, spec, grid),
        min_1=float(state.u.min()),
        max_1=float(state.u.max()),
        min_2=float(state.v.min()),
        max_2=float(state.v.max()),
    )


@dataclass
class RunResult:
    state: SimState
    history: list[DiagnosticsRecord] = field(default_factory=list)
    converged: bool = False
    snapshots: list[SimState] = field(default_factory=list)

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.energy_total for r in self.history])


def run_to_equilibrium(
    state: SimState,
    spec: ModelSpec,
    grid: Grid2D,
    output_every: int | None = None,
    snapshot_every: int | None = None,
    callback=None,
    dealias: bool = False,
) -> RunResult:
    """Step until max|du|/dt and max|dv|/dt drop below the tolerance or t_end.

    One diagnostics record is produced for the initial state, every
    ``output_every`` steps and for the final state.  ``callback(state)`` is
    invoked on the same schedule.
    """
    n = spec.numerics
    every = output_every or n.output_every
    stepper = Stepper(spec, grid, dealias=dealias)
    state = state.copy()
    if state.dt is None:
        state.dt = n.dt
    result = RunResult(state)
    result.history.append(diagnostics(state, spec, grid))
    if callback is not None:
        callback(state)
    if snapshot_every:
        result.snapshots.append(state.copy())

    # stop within a tiny fraction of a step of t_end
    t_stop = n.t_end * (1 - 1e-12)
    while state.time < t_stop:
        dt = min(state.dt, n.t_end - state.time)
        trial = SimState(state.u, state.v, state.time, state.step, dt)
        new = stepper.step(trial)
        rate = max(np.max(np.abs(new.u - state.u)), np.max(np.abs(new.v - state.v))) / new.dt
        # keep a halved dt, but do not let the final short step shrink it
        new.dt = new.dt if new.dt < dt else state.dt
        state = new
        converged = rate < n.equilibrium_tol
        if state.step % every == 0 or converged or state.time >= t_stop:
            result.history.append(diagnostics(state, spec, grid))
            if callback is not None:
                callback(state)
        if snapshot_every and state.step % snapshot_every == 0:
            result.snapshots.append(state.copy())
        if converged:
            result.converged = True
            break
    result.state = state
    if not math.isfinite(result.history[-1].energy_total):
        raise BlowUpError("energy became non-finite")
    return result
