"""Numerical checks of the models' analytic structure.

Each check returns measured errors rather than booleans, so callers can apply
their own tolerances and report the numbers.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import coefficients as coef
from .dynamics import chemical_potentials
from .energy import energy_matching, energy_nondegenerate, mixing_energy, pin_sigma_scale, third_potential
from .experiments import change_of_variables, inverse_change, slab_initial
from .grid import Grid2D
from .params import (
    CALIBRATION,
    CONSISTENT,
    DEGENERATE,
    MATCHING,
    NONDEGENERATE,
    STANDARD,
    ModelSpec,
    SurfaceTensions,
    derive_capillary,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return bool(np.isfinite(self.error) and self.error <= self.tolerance)

    def line(self) -> str:
        status = "ok  " if self.ok else "FAIL"
        return f"{status} {self.name:<48s} error={self.error:.3e} tol={self.tolerance:.1e}"


def random_smooth_field(grid: Grid2D, rng: np.random.Generator, amplitude: float = 0.5, offset: float = 0.0, kmax: int = 4):
    """offset + a random trigonometric polynomial with decaying mode weights."""
    X, Y = grid.mesh()
    f = np.full(grid.shape, float(offset))
    for kx in range(-kmax, kmax + 1):
        for ky in range(-kmax, kmax + 1):
            a, b = rng.normal(size=2) * amplitude / (1 + kx * kx + ky * ky)
            arg = 2 * np.pi * (kx * X / grid.Lx + ky * Y / grid.Ly)
            f += a * np.cos(arg) + b * np.sin(arg)
    return f


def random_state(spec: ModelSpec, grid: Grid2D, rng: np.random.Generator):
    """Smooth random fields in the native variables of ``spec``."""
    if spec.model == NONDEGENERATE:
        return (
            random_smooth_field(grid, rng, 0.2, 0.4),
            random_smooth_field(grid, rng, 0.2, 0.3),
        )
    return random_smooth_field(grid, rng), random_smooth_field(grid, rng)


def gradient_check(spec: ModelSpec, grid: Grid2D, u, v, h: float = 1e-5, stride: tuple[int, int] = (3, 5)) -> float:
    """Relative error between the chemical potentials and pointwise central
    differences of the discrete energy, normalized by the cell area.

    For the concentration model a point perturbation of c alone moves c3 the
    opposite way, so the reference is zeta_c - zeta_3 (likewise for d).
    """
    zeta = chemical_potentials(u, v, spec, grid)
    if spec.model == NONDEGENERATE:
        z3 = third_potential(zeta.first, zeta.second, spec)
        targets = (zeta.first - z3, zeta.second - z3)
    else:
        targets = (zeta.first, zeta.second)

    def energy(a, b):
        return mixing_energy(a, b, spec, grid).total

    worst = 0.0
    for which, target in enumerate(targets):
        scale = float(np.max(np.abs(target)))
        for i in range(0, grid.Nx, stride[0]):
            for j in range(0, grid.Ny, stride[1]):
                e = np.zeros(grid.shape)
                e[i, j] = h
                if which == 0:
                    fd = (energy(u + e, v) - energy(u - e, v)) / (2 * h * grid.cell_area)
                else:
                    fd = (energy(u, v + e) - energy(u, v - e)) / (2 * h * grid.cell_area)
                worst = max(worst, abs(fd - target[i, j]) / scale)
    return worst


def coefficient_identities(sigmas: SurfaceTensions, alpha: float) -> dict[str, float]:
    """End-point values and flatness of the consistent gamma polynomials."""
    s12, s13, s23 = sigmas.as_tuple()
    K = CALIBRATION
    g1 = lambda p: float(coef.gamma1(p, s12, CONSISTENT, alpha))  # noqa: E731
    g1p = lambda p: float(coef.gamma1_prime(p, s12, CONSISTENT, alpha))  # noqa: E731
    g2 = lambda p: float(coef.gamma2(p, s13, s23, CONSISTENT, alpha))  # noqa: E731
    g2p = lambda p: float(coef.gamma2_prime(p, s13, s23, CONSISTENT, alpha))  # noqa: E731
    return {
        "gamma1(1) = K sigma12": abs(g1(1.0) - K * s12),
        "gamma1(-1) = 0": abs(g1(-1.0)),
        "gamma1'(+-1) = 0": max(abs(g1p(1.0)), abs(g1p(-1.0))),
        "gamma2(1) = K sigma13": abs(g2(1.0) - K * s13),
        "gamma2(-1) = K sigma23": abs(g2(-1.0) - K * s23),
        "gamma2'(+-1) = 0": max(abs(g2p(1.0)), abs(g2p(-1.0))),
    }


def chi0_identity(sigmas: SurfaceTensions) -> float:
    chi = derive_capillary(sigmas)
    return abs(chi.chi0 - 1.0 / sum(1.0 / c for c in chi.as_tuple()))


def round_trip_error(n: int = 10000, seed: int = 0, psi_floor: float = -0.999) -> float:
    """max error of inverse_change(change_of_variables(phi, psi)) away from psi = -1."""
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-1, 1, n)
    psi = rng.uniform(psi_floor, 1, n)
    p2, q2 = inverse_change(*change_of_variables(phi, psi))
    return float(max(np.max(np.abs(p2 - phi)), np.max(np.abs(q2 - psi))))


def bridge_error(spec: ModelSpec, grid: Grid2D, pairs: int = 100, seed: int = 0) -> float:
    """max relative gap between the matching energy and the concentration
    energy of the mapped fields, over random label pairs in [-1, 1].

    The pairs are trigonometric polynomials of low degree, so the products
    formed by the change of variables stay resolved on the grid and the
    spectral chain rule holds to round-off.
    """
    m = dataclasses.replace(spec, model=DEGENERATE, energy_form=MATCHING)
    nd = dataclasses.replace(spec, model=NONDEGENERATE, energy_form=STANDARD)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        kmax = max(1, min(4, grid.Nx // 8, grid.Ny // 8))
        phi = random_smooth_field(grid, rng, 1.0, kmax=kmax)
        psi = random_smooth_field(grid, rng, 1.0, kmax=kmax)
        phi /= np.max(np.abs(phi))
        psi /= np.max(np.abs(psi))
        a = energy_matching(phi, psi, m, grid).total
        b = energy_nondegenerate(*change_of_variables(phi, psi), nd, grid).total
        worst = max(worst, abs(a - b) / abs(b))
    return worst


def energetic_consistency(spec: ModelSpec, absent: int = 3, cells_per_width: float = 12.0) -> float:
    """Relative gap between the energy of a binary tanh slab pair (one phase
    absent) and sigma_ij times the total interface length.

    Runs on a 1D-like strip whose x resolution follows the interface width.
    """
    width = spec.interface_width
    Nx = 1 << int(np.ceil(np.log2(max(64.0, cells_per_width / width))))
    grid = Grid2D(Nx, 8, 1.0, 0.25)
    phi, _ = slab_initial(grid, width)
    s = spec.sigmas
    if absent == 3:
        u, v, sigma = phi, np.ones(grid.shape), s.sigma12
    elif absent == 2:
        u, v, sigma = np.ones(grid.shape), phi, s.sigma13
    elif absent == 1:
        u, v, sigma = -np.ones(grid.shape), phi, s.sigma23
    else:
        raise ValueError("absent must be 1, 2 or 3")
    if spec.model == NONDEGENERATE:
        u, v = change_of_variables(u, v)
    if spec.model == DEGENERATE and spec.energy_form == STANDARD and spec.coefficients != CONSISTENT and absent != 3:
        raise ValueError("inconsistent coefficients are only calibrated on 1-2 interfaces")
    W = mixing_energy(u, v, spec, grid).total
    return abs(W - 2 * grid.Ly * sigma) / (2 * grid.Ly * sigma)


def verification_suite(spec: ModelSpec, seed: int = 0) -> tuple[list[CheckResult], dict]:
    """All checks for one configuration plus the pinned potential parameters."""
    grid = Grid2D(32, 32, spec.numerics.Lx, spec.numerics.Ly)
    rng = np.random.default_rng(seed)
    results = []
    variants = [spec]
    if spec.model == DEGENERATE and spec.energy_form == STANDARD:
        variants.append(dataclasses.replace(spec, energy_form=MATCHING))
    if not spec.sigmas.restricted:
        variants.append(dataclasses.replace(spec, model=NONDEGENERATE, energy_form=STANDARD))
    for v in variants:
        u, w = random_state(v, grid, rng)
        label = f"gradient check ({v.model}, {v.energy_form})"
        results.append(CheckResult(label, gradient_check(v, grid, u, w, stride=(5, 7)), 1e-6))
    for name, err in coefficient_identities(spec.sigmas, spec.alpha).items():
        results.append(CheckResult(name, err, 1e-12))
    if not spec.sigmas.restricted:
        results.append(CheckResult("chi0 = 1/sum(1/chi_i)", chi0_identity(spec.sigmas), 1e-15))
    results.append(CheckResult("change of variables round trip", round_trip_error(seed=seed), 1e-12))
    if not spec.sigmas.restricted:
        results.append(CheckResult("matching energy = concentration energy", bridge_error(spec, grid, 10, seed), 1e-10))
    t, disc = pin_sigma_scale(spec.sigmas, 0.0)
    chi = derive_capillary(spec.sigmas) if not spec.sigmas.restricted else None
    results.append(CheckResult("potential forms discrepancy at pinned Sigma", disc, 1e-10))
    pinned = {"Sigma_scale": t, "Lambda": 0.0}
    if chi is not None:
        pinned.update({f"Sigma{i}": t * c for i, c in enumerate(chi.as_tuple(), start=1)})
    return results, pinned
