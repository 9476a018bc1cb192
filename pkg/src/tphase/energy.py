"""Mixing energies, triple-well potentials and the dissipation-rate diagnostic.

Three discrete energies are provided:

* ``energy_degenerate`` -- the two-label energy with gamma1(psi), gamma2(phi);
* ``energy_nondegenerate`` -- the concentration energy (3/8) eps sum chi_i |grad c_i|^2
  + (12/eps) F(c);
* ``energy_matching`` -- the concentration energy rewritten in (phi, psi).

The triple-well potential F is written both in concentrations (c1, c2, c3) and
in labels (phi, psi).  The two forms agree identically for the natural
potential and, for the consistent potential, exactly when Sigma_i = chi_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coefficients as coef
from .grid import Grid2D
from .params import (
    CONSISTENT,
    DEGENERATE,
    MATCHING,
    NATURAL,
    ModelSpec,
    PotentialParams,
    SurfaceTensions,
    derive_capillary,
)


def double_well(s):
    return 0.25 * (s * s - 1.0) ** 2


def double_well_prime(s):
    return (s * s - 1.0) * s


@dataclass(frozen=True)
class EnergyBreakdown:
    gradient_part: float
    potential_part: float
    total: float

    @classmethod
    def from_parts(cls, gradient_part: float, potential_part: float) -> "EnergyBreakdown":
        return cls(float(gradient_part), float(potential_part), float(gradient_part + potential_part))


# --------------------------------------------------------------------------
# triple-well potential in concentrations


def potential_concentrations(c1, c2, c3, sigmas: SurfaceTensions, params: PotentialParams | None = None):
    """F(c1, c2, c3) and its partials with respect to each c_i (taken independently).

    ``params=None`` gives the natural potential.
    """
    s12, s13, s23 = sigmas.as_tuple()
    c1s, c2s, c3s = c1 * c1, c2 * c2, c3 * c3
    F = s12 * c1s * c2s + c3s * (s13 * c1s + s23 * c2s)
    F1 = 2 * s12 * c1 * c2s + 2 * s13 * c3s * c1
    F2 = 2 * s12 * c1s * c2 + 2 * s23 * c3s * c2
    F3 = 2 * c3 * (s13 * c1s + s23 * c2s)
    if params is not None:
        S1, S2, S3, lam = params.Sigma1, params.Sigma2, params.Sigma3, params.Lambda
        lin = S1 * c1 + S2 * c2 + S3 * c3
        prod = c1 * c2 * c3
        F = F + prod * lin + lam * prod * prod
        F1 = F1 + c2 * c3 * lin + prod * S1 + 2 * lam * prod * c2 * c3
        F2 = F2 + c1 * c3 * lin + prod * S2 + 2 * lam * prod * c1 * c3
        F3 = F3 + c1 * c2 * lin + prod * S3 + 2 * lam * prod * c1 * c2
    return F, F1, F2, F3


# --------------------------------------------------------------------------
# triple-well potential in labels


def potential_labels(phi, psi, sigmas: SurfaceTensions, mode: str = NATURAL, Lambda: float = 0.0):
    """F(phi, psi) and its partials (F_phi, F_psi) in the label form.

    The consistent label form carries the cubic cross term implicitly with
    Sigma_i = chi_i; only Lambda is free.
    """
    s12, s13, s23 = sigmas.as_tuple()
    P = 0.5 * (1 + psi)
    Q = 1 - phi * phi
    R = 1 - psi * psi
    Q_phi = -2 * phi
    R_psi = -2 * psi
    if mode == NATURAL:
        H = (s13 * (1 + phi) ** 2 + s23 * (1 - phi) ** 2) / 4
        H_phi = (s13 * (1 + phi) - s23 * (1 - phi)) / 2
        P4 = P**4
        F = (s12 * P4 * Q * Q + H * R * R) / 16
        F_phi = (s12 * P4 * 2 * Q * Q_phi + H_phi * R * R) / 16
        F_psi = (s12 * 2 * P**3 * Q * Q + H * 2 * R * R_psi) / 16
        return F, F_phi, F_psi
    if mode != CONSISTENT:
        raise ValueError(f"unknown potential mode {mode!r}")

    P2 = P * P
    Q2 = Q * Q
    R2 = R * R
    T = 0.5 * (3 + psi)
    H = s13 * (1 + phi) + s23 * (1 - phi) - 0.5 * s12 * Q
    H_phi = s13 - s23 + s12 * phi
    J = s12 + (s13 - s23) * phi
    J_phi = s13 - s23

    F = (
        s12 * P2 * Q2 / 16
        + H * R2 / 32
        + Q * R * P2 * J / 16
        - s12 * R * P * T * Q2 / 64
        + Lambda * P2 * Q2 * R2 / 256
    )
    F_phi = (
        s12 * P2 * 2 * Q * Q_phi / 16
        + H_phi * R2 / 32
        + R * P2 * (Q_phi * J + Q * J_phi) / 16
        - s12 * R * P * T * 2 * Q * Q_phi / 64
        + Lambda * P2 * R2 * 2 * Q * Q_phi / 256
    )
    # d/dpsi of P^2 = P, of R = R_psi, of P*T = (T + P)/2
    F_psi = (
        s12 * P * Q2 / 16
        + H * 2 * R * R_psi / 32
        + Q * J * (R_psi * P2 + R * P) / 16
        - s12 * Q2 * (R_psi * P * T + R * 0.5 * (T + P)) / 64
        + Lambda * Q2 * (P * R2 + P2 * 2 * R * R_psi) / 256
    )
    return F, F_phi, F_psi


def labels_to_concentrations(phi, psi):
    c = 0.25 * (1 + phi) * (1 + psi)
    d = 0.25 * (1 - phi) * (1 + psi)
    return c, d


def potential_forms_discrepancy(
    sigmas: SurfaceTensions,
    params: PotentialParams | None = None,
    samples: int = 4096,
    seed: int = 0,
) -> float:
    """max |F(c(phi,psi), d(phi,psi)) - F(phi,psi)| over samples of [-1,1]^2.

    ``params=None`` compares the two forms of the natural potential; otherwise
    the concentration form uses ``params`` and the label form its Lambda.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    n_edge = 4 * int(np.sqrt(samples))
    pts = rng.uniform(-1.0, 1.0, size=(samples, 2))
    edge = np.linspace(-1.0, 1.0, n_edge // 4)
    corners = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]], dtype=float)
    border = np.concatenate(
        [
            np.stack([edge, np.full_like(edge, s)], axis=1)
            for s in (-1.0, 1.0)
        ]
        + [np.stack([np.full_like(edge, s), edge], axis=1) for s in (-1.0, 1.0)]
        + [corners]
    )
    pts = np.concatenate([pts, border])
    phi, psi = pts[:, 0], pts[:, 1]
    c, d = labels_to_concentrations(phi, psi)
    if params is None:
        Fcd = potential_concentrations(c, d, 1 - c - d, sigmas, None)[0]
        Fpq = potential_labels(phi, psi, sigmas, NATURAL)[0]
    else:
        Fcd = potential_concentrations(c, d, 1 - c - d, sigmas, params)[0]
        Fpq = potential_labels(phi, psi, sigmas, CONSISTENT, params.Lambda)[0]
    return float(np.max(np.abs(Fcd - Fpq)))


def pin_sigma_scale(
    sigmas: SurfaceTensions,
    Lambda: float = 0.0,
    t_range: tuple[float, float] = (0.0, 2.0),
    samples: int = 4096,
) -> tuple[float, float]:
    """Scale t minimising the form discrepancy over Sigma_i = t chi_i.

    Returns ``(t_best, discrepancy_at_t_best)``.  A coarse scan locates the
    bracket and a bounded scalar minimisation refines it.
    """
    from scipy.optimize import minimize_scalar

    chi = derive_capillary(sigmas).as_tuple()

    def disc(t: float) -> float:
        pp = PotentialParams(t * chi[0], t * chi[1], t * chi[2], Lambda)
        return potential_forms_discrepancy(sigmas, pp, samples)

    ts = np.linspace(t_range[0], t_range[1], 41)
    vals = [disc(t) for t in ts]
    i = int(np.argmin(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
    res = minimize_scalar(disc, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


# --------------------------------------------------------------------------
# gradient-term coefficients of the label form of the concentration energy
#   sum chi_i |grad c_i|^2 = 1/2 (A |grad phi|^2 + B |grad psi|^2 + C <grad phi, grad psi>)


def matching_gradient_coefficients(phi, psi, sigmas: SurfaceTensions):
    """(A, A_psi, B, B_phi, C, C_phi, C_psi)."""
    s12, s13, s23 = sigmas.as_tuple()
    P = 0.5 * (1 + psi)
    A = s12 * P * P
    A_psi = s12 * P
    B = 0.5 * (s13 * (1 + phi) + s23 * (1 - phi) - 0.5 * s12 * (1 - phi * phi))
    B_phi = 0.5 * (s13 - s23 + s12 * phi)
    lin = s12 * phi + s13 - s23
    C = lin * P
    C_phi = s12 * P
    C_psi = 0.5 * lin
    return A, A_psi, B, B_phi, C, C_phi, C_psi


# --------------------------------------------------------------------------
# discrete energies


def _double_well_density(f, fx, fy, eps):
    return 0.5 * eps * (fx * fx + fy * fy), (1 - f * f) ** 2 / (4 * eps)


def energy_degenerate(phi: np.ndarray, psi: np.ndarray, spec: ModelSpec, grid: Grid2D) -> EnergyBreakdown:
    eps, alpha = spec.epsilon, spec.alpha
    s12, s13, s23 = spec.sigmas.as_tuple()
    g1 = coef.gamma1(psi, s12, spec.coefficients, alpha)
    g2 = coef.gamma2(phi, s13, s23, spec.coefficients, alpha)
    grad_phi, well_phi = _double_well_density(phi, *grid.gradient(phi), eps)
    grad_psi, well_psi = _double_well_density(psi, *grid.gradient(psi), eps)
    return EnergyBreakdown.from_parts(
        grid.integrate(g1 * grad_phi + g2 * grad_psi),
        grid.integrate(g1 * well_phi + g2 * well_psi),
    )


def energy_nondegenerate(c: np.ndarray, d: np.ndarray, spec: ModelSpec, grid: Grid2D) -> EnergyBreakdown:
    eps = spec.epsilon
    chi = derive_capillary(spec.sigmas)
    cx, cy = grid.gradient(c)
    dx, dy = grid.gradient(d)
    c3x, c3y = -(cx + dx), -(cy + dy)
    grad = chi.chi1 * (cx**2 + cy**2) + chi.chi2 * (dx**2 + dy**2) + chi.chi3 * (c3x**2 + c3y**2)
    params = None if spec.potential == NATURAL else spec.resolved_potential_params()
    F = potential_concentrations(c, d, 1 - c - d, spec.sigmas, params)[0]
    return EnergyBreakdown.from_parts(
        grid.integrate(0.375 * eps * grad),
        grid.integrate(12.0 / eps * F),
    )


def energy_matching(phi: np.ndarray, psi: np.ndarray, spec: ModelSpec, grid: Grid2D) -> EnergyBreakdown:
    eps = spec.epsilon
    A, _, B, _, C, _, _ = matching_gradient_coefficients(phi, psi, spec.sigmas)
    px, py = grid.gradient(phi)
    qx, qy = grid.gradient(psi)
    grad = A * (px**2 + py**2) + B * (qx**2 + qy**2) + C * (px * qx + py * qy)
    Lambda = spec.resolved_potential_params().Lambda
    F = potential_labels(phi, psi, spec.sigmas, spec.potential, Lambda)[0]
    return EnergyBreakdown.from_parts(
        grid.integrate(0.1875 * eps * grad),
        grid.integrate(12.0 / eps * F),
    )


def mixing_energy(u: np.ndarray, v: np.ndarray, spec: ModelSpec, grid: Grid2D) -> EnergyBreakdown:
    """Energy of the configured model for its native field pair."""
    if spec.model == DEGENERATE:
        if spec.energy_form == MATCHING:
            return energy_matching(u, v, spec, grid)
        return energy_degenerate(u, v, spec, grid)
    return energy_nondegenerate(u, v, spec, grid)


def third_potential(zeta_c: np.ndarray, zeta_d: np.ndarray, spec: ModelSpec) -> np.ndarray:
    """zeta_3 fixed by sum_i zeta_i / chi_i = 0."""
    chi = derive_capillary(spec.sigmas)
    return -chi.chi3 * (zeta_c / chi.chi1 + zeta_d / chi.chi2)


def dissipation_rate(zeta_pair, spec: ModelSpec, grid: Grid2D) -> float:
    """Model-predicted -dW/dt = sum_i M_i int |grad zeta_i|^2.

    For the non-degenerate model the sum runs over all three components, the
    third potential being recovered from the constraint on the multiplier.
    """
    z1, z2 = zeta_pair
    if spec.model == DEGENERATE:
        mobs = (spec.mobilities.M1, spec.mobilities.M2)
        zetas = (z1, z2)
    else:
        mobs = spec.mobilities.nondegenerate(derive_capillary(spec.sigmas))
        zetas = (z1, z2, third_potential(z1, z2, spec))
    total = 0.0
    for M, z in zip(mobs, zetas):
        zx, zy = grid.gradient(z)
        total += M * grid.integrate(zx * zx + zy * zy)
    return total
