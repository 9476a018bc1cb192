"""Surface-tension coefficient polynomials of the degenerate model.

Orientation used everywhere in the package: phi = +1 is component 1,
phi = -1 is component 2 (both inside psi = +1) and psi = -1 is component 3.

All functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import numpy as np

from .params import CALIBRATION, CONSISTENT, INCONSISTENT


def _check_mode(mode: str) -> None:
    if mode not in (INCONSISTENT, CONSISTENT):
        raise ValueError(f"unknown coefficient mode {mode!r}")


def blend_plus(s):
    """((1+s)/2)^2 (2-s): 1 at s=+1, 0 at s=-1, flat at both ends."""
    return 0.25 * (1 + s) ** 2 * (2 - s)


def blend_minus(s):
    return 0.25 * (1 - s) ** 2 * (2 + s)


def gamma1(psi, sigma12: float, mode: str = CONSISTENT, alpha: float = 3.02):
    _check_mode(mode)
    psi = np.asarray(psi, dtype=float)
    p = 0.5 * (1 + psi)
    if mode == INCONSISTENT:
        return CALIBRATION * sigma12 * p**2
    return CALIBRATION * sigma12 * p**2 * (2 - psi + 0.25 * alpha * (1 - psi) ** 2)


def gamma1_prime(psi, sigma12: float, mode: str = CONSISTENT, alpha: float = 3.02):
    _check_mode(mode)
    psi = np.asarray(psi, dtype=float)
    if mode == INCONSISTENT:
        return CALIBRATION * sigma12 * 0.5 * (1 + psi)
    # d/dpsi of ((1+psi)/2)^2 (2 - psi + alpha/4 (1-psi)^2)
    return CALIBRATION * sigma12 * (psi**2 - 1) * (alpha * psi - 3) / 4.0


def gamma2(phi, sigma13: float, sigma23: float, mode: str = CONSISTENT, alpha: float = 3.02):
    _check_mode(mode)
    phi = np.asarray(phi, dtype=float)
    if mode == INCONSISTENT:
        if sigma13 != sigma23:
            raise ValueError("inconsistent gamma2 is only defined for sigma13 == sigma23")
        return np.full_like(phi, CALIBRATION * sigma13)
    well = (1 - phi**2) ** 2
    return CALIBRATION * (
        sigma13 * blend_plus(phi)
        + sigma23 * blend_minus(phi)
        + alpha / 16.0 * abs(sigma23 - sigma13) * well
    )


def gamma2_prime(phi, sigma13: float, sigma23: float, mode: str = CONSISTENT, alpha: float = 3.02):
    _check_mode(mode)
    phi = np.asarray(phi, dtype=float)
    if mode == INCONSISTENT:
        if sigma13 != sigma23:
            raise ValueError("inconsistent gamma2 is only defined for sigma13 == sigma23")
        return np.zeros_like(phi)
    # blend_plus' = 3/4 (1 - phi^2), blend_minus' = -3/4 (1 - phi^2)
    one_m = 1 - phi**2
    return CALIBRATION * (
        0.75 * (sigma13 - sigma23) * one_m
        - alpha / 4.0 * abs(sigma23 - sigma13) * phi * one_m
    )


def gamma2_second(phi, sigma13: float, sigma23: float, alpha: float = 3.02):
    """Second derivative of the consistent gamma2."""
    phi = np.asarray(phi, dtype=float)
    return CALIBRATION * (
        -1.5 * (sigma13 - sigma23) * phi
        - alpha / 4.0 * abs(sigma23 - sigma13) * (1 - 3 * phi**2)
    )


def gamma_derivatives(value, which: str, sigmas, mode: str = CONSISTENT, alpha: float = 3.02):
    """(gamma, gamma') for ``which`` in {"gamma1", "gamma2"}; ``value`` is psi or phi."""
    s12, s13, s23 = sigmas
    if which == "gamma1":
        return gamma1(value, s12, mode, alpha), gamma1_prime(value, s12, mode, alpha)
    if which == "gamma2":
        return gamma2(value, s13, s23, mode, alpha), gamma2_prime(value, s13, s23, mode, alpha)
    raise ValueError(f"unknown coefficient {which!r}")


def gamma1_max(sigma12: float, mode: str = CONSISTENT, alpha: float = 3.02) -> float:
    """max of gamma1 over [-1, 1]."""
    if mode == INCONSISTENT:
        return CALIBRATION * sigma12
    # interior critical point at psi = 3/alpha
    cands = [1.0, 3.0 / alpha] if alpha > 3 else [1.0]
    return float(max(gamma1(c, sigma12, mode, alpha) for c in cands))


def gamma2_max(sigma13: float, sigma23: float, mode: str = CONSISTENT, alpha: float = 3.02) -> float:
    """max of gamma2 over [-1, 1]; the only interior critical points are +-3/alpha."""
    if mode == INCONSISTENT:
        return CALIBRATION * sigma13
    cands = [-1.0, 1.0] + ([3.0 / alpha, -3.0 / alpha] if alpha > 3 else [])
    return float(max(gamma2(c, sigma13, sigma23, mode, alpha) for c in cands))


def interp3(phi, psi, b1: float, b2: float, b3: float, alpha: float):
    """Three-way interpolation with flat (critical) behaviour at every pure phase.

    b1 is attained at (phi, psi) = (1, 1), b2 at (-1, 1) and b3 on psi = -1.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    wp, wm = blend_plus(phi), blend_minus(phi)
    vp, vm = blend_plus(psi), blend_minus(psi)
    well_phi = (1 - phi**2) ** 2
    well_psi = (1 - psi**2) ** 2
    a16 = alpha / 16.0
    d31, d32 = abs(b3 - b1), abs(b3 - b2)
    return (
        (b1 * wp + b2 * wm) * vp
        + b3 * vm
        + a16 * abs(b2 - b1) * well_phi * vp
        + a16 * (d31 * wp + d32 * wm) * well_psi
        + a16**2 * abs(d31 - d32) * well_phi * well_psi
    )
