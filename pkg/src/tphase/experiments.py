"""Cusp-nucleation and model-comparison studies, plus the label/concentration map."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import RunResult, SimState, run_to_equilibrium
from .energy import mixing_energy
from .grid import Grid2D
from .params import (
    CONSISTENT,
    DEGENERATE,
    INCONSISTENT,
    NONDEGENERATE,
    ModelSpec,
    ParameterError,
    SurfaceTensions,
    validate,
)

OVERSHOOT_TOL = 1e-6
DEGENERACY_FLOOR = 1e-10


class NonConvergenceError(RuntimeError):
    """A run demanded to reach equilibrium hit t_end first."""


# --------------------------------------------------------------------------
# change of variables


def change_of_variables(phi, psi):
    """(phi, psi) -> (c, d) with c = (1+phi)/2 (1+psi)/2, d = (1-phi)/2 (1+psi)/2."""
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    w = 0.5 * (1 + psi)
    return 0.5 * (1 + phi) * w, 0.5 * (1 - phi) * w


def inverse_change(c, d, floor: float = DEGENERACY_FLOOR):
    """(c, d) -> (phi, psi); phi is set to 0 where c + d falls below ``floor``."""
    c = np.asarray(c, dtype=float)
    d = np.asarray(d, dtype=float)
    s = c + d
    if np.any(s > 1 + OVERSHOOT_TOL):
        raise ValueError("c + d exceeds 1 beyond the overshoot tolerance")
    psi = 2 * s - 1
    safe = np.where(s >= floor, s, 1.0)
    phi = np.where(s >= floor, (c - d) / safe, 0.0)
    return phi, psi


# --------------------------------------------------------------------------
# initial conditions


def tanh_profile(signed_distance, width: float):
    """tanh(distance / width): +1 where the signed distance is positive."""
    return np.tanh(signed_distance / width)


def slab_initial(grid: Grid2D, width: float) -> tuple[np.ndarray, np.ndarray]:
    """phi = +1 on the middle half in x, -1 elsewhere; psi = 1 (third phase absent)."""
    X, _ = grid.mesh()
    dist = 0.25 * grid.Lx - np.abs(grid.periodic_delta(X, 0.5 * grid.Lx, grid.Lx))
    return tanh_profile(dist, width), np.ones(grid.shape)


def smooth_noise(grid: Grid2D, rng: np.random.Generator, kmax: int = 4) -> np.ndarray:
    """Random band-limited field (modes |k| <= kmax per axis) scaled to max 1."""
    X, Y = grid.mesh()
    f = np.zeros(grid.shape)
    for kx in range(-kmax, kmax + 1):
        for ky in range(-kmax, kmax + 1):
            a, b = rng.normal(size=2) / (1.0 + kx * kx + ky * ky)
            arg = 2 * np.pi * (kx * X / grid.Lx + ky * Y / grid.Ly)
            f += a * np.cos(arg) + b * np.sin(arg)
    return f / np.max(np.abs(f))


@dataclass(frozen=True)
class LensGeometry:
    """Disk of component 3 resting on a flat 1-2 interface.

    Component 1 fills ``interface_y < y < interface_y + Ly/2``; the periodic
    image interface sits half a domain away.
    """

    interface_y: float = 0.5
    centre: tuple[float, float] = (0.5, 0.5)
    radius: float = 0.15


def lens_initial(grid: Grid2D, width: float, geom: LensGeometry = LensGeometry()) -> tuple[np.ndarray, np.ndarray]:
    X, Y = grid.mesh()
    dy = grid.periodic_delta(Y, geom.interface_y + 0.25 * grid.Ly, grid.Ly)
    phi = tanh_profile(0.25 * grid.Ly - np.abs(dy), width)
    rx = grid.periodic_delta(X, geom.centre[0], grid.Lx)
    ry = grid.periodic_delta(Y, geom.centre[1], grid.Ly)
    psi = tanh_profile(np.hypot(rx, ry) - geom.radius, width)
    return phi, psi


# --------------------------------------------------------------------------
# cusp study


@dataclass
class CuspResult:
    ratio: float
    mode: str
    epsilon: float
    cusp_height: float
    relative_energy_loss: float
    cusp_width: float
    energy_per_interface: float
    converged: bool
    time: float
    steps: int
    final: SimState | None = field(default=None, repr=False)
    run: RunResult | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "ratio": self.ratio,
            "mode": self.mode,
            "epsilon": self.epsilon,
            "cusp_height": self.cusp_height,
            "relative_energy_loss": self.relative_energy_loss,
            "cusp_width": self.cusp_width,
            "energy_per_interface": self.energy_per_interface,
            "converged": int(self.converged),
            "time": self.time,
            "steps": self.steps,
        }


def half_max_width(x: np.ndarray, h: np.ndarray, period: float) -> float:
    """Full width at half maximum of the peak of a periodic 1D profile."""
    i0 = int(np.argmax(h))
    peak = h[i0]
    if not peak > 0:
        return 0.0
    half = 0.5 * peak
    n = len(h)
    dx = period / n
    edges = []
    for direction in (1, -1):
        i = i0
        for _ in range(n):
            j = (i + direction) % n
            if h[j] < half:
                # linear interpolation between i and j
                frac = (h[i] - half) / (h[i] - h[j])
                edges.append(frac * dx)
                break
            i = j
        else:
            return period
        edges[-1] += abs(((i - i0 + n // 2) % n) - n // 2) * dx
    return float(sum(edges))


def cusp_spec(base: ModelSpec, ratio: float, mode: str, epsilon: float | None = None) -> ModelSpec:
    s13 = base.sigmas.sigma13
    numerics = base.numerics
    if epsilon is not None:
        numerics = dataclasses.replace(numerics, epsilon=epsilon)
    return dataclasses.replace(
        base,
        model=DEGENERATE,
        energy_form="standard",
        coefficients=mode,
        sigmas=SurfaceTensions(ratio * s13, s13, s13),
        numerics=numerics,
    )


def cusp_experiment(
    ratio: float,
    mode: str,
    base: ModelSpec,
    epsilon: float | None = None,
    require_convergence: bool = False,
    keep_run: bool = False,
    perturbation: float = 0.0,
    seed: int = 0,
) -> CuspResult:
    """Two-phase slab with the third phase absent, relaxed to equilibrium.

    The cusp height is max (1 - psi)/2 and the energy loss compares the
    equilibrium energy per unit interface length with sigma12.  A positive
    ``perturbation`` lowers psi below 1 by a seeded smooth field of that
    amplitude (zero mean is not enforced: the third phase is slightly present).
    """
    if not ratio > 0:
        raise ParameterError("surface tension ratio must be positive")
    if mode not in (INCONSISTENT, CONSISTENT):
        raise ParameterError(f"unknown coefficient mode {mode!r}")
    spec = cusp_spec(base, ratio, mode, epsilon)
    problems = validate(spec)
    if problems:
        raise ParameterError("; ".join(problems))
    n = spec.numerics
    grid = Grid2D(n.Nx, n.Ny, n.Lx, n.Ly)
    phi, psi = slab_initial(grid, spec.interface_width)
    if perturbation:
        noise = smooth_noise(grid, np.random.default_rng(seed))
        psi = psi - perturbation * 0.5 * (1 + noise)
    run = run_to_equilibrium(SimState(phi, psi), spec, grid)
    if require_convergence and not run.converged:
        raise NonConvergenceError(f"cusp run (ratio={ratio}, mode={mode}) did not reach equilibrium")
    st = run.state
    indicator = 0.5 * (1 - st.v)
    profile = indicator.mean(axis=1)
    W = mixing_energy(st.u, st.v, spec, grid).total
    per_interface = W / (2 * grid.Ly)
    s12 = spec.sigmas.sigma12
    return CuspResult(
        ratio=ratio,
        mode=mode,
        epsilon=spec.epsilon,
        cusp_height=float(indicator.max()),
        relative_energy_loss=abs(s12 - per_interface) / s12,
        cusp_width=half_max_width(grid.x, profile, grid.Lx),
        energy_per_interface=per_interface,
        converged=run.converged,
        time=st.time,
        steps=st.step,
        final=st,
        run=run if keep_run else None,
    )


def epsilon_robustness(ratio: float, mode: str, eps_list, base: ModelSpec, scale_grid: bool = True) -> list[CuspResult]:
    """Cusp study repeated over decreasing interface widths.

    With ``scale_grid`` the cell count along x is scaled so that the number of
    cells per interface width stays fixed and dt shrinks like eps^2; t_end is
    kept, since the slab relaxes on an eps-independent time scale.
    """
    eps_list = list(eps_list)
    if mode != INCONSISTENT:
        raise ParameterError("epsilon robustness is defined for inconsistent coefficients")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ParameterError("eps_list must be strictly decreasing")
    out = []
    eps0 = base.epsilon
    for eps in eps_list:
        spec = base
        if scale_grid:
            f = eps0 / eps
            Nx = 1 << int(round(math.log2(base.numerics.Nx * f)))
            spec = dataclasses.replace(
                base,
                numerics=dataclasses.replace(
                    base.numerics,
                    epsilon=eps,
                    Nx=Nx,
                    dt=base.numerics.dt / f**2,
                ),
            )
        out.append(cusp_experiment(ratio, mode, spec, epsilon=eps))
    return out


# --------------------------------------------------------------------------
# model comparison


@dataclass
class ComparisonResult:
    times: np.ndarray
    l2_c: np.ndarray
    l2_d: np.ndarray
    l2_c3: np.ndarray
    energy_a: np.ndarray
    energy_b: np.ndarray
    relative_energy_difference: np.ndarray
    final_a: SimState | None = field(default=None, repr=False)
    final_b: SimState | None = field(default=None, repr=False)

    @property
    def max_l2(self) -> float:
        return float(max(self.l2_c.max(), self.l2_d.max(), self.l2_c3.max()))

    @property
    def max_relative_energy_difference(self) -> float:
        return float(self.relative_energy_difference.max())

    def rows(self) -> list[dict]:
        return [
            {
                "time": t,
                "l2_c": a,
                "l2_d": b,
                "l2_c3": c,
                "energy_a": ea,
                "energy_b": eb,
                "relative_energy_difference": r,
            }
            for t, a, b, c, ea, eb, r in zip(
                self.times,
                self.l2_c,
                self.l2_d,
                self.l2_c3,
                self.energy_a,
                self.energy_b,
                self.relative_energy_difference,
            )
        ]


def concentrations(state_u, state_v, spec: ModelSpec):
    """(c, d) of a state in either model's native variables."""
    if spec.model == NONDEGENERATE:
        return state_u, state_v
    return change_of_variables(state_u, state_v)


def initial_state_for(spec: ModelSpec, phi: np.ndarray, psi: np.ndarray) -> SimState:
    if spec.model == NONDEGENERATE:
        c, d = change_of_variables(phi, psi)
        return SimState(c, d)
    return SimState(phi.copy(), psi.copy())


def _same_setup(a: ModelSpec, b: ModelSpec) -> list[str]:
    issues = []
    na, nb = a.numerics, b.numerics
    if (na.Nx, na.Ny, na.Lx, na.Ly) != (nb.Nx, nb.Ny, nb.Lx, nb.Ly):
        issues.append("models in a comparison must share the grid")
    if not math.isclose(a.interface_width, b.interface_width, rel_tol=1e-12):
        issues.append("models in a comparison must share the equilibrium interface width")
    if (na.dt, na.t_end, na.output_every) != (nb.dt, nb.t_end, nb.output_every):
        issues.append("models in a comparison must share the time grid")
    if a.sigmas != b.sigmas:
        issues.append("models in a comparison must share the surface tensions")
    return issues


def comparison_experiment(
    pair: tuple[ModelSpec, ModelSpec],
    geometry: LensGeometry = LensGeometry(),
) -> ComparisonResult:
    """Run two models from the same mapped initial state and compare them.

    Differences are L2 norms of the concentration differences of all three
    components and |W_a - W_b| / W_b, sampled every output interval.
    """
    a, b = pair
    issues = _same_setup(a, b) + validate(a) + validate(b)
    if issues:
        raise ParameterError("; ".join(issues))
    n = a.numerics
    grid = Grid2D(n.Nx, n.Ny, n.Lx, n.Ly)
    phi0, psi0 = lens_initial(grid, a.interface_width, geometry)

    samples = {}
    for key, spec in (("a", a), ("b", b)):
        rec = []

        def grab(state, spec=spec, rec=rec):
            c, d = concentrations(state.u, state.v, spec)
            rec.append((state.time, c.copy(), d.copy(), mixing_energy(state.u, state.v, spec, grid).total))

        # fixed time grid: no early stop on equilibrium
        fixed = dataclasses.replace(spec, numerics=dataclasses.replace(spec.numerics, equilibrium_tol=0.0))
        run = run_to_equilibrium(initial_state_for(spec, phi0, psi0), fixed, grid, callback=grab)
        samples[key] = (rec, run.state)

    ra, rb = samples["a"][0], samples["b"][0]
    if len(ra) != len(rb):
        raise RuntimeError("runs produced different output schedules")
    times, l2c, l2d, l2e, ea, eb = [], [], [], [], [], []
    for (ta, ca, da, Ea), (tb, cb, db, Eb) in zip(ra, rb):
        if not math.isclose(ta, tb, rel_tol=1e-12, abs_tol=1e-15):
            raise RuntimeError("runs produced different output times")
        times.append(ta)
        l2c.append(grid.l2_norm(ca - cb))
        l2d.append(grid.l2_norm(da - db))
        l2e.append(grid.l2_norm((1 - ca - da) - (1 - cb - db)))
        ea.append(Ea)
        eb.append(Eb)
    ea_arr, eb_arr = np.array(ea), np.array(eb)
    return ComparisonResult(
        times=np.array(times),
        l2_c=np.array(l2c),
        l2_d=np.array(l2d),
        l2_c3=np.array(l2e),
        energy_a=ea_arr,
        energy_b=eb_arr,
        relative_energy_difference=np.abs(ea_arr - eb_arr) / np.abs(eb_arr),
        final_a=samples["a"][1],
        final_b=samples["b"][1],
    )


def matched_mobilities(sigmas: SurfaceTensions, M0: float) -> tuple[float, float]:
    """Label mobilities reproducing the concentration dynamics on binary interfaces.

    On a 1-2 interface phi_t = 2 M0 / sigma12 lap(zeta_phi); on a 1-3 (2-3)
    interface psi_t = 2 M0 / sigma13 (sigma23) lap(zeta_psi).  The psi value
    uses the mean of sigma13 and sigma23 and is exact when they coincide.
    """
    s12, s13, s23 = sigmas.as_tuple()
    return 2 * M0 / s12, 4 * M0 / (s13 + s23)


COMPARISONS = ("matching", "consistent", "identical")


def comparison_pair(kind: str, base: ModelSpec) -> tuple[ModelSpec, ModelSpec]:
    """(label model, concentration model) sharing grid, time grid and interface width.

    ``base`` supplies the concentration-model epsilon and M0.  The label model
    runs with the matched mobilities; for ``kind="consistent"`` it uses the
    gamma-coefficient energy at epsilon / (2 sqrt 2), which reproduces the
    concentration energy exactly on binary interfaces, with the matching
    model's stabilization constant.  ``kind="identical"``
    pairs the concentration model with itself.
    """
    nd = dataclasses.replace(base, model=NONDEGENERATE, energy_form="standard")
    if kind == "identical":
        return nd, nd
    M1, M2 = matched_mobilities(base.sigmas, base.mobilities.M0)
    mob = dataclasses.replace(base.mobilities, M1=M1, M2=M2)
    matching = dataclasses.replace(base, model=DEGENERATE, energy_form="matching", mobilities=mob)
    if kind == "matching":
        return matching, nd
    if kind == "consistent":
        # same binary-interface scheme as the matching model: same S, and the
        # implicit gradient constant eps_d * gamma_max equals 3/8 eps already
        eps = base.epsilon / (2 * math.sqrt(2.0))
        numerics = dataclasses.replace(
            base.numerics, epsilon=eps, alpha=base.numerics.alpha, stabilization=matching.stabilization()
        )
        deg = dataclasses.replace(
            base,
            model=DEGENERATE,
            energy_form="standard",
            coefficients=CONSISTENT,
            numerics=numerics,
            mobilities=mob,
        )
        return deg, nd
    raise ParameterError(f"unknown comparison kind {kind!r}; expected one of {COMPARISONS}")
