"""INI configuration files.

Recognised sections and keys (all optional; defaults come from the parameter
dataclasses)::

    [model]             model, energy_form, coefficients, potential, require_equilibrium
    [surface_tensions]  sigma12, sigma13, sigma23
    [numerics]          epsilon, alpha, dt, t_end, equilibrium_tol, Nx, Ny, Lx, Ly,
                        stabilization, output_every, max_halvings, blowup_threshold
    [mobilities]        M1, M2, M0
    [potential]         Sigma1, Sigma2, Sigma3, Lambda
    [initial]           shape (slab | lens), interface_y, centre_x, centre_y, radius,
                        perturbation, seed
    [cusp_sweep]        ratios, modes, epsilons, robustness_ratio
    [compare]           kind (matching | consistent | identical)
    [compare.second]    any [numerics] key, overriding the second model of the pair
    [output]            snapshot_every, field_csv

Unknown sections or keys raise :class:`ConfigError`.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .params import (
    COEFFICIENT_MODES,
    ModelSpec,
    Mobilities,
    NumericalParams,
    ParameterError,
    PotentialParams,
    SurfaceTensions,
)


class ConfigError(ParameterError):
    """Malformed or unknown configuration content."""


_NUMERIC_TYPES = {
    "epsilon": float,
    "alpha": float,
    "dt": float,
    "t_end": float,
    "equilibrium_tol": float,
    "Nx": int,
    "Ny": int,
    "Lx": float,
    "Ly": float,
    "stabilization": float,
    "output_every": int,
    "max_halvings": int,
    "blowup_threshold": float,
}


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _words(text: str) -> tuple[str, ...]:
    return tuple(x for x in text.replace(",", " ").split())


SCHEMA: dict[str, dict] = {
    "model": {
        "model": str,
        "energy_form": str,
        "coefficients": str,
        "potential": str,
        "require_equilibrium": _bool,
    },
    "surface_tensions": {"sigma12": float, "sigma13": float, "sigma23": float},
    "numerics": _NUMERIC_TYPES,
    "mobilities": {"M1": float, "M2": float, "M0": float},
    "potential": {"Sigma1": float, "Sigma2": float, "Sigma3": float, "Lambda": float},
    "initial": {
        "shape": str,
        "interface_y": float,
        "centre_x": float,
        "centre_y": float,
        "radius": float,
        "perturbation": float,
        "seed": int,
    },
    "cusp_sweep": {"ratios": _floats, "modes": _words, "epsilons": _floats, "robustness_ratio": float},
    "compare": {"kind": str},
    "compare.second": _NUMERIC_TYPES,
    "output": {"snapshot_every": int, "field_csv": _bool},
}


@dataclass(frozen=True)
class InitialCondition:
    shape: str = "slab"
    interface_y: float = 0.5
    centre_x: float = 0.5
    centre_y: float = 0.5
    radius: float = 0.15
    perturbation: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class CuspSweep:
    ratios: tuple[float, ...] = (1.5, 2.0, 3.0, 4.0)
    modes: tuple[str, ...] = ("inconsistent",)
    epsilons: tuple[float, ...] = ()
    robustness_ratio: float = 1.5


@dataclass(frozen=True)
class RunConfig:
    spec: ModelSpec
    require_equilibrium: bool = False
    initial: InitialCondition = InitialCondition()
    cusp_sweep: CuspSweep = CuspSweep()
    compare_kind: str = "matching"
    second_numerics: dict = field(default_factory=dict)
    snapshot_every: int = 0
    field_csv: bool = False
    # parsed values keyed by section, the input to the config hash
    raw: dict = field(default_factory=dict)


def parse_sections(text: str, source: str = "<config>") -> dict[str, dict]:
    """Parse INI text into typed values, rejecting anything not in SCHEMA."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case sensitive (Nx, M0, Sigma1)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    out: dict[str, dict] = {}
    for section in cp.sections():
        schema = SCHEMA.get(section)
        if schema is None:
            raise ConfigError(f"{source}: unknown section [{section}]")
        values = {}
        for key, text_value in cp.items(section):
            conv = schema.get(key)
            if conv is None:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            try:
                values[key] = conv(text_value)
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for {section}.{key}: {exc}") from exc
        out[section] = values
    return out


def build_config(sections: dict[str, dict]) -> RunConfig:
    model = dict(sections.get("model", {}))
    require = model.pop("require_equilibrium", False)
    sig = sections.get("surface_tensions", {})
    defaults = SurfaceTensions(1.0, 1.0, 1.0)
    sigmas = SurfaceTensions(
        sig.get("sigma12", defaults.sigma12),
        sig.get("sigma13", defaults.sigma13),
        sig.get("sigma23", defaults.sigma23),
    )
    numerics = NumericalParams(**sections.get("numerics", {}))
    mobilities = Mobilities(**sections.get("mobilities", {}))
    pot = sections.get("potential")
    potential_params = None
    if pot:
        base = PotentialParams.pinned(sigmas, pot.get("Lambda", 0.0))
        potential_params = dataclasses.replace(base, **pot)
    spec = ModelSpec(
        sigmas=sigmas,
        numerics=numerics,
        mobilities=mobilities,
        potential_params=potential_params,
        **model,
    )
    sweep = sections.get("cusp_sweep", {})
    for m in sweep.get("modes", ()):
        if m not in COEFFICIENT_MODES:
            raise ConfigError(f"cusp_sweep.modes: unknown mode {m!r}")
    out = sections.get("output", {})
    return RunConfig(
        spec=spec,
        require_equilibrium=require,
        initial=InitialCondition(**sections.get("initial", {})),
        cusp_sweep=CuspSweep(**sweep),
        compare_kind=sections.get("compare", {}).get("kind", "matching"),
        second_numerics=dict(sections.get("compare.second", {})),
        snapshot_every=out.get("snapshot_every", 0),
        field_csv=out.get("field_csv", False),
        raw=sections,
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return build_config(parse_sections(text, str(path)))


def resolved_parameters(cfg: RunConfig) -> dict:
    """Plain-dict dump of every resolved parameter, for the manifest."""
    spec = cfg.spec
    d = dataclasses.asdict(spec)
    d["alpha_resolved"] = spec.alpha
    d["stabilization_resolved"] = spec.stabilization()
    d["potential_params_resolved"] = dataclasses.asdict(spec.resolved_potential_params())
    d["require_equilibrium"] = cfg.require_equilibrium
    d["initial"] = dataclasses.asdict(cfg.initial)
    d["cusp_sweep"] = dataclasses.asdict(cfg.cusp_sweep)
    d["compare_kind"] = cfg.compare_kind
    d["second_numerics"] = cfg.second_numerics
    d["snapshot_every"] = cfg.snapshot_every
    return d
