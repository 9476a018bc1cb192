"""Parameter containers shared by the ternary models.

All containers are frozen dataclasses; derived quantities (capillary
coefficients, per-phase mobilities, default stabilization) are computed on
demand rather than stored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

DEGENERATE = "degenerate"
NONDEGENERATE = "nondegenerate"
MODELS = (DEGENERATE, NONDEGENERATE)

STANDARD = "standard"
MATCHING = "matching"
ENERGY_FORMS = (STANDARD, MATCHING)

INCONSISTENT = "inconsistent"
CONSISTENT = "consistent"
COEFFICIENT_MODES = (INCONSISTENT, CONSISTENT)

NATURAL = "natural"
POTENTIAL_MODES = (NATURAL, CONSISTENT)

# calibration of the quartic double well: lambda = 3/(2 sqrt 2) sigma
CALIBRATION = 3.0 / (2.0 * math.sqrt(2.0))


class ParameterError(ValueError):
    """Raised when a parameter set cannot be used."""


@dataclass(frozen=True)
class SurfaceTensions:
    sigma12: float
    sigma13: float
    sigma23: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sigma12, self.sigma13, self.sigma23)

    @property
    def positive(self) -> bool:
        return all(s > 0 for s in self.as_tuple())

    @property
    def restricted(self) -> bool:
        """True when some capillary coefficient is non-positive.

        Such sets are admissible for the degenerate model only.
        """
        s12, s13, s23 = self.as_tuple()
        chis = (s12 + s13 - s23, s12 + s23 - s13, s13 + s23 - s12)
        return any(c <= 0 for c in chis)


@dataclass(frozen=True)
class CapillaryCoefficients:
    chi1: float
    chi2: float
    chi3: float
    chi0: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.chi1, self.chi2, self.chi3)


def derive_capillary(sigmas: SurfaceTensions) -> CapillaryCoefficients:
    """chi_i = sigma_ij + sigma_ik - sigma_jk and their harmonic combination chi0."""
    s12, s13, s23 = sigmas.as_tuple()
    chi1 = s12 + s13 - s23
    chi2 = s12 + s23 - s13
    chi3 = s13 + s23 - s12
    for i, c in enumerate((chi1, chi2, chi3), start=1):
        if c == 0:
            raise ParameterError(f"capillary coefficient chi{i} is zero; chi0 undefined")
    chi0 = 1.0 / (1.0 / chi1 + 1.0 / chi2 + 1.0 / chi3)
    return CapillaryCoefficients(chi1, chi2, chi3, chi0)


@dataclass(frozen=True)
class PotentialParams:
    """Coefficients of the cubic cross term and the sextic triple-junction term."""

    Sigma1: float = 0.0
    Sigma2: float = 0.0
    Sigma3: float = 0.0
    Lambda: float = 0.0

    @classmethod
    def pinned(cls, sigmas: SurfaceTensions, Lambda: float = 0.0) -> "PotentialParams":
        """Sigma_i = chi_i, the choice that makes both written forms of the
        consistent potential agree identically."""
        s12, s13, s23 = sigmas.as_tuple()
        return cls(s12 + s13 - s23, s12 + s23 - s13, s13 + s23 - s12, Lambda)


@dataclass(frozen=True)
class NumericalParams:
    epsilon: float = 0.02
    alpha: float | None = None
    dt: float = 1e-5
    t_end: float = 1e-2
    equilibrium_tol: float = 1e-8
    Nx: int = 128
    Ny: int = 128
    Lx: float = 1.0
    Ly: float = 1.0
    stabilization: float | None = None
    output_every: int = 100
    max_halvings: int = 20
    blowup_threshold: float = 1e3

    @property
    def alpha_value(self) -> float:
        # default alpha = 3 + epsilon
        return 3.0 + self.epsilon if self.alpha is None else self.alpha


@dataclass(frozen=True)
class Mobilities:
    """M1, M2 drive phi and psi (degenerate); M0 sets M_i chi_i = M0 (non-degenerate)."""

    M1: float = 1.0
    M2: float = 1.0
    M0: float = 1.0

    def nondegenerate(self, chi: CapillaryCoefficients) -> tuple[float, float, float]:
        return tuple(self.M0 / c for c in chi.as_tuple())


@dataclass(frozen=True)
class ModelSpec:
    model: str = DEGENERATE
    energy_form: str = STANDARD
    coefficients: str = CONSISTENT
    potential: str = CONSISTENT
    sigmas: SurfaceTensions = field(default_factory=lambda: SurfaceTensions(1.0, 1.0, 1.0))
    numerics: NumericalParams = field(default_factory=NumericalParams)
    mobilities: Mobilities = field(default_factory=Mobilities)
    potential_params: PotentialParams | None = None

    @property
    def epsilon(self) -> float:
        return self.numerics.epsilon

    @property
    def alpha(self) -> float:
        return self.numerics.alpha_value

    @property
    def uses_potential(self) -> bool:
        return self.model == NONDEGENERATE or self.energy_form == MATCHING

    def resolved_potential_params(self) -> PotentialParams:
        """Potential coefficients actually used by the triple-well potential.

        The natural potential ignores Sigma and Lambda; the consistent one falls
        back to the pinned Sigma_i = chi_i, Lambda = 0 when none are given.
        """
        if self.potential == NATURAL:
            return PotentialParams()
        if self.potential_params is None:
            return PotentialParams.pinned(self.sigmas)
        return self.potential_params

    def stabilization(self) -> float:
        """Linear stabilization constant S (default c * max sigma / eps).

        c is 32 for the gamma-coefficient and concentration energies; smaller
        values let the energy rise on wetting configurations.  The matching
        energy uses 16: concentrations are half the labels across a binary
        interface, so its steps then coincide with the concentration scheme.
        """
        if self.numerics.stabilization is not None:
            return self.numerics.stabilization
        factor = 16.0 if self.model == DEGENERATE and self.energy_form == MATCHING else 32.0
        return factor * max(self.sigmas.as_tuple()) / self.epsilon

    @property
    def interface_width(self) -> float:
        """Width w of the binary equilibrium profile phi = tanh(x / w).

        The label energy with gamma coefficients gives w = sqrt(2) eps; the
        concentration energy (also in its matching label form) gives w = eps/2.
        """
        if self.model == DEGENERATE and self.energy_form == STANDARD:
            return math.sqrt(2.0) * self.epsilon
        return 0.5 * self.epsilon


def validate(spec: ModelSpec) -> list[str]:
    """Return the violated invariants of ``spec``; an empty list means valid."""
    problems: list[str] = []
    s = spec.sigmas
    n = spec.numerics
    if not all(math.isfinite(v) and v > 0 for v in s.as_tuple()):
        problems.append("surface tensions must be positive")
    if spec.model not in MODELS:
        problems.append(f"model must be one of {MODELS}")
    if spec.energy_form not in ENERGY_FORMS:
        problems.append(f"energy_form must be one of {ENERGY_FORMS}")
    if spec.coefficients not in COEFFICIENT_MODES:
        problems.append(f"coefficients must be one of {COEFFICIENT_MODES}")
    if spec.potential not in POTENTIAL_MODES:
        problems.append(f"potential must be one of {POTENTIAL_MODES}")
    if not n.epsilon > 0:
        problems.append("epsilon must be positive")
    elif n.epsilon >= min(n.Lx, n.Ly) / 8:
        problems.append("epsilon must be below min(Lx, Ly)/8")
    if not n.alpha_value > 3:
        problems.append("alpha must exceed 3")
    if not (n.dt > 0 and n.t_end > 0):
        problems.append("dt and t_end must be positive")
    if not n.equilibrium_tol > 0:
        problems.append("equilibrium_tol must be positive")
    for name, N in (("Nx", n.Nx), ("Ny", n.Ny)):
        if N < 8 or N & (N - 1):
            problems.append(f"{name} must be a power of two >= 8")
    if not (n.Lx > 0 and n.Ly > 0):
        problems.append("domain lengths must be positive")
    if n.output_every < 1:
        problems.append("output_every must be >= 1")
    m = spec.mobilities
    if not all(v > 0 for v in (m.M1, m.M2, m.M0)):
        problems.append("mobilities must be positive")
    if spec.model == NONDEGENERATE and s.positive and s.restricted:
        problems.append("non-degenerate model requires all chi_i > 0 (restricted surface tensions)")
    if (
        spec.model == DEGENERATE
        and spec.energy_form == STANDARD
        and spec.coefficients == INCONSISTENT
        and s.sigma13 != s.sigma23
    ):
        problems.append(
            "inconsistent gamma2 is the constant 3/(2 sqrt 2) sigma13 and requires sigma13 == sigma23"
        )
    pp = spec.potential_params
    if pp is not None and pp.Lambda < 0:
        problems.append("Lambda must be non-negative")
    return problems
