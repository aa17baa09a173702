"""Friction-coefficient catalogue and finger-surface specifications.

Coefficients were measured against a smooth ABS counterface: sanded
thermoplastics (PETG, ABS, PLA) for the low-friction faces and three
hardnesses of Ecoflex silicone in planar, ridged, and checkered finishes for
the high-friction faces. Other counterfaces are only usable through explicit
overrides; there is no data to extrapolate from.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

from .errors import MaterialLookupError, SurfaceModeError, ValidationError
from .fold_geometry import FoldParameters, FrictionMode, delta_h, validate_params


class Material(str, Enum):
    PETG = "petg"
    ABS = "abs"
    PLA = "pla"
    ECOFLEX_00_10 = "ecoflex_00_10"
    ECOFLEX_00_20 = "ecoflex_00_20"
    ECOFLEX_00_30 = "ecoflex_00_30"
    CUSTOM = "custom"


class Finish(str, Enum):
    SMOOTH = "smooth"
    PLANAR = "planar"
    RIDGED = "ridged"
    CHECKERED = "checkered"
    NONE = "none"


THERMOPLASTICS = frozenset({Material.PETG, Material.ABS, Material.PLA})
SILICONES = frozenset({Material.ECOFLEX_00_10, Material.ECOFLEX_00_20,
                       Material.ECOFLEX_00_30})


@dataclass(frozen=True)
class MaterialFinish:
    material: Material
    finish: Finish = Finish.NONE
    custom_name: str = ""

    def __post_init__(self):
        if self.material in THERMOPLASTICS and self.finish not in (Finish.SMOOTH, Finish.NONE):
            raise ValidationError(
                f"{self.material.value} only comes smooth or unfinished")
        if self.material in SILICONES and self.finish not in (
                Finish.PLANAR, Finish.RIDGED, Finish.CHECKERED):
            raise ValidationError(
                f"{self.material.value} needs a planar/ridged/checkered finish")

    def key(self) -> tuple[str, str, str]:
        return (self.material.value, self.finish.value, self.custom_name)


ABS_SMOOTH = MaterialFinish(Material.ABS, Finish.SMOOTH)
ECOFLEX10_CHECKERED = MaterialFinish(Material.ECOFLEX_00_10, Finish.CHECKERED)

# Measured coefficients against the smooth ABS counterface.
_DEFAULT_TABLE: dict[MaterialFinish, float] = {
    MaterialFinish(Material.PETG, Finish.SMOOTH): 0.08,
    MaterialFinish(Material.ABS, Finish.SMOOTH): 0.08,
    MaterialFinish(Material.PLA, Finish.SMOOTH): 0.08,
    MaterialFinish(Material.ECOFLEX_00_10, Finish.PLANAR): 0.63,
    MaterialFinish(Material.ECOFLEX_00_10, Finish.RIDGED): 0.72,
    MaterialFinish(Material.ECOFLEX_00_10, Finish.CHECKERED): 0.77,
    MaterialFinish(Material.ECOFLEX_00_20, Finish.PLANAR): 0.57,
    MaterialFinish(Material.ECOFLEX_00_20, Finish.RIDGED): 0.55,
    MaterialFinish(Material.ECOFLEX_00_20, Finish.CHECKERED): 0.64,
    MaterialFinish(Material.ECOFLEX_00_30, Finish.PLANAR): 0.52,
    MaterialFinish(Material.ECOFLEX_00_30, Finish.RIDGED): 0.54,
    MaterialFinish(Material.ECOFLEX_00_30, Finish.CHECKERED): 0.61,
}


class FrictionCatalogue:
    """Immutable coefficient lookup keyed by (counterface, surface) pairs."""

    def __init__(self, entries: dict[tuple, float] | None = None):
        if entries is None:
            entries = {(ABS_SMOOTH.key(), surface.key()): mu
                       for surface, mu in _DEFAULT_TABLE.items()}
        self._entries = dict(entries)

    def mu(self, counterface: MaterialFinish, surface: MaterialFinish) -> float:
        try:
            return self._entries[(counterface.key(), surface.key())]
        except KeyError:
            raise MaterialLookupError(
                f"no coefficient for {surface.material.value}/{surface.finish.value} "
                f"against {counterface.material.value}/{counterface.finish.value}; "
                "provide an override") from None

    def with_overrides(self, overrides: dict[tuple[MaterialFinish, MaterialFinish], float]
                       ) -> "FrictionCatalogue":
        entries = dict(self._entries)
        for (counter, surface), mu in overrides.items():
            _check_mu(mu)
            entries[(counter.key(), surface.key())] = float(mu)
        return FrictionCatalogue(entries)

    @classmethod
    def from_override_csv(cls, path, counterface: MaterialFinish = ABS_SMOOTH
                          ) -> "FrictionCatalogue":
        """Extend the default catalogue from a CSV with columns
        material, finish, mu (measured against ``counterface``)."""
        overrides = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                surface = MaterialFinish(Material(row["material"].strip().lower()),
                                         Finish(row["finish"].strip().lower()))
                overrides[(counterface, surface)] = float(row["mu"])
        return cls().with_overrides(overrides)

    def items(self):
        return self._entries.items()


DEFAULT_CATALOGUE = FrictionCatalogue()


def mu_lookup(counterface: MaterialFinish, surface: MaterialFinish,
              catalogue: FrictionCatalogue = DEFAULT_CATALOGUE) -> float:
    """Tabulated coefficient of friction for a material pair."""
    return catalogue.mu(counterface, surface)


def _check_mu(mu: float):
    if not (0.0 < mu <= 2.0):
        raise ValidationError(f"coefficient of friction {mu:g} outside (0, 2]")


class SurfaceKind(str, Enum):
    CONSTANT = "constant"
    OVF = "ovf"


@dataclass(frozen=True)
class SurfaceSpec:
    """A finger contact surface: fixed-friction pad or variable-friction fold.

    Constant surfaces expose exactly one mode (``fixed_mode``); fold-backed
    surfaces expose both and need ``fold`` parameters. Per-mode coefficient
    overrides win over the catalogue when set.
    """

    kind: SurfaceKind
    low_material: MaterialFinish = ABS_SMOOTH
    high_material: MaterialFinish = ECOFLEX10_CHECKERED
    fold: FoldParameters | None = None
    mu_low_override: float | None = None
    mu_high_override: float | None = None
    fixed_mode: FrictionMode | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind is SurfaceKind.OVF:
            if self.fold is None:
                raise ValidationError("variable-friction surface needs fold parameters")
            validate_params(self.fold)
            if self.fixed_mode is not None:
                raise ValidationError("variable-friction surface has no fixed mode")
        else:
            if self.fixed_mode is None:
                raise ValidationError("constant surface needs its fixed mode")
            if self.fold is not None:
                raise ValidationError("constant surface takes no fold parameters")

    @property
    def modes(self) -> tuple[FrictionMode, ...]:
        if self.kind is SurfaceKind.CONSTANT:
            return (self.fixed_mode,)
        return (FrictionMode.HF, FrictionMode.LF)

    def effective_mode(self, commanded: FrictionMode) -> FrictionMode:
        """Mode actually realized for a command (constant pads never change)."""
        if self.kind is SurfaceKind.CONSTANT:
            return self.fixed_mode
        return commanded

    @property
    def delta_h_mm(self) -> float:
        return delta_h(self.fold) if self.kind is SurfaceKind.OVF else 0.0


def surface_mu(spec: SurfaceSpec, mode: FrictionMode,
               counterface: MaterialFinish = ABS_SMOOTH,
               catalogue: FrictionCatalogue = DEFAULT_CATALOGUE) -> float:
    """Resolve the coefficient of friction a surface presents in a mode."""
    mode = FrictionMode(mode)
    if mode not in spec.modes:
        raise SurfaceModeError(
            f"surface '{spec.name or spec.kind.value}' does not expose mode {mode.value}")
    if mode is FrictionMode.LF:
        mu = (spec.mu_low_override if spec.mu_low_override is not None
              else catalogue.mu(counterface, spec.low_material))
    else:
        mu = (spec.mu_high_override if spec.mu_high_override is not None
              else catalogue.mu(counterface, spec.high_material))
    _check_mu(mu)
    return mu


def constant_low_surface(name: str = "constant_lf") -> SurfaceSpec:
    return SurfaceSpec(kind=SurfaceKind.CONSTANT, fixed_mode=FrictionMode.LF, name=name)


def constant_high_surface(name: str = "constant_hf") -> SurfaceSpec:
    return SurfaceSpec(kind=SurfaceKind.CONSTANT, fixed_mode=FrictionMode.HF, name=name)


def default_ovf_surface(fold: FoldParameters, name: str = "ovf") -> SurfaceSpec:
    """Fold surface with the default material pairing: smooth ABS low-friction
    faces and checkered Ecoflex 00-10 high-friction faces."""
    return SurfaceSpec(kind=SurfaceKind.OVF, fold=fold, name=name)
