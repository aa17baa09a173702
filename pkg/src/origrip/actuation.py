"""Quasi-static folding model: actuation travel, force profile, mode switching.

The force model is a lumped one: every crease is a torsion spring of
stiffness ``kappa`` (N*mm/rad) and folds proportionally with the actuation
displacement, so the stored energy is quadratic in displacement and the
actuation force ramps linearly from zero at the relaxed state to its peak at
full fold. The single stiffness is calibrated to one published peak force;
only force and travel orderings across designs are meaningful, not absolute
magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationError, SequencingError
from .fold_geometry import (FoldParameters, FrictionMode, period,
                            validate_params)

# Each fold unit has five creases; at full fold they close by
# (1, 2, 2, 2, 1) times the design angle, so the per-unit sum of squared
# crease angles is 14 * alpha^2.
UNIT_HINGE_WEIGHT = 14.0

# Published peak actuation force for the reference design
# (5 mm faces, unit ratio, 30 deg fold, five units).
REFERENCE_PEAK_FORCE_N = 2.67


def fold_travel(p: FoldParameters) -> float:
    """Horizontal compression of the whole pattern between modes, mm.

    Difference of the cross-section horizontal extents (relaxed minus
    folded), scaled by the unit count. Can be negative for extreme
    high/low length ratios, where folding lengthens the pattern.
    """
    validate_params(p)
    return p.n_units * (period(p, FrictionMode.HF) - period(p, FrictionMode.LF))


def _angle_weight(p: FoldParameters) -> float:
    """Sum of squared full-fold crease angles over the pattern, rad^2."""
    return p.n_units * UNIT_HINGE_WEIGHT * p.fold_angle_rad ** 2


def fold_energy(p: FoldParameters, kappa: float, displacement_mm) -> np.ndarray:
    """Elastic energy stored at the given actuation displacement(s), N*mm."""
    travel = _positive_travel(p)
    x = np.asarray(displacement_mm, dtype=float)
    return 0.5 * kappa * _angle_weight(p) * (x / travel) ** 2


def _positive_travel(p: FoldParameters) -> float:
    travel = fold_travel(p)
    if travel <= 1e-9:
        raise CalibrationError(
            f"degenerate fold: actuation travel {travel:.3g} mm is not positive")
    return travel


@dataclass(frozen=True)
class FoldForceProfile:
    """Sampled actuation force over displacement for one design."""

    displacement_mm: np.ndarray   # strictly increasing, starts at 0
    force_n: np.ndarray           # non-negative, starts at 0
    kappa: float                  # hinge stiffness used, N*mm/rad

    @property
    def peak_force_n(self) -> float:
        return float(self.force_n.max())


def fold_force_profile(p: FoldParameters, kappa: float,
                       samples: int = 201) -> FoldForceProfile:
    """Sample the actuation force from relaxed to fully folded."""
    if kappa <= 0:
        raise CalibrationError("hinge stiffness must be positive")
    if samples < 2:
        raise CalibrationError("need at least two samples")
    travel = _positive_travel(p)
    x = np.linspace(0.0, travel, samples)
    force = kappa * _angle_weight(p) * x / travel ** 2
    return FoldForceProfile(displacement_mm=x, force_n=force, kappa=kappa)


def peak_fold_force(p: FoldParameters, kappa: float) -> float:
    """Force at full fold, N."""
    return kappa * _angle_weight(p) / _positive_travel(p)


def calibrate_kappa(p: FoldParameters, target_peak_force_n: float) -> float:
    """Hinge stiffness making the peak actuation force hit the target.

    Unique because the force scales linearly in the stiffness.
    """
    if target_peak_force_n <= 0:
        raise CalibrationError("target peak force must be positive")
    return target_peak_force_n * _positive_travel(p) / _angle_weight(p)


_DEFAULT_KAPPA: float | None = None


def default_hinge_stiffness() -> float:
    """Stiffness calibrated to the published peak force of the reference
    design; cached after the first call."""
    global _DEFAULT_KAPPA
    if _DEFAULT_KAPPA is None:
        reference = FoldParameters(low_face_mm=5.0, length_ratio=1.0,
                                   fold_angle_rad=math.radians(30.0), n_units=5)
        _DEFAULT_KAPPA = calibrate_kappa(reference, REFERENCE_PEAK_FORCE_N)
    return _DEFAULT_KAPPA


@dataclass(frozen=True)
class ModeSwitchState:
    """Friction-mode actuator state for one finger.

    Switches are modeled as an abstract state change with a configurable
    latency; motion must never overlap a switch in progress.
    """

    current: FrictionMode
    switching: bool = False
    switch_time_s: float = 0.0


def switch_mode(state: ModeSwitchState, target: FrictionMode) -> ModeSwitchState:
    """Complete a mode switch; no-op when already in the target mode."""
    if state.switching:
        raise SequencingError("mode switch requested while a switch is in progress")
    target = FrictionMode(target)
    if target is state.current:
        return state
    return replace(state, current=target)
