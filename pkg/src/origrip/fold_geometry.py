"""Parametric geometry of the variable-friction fold pattern.

A surface is a row of identical fold units. Each unit carries one
high-friction face (length ``k = ratio * l``), a pair of low-friction faces
(length ``l`` each), a pair of short limiting faces (length ``m``) that stop
the fold by coming face to face, and flexible hinge layers of thickness ``t``.
In the relaxed state the high-friction faces form the flat contact top; when
the pattern folds by its design angle the low-friction faces rise into a new
flat top and the overall structure grows thicker.

Closed-form thicknesses (heights above the finger backing):

    h_hf = 2*t + l*sin(alpha) + m*cos(alpha)
    h_lf = ratio*l*sin(alpha) + h_hf / cos(alpha)

Cross-sections are emitted as x-monotone labeled polylines (height fields).
The exact vertex layout is a design choice; it is pinned down by invariants:
vertical extents equal the closed-form thicknesses, topmost faces carry the
active friction label, and the profile is a valid height field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ValidationError

# Fabrication bounds for "strict" validation (one particular printing
# process); the formulas themselves are total on any positive geometry.
FOLD_ANGLE_MIN_RAD = 0.175
FOLD_ANGLE_MAX_RAD = 0.785
LOW_FACE_MIN_MM = 3.0
LOW_FACE_MAX_MM = 10.0


class FrictionMode(str, Enum):
    HF = "hf"
    LF = "lf"


class FaceLabel(str, Enum):
    HIGH_FRICTION = "high_friction"
    LOW_FRICTION = "low_friction"
    LIMITING = "limiting"
    HINGE = "hinge"


def top_label(mode: FrictionMode) -> FaceLabel:
    """Face label exposed on top in the given mode."""
    return FaceLabel.HIGH_FRICTION if mode is FrictionMode.HF else FaceLabel.LOW_FRICTION


@dataclass(frozen=True)
class FoldParameters:
    """One fold-pattern parameterization.

    The high-face length and the flat-top offset angle are derived, never
    stored, so they can not drift out of sync.
    """

    low_face_mm: float          # l: low-friction face length
    length_ratio: float = 1.0   # ratio k/l of high- to low-friction face length
    fold_angle_rad: float = math.radians(30.0)  # alpha
    layer_thickness_mm: float = 0.3             # t: hinge layer thickness
    limit_face_mm: float = 2.0                  # m: fold-stop face length
    n_units: int = 5                            # pattern density

    @property
    def high_face_mm(self) -> float:
        return self.length_ratio * self.low_face_mm

    @property
    def offset_angle_rad(self) -> float:
        """Tilt of the low-friction faces in the relaxed state; chosen so the
        folded top comes out flat (sums with the fold angle to 90 deg)."""
        return 0.5 * math.pi - self.fold_angle_rad

    @classmethod
    def create(cls, low_face_mm, length_ratio=1.0, *, fold_angle_rad=None,
               fold_angle_deg=None, layer_thickness_mm=0.3, limit_face_mm=2.0,
               n_units=5) -> "FoldParameters":
        """Build parameters accepting the fold angle in radians or degrees."""
        if (fold_angle_rad is None) == (fold_angle_deg is None):
            raise ValidationError("give exactly one of fold_angle_rad / fold_angle_deg")
        angle = fold_angle_rad if fold_angle_rad is not None else math.radians(fold_angle_deg)
        return cls(low_face_mm=float(low_face_mm), length_ratio=float(length_ratio),
                   fold_angle_rad=float(angle), layer_thickness_mm=float(layer_thickness_mm),
                   limit_face_mm=float(limit_face_mm), n_units=int(n_units))


def check_params(p: FoldParameters, strict: bool = False) -> list[str]:
    """Return the complete list of violated constraints (empty when valid).

    Hard geometric errors are reported regardless of ``strict``; the
    fabrication bounds on the fold angle and low-face length only when
    ``strict`` is set.
    """
    errors = []
    if not p.low_face_mm > 0:
        errors.append("low-friction face length must be positive")
    if not p.length_ratio > 0:
        errors.append("length ratio must be positive")
    if not p.fold_angle_rad > 0:
        errors.append("fold angle must be positive")
    elif p.fold_angle_rad >= 0.5 * math.pi:
        errors.append("fold angle must be below 90 deg (secant singularity)")
    if not p.layer_thickness_mm > 0:
        errors.append("layer thickness must be positive")
    if not p.limit_face_mm > 0:
        errors.append("limiting face length must be positive")
    if p.n_units < 1:
        errors.append("unit count must be at least 1")
    if strict:
        if p.fold_angle_rad > 0 and not (
                FOLD_ANGLE_MIN_RAD <= p.fold_angle_rad <= FOLD_ANGLE_MAX_RAD):
            errors.append(
                f"fold angle {p.fold_angle_rad:.4f} rad outside "
                f"[{FOLD_ANGLE_MIN_RAD}, {FOLD_ANGLE_MAX_RAD}] rad")
        if p.low_face_mm > 0 and not (
                LOW_FACE_MIN_MM <= p.low_face_mm <= LOW_FACE_MAX_MM):
            errors.append(
                f"low-friction face {p.low_face_mm:g} mm outside "
                f"[{LOW_FACE_MIN_MM:g}, {LOW_FACE_MAX_MM:g}] mm")
    return errors


def validate_params(p: FoldParameters, strict: bool = False) -> FoldParameters:
    """Validate and return the parameters; raise with all violations listed."""
    errors = check_params(p, strict=strict)
    if errors:
        raise ValidationError(errors)
    return p


def thickness_high(p: FoldParameters) -> float:
    """Structure thickness in high-friction (relaxed) mode, mm."""
    validate_params(p)
    a = p.fold_angle_rad
    return (2.0 * p.layer_thickness_mm
            + p.low_face_mm * math.sin(a)
            + p.limit_face_mm * math.cos(a))


def thickness_low(p: FoldParameters) -> float:
    """Structure thickness in low-friction (folded) mode, mm."""
    validate_params(p)
    a = p.fold_angle_rad
    return p.high_face_mm * math.sin(a) + thickness_high(p) / math.cos(a)


def delta_h(p: FoldParameters) -> float:
    """Thickness change between modes (folded minus relaxed), mm."""
    return thickness_low(p) - thickness_high(p)


@dataclass(frozen=True)
class ThicknessReport:
    h_hf: float      # mm, high-friction mode
    h_lf: float      # mm, low-friction mode
    delta_h: float   # mm, h_lf - h_hf


def thickness_report(p: FoldParameters) -> ThicknessReport:
    h_hf = thickness_high(p)
    h_lf = thickness_low(p)
    return ThicknessReport(h_hf=h_hf, h_lf=h_lf, delta_h=h_lf - h_hf)


def period(p: FoldParameters, mode: FrictionMode) -> float:
    """Horizontal length of one fold unit in the given mode, mm."""
    validate_params(p)
    a = p.fold_angle_rad
    if mode is FrictionMode.HF:
        return (p.high_face_mm
                + 2.0 * p.limit_face_mm * math.sin(a)
                + 2.0 * p.low_face_mm * math.cos(a))
    return 2.0 * p.low_face_mm + p.high_face_mm * math.cos(a)


@dataclass(frozen=True)
class CrossSection:
    """Labeled height-field profile of one surface mode.

    ``vertices`` is an x-monotone polyline in mm (x along the surface,
    y above the finger backing); ``face_labels[i]`` labels the segment from
    vertex i to vertex i+1.
    """

    mode: FrictionMode
    vertices: np.ndarray           # (V, 2) float64
    face_labels: tuple[FaceLabel, ...]  # length V - 1
    period: float                  # mm per unit
    total_length: float            # period * n_units, mm

    def vertical_extent(self) -> float:
        ys = self.vertices[:, 1]
        return float(ys.max() - ys.min())

    def segments(self):
        """Yield (p1, p2, label) for every face segment."""
        for i, label in enumerate(self.face_labels):
            yield self.vertices[i], self.vertices[i + 1], label


def _hf_unit(p: FoldParameters):
    """One high-friction-mode unit, left to right, starting at the top-left
    corner of the high-friction top face.

    Layout: flat high-friction top, then a descent through a limiting face
    and a low-friction face into the valley, a hinge crease anchored to the
    backing (zero width), and the mirrored ascent.
    """
    a = p.fold_angle_rad
    k, l_low, m, t = p.high_face_mm, p.low_face_mm, p.limit_face_mm, p.layer_thickness_mm
    h = thickness_high(p)
    sin_a, cos_a = math.sin(a), math.cos(a)
    x_shoulder = k + m * sin_a
    x_valley = x_shoulder + l_low * cos_a
    y_shoulder = h - m * cos_a
    y_valley = 2.0 * t
    pts = [
        (0.0, h),
        (k, h),
        (x_shoulder, y_shoulder),
        (x_valley, y_valley),
        (x_valley, 0.0),          # crease anchor down to the backing
        (x_valley, y_valley),
        (x_valley + l_low * cos_a, y_shoulder),
        (x_valley + l_low * cos_a + m * sin_a, h),
    ]
    labels = [
        FaceLabel.HIGH_FRICTION,
        FaceLabel.LIMITING,
        FaceLabel.LOW_FRICTION,
        FaceLabel.HINGE,
        FaceLabel.HINGE,
        FaceLabel.LOW_FRICTION,
        FaceLabel.LIMITING,
    ]
    return pts, labels


def _lf_unit(p: FoldParameters):
    """One low-friction-mode unit, left to right, starting at the left edge
    of the flat low-friction top.

    The two low-friction faces of a unit lie coplanar on top; the high-
    friction face tilts by the fold angle and becomes the floor of the slot
    between tops, flanked by the now-vertical limiting faces. The hinge
    riser on the right of the slot anchors the crease to the backing.
    """
    a = p.fold_angle_rad
    k, l_low, m = p.high_face_mm, p.low_face_mm, p.limit_face_mm
    h = thickness_low(p)
    sin_a, cos_a = math.sin(a), math.cos(a)
    x_wall = 2.0 * l_low
    x_right = x_wall + k * cos_a
    y_ledge = h - m
    y_floor = y_ledge - k * sin_a   # = 2*t/cos(a) + l*tan(a) > 0
    pts = [
        (0.0, h),
        (l_low, h),
        (x_wall, h),
        (x_wall, y_ledge),
        (x_right, y_floor),
        (x_right, 0.0),             # crease anchor down to the backing
        (x_right, y_ledge),
        (x_right, h),
    ]
    labels = [
        FaceLabel.LOW_FRICTION,
        FaceLabel.LOW_FRICTION,
        FaceLabel.LIMITING,
        FaceLabel.HIGH_FRICTION,
        FaceLabel.HINGE,
        FaceLabel.HINGE,
        FaceLabel.LIMITING,
    ]
    return pts, labels


def cross_section(p: FoldParameters, mode: FrictionMode) -> CrossSection:
    """Generate the labeled height-field profile for one mode.

    Pure function: equal inputs give bit-identical output.
    """
    validate_params(p)
    mode = FrictionMode(mode)
    unit_pts, unit_labels = (_hf_unit(p) if mode is FrictionMode.HF else _lf_unit(p))
    per = period(p, mode)
    pts = [unit_pts[0]]
    labels: list[FaceLabel] = []
    for i in range(p.n_units):
        off = i * per
        # the first point of each unit coincides with the previous unit's last
        pts.extend((x + off, y) for x, y in unit_pts[1:])
        labels.extend(unit_labels)
    vertices = np.array(pts, dtype=float)
    return CrossSection(mode=mode, vertices=vertices, face_labels=tuple(labels),
                        period=per, total_length=p.n_units * per)


def _topmost_runs(section: CrossSection, tol: float = 1e-9):
    """Merge topmost face segments into maximal x-intervals."""
    ys = section.vertices[:, 1]
    y_top = ys.max()
    runs = []
    for (p1, p2, label) in section.segments():
        if abs(p1[0] - p2[0]) < 1e-12 and abs(p1[1] - p2[1]) < 1e-12:
            continue
        if p1[1] >= y_top - tol and p2[1] >= y_top - tol:
            interval = (min(p1[0], p2[0]), max(p1[0], p2[0]))
            if runs and interval[0] <= runs[-1][1] + 1e-9:
                runs[-1] = (runs[-1][0], max(runs[-1][1], interval[1]))
            else:
                runs.append(interval)
    return runs


def valley_gap(p: FoldParameters, mode: FrictionMode) -> float:
    """Horizontal opening between consecutive topmost faces, measured from
    the generated cross-section.

    Patterns with a single unit are measured on a two-unit profile so the
    inter-unit gap exists.
    """
    probe = p if p.n_units >= 2 else replace(p, n_units=2)
    section = cross_section(probe, mode)
    runs = _topmost_runs(section)
    gaps = [runs[i + 1][0] - runs[i][1] for i in range(len(runs) - 1)]
    if not gaps:
        raise ValidationError("profile has no interior valley to measure")
    return float(gaps[0])


@dataclass(frozen=True)
class DesignSweep:
    """Dense grid of thickness change over fold angle and low-face length."""

    fold_angles_rad: np.ndarray   # (A,)
    low_faces_mm: np.ndarray      # (L,)
    delta_h_mm: np.ndarray        # (A, L)

    def iter_rows(self):
        for i, a in enumerate(self.fold_angles_rad):
            for j, low in enumerate(self.low_faces_mm):
                yield float(a), float(low), float(self.delta_h_mm[i, j])


def _axis(lo: float, hi: float, steps: int, name: str) -> np.ndarray:
    errors = []
    if steps < 1:
        errors.append(f"{name}: need at least one step")
    if hi < lo:
        errors.append(f"{name}: empty range ({lo:g} > {hi:g})")
    if steps == 1 and hi != lo:
        errors.append(f"{name}: a single step needs min == max")
    if errors:
        raise ValidationError(errors)
    return np.linspace(lo, hi, steps)


def sweep_design_space(alpha_min: float, alpha_max: float,
                       low_min: float, low_max: float,
                       alpha_steps: int, low_steps: int | None = None, *,
                       length_ratio: float = 1.0,
                       layer_thickness_mm: float = 0.3,
                       limit_face_mm: float = 2.0,
                       strict: bool = True) -> DesignSweep:
    """Evaluate the thickness change over a grid of fold angles (rad) and
    low-face lengths (mm) at fixed ratio, layer thickness and limiting face.
    """
    low_steps = alpha_steps if low_steps is None else low_steps
    alphas = _axis(alpha_min, alpha_max, alpha_steps, "fold angle range")
    lows = _axis(low_min, low_max, low_steps, "low-face range")
    grid = np.empty((len(alphas), len(lows)))
    for i, a in enumerate(alphas):
        for j, low in enumerate(lows):
            p = FoldParameters(low_face_mm=float(low), length_ratio=length_ratio,
                               fold_angle_rad=float(a),
                               layer_thickness_mm=layer_thickness_mm,
                               limit_face_mm=limit_face_mm, n_units=1)
            validate_params(p, strict=strict)
            grid[i, j] = delta_h(p)
    return DesignSweep(fold_angles_rad=alphas, low_faces_mm=lows, delta_h_mm=grid)
