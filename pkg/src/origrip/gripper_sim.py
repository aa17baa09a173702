"""Planar quasi-static simulation of the two-finger variable-friction gripper.

The grasp plane holds two fingers rotating about fixed base pivots and one
rigid convex object. Finger angles are position-controlled; the grasp itself
is closed by penalty compliance (normal force proportional to penetration),
standing in for tendon stretch. The plan executor layers a small pinch servo
on top of the commanded stroke angles so the grip penetration tracks the
squeeze preload through gap changes and friction-mode switches, the way a
tendon-driven hand absorbs them.

Gravity and support-surface friction are out of plane and omitted; with no
contacts the object simply stays put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .actuation import ModeSwitchState, switch_mode
from .errors import (DegenerateConfigurationError, JamError, KinematicError,
                     ValidationError)
from .fold_geometry import (CrossSection, FaceLabel, FrictionMode,
                            cross_section, delta_h, thickness_high, top_label)
from .materials import (ABS_SMOOTH, DEFAULT_CATALOGUE, FrictionCatalogue,
                        MaterialFinish, SurfaceKind, SurfaceSpec, surface_mu)
from .step_solver import ContactRow, RowMode, TwistSolution, resolve_twist

DEFAULT_STEP_CAP_RAD = math.radians(0.5)
DEFAULT_ALIGN_TOL_RAD = math.radians(0.5)
DEFAULT_CAPTURE_MM = 0.5
PENETRATION_SLACK = 1e-6  # mm over the preload that counts as a violation


class Fidelity(str, Enum):
    FLAT_EQUIVALENT = "flat_equivalent"
    PROFILED = "profiled"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class ObjectShape(str, Enum):
    SQUARE = "square"
    CIRCLE = "circle"
    HEXAGON = "hexagon"
    TRIANGLE = "triangle"


class ContactClass(str, Enum):
    POINT_PIVOT = "point_pivot"
    LINE_PLANAR = "line_planar"


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


@dataclass(frozen=True)
class Pose2D:
    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def moved(self, dx: float, dy: float, dyaw: float) -> "Pose2D":
        return Pose2D(self.x + dx, self.y + dy, self.yaw + dyaw)


@dataclass(frozen=True)
class RigidObject2D:
    """Convex planar object; ``width_mm`` is the across-flats size (diameter
    for circles, side length for the equilateral triangle)."""

    shape: ObjectShape
    width_mm: float
    pose: Pose2D = Pose2D()

    def __post_init__(self):
        if self.width_mm <= 0:
            raise ValidationError("object width must be positive")

    @property
    def radius(self) -> float:
        return 0.5 * self.width_mm

    def local_vertices(self) -> np.ndarray | None:
        w = self.width_mm
        if self.shape is ObjectShape.SQUARE:
            h = 0.5 * w
            return np.array([(h, h), (-h, h), (-h, -h), (h, -h)])
        if self.shape is ObjectShape.HEXAGON:
            # across-flats width w, flats facing left and right
            r = w / math.sqrt(3.0)
            angles = np.radians(30.0 + 60.0 * np.arange(6))
            return np.stack([r * np.cos(angles), r * np.sin(angles)], axis=1)
        if self.shape is ObjectShape.TRIANGLE:
            # equilateral, side w, one flat face to the left
            r_in = w / (2.0 * math.sqrt(3.0))
            return np.array([(2.0 * r_in, 0.0), (-r_in, 0.5 * w), (-r_in, -0.5 * w)])
        return None

    def world_vertices(self) -> np.ndarray | None:
        local = self.local_vertices()
        if local is None:
            return None
        return local @ _rot(self.pose.yaw).T + self.pose.position


@dataclass(frozen=True)
class GripperModel:
    """Two-finger planar hand with friction-switchable contact surfaces.

    ``mount_offset`` is the lateral distance from each pivot to the contact
    plane of a relaxed (high-friction) surface; folding a surface into its
    low-friction mode moves the plane toward the object by its thickness
    change.
    """

    left_surface: SurfaceSpec
    right_surface: SurfaceSpec
    pivot_separation: float = 80.0       # mm between base pivots
    finger_surface_length: float = 140.0  # mm of usable contact surface
    surface_start: float = 35.0          # mm from pivot to surface near edge
    mount_offset: float = 15.0           # mm, pivot to relaxed contact plane
    angle_limits: tuple[float, float] = (-math.radians(50.0), math.radians(50.0))
    # commanded sweeps stay inside this narrower range; the band up to the
    # physical angle_limits hosts grip compliance and switch relief
    stroke_allowance_rad: float = math.radians(10.0)
    squeeze_stiffness: float = 10.0      # N/mm penalty normal stiffness
    squeeze_preload: float = 1.0         # mm target grip penetration
    fidelity: Fidelity = Fidelity.FLAT_EQUIVALENT
    counterface: MaterialFinish = ABS_SMOOTH
    catalogue: FrictionCatalogue = DEFAULT_CATALOGUE
    step_cap_rad: float = DEFAULT_STEP_CAP_RAD
    align_tol_rad: float = DEFAULT_ALIGN_TOL_RAD
    twist_cap_mm: float = 4.0  # per-step object motion beyond this is rejected

    def __post_init__(self):
        if self.nominal_gap <= 0:
            raise ValidationError("nominal gap must be positive")
        if self.squeeze_stiffness <= 0 or self.squeeze_preload <= 0:
            raise ValidationError("squeeze stiffness and preload must be positive")
        if self.angle_limits[0] >= self.angle_limits[1]:
            raise ValidationError("angle limits must be an increasing pair")

    @property
    def nominal_gap(self) -> float:
        """Inner-surface gap at the parallel pose with relaxed surfaces."""
        return self.pivot_separation - 2.0 * self.mount_offset

    @property
    def stroke_limits(self) -> tuple[float, float]:
        """Range available to commanded finger sweeps."""
        lo, hi = self.angle_limits
        return (lo + self.stroke_allowance_rad, hi - self.stroke_allowance_rad)

    @classmethod
    def build(cls, left_surface: SurfaceSpec, right_surface: SurfaceSpec, *,
              nominal_gap: float = 50.0, pivot_separation: float = 80.0,
              **kwargs) -> "GripperModel":
        """Construct with the mount offset chosen to realize a nominal gap."""
        mount = 0.5 * (pivot_separation - nominal_gap)
        return cls(left_surface=left_surface, right_surface=right_surface,
                   pivot_separation=pivot_separation, mount_offset=mount, **kwargs)

    def surface(self, side: Side) -> SurfaceSpec:
        return self.left_surface if side is Side.LEFT else self.right_surface

    def pivot(self, side: Side) -> np.ndarray:
        x = -0.5 * self.pivot_separation if side is Side.LEFT else 0.5 * self.pivot_separation
        return np.array([x, 0.0])

    def plane_offset(self, side: Side, mode: FrictionMode) -> float:
        """Pivot-to-contact-plane distance for the active mode."""
        spec = self.surface(side)
        mode = spec.effective_mode(mode)
        if spec.kind is SurfaceKind.OVF and mode is FrictionMode.LF:
            return self.mount_offset + delta_h(spec.fold)
        return self.mount_offset

    def check_angle(self, theta: float):
        lo, hi = self.angle_limits
        if not (lo - 1e-12 <= theta <= hi + 1e-12):
            raise KinematicError(
                f"finger angle {math.degrees(theta):.2f} deg outside limits "
                f"[{math.degrees(lo):.1f}, {math.degrees(hi):.1f}] deg")


@dataclass(frozen=True)
class SurfacePatch:
    """One collidable face segment of a finger surface, in world frame."""

    p1: np.ndarray
    p2: np.ndarray
    normal: np.ndarray           # unit, pointing into the gap
    label: FaceLabel
    mu: float
    index: int

    @property
    def tangent(self) -> np.ndarray:
        d = self.p2 - self.p1
        return d / np.linalg.norm(d)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.p2 - self.p1))


@dataclass(frozen=True)
class FingerSurface:
    """World-frame contact geometry of one finger at given angle and mode."""

    side: Side
    mode: FrictionMode
    theta: float
    pivot: np.ndarray
    patches: tuple[SurfacePatch, ...]


def _patch_mu(gripper: GripperModel, spec: SurfaceSpec, mode: FrictionMode,
              label: FaceLabel) -> float:
    if label is FaceLabel.HIGH_FRICTION:
        return surface_mu(spec, FrictionMode.HF, gripper.counterface, gripper.catalogue)
    if label is FaceLabel.LOW_FRICTION:
        return surface_mu(spec, FrictionMode.LF, gripper.counterface, gripper.catalogue)
    # limiting faces and crease regions are bare structural thermoplastic
    return surface_mu(spec, FrictionMode.LF, gripper.counterface, gripper.catalogue) \
        if FrictionMode.LF in spec.modes else \
        surface_mu(spec, spec.modes[0], gripper.counterface, gripper.catalogue)


def _finger_frame(gripper: GripperModel, side: Side, theta: float):
    pivot = gripper.pivot(side)
    rot = _rot(theta)
    along = rot @ np.array([0.0, 1.0])       # finger axis, base to tip
    inward = rot @ np.array([1.0 if side is Side.LEFT else -1.0, 0.0])
    return pivot, along, inward


def forward_kinematics(gripper: GripperModel, theta_left: float, theta_right: float,
                       modes: tuple[FrictionMode, FrictionMode],
                       plane_shift: tuple[float, float] = (0.0, 0.0)
                       ) -> tuple[FingerSurface, FingerSurface]:
    """Place both contact surfaces in the world frame.

    Flat-equivalent fidelity yields one straight patch per finger at the
    active-mode plane offset; profiled fidelity maps the active-mode
    cross-section polyline onto the finger. ``plane_shift`` offsets each
    surface along its inward normal; the plan executor uses it to deploy a
    freshly switched fold gradually instead of teleporting it into the
    grasp.
    """
    surfaces = []
    for side, theta, commanded, shift in ((Side.LEFT, theta_left, modes[0], plane_shift[0]),
                                          (Side.RIGHT, theta_right, modes[1], plane_shift[1])):
        gripper.check_angle(theta)
        spec = gripper.surface(side)
        mode = spec.effective_mode(commanded)
        pivot, along, inward = _finger_frame(gripper, side, theta)
        patches = []
        if gripper.fidelity is Fidelity.FLAT_EQUIVALENT or spec.kind is SurfaceKind.CONSTANT:
            offset = gripper.plane_offset(side, mode) + shift
            p1 = pivot + inward * offset + along * gripper.surface_start
            p2 = p1 + along * gripper.finger_surface_length
            label = top_label(mode)
            patches.append(SurfacePatch(
                p1=p1, p2=p2, normal=inward, label=label,
                mu=_patch_mu(gripper, spec, mode, label), index=0))
        else:
            section: CrossSection = cross_section(spec.fold, mode)
            backing = gripper.mount_offset - thickness_high(spec.fold) + shift
            s0 = gripper.surface_start + 0.5 * (gripper.finger_surface_length
                                                - section.total_length)
            idx = 0
            for q1, q2, label in section.segments():
                if label is FaceLabel.HINGE:
                    continue  # crease anchors are bookkeeping, not faces
                seg = q2 - q1
                if np.hypot(*seg) < 1e-12:
                    continue
                w1 = pivot + along * (s0 + q1[0]) + inward * (backing + q1[1])
                w2 = pivot + along * (s0 + q2[0]) + inward * (backing + q2[1])
                # profile drawn left to right with material below, so the
                # outward side is the left of the segment direction
                n_local = np.array([-seg[1], seg[0]])
                n_local /= np.linalg.norm(n_local)
                n_world = along * n_local[0] + inward * n_local[1]
                patches.append(SurfacePatch(
                    p1=w1, p2=w2, normal=n_world, label=label,
                    mu=_patch_mu(gripper, spec, mode, label), index=idx))
                idx += 1
        surfaces.append(FingerSurface(side=side, mode=mode, theta=theta,
                                      pivot=pivot, patches=tuple(patches)))
    return surfaces[0], surfaces[1]


@dataclass(frozen=True)
class Contact:
    """One detected contact between a finger surface and the object."""

    finger: Side
    classification: ContactClass
    points: np.ndarray           # (1, 2) or (2, 2) world mm
    normal: np.ndarray           # unit, into the object
    gaps: np.ndarray             # signed mm per point
    mu: float
    face_label: FaceLabel
    patch_index: int

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min())


def _polygon_patch_contacts(patch: SurfacePatch, verts: np.ndarray, *,
                            capture: float, align_tol: float) -> list[Contact]:
    t = patch.tangent
    n = patch.normal
    length = patch.length
    rel = verts - patch.p1
    depths = rel @ n
    params = rel @ t
    m = len(verts)
    out = []
    # face-on-face: an object edge aligned with the patch within tolerance
    best_planar = None
    for i in range(m):
        j = (i + 1) % m
        if max(depths[i], depths[j]) > capture:
            continue
        edge = verts[j] - verts[i]
        edge_len = np.hypot(*edge)
        if edge_len < 1e-9:
            continue
        ang = math.asin(min(1.0, abs(float(np.cross(edge / edge_len, t)))))
        if ang > align_tol:
            continue
        lo, hi = sorted((params[i], params[j]))
        lo_c, hi_c = max(lo, 0.0), min(hi, length)
        if hi_c - lo_c < 1e-9:
            continue
        span = params[j] - params[i]
        pts, gaps = [], []
        for u in (lo_c, hi_c):
            frac = (u - params[i]) / span
            pts.append(verts[i] + frac * (verts[j] - verts[i]))
            gaps.append(depths[i] + frac * (depths[j] - depths[i]))
        cand = Contact(finger=Side.LEFT, classification=ContactClass.LINE_PLANAR,
                       points=np.array(pts), normal=n, gaps=np.array(gaps),
                       mu=patch.mu, face_label=patch.label, patch_index=patch.index)
        if best_planar is None or cand.min_gap < best_planar.min_gap:
            best_planar = cand
    if best_planar is not None:
        out.append(best_planar)
        return out
    # vertex-on-face: every vertex close enough counts (a slightly
    # misaligned face still presses at two corners, and the solver needs
    # both to balance moments)
    order = np.argsort(depths)
    for i in order:
        if depths[i] > capture:
            break
        if -1e-9 <= params[i] <= length + 1e-9:
            out.append(Contact(finger=Side.LEFT,
                               classification=ContactClass.POINT_PIVOT,
                               points=verts[i][None, :], normal=n,
                               gaps=np.array([depths[i]]), mu=patch.mu,
                               face_label=patch.label, patch_index=patch.index))
    return out


def _circle_patch_contact(patch: SurfacePatch, center: np.ndarray, radius: float,
                          *, capture: float) -> list[Contact]:
    t = patch.tangent
    u = float(np.clip((center - patch.p1) @ t, 0.0, patch.length))
    closest = patch.p1 + u * t
    delta = center - closest
    dist = float(np.hypot(*delta))
    if dist < 1e-9:
        return []
    n = delta / dist
    if n @ patch.normal < 0.2:   # circle on the back side of the face
        return []
    gap = dist - radius
    if gap > capture:
        return []
    point = center - n * radius
    return [Contact(finger=Side.LEFT, classification=ContactClass.POINT_PIVOT,
                    points=point[None, :], normal=n, gaps=np.array([gap]),
                    mu=patch.mu, face_label=patch.label, patch_index=patch.index)]


def _merge_planar(cands: list[Contact], align_tol: float) -> list[Contact]:
    """Fuse coplanar face contacts (a face resting on several aligned tops)
    into one planar contact spanning the extreme points."""
    merged: list[Contact] = []
    for c in cands:
        host = None
        for i, m in enumerate(merged):
            if (m.normal @ c.normal > math.cos(align_tol)
                    and abs(m.min_gap - c.min_gap) < 1e-6):
                host = i
                break
        if host is None:
            merged.append(c)
            continue
        m = merged[host]
        t = _perp(m.normal)
        pts = np.vstack([m.points, c.points])
        gaps = np.concatenate([m.gaps, c.gaps])
        u = pts @ t
        lo, hi = int(np.argmin(u)), int(np.argmax(u))
        merged[host] = replace(m, points=pts[[lo, hi]], gaps=gaps[[lo, hi]])
    return merged


def detect_contacts(surfaces: tuple[FingerSurface, FingerSurface],
                    obj: RigidObject2D, *, capture: float = DEFAULT_CAPTURE_MM,
                    align_tol: float = DEFAULT_ALIGN_TOL_RAD,
                    max_rows_per_finger: int = 3) -> list[Contact]:
    """Detect near-touching contacts with signed gaps, classified as planar
    (face on face, carried by two endpoint points) or pivot (vertex/tangency).
    """
    verts = obj.world_vertices()
    center = obj.pose.position
    contacts: list[Contact] = []
    for surf in surfaces:
        cands: list[Contact] = []
        for patch in surf.patches:
            if obj.shape is ObjectShape.CIRCLE:
                found = _circle_patch_contact(patch, center, obj.radius, capture=capture)
            else:
                found = _polygon_patch_contacts(patch, verts, capture=capture,
                                                align_tol=align_tol)
            cands.extend(replace(c, finger=surf.side) for c in found)
        planar = _merge_planar([c for c in cands
                                if c.classification is ContactClass.LINE_PLANAR],
                               align_tol)
        points = [c for c in cands if c.classification is ContactClass.POINT_PIVOT]
        cands = sorted(planar + points, key=lambda c: (c.min_gap, c.patch_index))
        rows = 0
        chosen: list[Contact] = []
        for c in cands:
            need = len(c.points)
            if rows + need > max_rows_per_finger:
                continue
            redundant = False
            for kept in chosen:
                if kept.normal @ c.normal > math.cos(math.radians(15.0)):
                    dists = np.linalg.norm(kept.points[:, None, :] - c.points[None, :, :],
                                           axis=2)
                    if dists.min() < 0.5:
                        redundant = True
                        break
            if not redundant:
                chosen.append(c)
                rows += need
        contacts.extend(chosen)
    return contacts


@dataclass(frozen=True)
class WorldState:
    """Snapshot of the hand-object system after an accepted step."""

    theta_left: float
    theta_right: float
    mode_left: FrictionMode
    mode_right: FrictionMode
    obj: RigidObject2D
    step_index: int = 0


@dataclass
class StepDiagnostics:
    """Per-step solver and contact data for audits and logging."""

    contacts: list[Contact]
    rows: list[ContactRow]
    solution: TwistSolution | None
    measured_penetration: float      # mm, deepest after the step
    post_contacts: list[Contact] = field(default_factory=list)
    penetration_by_side: dict = field(default_factory=dict)
    event: str = "step"
    phase: int = -1
    mode_switched: bool = False
    finger_motion: tuple[float, float] = (0.0, 0.0)

    @property
    def n_contacts(self) -> int:
        return len(self.contacts)

    def contact_labels(self) -> str:
        return "|".join(f"{c.finger.value}:{c.classification.value}"
                        for c in self.contacts)

    def snagged(self, modes: tuple[FrictionMode, FrictionMode]) -> bool:
        """True when any contact touches a face other than the active top."""
        by_side = {Side.LEFT: top_label(modes[0]), Side.RIGHT: top_label(modes[1])}
        return any(c.face_label != by_side[c.finger] for c in self.contacts)


def _solver_rows(gripper: GripperModel, contacts: list[Contact],
                 dtheta: dict[Side, float]) -> list[ContactRow]:
    rows = []
    for cid, c in enumerate(contacts):
        pivot = gripper.pivot(c.finger)
        t = _perp(c.normal)
        for point, gap in zip(c.points, c.gaps):
            surf_disp = dtheta[c.finger] * _perp(point - pivot)
            rows.append(ContactRow(
                point=np.asarray(point, dtype=float), normal=c.normal,
                gap=float(gap), mu=c.mu,
                tangent_motion=float(surf_disp @ t),
                finger=c.finger.value, face_label=c.face_label.value,
                classification=c.classification.value, contact_id=cid))
    return rows


def state_contacts(gripper: GripperModel, state: WorldState, *,
                   capture: float = DEFAULT_CAPTURE_MM,
                   plane_shift: tuple[float, float] = (0.0, 0.0)) -> list[Contact]:
    surfaces = forward_kinematics(gripper, state.theta_left, state.theta_right,
                                  (state.mode_left, state.mode_right),
                                  plane_shift=plane_shift)
    return detect_contacts(surfaces, state.obj, capture=capture,
                           align_tol=gripper.align_tol_rad)


def _pens_of(contacts: list[Contact]) -> dict[Side, float]:
    out = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
    for c in contacts:
        out[c.finger] = max(out[c.finger], max(0.0, -c.min_gap))
    return out


def measure_penetration(gripper: GripperModel, state: WorldState, *,
                        capture: float = DEFAULT_CAPTURE_MM) -> dict[Side, float]:
    """Deepest contact penetration per finger at a state (0 when clear)."""
    return _pens_of(state_contacts(gripper, state, capture=capture))


def resolve_step(gripper: GripperModel, state: WorldState,
                 dtheta_left: float, dtheta_right: float, *,
                 capture: float = DEFAULT_CAPTURE_MM,
                 plane_shift: tuple[float, float] = (0.0, 0.0)
                 ) -> tuple[WorldState, StepDiagnostics]:
    """Advance the fingers by small angle increments and quasi-statically
    resolve the object motion.

    The fingers move first; contacts are then detected at the new surface
    pose and the contact-mode hypothesis search finds the consistent object
    twist. Raises JamError when the object is wedged.
    """
    cap = gripper.step_cap_rad + 1e-12
    if abs(dtheta_left) > cap or abs(dtheta_right) > cap:
        raise KinematicError("finger step exceeds the per-step cap")
    theta_l = state.theta_left + dtheta_left
    theta_r = state.theta_right + dtheta_right
    surfaces = forward_kinematics(gripper, theta_l, theta_r,
                                  (state.mode_left, state.mode_right),
                                  plane_shift=plane_shift)
    contacts = detect_contacts(surfaces, state.obj, capture=capture,
                               align_tol=gripper.align_tol_rad)
    rows = _solver_rows(gripper, contacts,
                        {Side.LEFT: dtheta_left, Side.RIGHT: dtheta_right})
    obj = state.obj
    if rows:
        try:
            solution = resolve_twist(rows, stiffness=gripper.squeeze_stiffness,
                                     char_len=0.5 * obj.width_mm,
                                     center=obj.pose.position,
                                     max_norm=gripper.twist_cap_mm)
        except JamError as err:
            raise err.annotated(step=state.step_index) from None
        obj = replace(obj, pose=obj.pose.moved(float(solution.displacement[0]),
                                               float(solution.displacement[1]),
                                               solution.rotation))
    else:
        solution = None
    new_state = WorldState(theta_left=theta_l, theta_right=theta_r,
                           mode_left=state.mode_left, mode_right=state.mode_right,
                           obj=obj, step_index=state.step_index + 1)
    post = state_contacts(gripper, new_state, capture=capture,
                          plane_shift=plane_shift)
    pen = _pens_of(post)
    diag = StepDiagnostics(contacts=contacts, rows=rows, solution=solution,
                           measured_penetration=max(pen.values()),
                           post_contacts=post, penetration_by_side=pen,
                           finger_motion=(dtheta_left, dtheta_right))
    return new_state, diag


@dataclass
class LogStep:
    state: WorldState
    diag: StepDiagnostics


@dataclass
class TrajectoryLog:
    """Full record of a plan execution."""

    gripper: GripperModel
    steps: list[LogStep] = field(default_factory=list)
    elapsed_switch_s: float = 0.0
    saturated_phases: list[int] = field(default_factory=list)

    def append(self, state: WorldState, diag: StepDiagnostics):
        self.steps.append(LogStep(state=state, diag=diag))

    @property
    def initial(self) -> WorldState:
        return self.steps[0].state

    @property
    def final(self) -> WorldState:
        return self.steps[-1].state

    def poses(self) -> np.ndarray:
        return np.array([[s.state.obj.pose.x, s.state.obj.pose.y, s.state.obj.pose.yaw]
                         for s in self.steps])

    def snag_steps(self) -> int:
        return sum(1 for s in self.steps
                   if s.diag.snagged((s.state.mode_left, s.state.mode_right)))


class _Executor:
    """Runs a manipulation plan: stroke tracking plus grip maintenance.

    Plan targets are common stroke angles; the executor layers a per-finger
    pinch correction on top so the deepest penetration tracks a setpoint
    below the squeeze preload, emulating tendon compliance. The servo is
    predictive: every candidate step is first resolved on a trial copy, the
    pinch correction is computed from the trial's measured penetrations, and
    the combined step is committed only if it respects the preload bound.
    Strokes saturate (and are logged) rather than error when pinch demands
    eat the angle budget.
    """

    PEN_BAND = 0.05        # mm servo tolerance around the setpoint
    SET_FRACTION = 0.8     # setpoint as a fraction of the preload
    LOOSE_FRACTION = 0.8   # re-grip when penetration falls below this
    PHASE_ITER_CAP = 3000
    STALL_LIMIT = 25       # iterations without stroke progress before saturating

    def __init__(self, gripper: GripperModel, state: WorldState, *,
                 switch_time_s: float = 0.0, capture: float = DEFAULT_CAPTURE_MM,
                 max_steps: int = 40000):
        self.g = gripper
        self.capture = capture
        self.max_steps = max_steps
        self.log = TrajectoryLog(gripper=gripper)
        self.target_pen = self.SET_FRACTION * gripper.squeeze_preload
        mode_l = gripper.left_surface.effective_mode(state.mode_left)
        mode_r = gripper.right_surface.effective_mode(state.mode_right)
        self.state = replace(state, mode_left=mode_l, mode_right=mode_r)
        self.switch = {Side.LEFT: ModeSwitchState(mode_l, switch_time_s=switch_time_s),
                       Side.RIGHT: ModeSwitchState(mode_r, switch_time_s=switch_time_s)}
        self.stroke = {Side.LEFT: state.theta_left, Side.RIGHT: state.theta_right}
        self.pinch = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
        self.shift = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
        self.phase_index = -1
        self._preposition()
        self.contacts = state_contacts(gripper, self.state, capture=capture)
        pens = _pens_of(self.contacts)
        init_diag = StepDiagnostics(contacts=[], rows=[], solution=None,
                                    measured_penetration=max(pens.values()),
                                    post_contacts=self.contacts,
                                    penetration_by_side=pens, event="init")
        self.log.append(self.state, init_diag)

    # -- geometry helpers ----------------------------------------------------

    def _theta(self, side: Side) -> float:
        return self.state.theta_left if side is Side.LEFT else self.state.theta_right

    def _respect_limits(self, side: Side, d: float) -> float:
        lo, hi = self.g.angle_limits
        theta = self._theta(side)
        return float(np.clip(theta + d, lo, hi) - theta)

    def _closing_sense(self, side: Side) -> float:
        """Sign of dtheta that moves the surface toward the object.

        A surface point p moves by dtheta * perp(p - pivot); the gap rate is
        the negative of that motion's normal component.
        """
        surf = forward_kinematics(self.g, self.state.theta_left,
                                  self.state.theta_right,
                                  (self.state.mode_left, self.state.mode_right))
        fs = surf[0] if side is Side.LEFT else surf[1]
        patch = fs.patches[0]
        probe = 0.5 * (patch.p1 + patch.p2)
        dgap_dtheta = -float(_perp(probe - fs.pivot) @ patch.normal)
        return -math.copysign(1.0, dgap_dtheta) if dgap_dtheta != 0.0 else 1.0

    def _pinch_correction(self, side: Side, contacts: list[Contact],
                          target: float) -> float:
        """Angle nudge moving this finger's deepest penetration toward target,
        evaluated against the given contact set."""
        mine = [c for c in contacts if c.finger is side]
        cap = self.g.step_cap_rad
        if not mine:
            # nothing within capture: close at a bounded rate
            lever = max(1.0, abs(self.state.obj.pose.y))
            d = self._closing_sense(side) * min(cap, (self.capture + target) / lever)
            return self._respect_limits(side, d)
        deepest = min(mine, key=lambda c: c.min_gap)
        i = int(np.argmin(deepest.gaps))
        point = deepest.points[i]
        pivot = self.g.pivot(side)
        dgap_dtheta = -float(_perp(point - pivot) @ deepest.normal)
        if abs(dgap_dtheta) < 1e-9:
            return 0.0
        gap_now = float(deepest.gaps[i])
        d = (-target - gap_now) / dgap_dtheta
        return self._respect_limits(side, float(np.clip(d, -cap, cap)))

    # -- stepping primitives -------------------------------------------------

    def _budget(self):
        if len(self.log.steps) > self.max_steps:
            raise JamError("step budget exhausted", phase=self.phase_index,
                           step=self.state.step_index)

    def _shift_tuple(self) -> tuple[float, float]:
        return (self.shift[Side.LEFT], self.shift[Side.RIGHT])

    def _trial(self, d_l: float, d_r: float):
        try:
            return resolve_step(self.g, self.state, d_l, d_r, capture=self.capture,
                                plane_shift=self._shift_tuple())
        except JamError as err:
            raise err.annotated(phase=self.phase_index) from None

    def _commit(self, new_state: WorldState, diag: StepDiagnostics, event: str):
        self._budget()
        diag.event = event
        diag.phase = self.phase_index
        self.state = new_state
        self.contacts = diag.post_contacts
        self.log.append(new_state, diag)

    def _pens(self) -> dict[Side, float]:
        return _pens_of(self.contacts)

    def _corrections(self, contacts: list[Contact], *, closing: bool = True
                     ) -> dict[Side, float]:
        """Per-finger pinch nudges based on a contact snapshot.

        A side pressed over the setpoint whose own finger cannot move
        (angle limit, degenerate geometry) is relieved by opening the other
        finger instead, letting the object re-center.
        """
        pens = _pens_of(contacts)
        out = {}
        for side in Side:
            pen = pens[side]
            tight = pen > self.target_pen + self.PEN_BAND
            loose = pen < self.LOOSE_FRACTION * self.target_pen
            if tight or (loose and closing):
                out[side] = self._pinch_correction(side, contacts, self.target_pen)
            else:
                out[side] = 0.0
        for side in Side:
            other = Side.RIGHT if side is Side.LEFT else Side.LEFT
            tight = pens[side] > self.target_pen + self.PEN_BAND
            if tight and out[side] == 0.0:
                excess = pens[side] - self.target_pen
                lever = max(10.0, abs(self.state.obj.pose.y))
                d = -self._closing_sense(other) * min(self.g.step_cap_rad,
                                                      (excess + self.PEN_BAND) / lever)
                out[other] = self._respect_limits(other, d)
        return out

    def _grip_step(self, d_stroke: dict[Side, float], event: str,
                   *, closing: bool = True) -> tuple[bool, dict[Side, float]]:
        """One predictive servo step.

        Trials the stroke, adds pinch corrections computed from the trial,
        shrinks the stroke when the preload bound would be broken. Strokes
        requested with equal increments stay synchronized, so limit or cap
        saturation slows both fingers together. Returns (committed, stroke
        actually applied per side).
        """
        limit = self.g.squeeze_preload
        synced = abs(d_stroke[Side.LEFT] - d_stroke[Side.RIGHT]) < 1e-15

        def _sync(v: dict[Side, float]) -> dict[Side, float]:
            if not synced:
                return v
            m = min(abs(v[Side.LEFT]), abs(v[Side.RIGHT]))
            return {s: math.copysign(m, v[s]) if v[s] != 0.0 else 0.0
                    for s in Side}

        ds = _sync({side: self._respect_limits(side, d_stroke[side])
                    for side in Side})
        try:
            t_state, t_diag = self._trial(ds[Side.LEFT], ds[Side.RIGHT])
        except JamError:
            return False, {Side.LEFT: 0.0, Side.RIGHT: 0.0}
        trial_ok = max(t_diag.penetration_by_side.values()) <= limit - 1e-9
        corr = self._corrections(t_diag.post_contacts,
                                 closing=closing and trial_ok)
        if trial_ok and corr[Side.LEFT] == 0.0 and corr[Side.RIGHT] == 0.0:
            self._commit(t_state, t_diag, event)
            return True, ds
        # corrections couple through the object, so shrink the whole
        # proposal (stroke and pinch together) until it fits the bound
        shrink = 1.0
        for _ in range(7):
            c = {side: shrink * corr[side] for side in Side}
            ds2 = {}
            for side in Side:
                cap_left = max(0.0, self.g.step_cap_rad - abs(c[side]))
                stroke_part = float(np.clip(shrink * ds[side], -cap_left, cap_left))
                total = self._respect_limits(side, stroke_part + c[side])
                ds2[side] = total - c[side]
            ds2 = _sync(ds2)
            try:
                c_state, c_diag = self._trial(ds2[Side.LEFT] + c[Side.LEFT],
                                              ds2[Side.RIGHT] + c[Side.RIGHT])
            except JamError:
                shrink *= 0.5
                continue
            if max(c_diag.penetration_by_side.values()) <= limit - 1e-9:
                self._commit(c_state, c_diag, event)
                self.pinch[Side.LEFT] += c[Side.LEFT]
                self.pinch[Side.RIGHT] += c[Side.RIGHT]
                return True, ds2
            shrink *= 0.5
        return False, {Side.LEFT: 0.0, Side.RIGHT: 0.0}

    # -- grip maintenance ----------------------------------------------------

    def _preposition(self):
        """Open the fingers until the placed object is not being crushed.

        Models hand opening before the object is put between the fingers;
        happens before the log starts and moves only the fingers.
        """
        for _ in range(400):
            pens = measure_penetration(self.g, self.state, capture=self.capture)
            worst = max(pens.values())
            if worst <= self.target_pen:
                return
            for side in Side:
                if pens[side] <= self.target_pen:
                    continue
                lever = max(10.0, abs(self.state.obj.pose.y))
                d = -self._closing_sense(side) * min(
                    self.g.step_cap_rad, (pens[side] + self.PEN_BAND) / lever)
                d = self._respect_limits(side, d)
                if d == 0.0:
                    raise KinematicError(
                        "object does not fit between the fingers within angle limits")
                self.pinch[side] += d
                if side is Side.LEFT:
                    self.state = replace(self.state,
                                         theta_left=self.state.theta_left + d)
                else:
                    self.state = replace(self.state,
                                         theta_right=self.state.theta_right + d)
        raise KinematicError("could not open the fingers around the object")

    def _settle(self, event: str, *, max_iters: int = 160):
        """Pinch-only steps until both fingers grip near the setpoint."""
        zero = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
        blocked = 0
        for _ in range(max_iters):
            corr = self._corrections(self.contacts)
            if corr[Side.LEFT] == 0.0 and corr[Side.RIGHT] == 0.0:
                return
            ok, _ = self._grip_step(zero, event)
            if not ok:
                blocked += 1
                if blocked >= 3:
                    break
            else:
                blocked = 0
        if max(self._pens().values()) > self.g.squeeze_preload:
            raise JamError("grasp settle did not converge", phase=self.phase_index,
                           step=self.state.step_index)

    DEPLOY_INCREMENT = 0.05  # mm of surface advance per deployment sub-step

    def _log_switch(self, side: Side):
        self.state = replace(
            self.state,
            mode_left=self.switch[Side.LEFT].current,
            mode_right=self.switch[Side.RIGHT].current,
            step_index=self.state.step_index + 1)
        self.contacts = state_contacts(self.g, self.state, capture=self.capture,
                                       plane_shift=self._shift_tuple())
        pens = _pens_of(self.contacts)
        diag = StepDiagnostics(contacts=[], rows=[], solution=None,
                               measured_penetration=max(pens.values()),
                               post_contacts=self.contacts,
                               penetration_by_side=pens, event="switch",
                               phase=self.phase_index, mode_switched=True)
        self.log.append(self.state, diag)

    def _deploy(self, side: Side):
        """Ramp a freshly switched surface from its old plane to the new one.

        The switch itself is instantaneous; the plane is walked outward in
        small quasi-static sub-steps so the object is pushed aside instead of
        teleported into, keeping the penetration bound honest.
        """
        zero = {Side.LEFT: 0.0, Side.RIGHT: 0.0}
        guard = 0
        while self.shift[side] < -1e-9:
            increment = min(self.DEPLOY_INCREMENT, -self.shift[side])
            previous = self.shift[side]
            self.shift[side] = previous + increment
            ok, _ = self._grip_step(zero, "deploy")
            if ok:
                guard = 0
                continue
            self.shift[side] = previous
            increment *= 0.5
            if increment < 1e-4:
                raise JamError("cannot deploy switched surface against the grasp",
                               phase=self.phase_index, step=self.state.step_index)
            self.shift[side] = previous + increment
            ok, _ = self._grip_step(zero, "deploy")
            if not ok:
                self.shift[side] = previous
                guard += 1
                if guard >= 8:
                    raise JamError("cannot deploy switched surface against the grasp",
                                   phase=self.phase_index, step=self.state.step_index)

    def _apply_modes(self, mode_left: FrictionMode, mode_right: FrictionMode):
        """Switch friction modes at a phase boundary.

        Advancing surfaces switch first, with a compensating plane shift and
        a gradual deploy: the opposite surface is still in its previous mode,
        which in the sequences of interest is the slippery one, so the object
        can be pushed aside. Retreating surfaces then switch instantly. No
        finger motion is interleaved with the switches themselves.
        """
        wanted = {Side.LEFT: mode_left, Side.RIGHT: mode_right}
        pending = []
        for side in Side:
            spec = self.g.surface(side)
            effective = spec.effective_mode(wanted[side])
            if effective is not self.switch[side].current:
                advance = (self.g.plane_offset(side, effective)
                           - self.g.plane_offset(side, self.switch[side].current))
                pending.append((advance, side, effective))
        if not pending:
            return
        pending.sort(key=lambda item: -item[0])  # advancing deploys first
        for advance, side, effective in pending:
            self.switch[side] = switch_mode(self.switch[side], effective)
            self.log.elapsed_switch_s += self.switch[side].switch_time_s
            if advance > 0:
                # keep the contact plane where it was, then deploy outward
                self.shift[side] -= advance
            self._log_switch(side)
            if advance > 0:
                self._deploy(side)
            else:
                self._settle("settle")
        self._settle("settle")

    # -- phase execution ------------------------------------------------------

    def run_phase(self, mode_left: FrictionMode, mode_right: FrictionMode,
                  target_left: float, target_right: float):
        self.phase_index += 1
        self._apply_modes(mode_left, mode_right)
        if self.phase_index == 0:
            self._settle("grasp")
        cap = self.g.step_cap_rad
        stall = 0
        for _ in range(self.PHASE_ITER_CAP):
            need = {Side.LEFT: target_left - self.stroke[Side.LEFT],
                    Side.RIGHT: target_right - self.stroke[Side.RIGHT]}
            if all(abs(need[s]) < 1e-9 for s in Side):
                return
            ds = {side: float(np.clip(need[side], -cap, cap)) for side in Side}
            ok, applied = self._grip_step(ds, "stroke")
            if not ok:
                stall += 1
                if stall >= self.STALL_LIMIT:
                    self.log.saturated_phases.append(self.phase_index)
                    return
                continue
            moved = abs(applied[Side.LEFT]) + abs(applied[Side.RIGHT])
            self.stroke[Side.LEFT] += applied[Side.LEFT]
            self.stroke[Side.RIGHT] += applied[Side.RIGHT]
            if moved > 1e-10:
                stall = 0
            else:
                stall += 1
                if stall >= self.STALL_LIMIT:
                    self.log.saturated_phases.append(self.phase_index)
                    return
        self.log.saturated_phases.append(self.phase_index)


def run_plan(gripper: GripperModel, initial: WorldState, plan, *,
             switch_time_s: float = 0.0, capture: float = DEFAULT_CAPTURE_MM,
             max_steps: int = 40000) -> TrajectoryLog:
    """Execute a manipulation plan and log every accepted step.

    ``plan`` provides ``iter_phases()`` yielding
    (mode_left, mode_right, target_left_rad, target_right_rad) tuples.
    Jam errors propagate annotated with the phase and step.
    """
    ex = _Executor(gripper, initial, switch_time_s=switch_time_s,
                   capture=capture, max_steps=max_steps)
    for (mode_l, mode_r, tgt_l, tgt_r) in plan.iter_phases():
        ex.run_phase(mode_l, mode_r, tgt_l, tgt_r)
    return ex.log


def step_violations(log_step: LogStep, preload: float) -> list[str]:
    """Invariant violations of one logged step (empty when clean)."""
    out = []
    diag = log_step.diag
    if diag.measured_penetration > preload + PENETRATION_SLACK:
        out.append(f"penetration {diag.measured_penetration:.6f} mm over preload")
    sol = diag.solution
    if sol is None:
        return out
    dissipation = 0.0
    for i, mode in enumerate(sol.modes):
        f_n, f_t, slip = sol.normal_force[i], sol.tangent_force[i], sol.slip[i]
        mu = diag.rows[i].mu
        if mode is RowMode.STICK and abs(f_t) > mu * f_n + 1e-9:
            out.append(f"row {i}: stick outside friction cone")
        if mode in (RowMode.SLIDE_POS, RowMode.SLIDE_NEG):
            if abs(abs(f_t) - mu * f_n) > 1e-9:
                out.append(f"row {i}: sliding force off the cone edge")
            if f_t * slip > 1e-12:
                out.append(f"row {i}: sliding force does not oppose slip")
        dissipation += -f_t * slip
    if dissipation < -1e-9:
        out.append(f"negative frictional dissipation {dissipation:.3e}")
    return out


def trajectory_violations(log: TrajectoryLog) -> list[str]:
    """All invariant violations across a trajectory."""
    preload = log.gripper.squeeze_preload
    out = []
    for i, step in enumerate(log.steps):
        for v in step_violations(step, preload):
            out.append(f"step {i}: {v}")
    return out
