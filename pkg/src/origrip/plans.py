"""Open-loop manipulation sequences as data.

A plan is an ordered list of phases; each phase fixes both friction modes and
gives every finger a stroke-angle target. Mode changes happen only at phase
boundaries, and one cycle returns the fingers to their starting angles so
cycles can repeat.

Sign convention: positive finger angles are counterclockwise when the hand is
viewed with the fingers pointing up and the object between them. Translation
sequences alternate which finger slides (its surface in the low-friction
mode) while both fingers sweep together, shuttling the object along the
finger axis; the rotation sequence pre-slides the object toward the
fingertips, carries it around with both surfaces in the high-friction mode,
then returns with one surface slippery so the rotation is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import PlanError
from .fold_geometry import FrictionMode
from .gripper_sim import GripperModel

MAX_ANGLE_MARGIN_RAD = math.radians(1.0)


class PlanKind(str, Enum):
    TRANSLATION = "translation"
    ROTATION = "rotation"
    CUSTOM = "custom"


class Direction(str, Enum):
    DISTAL = "distal"
    PROXIMAL = "proximal"
    CW = "cw"
    CCW = "ccw"


_OPPOSITE = {Direction.DISTAL: Direction.PROXIMAL,
             Direction.PROXIMAL: Direction.DISTAL,
             Direction.CW: Direction.CCW,
             Direction.CCW: Direction.CW}


@dataclass(frozen=True)
class PlanPhase:
    mode_left: FrictionMode
    mode_right: FrictionMode
    target_left_rad: float
    target_right_rad: float
    name: str = ""

    def mirrored(self) -> "PlanPhase":
        return PlanPhase(mode_left=self.mode_right, mode_right=self.mode_left,
                         target_left_rad=self.target_left_rad,
                         target_right_rad=self.target_right_rad,
                         name=self.name)

    def negated(self) -> "PlanPhase":
        return replace(self, target_left_rad=-self.target_left_rad,
                       target_right_rad=-self.target_right_rad)


@dataclass(frozen=True)
class ManipulationPlan:
    kind: PlanKind
    direction: Direction
    phases: tuple[PlanPhase, ...]
    cycles: int = 1

    def __post_init__(self):
        if self.cycles < 1:
            raise PlanError("cycle count must be at least 1")
        if not self.phases:
            return
        first, last = self.phases[0], self.phases[-1]
        if (abs(first.target_left_rad - last.target_left_rad) > 1e-12
                or abs(first.target_right_rad - last.target_right_rad) > 1e-12):
            raise PlanError("a cycle must return the fingers to the starting angles")

    def iter_phases(self):
        """Yield (mode_left, mode_right, target_left, target_right) over all cycles."""
        for _ in range(self.cycles):
            for ph in self.phases:
                yield (ph.mode_left, ph.mode_right,
                       ph.target_left_rad, ph.target_right_rad)

    def phase_count(self) -> int:
        return len(self.phases) * self.cycles

    def check_limits(self, gripper: GripperModel) -> None:
        lo, hi = gripper.angle_limits
        for ph in self.phases:
            for t in (ph.target_left_rad, ph.target_right_rad):
                if not (lo - 1e-12 <= t <= hi + 1e-12):
                    raise PlanError(
                        f"phase target {math.degrees(t):.1f} deg outside gripper limits")


def _max_stroke(gripper: GripperModel) -> float:
    lo, hi = gripper.stroke_limits
    return min(-lo, hi) - MAX_ANGLE_MARGIN_RAD


def build_translation_plan(gripper: GripperModel,
                           direction: Direction | str = Direction.DISTAL,
                           cycles: int = 1) -> ManipulationPlan:
    """Four-phase shuttle: grasp with one surface slippery, sweep, swap which
    side is slippery, sweep back past the start, swap again, return.

    The distal schedule keeps the left surface gripping on counterclockwise
    sweeps; the proximal schedule is its left/right mirror.
    """
    direction = Direction(direction)
    if direction not in (Direction.DISTAL, Direction.PROXIMAL):
        raise PlanError("translation direction must be distal or proximal")
    s = _max_stroke(gripper)
    hf, lf = FrictionMode.HF, FrictionMode.LF
    phases = (
        PlanPhase(hf, lf, 0.0, 0.0, name="grasp"),
        PlanPhase(hf, lf, s, s, name="sweep_out"),
        PlanPhase(lf, hf, -s, -s, name="sweep_back"),
        PlanPhase(hf, lf, 0.0, 0.0, name="return"),
    )
    if direction is Direction.PROXIMAL:
        phases = tuple(ph.mirrored() for ph in phases)
    plan = ManipulationPlan(kind=PlanKind.TRANSLATION, direction=direction,
                            phases=phases, cycles=cycles)
    plan.check_limits(gripper)
    return plan


def build_rotation_plan(gripper: GripperModel,
                        direction: Direction | str = Direction.CW,
                        cycles: int = 1,
                        preslide_fraction: float = 0.5) -> ManipulationPlan:
    """Three-phase isolated rotation: slippery-side pre-slide toward the
    fingertips to open rotation room, a full sweep with both surfaces
    gripping that carries the object around, and a return with the other
    side slippery so the object keeps its new orientation.
    """
    direction = Direction(direction)
    if direction not in (Direction.CW, Direction.CCW):
        raise PlanError("rotation direction must be cw or ccw")
    if not 0.0 <= preslide_fraction <= 1.0:
        raise PlanError("pre-slide fraction must lie in [0, 1]")
    s = _max_stroke(gripper)
    pre = preslide_fraction * s
    hf, lf = FrictionMode.HF, FrictionMode.LF
    phases = (
        PlanPhase(hf, lf, pre, pre, name="grasp_preslide"),
        PlanPhase(hf, hf, -s, -s, name="carry"),
        PlanPhase(lf, hf, pre, pre, name="return"),
    )
    if direction is Direction.CCW:
        phases = tuple(ph.mirrored().negated() for ph in phases)
    plan = ManipulationPlan(kind=PlanKind.ROTATION, direction=direction,
                            phases=phases, cycles=cycles)
    plan.check_limits(gripper)
    return plan


def reverse_plan(plan: ManipulationPlan) -> ManipulationPlan:
    """Plan producing the opposite net motion.

    Translations reverse by mirroring which side is slippery (the sweep
    directions stay; the object shuttles the other way). Rotations reverse
    by the full left/right mirror, which flips every sweep and the carried
    yaw. Both transforms are involutions.
    """
    if plan.kind is PlanKind.ROTATION:
        phases = tuple(ph.mirrored().negated() for ph in plan.phases)
    else:
        phases = tuple(ph.mirrored() for ph in plan.phases)
    return ManipulationPlan(kind=plan.kind,
                            direction=_OPPOSITE.get(plan.direction, plan.direction),
                            phases=phases, cycles=plan.cycles)


def plan_to_dict(plan: ManipulationPlan) -> dict:
    return {
        "kind": plan.kind.value,
        "direction": plan.direction.value,
        "cycles": plan.cycles,
        "phases": [
            {"mode_left": ph.mode_left.value, "mode_right": ph.mode_right.value,
             "target_left_deg": math.degrees(ph.target_left_rad),
             "target_right_deg": math.degrees(ph.target_right_rad),
             "name": ph.name}
            for ph in plan.phases
        ],
    }


def plan_from_dict(data: dict) -> ManipulationPlan:
    try:
        phases = tuple(
            PlanPhase(mode_left=FrictionMode(ph["mode_left"]),
                      mode_right=FrictionMode(ph["mode_right"]),
                      target_left_rad=math.radians(float(ph["target_left_deg"])),
                      target_right_rad=math.radians(float(ph["target_right_deg"])),
                      name=str(ph.get("name", "")))
            for ph in data["phases"])
        return ManipulationPlan(kind=PlanKind(data.get("kind", "custom")),
                                direction=Direction(data.get("direction", "distal")),
                                phases=phases, cycles=int(data.get("cycles", 1)))
    except (KeyError, ValueError, TypeError) as err:
        raise PlanError(f"malformed plan description: {err}") from None
