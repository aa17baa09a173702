"""Benchmark harness: the surface/object evaluation matrix with seeded trials.

Six finger surfaces (two constant-friction pads and four fold patterns), up
to seven objects, both plan kinds, a configurable number of jittered trials
per cell. Jammed trials are recorded, never retried; every cell is
deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import JamError, ValidationError
from .fold_geometry import FoldParameters, FrictionMode
from .gripper_sim import (Fidelity, GripperModel, ObjectShape, Pose2D,
                          RigidObject2D, TrajectoryLog, WorldState, run_plan)
from .materials import (SurfaceSpec, constant_high_surface, constant_low_surface,
                        default_ovf_surface)
from .plans import (Direction, ManipulationPlan, PlanKind,
                    build_rotation_plan, build_translation_plan)

_FOLD_30 = dict(fold_angle_rad=math.radians(30.0), layer_thickness_mm=0.3,
                limit_face_mm=2.0)


def surface_preset(name: str) -> SurfaceSpec:
    """Published finger-surface configurations by name."""
    presets = {
        "constant_lf": lambda: constant_low_surface("constant_lf"),
        "constant_hf": lambda: constant_high_surface("constant_hf"),
        "weighted_ovf": lambda: default_ovf_surface(
            FoldParameters(low_face_mm=3.0, length_ratio=8.0 / 3.0, n_units=5,
                           **_FOLD_30), "weighted_ovf"),
        "medium_ovf": lambda: default_ovf_surface(
            FoldParameters(low_face_mm=5.0, length_ratio=1.0, n_units=5,
                           **_FOLD_30), "medium_ovf"),
        "low_density_ovf": lambda: default_ovf_surface(
            FoldParameters(low_face_mm=9.6, length_ratio=1.0, n_units=3,
                           **_FOLD_30), "low_density_ovf"),
        "high_density_ovf": lambda: default_ovf_surface(
            FoldParameters(low_face_mm=4.0, length_ratio=1.0, n_units=8,
                           **_FOLD_30), "high_density_ovf"),
    }
    try:
        return presets[name]()
    except KeyError:
        raise ValidationError(f"unknown surface preset '{name}'") from None


SURFACE_PRESET_NAMES = ("constant_lf", "constant_hf", "weighted_ovf",
                        "medium_ovf", "low_density_ovf", "high_density_ovf")


def object_preset(name: str, *, x: float = 0.0, y: float = 100.0,
                  yaw: float = 0.0) -> RigidObject2D:
    """Test objects by name, e.g. ``square_50`` or ``circle_50``."""
    try:
        shape_name, width = name.rsplit("_", 1)
        shape = ObjectShape(shape_name)
        width_mm = float(width)
    except (ValueError, KeyError):
        raise ValidationError(f"unknown object preset '{name}'") from None
    return RigidObject2D(shape=shape, width_mm=width_mm, pose=Pose2D(x, y, yaw))


OBJECT_PRESET_NAMES = ("square_40", "square_50", "square_60", "square_70",
                       "circle_50", "hexagon_50", "triangle_50")


def make_gripper(surface: str | SurfaceSpec,
                 fidelity: Fidelity = Fidelity.FLAT_EQUIVALENT,
                 **kwargs) -> GripperModel:
    """Gripper with the same surface on both fingers."""
    spec = surface_preset(surface) if isinstance(surface, str) else surface
    return GripperModel.build(left_surface=spec, right_surface=spec,
                              fidelity=fidelity, **kwargs)


def initial_state(obj: RigidObject2D) -> WorldState:
    return WorldState(theta_left=0.0, theta_right=0.0,
                      mode_left=FrictionMode.HF, mode_right=FrictionMode.HF,
                      obj=obj)


def build_plan(kind: str | PlanKind, gripper: GripperModel,
               direction: str | Direction | None = None,
               cycles: int = 1) -> ManipulationPlan:
    kind = PlanKind(kind)
    if kind is PlanKind.TRANSLATION:
        return build_translation_plan(gripper, direction or Direction.DISTAL, cycles)
    if kind is PlanKind.ROTATION:
        return build_rotation_plan(gripper, direction or Direction.CW, cycles)
    raise ValidationError("bench plans are translation or rotation")


def net_metrics(log: TrajectoryLog) -> tuple[float, float]:
    """Net object motion of a trajectory.

    Returns (translation along the finger axis at the start pose in mm,
    unwrapped yaw change in degrees).
    """
    if not log.steps:
        raise ValidationError("empty trajectory")
    first = log.initial
    theta0 = 0.5 * (first.theta_left + first.theta_right)
    axis = np.array([-math.sin(theta0), math.cos(theta0)])
    start = first.obj.pose.position
    end = log.final.obj.pose.position
    translation = float((end - start) @ axis)
    yaws = np.unwrap(log.poses()[:, 2])
    rotation = math.degrees(float(yaws[-1] - yaws[0]))
    return translation, rotation


@dataclass(frozen=True)
class BenchConfig:
    surfaces: tuple[str, ...] = SURFACE_PRESET_NAMES
    objects: tuple[str, ...] = OBJECT_PRESET_NAMES
    plans: tuple[str, ...] = ("translation", "rotation")
    trials: int = 5
    seed: int = 0
    cycles: int = 1
    fidelity: Fidelity = Fidelity.FLAT_EQUIVALENT
    jitter_mm: float = 1.0
    jitter_deg: float = 1.0
    start_y_mm: float = 100.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("need at least one trial")


@dataclass(frozen=True)
class BenchRow:
    surface: str
    object: str
    plan: str
    trials_completed: int
    jam_count: int
    snag_steps: int
    mean_translation_mm: float
    std_translation_mm: float
    mean_rotation_deg: float
    std_rotation_deg: float


@dataclass
class BenchResult:
    config: BenchConfig
    rows: list[BenchRow] = field(default_factory=list)

    def row(self, surface: str, object_name: str, plan: str) -> BenchRow:
        for r in self.rows:
            if (r.surface, r.object, r.plan) == (surface, object_name, plan):
                return r
        raise KeyError((surface, object_name, plan))

    def to_csv(self) -> str:
        header = ("surface,object,plan,trials_completed,jam_count,snag_steps,"
                  "mean_translation_mm,std_translation_mm,"
                  "mean_rotation_deg,std_rotation_deg")
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.surface},{r.object},{r.plan},{r.trials_completed},"
                f"{r.jam_count},{r.snag_steps},"
                f"{r.mean_translation_mm:.9g},{r.std_translation_mm:.9g},"
                f"{r.mean_rotation_deg:.9g},{r.std_rotation_deg:.9g}")
        return "\n".join(lines) + "\n"


def run_trial(surface: str, object_name: str, plan_kind: str, *,
              fidelity: Fidelity = Fidelity.FLAT_EQUIVALENT, cycles: int = 1,
              jitter: tuple[float, float, float] = (0.0, 0.0, 0.0),
              start_y_mm: float = 100.0) -> TrajectoryLog:
    """One bench trial; raises JamError when the object wedges."""
    gripper = make_gripper(surface, fidelity)
    obj = object_preset(object_name, x=jitter[0], y=start_y_mm + jitter[1],
                        yaw=jitter[2])
    plan = build_plan(plan_kind, gripper, cycles=cycles)
    return run_plan(gripper, initial_state(obj), plan)


def run_bench(config: BenchConfig) -> BenchResult:
    """Execute the whole matrix with seeded per-trial pose jitter.

    Cells are independent and keyed by identity, so the result does not
    depend on execution order; a fixed seed reproduces it bit for bit.
    """
    result = BenchResult(config=config)
    for si, surface in enumerate(config.surfaces):
        for oi, object_name in enumerate(config.objects):
            for pi, plan_kind in enumerate(config.plans):
                cell_key = (si, oi, pi)
                translations, rotations = [], []
                jams = 0
                snags = 0
                for trial in range(config.trials):
                    seq = np.random.SeedSequence(
                        entropy=config.seed, spawn_key=(*cell_key, trial))
                    rng = np.random.default_rng(seq)
                    jitter = (rng.uniform(-config.jitter_mm, config.jitter_mm),
                              rng.uniform(-config.jitter_mm, config.jitter_mm),
                              math.radians(rng.uniform(-config.jitter_deg,
                                                       config.jitter_deg)))
                    try:
                        log = run_trial(surface, object_name, plan_kind,
                                        fidelity=config.fidelity,
                                        cycles=config.cycles, jitter=jitter,
                                        start_y_mm=config.start_y_mm)
                    except JamError:
                        jams += 1
                        continue
                    snags += log.snag_steps()
                    t, r = net_metrics(log)
                    translations.append(t)
                    rotations.append(r)
                completed = len(translations)
                if completed:
                    t_arr = np.array(translations)
                    r_arr = np.array(rotations)
                    row = BenchRow(surface=surface, object=object_name,
                                   plan=plan_kind, trials_completed=completed,
                                   jam_count=jams, snag_steps=snags,
                                   mean_translation_mm=float(t_arr.mean()),
                                   std_translation_mm=float(t_arr.std()),
                                   mean_rotation_deg=float(r_arr.mean()),
                                   std_rotation_deg=float(r_arr.std()))
                else:
                    row = BenchRow(surface=surface, object=object_name,
                                   plan=plan_kind, trials_completed=0,
                                   jam_count=jams, snag_steps=snags,
                                   mean_translation_mm=float("nan"),
                                   std_translation_mm=float("nan"),
                                   mean_rotation_deg=float("nan"),
                                   std_rotation_deg=float("nan"))
                result.rows.append(row)
    return result
