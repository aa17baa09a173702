"""File formats: parameter/scenario/plan/config YAML and CSV/SVG exports.

Canonical schemas
-----------------

Fold parameters (YAML key/value)::

    l_mm: 5.0          # low-friction face length
    R: 1.0             # high/low face length ratio
    alpha_deg: 30.0    # fold angle (or alpha_rad)
    t_mm: 0.3          # hinge layer thickness
    m_mm: 2.0          # limiting face length
    n_units: 5         # pattern density

Scenario (YAML)::

    seed: 7
    fidelity: flat_equivalent | profiled
    gripper:                       # all optional, defaults shown
      pivot_separation_mm: 80.0
      surface_length_mm: 140.0
      nominal_gap_mm: 50.0
      angle_limit_deg: 32.0
      squeeze_stiffness: 10.0
      squeeze_preload_mm: 1.0
    left_surface: <surface>
    right_surface: <surface>
    object: {shape: square, width_mm: 50, x_mm: 0, y_mm: 60, yaw_deg: 0}

where ``<surface>`` is either a preset name (``medium_ovf`` ...) or a mapping
``{kind: constant, mode: hf|lf}`` / ``{kind: ovf, fold: {<fold parameters>}}``.

Bench configuration (YAML): any subset of the BenchConfig fields
(surfaces, objects, plans, trials, seed, cycles, fidelity, jitter_mm,
jitter_deg, start_y_mm).
"""

from __future__ import annotations

import math
from dataclasses import replace

import yaml

from .bench import BenchConfig, initial_state, object_preset, surface_preset
from .errors import ValidationError
from .fold_geometry import (CrossSection, DesignSweep, FoldParameters,
                            validate_params)
from .gripper_sim import (Fidelity, GripperModel, ObjectShape, Pose2D,
                          RigidObject2D, TrajectoryLog, WorldState)
from .materials import SurfaceKind, SurfaceSpec
from .fold_geometry import FrictionMode


def _load_yaml(path) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a key/value mapping")
    return data


def fold_parameters_from_dict(data: dict) -> FoldParameters:
    known = {"l_mm", "R", "alpha_rad", "alpha_deg", "t_mm", "m_mm", "n_units"}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"unknown fold parameter keys: {sorted(unknown)}")
    if "l_mm" not in data:
        raise ValidationError("fold parameters need l_mm")
    has_rad = "alpha_rad" in data
    has_deg = "alpha_deg" in data
    if has_rad == has_deg:
        raise ValidationError("give exactly one of alpha_rad / alpha_deg")
    angle = float(data["alpha_rad"]) if has_rad else math.radians(float(data["alpha_deg"]))
    p = FoldParameters(low_face_mm=float(data["l_mm"]),
                       length_ratio=float(data.get("R", 1.0)),
                       fold_angle_rad=angle,
                       layer_thickness_mm=float(data.get("t_mm", 0.3)),
                       limit_face_mm=float(data.get("m_mm", 2.0)),
                       n_units=int(data.get("n_units", 5)))
    return validate_params(p)


def load_fold_parameters(path) -> FoldParameters:
    return fold_parameters_from_dict(_load_yaml(path))


def fold_parameters_to_dict(p: FoldParameters) -> dict:
    return {"l_mm": p.low_face_mm, "R": p.length_ratio,
            "alpha_rad": p.fold_angle_rad, "t_mm": p.layer_thickness_mm,
            "m_mm": p.limit_face_mm, "n_units": p.n_units}


def surface_from_spec(data) -> SurfaceSpec:
    if isinstance(data, str):
        return surface_preset(data)
    kind = SurfaceKind(data.get("kind", "ovf"))
    if kind is SurfaceKind.CONSTANT:
        return SurfaceSpec(kind=kind, fixed_mode=FrictionMode(data.get("mode", "hf")),
                           name=str(data.get("name", "constant")))
    fold = fold_parameters_from_dict(data["fold"])
    spec = SurfaceSpec(kind=kind, fold=fold, name=str(data.get("name", "ovf")))
    mu_low = data.get("mu_low")
    mu_high = data.get("mu_high")
    if mu_low is not None or mu_high is not None:
        spec = replace(spec,
                       mu_low_override=None if mu_low is None else float(mu_low),
                       mu_high_override=None if mu_high is None else float(mu_high))
    return spec


def load_scenario(path) -> tuple[GripperModel, WorldState, int]:
    """Read a scenario file; returns (gripper, initial world state, seed)."""
    data = _load_yaml(path)
    g = data.get("gripper", {}) or {}
    fidelity = Fidelity(data.get("fidelity", "flat_equivalent"))
    left = surface_from_spec(data.get("left_surface", "medium_ovf"))
    right = surface_from_spec(data.get("right_surface", "medium_ovf"))
    limit = math.radians(float(g.get("angle_limit_deg", 32.0)))
    gripper = GripperModel.build(
        left_surface=left, right_surface=right,
        nominal_gap=float(g.get("nominal_gap_mm", 50.0)),
        pivot_separation=float(g.get("pivot_separation_mm", 80.0)),
        finger_surface_length=float(g.get("surface_length_mm", 140.0)),
        angle_limits=(-limit, limit),
        squeeze_stiffness=float(g.get("squeeze_stiffness", 10.0)),
        squeeze_preload=float(g.get("squeeze_preload_mm", 1.0)),
        fidelity=fidelity)
    o = data.get("object", {}) or {}
    if isinstance(o, str):
        obj = object_preset(o)
    else:
        obj = RigidObject2D(shape=ObjectShape(o.get("shape", "square")),
                            width_mm=float(o.get("width_mm", 50.0)),
                            pose=Pose2D(float(o.get("x_mm", 0.0)),
                                        float(o.get("y_mm", 100.0)),
                                        math.radians(float(o.get("yaw_deg", 0.0)))))
    state = replace(initial_state(obj))
    return gripper, state, int(data.get("seed", 0))


def load_bench_config(path) -> BenchConfig:
    data = _load_yaml(path)
    kwargs = {}
    for key in ("trials", "seed", "cycles"):
        if key in data:
            kwargs[key] = int(data[key])
    for key in ("jitter_mm", "jitter_deg", "start_y_mm"):
        if key in data:
            kwargs[key] = float(data[key])
    for key in ("surfaces", "objects", "plans"):
        if key in data:
            kwargs[key] = tuple(str(v) for v in data[key])
    if "fidelity" in data:
        kwargs["fidelity"] = Fidelity(data["fidelity"])
    return BenchConfig(**kwargs)


def load_plan(path):
    from .plans import plan_from_dict
    return plan_from_dict(_load_yaml(path))


def dump_plan(plan, path):
    from .plans import plan_to_dict
    with open(path, "w") as fh:
        yaml.safe_dump(plan_to_dict(plan), fh, sort_keys=False)


# -- CSV / SVG writers -------------------------------------------------------

def profile_csv(section: CrossSection) -> str:
    """Vertices with the face label of the outgoing segment (blank on the
    final vertex)."""
    lines = ["x_mm,y_mm,face_label"]
    labels = [label.value for label in section.face_labels] + [""]
    for (x, y), label in zip(section.vertices, labels):
        lines.append(f"{x:.9g},{y:.9g},{label}")
    return "\n".join(lines) + "\n"


_SVG_COLORS = {"high_friction": "#c0392b", "low_friction": "#2980b9",
               "limiting": "#27ae60", "hinge": "#7f8c8d"}


def profile_svg(section: CrossSection) -> str:
    """Profile as SVG, one user unit per millimetre, y pointing up."""
    vs = section.vertices
    width = float(vs[:, 0].max())
    height = float(vs[:, 1].max())
    pad = 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{-pad} {-height - pad} {width + 2 * pad} {height + 2 * pad}" '
        f'width="{width + 2 * pad}mm" height="{height + 2 * pad}mm">',
        f'<!-- {section.mode.value} mode profile; 1 unit = 1 mm -->',
        f'<g fill="none" stroke-width="0.2" stroke-linecap="round">',
    ]
    for p1, p2, label in section.segments():
        color = _SVG_COLORS[label.value]
        parts.append(f'<line x1="{p1[0]:.6g}" y1="{-p1[1]:.6g}" '
                     f'x2="{p2[0]:.6g}" y2="{-p2[1]:.6g}" '
                     f'stroke="{color}" class="{label.value}"/>')
    parts.append("</g></svg>")
    return "\n".join(parts) + "\n"


def sweep_csv(sweep: DesignSweep) -> str:
    lines = ["alpha_rad,l_mm,delta_h_mm"]
    for alpha, low, dh in sweep.iter_rows():
        lines.append(f"{alpha:.9g},{low:.9g},{dh:.9g}")
    return "\n".join(lines) + "\n"


def force_profile_csv(profile) -> str:
    lines = ["displacement_mm,force_N"]
    for x, f in zip(profile.displacement_mm, profile.force_n):
        lines.append(f"{x:.9g},{f:.9g}")
    return "\n".join(lines) + "\n"


def trajectory_csv(log: TrajectoryLog) -> str:
    lines = ["step,theta_left_rad,theta_right_rad,mode_left,mode_right,"
             "obj_x_mm,obj_y_mm,obj_yaw_rad,n_contacts,contact_labels"]
    for i, entry in enumerate(log.steps):
        s = entry.state
        d = entry.diag
        lines.append(
            f"{i},{s.theta_left:.9g},{s.theta_right:.9g},"
            f"{s.mode_left.value},{s.mode_right.value},"
            f"{s.obj.pose.x:.9g},{s.obj.pose.y:.9g},{s.obj.pose.yaw:.9g},"
            f"{d.n_contacts},{d.contact_labels()}")
    return "\n".join(lines) + "\n"
