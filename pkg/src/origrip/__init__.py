"""origrip: variable-friction fold-surface design and in-hand manipulation
simulation for a two-finger gripper."""

from .actuation import (FoldForceProfile, ModeSwitchState, calibrate_kappa,
                        default_hinge_stiffness, fold_energy,
                        fold_force_profile, fold_travel, peak_fold_force,
                        switch_mode)
from .bench import (BenchConfig, BenchResult, build_plan, initial_state,
                    make_gripper, net_metrics, object_preset, run_bench,
                    run_trial, surface_preset)
from .errors import (CalibrationError, DegenerateConfigurationError, JamError,
                     KinematicError, MaterialLookupError, OrigripError,
                     PlanError, SequencingError, SurfaceModeError,
                     ValidationError)
from .fold_geometry import (CrossSection, FaceLabel, FoldParameters,
                            FrictionMode, ThicknessReport, cross_section,
                            delta_h, sweep_design_space, thickness_high,
                            thickness_low, thickness_report, validate_params,
                            valley_gap)
from .gripper_sim import (Contact, ContactClass, Fidelity, GripperModel,
                          ObjectShape, Pose2D, RigidObject2D, Side,
                          TrajectoryLog, WorldState, detect_contacts,
                          forward_kinematics, resolve_step, run_plan,
                          trajectory_violations)
from .materials import (FrictionCatalogue, Material, MaterialFinish,
                        SurfaceKind, SurfaceSpec, constant_high_surface,
                        constant_low_surface, default_ovf_surface, mu_lookup,
                        surface_mu)
from .plans import (Direction, ManipulationPlan, PlanKind, PlanPhase,
                    build_rotation_plan, build_translation_plan, reverse_plan)
from .step_solver import ContactRow, RowMode, TwistSolution, resolve_twist

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
