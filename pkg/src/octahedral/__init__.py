"""Kinematics and singularity analysis of an octahedral Stewart-Gough platform
whose equilateral base can be rescaled during motion."""
from .kernels import BACKEND
from .kinematics import (
    Configuration,
    EulerOrientation,
    JointRates,
    PlatformScrew,
    Pose,
    SpearLine,
    base_points,
    det_jacobian,
    forward_screw,
    inverse_rates,
    jacobian,
    leg_lengths,
    leg_spear,
    margin,
    platform_points_world,
    rotation_matrix,
    self_motion_screw,
)

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__",
           "Configuration",
           "EulerOrientation",
           "JointRates",
           "PlatformScrew",
           "Pose",
           "SpearLine",
           "base_points",
           "det_jacobian",
           "forward_screw",
           "inverse_rates",
           "jacobian",
           "leg_lengths",
           "leg_spear",
           "margin",
           "platform_points_world",
           "rotation_matrix",
           "self_motion_screw",
           ]
