"""Bounding-cube pose metrics, losses, and fitting."""

from cubepose._core import (
    Error,
    add_error,
    add_s_error,
    cube_vertices,
    cube_volume,
    diameter,
    fit_pose,
    gradient_check,
    parse_ply,
    pose_error,
    riou,
    scale_cube,
    subnet_shape,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "add_error",
    "add_s_error",
    "cube_vertices",
    "cube_volume",
    "diameter",
    "fit_pose",
    "gradient_check",
    "parse_ply",
    "pose_error",
    "riou",
    "scale_cube",
    "subnet_shape",
    "__version__",
]
