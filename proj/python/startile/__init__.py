"""Star-shaped substitution tilings and prescribed-Jacobian maps."""

from ._core import (
    DomainError,
    ElevationMap,
    GeometryError,
    NumericError,
    ResourceError,
    System,
    ValidationError,
    builtin_names,
    convergence_report,
    correct_supertile,
    count_tiles,
    e_value,
    inflate_patch,
    is_primitive,
    load_system,
    pf_stats,
    realize,
    system_from_json,
    tau_y,
)

__all__ = [
    "DomainError",
    "ElevationMap",
    "GeometryError",
    "NumericError",
    "ResourceError",
    "System",
    "ValidationError",
    "builtin_names",
    "convergence_report",
    "correct_supertile",
    "count_tiles",
    "e_value",
    "inflate_patch",
    "is_primitive",
    "load_system",
    "pf_stats",
    "realize",
    "system_from_json",
    "tau_y",
]
