"""Point-process, two-level, circuit and cavity models of quiet light."""

from . import cavity, circuits, core_math, pendulum, point_process, two_level

__version__ = "0.1.0"

__all__ = ["cavity", "circuits", "core_math", "pendulum", "point_process", "two_level"]
