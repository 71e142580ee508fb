"""Precision grasp planning for multi-fingered hands on noisy point clouds.

The planner alternates a closed-form palm-pose least-squares step with a
box-constrained joint step under an exponentially growing collision penalty,
restarting from surface cluster centers ranked by success rate.
"""

__version__ = "0.1.0"

from .errors import FingraspError, HandModelError, MeshFormatError, SolverError

__all__ = [
    "__version__",
    "FingraspError",
    "HandModelError",
    "MeshFormatError",
    "SolverError",
]
