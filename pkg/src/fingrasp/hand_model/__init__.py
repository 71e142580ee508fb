"""Hand description, forward kinematics, and analytic Jacobians."""

from .io import (
    DEFAULT_HAND_PATH,
    build_default_hand_spec,
    build_hand_model,
    default_hand_model,
    load_hand_model,
    save_hand_model,
)
from .kinematics import (
    PosedHand,
    forward_kinematics,
    point_jacobian,
    rotational_jacobian,
    translational_jacobian,
)
from .model import PALM_LINK, Finger, HandModel, HandState, RevoluteJoint

__all__ = [
    "DEFAULT_HAND_PATH",
    "build_default_hand_spec",
    "build_hand_model",
    "default_hand_model",
    "load_hand_model",
    "save_hand_model",
    "PosedHand",
    "forward_kinematics",
    "point_jacobian",
    "rotational_jacobian",
    "translational_jacobian",
    "PALM_LINK",
    "Finger",
    "HandModel",
    "HandState",
    "RevoluteJoint",
]
