"""Hand description files: a versioned JSON schema, loader, and default hand.

Schema (format_version 1). Lengths in meters, angles in radians, ``rpy`` is
extrinsic roll-pitch-yaw (R = Rz(yaw) @ Ry(pitch) @ Rx(roll)), optional and
zero when absent::

    {
      "format_version": 1,
      "name": str,
      "cloud_seed": int,                     # seed for surface resampling
      "palm": {"box": BOX, "cloud_points": int},
      "fingers": [
        {"name": str,
         "joints": [
           {"name": str, "xyz": [3], "rpy": [3]?, "axis": [3],
            "q_min": num, "q_max": num, "q_mean": num,
            "q_open": num?,                  # defaults to q_min
            "alpha": num?,                   # defaults to 1.0
            "link": null | {"box": BOX, "cloud_points": int}},
           ...
         ],
         "fingertip": {"center": [3], "radius": num, "axis": [3],
                       "half_angle_deg": num, "points": int}},
        ...
      ]
    }

    BOX = {"center": [3], "half_extents": [3], "rpy": [3]?}

Link surface clouds are resampled deterministically from the link boxes at
load time, so files stay small and a save/load round trip reproduces the
model exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..errors import FingraspError, HandModelError
from ..geometry import (
    OrientedBoundingBox,
    RigidTransform,
    SurfacePointCloud,
    TriangleMesh,
    sample_mesh,
)
from ..geometry.sampling import sample_spherical_cap
from ..geometry.shapes import make_centered_box
from .model import Finger, HandModel, RevoluteJoint

FORMAT_VERSION = 1
_DATA_DIR = Path(__file__).resolve().parent.parent / "data"
DEFAULT_HAND_PATH = _DATA_DIR / "default.hand"


def rpy_matrix(rpy) -> np.ndarray:
    r, p, y = [float(v) for v in rpy]
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    Rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    Ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    Rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return Rz @ Ry @ Rx


# ---------------------------------------------------------------------------
# Schema checking helpers; every failure names the offending field path.
# ---------------------------------------------------------------------------

def _get(d, key, path, kind=None, required=True, default=None):
    if not isinstance(d, dict):
        raise HandModelError(path, "expected an object")
    if key not in d:
        if required:
            raise HandModelError(f"{path}.{key}", "missing required field")
        return default
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise HandModelError(f"{path}.{key}", f"expected {kind}, got {type(val).__name__}")
    return val


def _num(d, key, path, required=True, default=None):
    val = _get(d, key, path, required=required, default=default)
    if val is default and not required:
        return default
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise HandModelError(f"{path}.{key}", "expected a number")
    return float(val)


def _vec3(d, key, path, required=True, default=None):
    val = _get(d, key, path, required=required, default=default)
    if val is default and not required:
        return default
    if not isinstance(val, (list, tuple)) or len(val) != 3 or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in val
    ):
        raise HandModelError(f"{path}.{key}", "expected a list of 3 numbers")
    return [float(v) for v in val]


def _count(d, key, path):
    val = _get(d, key, path)
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        raise HandModelError(f"{path}.{key}", "expected a positive integer")
    return val


def _parse_frame(xyz, rpy) -> RigidTransform:
    return RigidTransform(rpy_matrix(rpy or [0.0, 0.0, 0.0]), np.asarray(xyz, dtype=float))


def _parse_box(d, path) -> OrientedBoundingBox:
    center = _vec3(d, "center", path)
    half = _vec3(d, "half_extents", path)
    rpy = _vec3(d, "rpy", path, required=False)
    if not all(h > 0 for h in half):
        raise HandModelError(f"{path}.half_extents", "must be positive")
    return OrientedBoundingBox(_parse_frame(center, rpy), np.array(half))


def _box_cloud(box: OrientedBoundingBox, n: int, seed_seq) -> SurfacePointCloud:
    mesh = make_centered_box(box.half_extents)
    return sample_mesh(TriangleMesh(box.frame.apply(mesh.vertices), mesh.faces), n, seed_seq)


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------

def build_hand_model(spec: dict, source: str = "<spec>") -> HandModel:
    """Validate a hand description and build the model with sampled clouds."""
    version = _get(spec, "format_version", source)
    if version != FORMAT_VERSION:
        raise HandModelError(f"{source}.format_version", f"unsupported version {version!r}")
    name = _get(spec, "name", source, kind=str, required=False, default="unnamed")
    cloud_seed = _get(spec, "cloud_seed", source, required=False, default=0)
    if not isinstance(cloud_seed, int) or isinstance(cloud_seed, bool):
        raise HandModelError(f"{source}.cloud_seed", "expected an integer")

    palm = _get(spec, "palm", source, kind=dict)
    palm_box = _parse_box(_get(palm, "box", f"{source}.palm", kind=dict), f"{source}.palm.box")
    palm_n = _count(palm, "cloud_points", f"{source}.palm")
    link_counter = 0
    palm_cloud = _box_cloud(
        palm_box, palm_n, np.random.SeedSequence((cloud_seed, link_counter))
    )

    fingers_spec = _get(spec, "fingers", source, kind=list)
    if not fingers_spec:
        raise HandModelError(f"{source}.fingers", "needs at least one finger")

    fingers = []
    for fi, fd in enumerate(fingers_spec):
        fpath = f"{source}.fingers[{fi}]"
        fname = _get(fd, "name", fpath, kind=str, required=False, default=f"finger{fi}")
        joints_spec = _get(fd, "joints", fpath, kind=list)
        if not joints_spec:
            raise HandModelError(f"{fpath}.joints", "needs at least one joint")
        joints = []
        clouds = []
        boxes = []
        for ji, jd in enumerate(joints_spec):
            jpath = f"{fpath}.joints[{ji}]"
            jname = _get(jd, "name", jpath, kind=str, required=False, default=f"j{ji}")
            xyz = _vec3(jd, "xyz", jpath)
            rpy = _vec3(jd, "rpy", jpath, required=False)
            axis = _vec3(jd, "axis", jpath)
            q_min = _num(jd, "q_min", jpath)
            q_max = _num(jd, "q_max", jpath)
            if q_min >= q_max:
                raise HandModelError(f"{jpath}.q_min", f"q_min >= q_max in joint {jname!r}")
            q_mean = _num(jd, "q_mean", jpath)
            q_open = _num(jd, "q_open", jpath, required=False, default=q_min)
            alpha = _num(jd, "alpha", jpath, required=False, default=1.0)
            if alpha <= 0:
                raise HandModelError(f"{jpath}.alpha", "must be positive")
            try:
                joints.append(
                    RevoluteJoint(
                        name=f"{fname}/{jname}",
                        origin=_parse_frame(xyz, rpy),
                        axis=np.array(axis),
                        q_min=q_min,
                        q_max=q_max,
                        q_mean=q_mean,
                        q_open=q_open,
                        alpha=alpha,
                    )
                )
            except FingraspError as exc:
                raise HandModelError(jpath, str(exc))

            link_counter += 1
            link = _get(jd, "link", jpath, required=False)
            if link is None:
                clouds.append(None)
                boxes.append(None)
            else:
                lpath = f"{jpath}.link"
                box = _parse_box(_get(link, "box", lpath, kind=dict), f"{lpath}.box")
                n = _count(link, "cloud_points", lpath)
                clouds.append(
                    _box_cloud(box, n, np.random.SeedSequence((cloud_seed, link_counter)))
                )
                boxes.append(box)

        tip = _get(fd, "fingertip", fpath, kind=dict)
        tpath = f"{fpath}.fingertip"
        center = _vec3(tip, "center", tpath)
        radius = _num(tip, "radius", tpath)
        axis = _vec3(tip, "axis", tpath)
        half_angle = _num(tip, "half_angle_deg", tpath)
        n_pts = _count(tip, "points", tpath)
        if radius <= 0:
            raise HandModelError(f"{tpath}.radius", "must be positive")
        if not 0 < half_angle <= 90:
            raise HandModelError(f"{tpath}.half_angle_deg", "must be in (0, 90]")
        patch = sample_spherical_cap(center, radius, axis, math.radians(half_angle), n_pts)

        try:
            fingers.append(
                Finger(
                    name=fname,
                    joints=tuple(joints),
                    link_clouds=tuple(clouds),
                    link_boxes=tuple(boxes),
                    fingertip_patch=patch,
                )
            )
        except FingraspError as exc:
            raise HandModelError(fpath, str(exc))

    return HandModel(name=name, palm_cloud=palm_cloud, fingers=tuple(fingers), spec=spec)


def load_hand_model(path) -> HandModel:
    path = Path(path)
    try:
        spec = json.loads(path.read_text())
    except OSError as exc:
        raise HandModelError(str(path), str(exc))
    except json.JSONDecodeError as exc:
        raise HandModelError(str(path), f"invalid JSON: {exc}")
    return build_hand_model(spec, source=path.name)


def save_hand_model(model: HandModel, path) -> None:
    if model.spec is None:
        raise FingraspError("model carries no description to save")
    Path(path).write_text(json.dumps(model.spec, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Default three-fingered hand
# ---------------------------------------------------------------------------
# Two spread-plus-flex fingers and one fixed two-joint finger arranged 120
# degrees apart; 1798 surface points total with three 216-point fingertips.

def build_default_hand_spec() -> dict:
    def finger(name, mount_angle, with_spread):
        mount = [0.033 * math.cos(mount_angle), 0.033 * math.sin(mount_angle), 0.0]
        joints = []
        if with_spread:
            joints.append({
                "name": "spread",
                "xyz": mount,
                "rpy": [0.0, 0.0, mount_angle],
                "axis": [0.0, 0.0, 1.0],
                "q_min": -0.35, "q_max": 0.35, "q_mean": 0.0, "q_open": 0.0,
                "alpha": 1.0,
                "link": None,
            })
            prox_xyz, prox_rpy = [0.0, 0.0, 0.0], [0.0, -0.35, 0.0]
        else:
            prox_xyz, prox_rpy = mount, [0.0, -0.35, mount_angle]
        alpha = math.sqrt(2.0) if not with_spread else 1.0
        joints.append({
            "name": "proximal",
            "xyz": prox_xyz,
            "rpy": prox_rpy,
            "axis": [0.0, 1.0, 0.0],
            "q_min": 0.0, "q_max": 2.4, "q_mean": 1.2, "q_open": 0.0,
            "alpha": alpha,
            "link": {
                "box": {"center": [0.0, 0.0, -0.0275], "half_extents": [0.008, 0.007, 0.0275]},
                "cloud_points": 130,
            },
        })
        joints.append({
            "name": "distal",
            "xyz": [0.0, 0.0, -0.055],
            "axis": [0.0, 1.0, 0.0],
            "q_min": 0.0, "q_max": 1.6, "q_mean": 0.8, "q_open": 0.0,
            "alpha": alpha,
            "link": {
                "box": {"center": [0.0, 0.0, -0.02], "half_extents": [0.007, 0.006, 0.02]},
                "cloud_points": 120,
            },
        })
        pad = math.radians(40.0)
        return {
            "name": name,
            "joints": joints,
            "fingertip": {
                "center": [0.0, 0.0, -0.04],
                "radius": 0.01,
                "axis": [-math.cos(pad), 0.0, -math.sin(pad)],
                "half_angle_deg": 50.0,
                "points": 216,
            },
        }

    return {
        "format_version": FORMAT_VERSION,
        "name": "default-3finger",
        "cloud_seed": 0,
        "palm": {
            "box": {"center": [0.0, 0.0, 0.012], "half_extents": [0.04, 0.035, 0.012]},
            "cloud_points": 400,
        },
        "fingers": [
            finger("f1", math.radians(210.0), True),
            finger("f2", math.radians(330.0), True),
            finger("f3", math.radians(90.0), False),
        ],
    }


def default_hand_model() -> HandModel:
    return build_hand_model(build_default_hand_spec(), source="default")
