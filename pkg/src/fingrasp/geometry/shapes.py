"""Procedural table-top test meshes (resting on the ground plane z = 0)."""

from __future__ import annotations

import numpy as np

from .meshio import TriangleMesh


def _quads_to_tris(quads):
    tris = []
    for a, b, c, d in quads:
        tris.append([a, b, c])
        tris.append([a, c, d])
    return tris


def _orient_outward_convex(vertices, faces, center):
    """Flip triangle winding so normals point away from an interior point."""
    faces = np.array(faces, dtype=np.int64)
    v = np.asarray(vertices)
    n = np.cross(v[faces[:, 1]] - v[faces[:, 0]], v[faces[:, 2]] - v[faces[:, 0]])
    tc = v[faces].mean(axis=1)
    flip = np.einsum("ij,ij->i", n, tc - center) < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return faces


def make_box(sx: float, sy: float, sz: float) -> TriangleMesh:
    """Axis-aligned box centered in x/y with its base on z = 0."""
    x0, x1 = -sx / 2, sx / 2
    y0, y1 = -sy / 2, sy / 2
    z0, z1 = 0.0, sz
    v = np.array([
        [x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0],
        [x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1],
    ])
    quads = [
        (0, 3, 2, 1),  # bottom, -z
        (4, 5, 6, 7),  # top, +z
        (0, 1, 5, 4),  # -y
        (2, 3, 7, 6),  # +y
        (0, 4, 7, 3),  # -x
        (1, 2, 6, 5),  # +x
    ]
    return TriangleMesh(v, np.array(_quads_to_tris(quads)))


def make_centered_box(half_extents) -> TriangleMesh:
    """Box centered at the origin with the given half extents."""
    hx, hy, hz = np.asarray(half_extents, dtype=float)
    mesh = make_box(2 * hx, 2 * hy, 2 * hz)
    return TriangleMesh(mesh.vertices - [0, 0, hz], mesh.faces)


def make_sphere(radius: float, n_lat: int = 24, n_lon: int = 36) -> TriangleMesh:
    """UV sphere resting on the ground (center at z = radius)."""
    center = np.array([0.0, 0.0, radius])
    verts = [center + [0, 0, radius]]  # top pole
    for i in range(1, n_lat):
        theta = np.pi * i / n_lat
        for j in range(n_lon):
            phi = 2 * np.pi * j / n_lon
            verts.append(center + radius * np.array(
                [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
            ))
    verts.append(center + [0, 0, -radius])  # bottom pole
    verts = np.array(verts)
    bottom = len(verts) - 1

    def ring(i, j):
        return 1 + (i - 1) * n_lon + (j % n_lon)

    faces = []
    for j in range(n_lon):
        faces.append([0, ring(1, j), ring(1, j + 1)])
        faces.append([bottom, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)])
    for i in range(1, n_lat - 1):
        for j in range(n_lon):
            faces.append([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)])
            faces.append([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)])
    return TriangleMesh(verts, _orient_outward_convex(verts, faces, center))


def make_cylinder(radius: float, height: float, n: int = 48) -> TriangleMesh:
    """Upright cylinder with its base on z = 0."""
    angles = 2 * np.pi * np.arange(n) / n
    rim = np.column_stack([radius * np.cos(angles), radius * np.sin(angles), np.zeros(n)])
    verts = np.vstack([rim, rim + [0, 0, height], [[0, 0, 0]], [[0, 0, height]]])
    c_bot, c_top = 2 * n, 2 * n + 1
    faces = []
    for j in range(n):
        k = (j + 1) % n
        faces.append([j, k, n + k])
        faces.append([j, n + k, n + j])
        faces.append([c_bot, k, j])
        faces.append([c_top, n + j, n + k])
    center = np.array([0.0, 0.0, height / 2])
    return TriangleMesh(verts, _orient_outward_convex(verts, faces, center))


def make_l_bracket(arm: float = 0.08, thickness: float = 0.03, height: float = 0.03) -> TriangleMesh:
    """L-shaped extrusion lying on the ground, centered on its bounding box."""
    w, t = arm, thickness
    # L outline, counter-clockwise in the xy plane
    outline = np.array([
        [0, 0], [w, 0], [w, t], [t, t], [t, w], [0, w]
    ], dtype=float)
    outline -= [w / 2, w / 2]
    n = len(outline)
    bot = np.column_stack([outline, np.zeros(n)])
    top = np.column_stack([outline, np.full(n, height)])
    verts = np.vstack([bot, top])

    # triangulated L footprint: two rectangles
    footprint = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5]]
    faces = []
    for a, b, c in footprint:
        faces.append([a, c, b])                  # bottom faces point -z
        faces.append([n + a, n + b, n + c])      # top faces point +z
    for j in range(n):
        k = (j + 1) % n
        # outline is CCW seen from +z, so j->k->k+n winds outward
        faces.append([j, k, n + k])
        faces.append([j, n + k, n + j])
    return TriangleMesh(verts, np.array(faces))


def make_torus(major: float = 0.04, minor: float = 0.015, n_major: int = 36,
               n_minor: int = 16) -> TriangleMesh:
    """Torus lying flat on the ground (tube centerline at z = minor)."""
    verts = []
    for i in range(n_major):
        u = 2 * np.pi * i / n_major
        for j in range(n_minor):
            v = 2 * np.pi * j / n_minor
            s = major + minor * np.cos(v)
            verts.append([s * np.cos(u), s * np.sin(u), minor + minor * np.sin(v)])
    verts = np.array(verts)

    def vid(i, j):
        return (i % n_major) * n_minor + (j % n_minor)

    quads = []
    for i in range(n_major):
        for j in range(n_minor):
            quads.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return TriangleMesh(verts, np.array(_quads_to_tris(quads)))


def make_pebble(radius: float = 0.045, bump: float = 0.18, n_lat: int = 28,
                n_lon: int = 40) -> TriangleMesh:
    """Smooth bumpy blob (radially deformed sphere) resting on the ground."""
    base = make_sphere(radius, n_lat, n_lon)
    center = np.array([0.0, 0.0, radius])
    d = base.vertices - center
    r = np.linalg.norm(d, axis=1)
    theta = np.arccos(np.clip(d[:, 2] / np.where(r > 0, r, 1.0), -1, 1))
    phi = np.arctan2(d[:, 1], d[:, 0])
    scale = 1.0 + bump * (0.6 * np.sin(2 * theta) * np.cos(3 * phi)
                          + 0.4 * np.cos(3 * theta) * np.sin(2 * phi))
    verts = center + d * scale[:, None]
    verts[:, 2] -= verts[:, 2].min()  # rest on the ground
    return TriangleMesh(verts, base.faces)


TEST_OBJECTS = {
    "sphere": lambda: make_sphere(0.05),
    "box": lambda: make_box(0.06, 0.04, 0.02),
    "cylinder": lambda: make_cylinder(0.03, 0.08),
    "lowbox": lambda: make_box(0.08, 0.06, 0.01),
    "lbracket": lambda: make_l_bracket(),
    "torus": lambda: make_torus(),
}
