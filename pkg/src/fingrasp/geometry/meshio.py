"""Triangle-mesh and point-cloud file I/O (ASCII OBJ, ASCII/binary PLY).

Parse errors carry the failing line (text formats) or byte offset (binary
PLY) so the CLI can point users at the corruption.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import MeshFormatError

_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (V, 3) float
    faces: np.ndarray     # (F, 3) int

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        f = np.ascontiguousarray(self.faces, dtype=np.int64)
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)


def load_mesh(path) -> TriangleMesh:
    """Load a triangle mesh from an ASCII OBJ or an ASCII/binary PLY file."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".obj":
        return _load_obj(path)
    if suffix == ".ply":
        vertices, _, faces = _load_ply(path)
        if faces is None or len(faces) == 0:
            raise MeshFormatError(path, "PLY contains no faces; expected a triangle mesh")
        return TriangleMesh(vertices, faces)
    raise MeshFormatError(path, f"unsupported mesh format {suffix!r} (expected .obj or .ply)")


def load_point_cloud(path):
    """Load PLY vertices; returns ``(points, normals_or_None)``."""
    path = Path(path)
    if path.suffix.lower() != ".ply":
        raise MeshFormatError(path, "point clouds must be PLY files")
    vertices, normals, _ = _load_ply(path)
    return vertices, normals


def load_ply(path):
    """Load a PLY file; returns ``(points, normals_or_None, faces_or_None)``."""
    return _load_ply(Path(path))


def save_mesh_obj(path, mesh: TriangleMesh) -> None:
    """Write an ASCII OBJ triangle mesh."""
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n")


def save_mesh_ply(path, mesh: TriangleMesh, binary: bool = False) -> None:
    """Write a triangle mesh as ASCII or binary little-endian PLY."""
    v, f = mesh.vertices, mesh.faces
    fmt = "binary_little_endian" if binary else "ascii"
    header = (
        f"ply\nformat {fmt} 1.0\n"
        f"element vertex {len(v)}\n"
        "property float x\nproperty float y\nproperty float z\n"
        f"element face {len(f)}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    )
    path = Path(path)
    if binary:
        with path.open("wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(v.astype("<f4").tobytes())
            for tri in f:
                fh.write(struct.pack("<B3i", 3, int(tri[0]), int(tri[1]), int(tri[2])))
    else:
        rows = [f"{x:.9g} {y:.9g} {z:.9g}" for x, y, z in v]
        rows += [f"3 {a} {b} {c}" for a, b, c in f]
        path.write_text(header + "\n".join(rows) + "\n")


def save_point_cloud_ply(path, points: np.ndarray, normals: np.ndarray = None) -> None:
    """Write an ASCII PLY point cloud, with normals when given."""
    points = np.asarray(points, dtype=float)
    lines = ["ply", "format ascii 1.0", f"element vertex {len(points)}"]
    lines += ["property float x", "property float y", "property float z"]
    if normals is not None:
        lines += ["property float nx", "property float ny", "property float nz"]
    lines.append("end_header")
    rows = points if normals is None else np.hstack([points, np.asarray(normals, float)])
    body = "\n".join(" ".join(f"{v:.9g}" for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n" + body + "\n")


# ---------------------------------------------------------------------------
# OBJ
# ---------------------------------------------------------------------------

def _load_obj(path: Path) -> TriangleMesh:
    vertices = []
    faces = []
    try:
        text = path.read_text()
    except OSError as exc:
        raise MeshFormatError(path, str(exc))
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MeshFormatError(path, "vertex needs 3 coordinates", line=lineno)
            try:
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError:
                raise MeshFormatError(path, f"bad vertex coordinate in {line!r}", line=lineno)
        elif tag == "f":
            if len(parts) < 4:
                raise MeshFormatError(path, "face needs at least 3 vertices", line=lineno)
            idx = []
            for tok in parts[1:]:
                head = tok.split("/")[0]
                try:
                    i = int(head)
                except ValueError:
                    raise MeshFormatError(path, f"bad face index {tok!r}", line=lineno)
                # OBJ is 1-based; negative indices count back from the end.
                i = i - 1 if i > 0 else len(vertices) + i
                if i < 0 or i >= len(vertices):
                    raise MeshFormatError(path, f"face index {tok!r} out of range", line=lineno)
                idx.append(i)
            for k in range(1, len(idx) - 1):  # fan-triangulate polygons
                faces.append([idx[0], idx[k], idx[k + 1]])
        # other keywords (vn, vt, usemtl, o, g, s, mtllib) are ignored
    if not vertices:
        raise MeshFormatError(path, "no vertices found")
    if not faces:
        raise MeshFormatError(path, "no faces found")
    return TriangleMesh(np.array(vertices), np.array(faces))


# ---------------------------------------------------------------------------
# PLY
# ---------------------------------------------------------------------------

class _PlyElement:
    def __init__(self, name, count):
        self.name = name
        self.count = count
        self.properties = []  # (name, dtype_code) or ("list", count_code, index_code, name)


def _parse_ply_header(path: Path, buf: bytes):
    end = buf.find(b"end_header")
    if not buf.startswith(b"ply") or end < 0:
        raise MeshFormatError(path, "not a PLY file (missing header)", offset=0)
    nl = buf.find(b"\n", end)
    if nl < 0:
        raise MeshFormatError(path, "truncated header", offset=len(buf))
    header = buf[:nl].decode("ascii", errors="replace")
    data_offset = nl + 1

    fmt = None
    elements = []
    for lineno, line in enumerate(header.splitlines(), start=1):
        parts = line.strip().split()
        if not parts or parts[0] in ("ply", "comment", "obj_info", "end_header"):
            continue
        if parts[0] == "format":
            if len(parts) < 2 or parts[1] not in (
                "ascii", "binary_little_endian", "binary_big_endian"
            ):
                raise MeshFormatError(path, f"unsupported PLY format line {line!r}", line=lineno)
            fmt = parts[1]
        elif parts[0] == "element":
            if len(parts) != 3:
                raise MeshFormatError(path, f"bad element line {line!r}", line=lineno)
            try:
                elements.append(_PlyElement(parts[1], int(parts[2])))
            except ValueError:
                raise MeshFormatError(path, f"bad element count in {line!r}", line=lineno)
        elif parts[0] == "property":
            if not elements:
                raise MeshFormatError(path, "property before any element", line=lineno)
            if parts[1] == "list":
                if len(parts) != 5 or parts[2] not in _PLY_TYPES or parts[3] not in _PLY_TYPES:
                    raise MeshFormatError(path, f"bad list property {line!r}", line=lineno)
                elements[-1].properties.append(
                    ("list", _PLY_TYPES[parts[2]], _PLY_TYPES[parts[3]], parts[4])
                )
            else:
                if len(parts) != 3 or parts[1] not in _PLY_TYPES:
                    raise MeshFormatError(path, f"bad property {line!r}", line=lineno)
                elements[-1].properties.append((parts[2], _PLY_TYPES[parts[1]]))
        else:
            raise MeshFormatError(path, f"unknown header keyword {parts[0]!r}", line=lineno)
    if fmt is None:
        raise MeshFormatError(path, "header has no format line")
    return fmt, elements, data_offset


def _load_ply(path: Path):
    """Returns (vertices, normals_or_None, faces_or_None)."""
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise MeshFormatError(path, str(exc))
    fmt, elements, offset = _parse_ply_header(path, buf)

    tables = {}
    if fmt == "ascii":
        tables, _ = _read_ply_ascii(path, buf, elements, offset)
    else:
        endian = "<" if fmt == "binary_little_endian" else ">"
        tables = _read_ply_binary(path, buf, elements, offset, endian)

    vertex = tables.get("vertex")
    if vertex is None:
        raise MeshFormatError(path, "PLY has no vertex element")
    cols, rows = vertex
    for want in ("x", "y", "z"):
        if want not in cols:
            raise MeshFormatError(path, f"vertex element lacks property {want!r}")
    pts = np.column_stack([rows[cols.index(c)] for c in ("x", "y", "z")])
    normals = None
    if all(c in cols for c in ("nx", "ny", "nz")):
        normals = np.column_stack([rows[cols.index(c)] for c in ("nx", "ny", "nz")])

    faces = None
    if "face" in tables:
        fcols, frows = tables["face"]
        list_name = next(
            (n for n in ("vertex_indices", "vertex_index") if n in fcols), None
        )
        if list_name is not None:
            tri = []
            for poly in frows[fcols.index(list_name)]:
                for k in range(1, len(poly) - 1):
                    tri.append([poly[0], poly[k], poly[k + 1]])
            faces = np.array(tri, dtype=np.int64) if tri else np.zeros((0, 3), np.int64)
            if faces.size and (faces.min() < 0 or faces.max() >= len(pts)):
                raise MeshFormatError(path, "face index out of range")
    return pts, normals, faces


def _read_ply_ascii(path: Path, buf: bytes, elements, offset):
    text = buf[offset:].decode("ascii", errors="replace")
    header_lines = buf[:offset].count(b"\n")
    lines = [ln for ln in text.splitlines()]
    cursor = 0

    def next_tokens():
        nonlocal cursor
        while cursor < len(lines):
            toks = lines[cursor].split()
            cursor += 1
            if toks:
                return toks, header_lines + cursor
        raise MeshFormatError(path, "unexpected end of data", line=header_lines + cursor)

    tables = {}
    for el in elements:
        names = []
        columns = []
        for p in el.properties:
            names.append(p[3] if p[0] == "list" else p[0])
            columns.append([])
        for _ in range(el.count):
            toks, lineno = next_tokens()
            pos = 0
            for ci, p in enumerate(el.properties):
                try:
                    if p[0] == "list":
                        n = int(toks[pos]); pos += 1
                        vals = [int(float(t)) for t in toks[pos:pos + n]]
                        if len(vals) != n:
                            raise IndexError
                        pos += n
                        columns[ci].append(vals)
                    else:
                        columns[ci].append(float(toks[pos])); pos += 1
                except (ValueError, IndexError):
                    raise MeshFormatError(
                        path, f"bad {el.name} row for property {names[ci]!r}", line=lineno
                    )
        cols = [np.array(c) if el.properties[i][0] != "list" else c
                for i, c in enumerate(columns)]
        tables[el.name] = (names, cols)
    return tables, cursor


def _read_ply_binary(path: Path, buf: bytes, elements, offset, endian):
    tables = {}
    pos = offset
    for el in elements:
        names = [p[3] if p[0] == "list" else p[0] for p in el.properties]
        if all(p[0] != "list" for p in el.properties):
            dtype = np.dtype([(f"c{i}", endian + p[1]) for i, p in enumerate(el.properties)])
            need = dtype.itemsize * el.count
            if pos + need > len(buf):
                raise MeshFormatError(
                    path, f"truncated {el.name} data (need {need} bytes)", offset=pos
                )
            rec = np.frombuffer(buf, dtype=dtype, count=el.count, offset=pos)
            pos += need
            cols = [rec[f"c{i}"].astype(float) for i in range(len(el.properties))]
            tables[el.name] = (names, cols)
            continue
        columns = [[] for _ in el.properties]
        for _ in range(el.count):
            for ci, p in enumerate(el.properties):
                try:
                    if p[0] == "list":
                        cnt_t, idx_t = endian + p[1], endian + p[2]
                        (n,) = struct.unpack_from(_struct_code(cnt_t), buf, pos)
                        pos += struct.calcsize(_struct_code(cnt_t))
                        item = _struct_code(idx_t)
                        size = struct.calcsize(item)
                        vals = list(struct.unpack_from(f"{endian}{n}{item[-1]}", buf, pos))
                        pos += n * size
                        columns[ci].append([int(v) for v in vals])
                    else:
                        code = _struct_code(endian + p[1])
                        (v,) = struct.unpack_from(code, buf, pos)
                        pos += struct.calcsize(code)
                        columns[ci].append(float(v))
                except struct.error:
                    raise MeshFormatError(
                        path, f"truncated {el.name} data for property {names[ci]!r}", offset=pos
                    )
        cols = [np.array(c) if el.properties[i][0] != "list" else c
                for i, c in enumerate(columns)]
        tables[el.name] = (names, cols)
    return tables


_STRUCT_CODES = {
    "i1": "b", "u1": "B", "i2": "h", "u2": "H", "i4": "i", "u4": "I", "f4": "f", "f8": "d",
}


def _struct_code(np_code: str) -> str:
    return np_code[0] + _STRUCT_CODES[np_code[1:]]
