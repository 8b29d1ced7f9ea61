"""Triangle meshes: OFF input/output and icosphere generation."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from .errors import InvalidInputError, MeshError

MIN_AREA = 1e-12


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    vertices: np.ndarray  # (V, 3) float64, meters
    triangles: np.ndarray  # (N, 3) int64

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must have shape (V, 3)")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshError("triangles must have shape (N, 3)")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            bad = int(np.flatnonzero((t < 0).any(axis=1) | (t >= len(v)).any(axis=1))[0])
            raise MeshError("vertex index out of range", triangle=bad)
        areas = triangle_areas(v, t)
        small = np.flatnonzero(~(areas > MIN_AREA))
        if small.size:
            raise MeshError(f"degenerate triangle (area {areas[small[0]]:.3e} m^2)", triangle=int(small[0]))
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)

    @property
    def N(self):
        return len(self.triangles)

    def corners(self):
        """(N, 3, 3) array of triangle corner coordinates."""
        return self.vertices[self.triangles]

    def areas(self):
        return triangle_areas(self.vertices, self.triangles)


def triangle_areas(vertices, triangles):
    p = vertices[triangles]
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def load_mesh(path):
    """Read a triangle mesh from an OFF file.

    Blank lines and ``#`` comments are ignored.  Only triangular faces are
    accepted.
    """
    with open(path) as fh:
        lines = [(no, line.split("#", 1)[0].split()) for no, line in enumerate(fh, start=1)]
    lines = [(no, tok) for no, tok in lines if tok]
    if not lines:
        raise MeshError("empty file", line=1)
    it = iter(lines)

    no, tok = next(it)
    if tok[0] != "OFF":
        raise MeshError(f"expected 'OFF' header, got {tok[0]!r}", line=no)
    counts = tok[1:]
    if not counts:
        try:
            no, counts = next(it)
        except StopIteration:
            raise MeshError("missing counts line", line=no) from None
    try:
        n_vert, n_face = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise MeshError("bad counts line", line=no) from None
    if n_vert < 0 or n_face < 0:
        raise MeshError("negative counts", line=no)

    vertices = np.empty((n_vert, 3))
    for i in range(n_vert):
        try:
            no, tok = next(it)
        except StopIteration:
            raise MeshError(f"expected {n_vert} vertices, found {i}", line=no) from None
        if len(tok) < 3:
            raise MeshError("vertex needs three coordinates", line=no)
        try:
            vertices[i] = [float(x) for x in tok[:3]]
        except ValueError:
            raise MeshError("bad vertex coordinates", line=no) from None

    faces = np.empty((n_face, 3), dtype=np.int64)
    for i in range(n_face):
        try:
            no, tok = next(it)
        except StopIteration:
            raise MeshError(f"expected {n_face} faces, found {i}", line=no) from None
        try:
            nv = int(tok[0])
            idx = [int(x) for x in tok[1 : nv + 1]]
        except (ValueError, IndexError):
            raise MeshError("bad face line", line=no) from None
        if nv != 3:
            raise MeshError(f"unsupported polygon with {nv} vertices; only triangles are allowed", line=no)
        if len(idx) != 3:
            raise MeshError("face line lists fewer than 3 indices", line=no)
        faces[i] = idx

    return TriangleMesh(vertices, faces)


def save_mesh(mesh, path):
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(mesh.vertices)} {mesh.N} 0\n")
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        for a, b, c in mesh.triangles.tolist():
            fh.write(f"3 {a} {b} {c}\n")


def _icosahedron():
    p = (1.0 + 5**0.5) / 2.0
    verts = np.array(
        [
            [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
            [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
            [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return verts / np.linalg.norm(verts, axis=1)[:, None], faces


def _subdivide(verts, faces):
    verts = list(map(tuple, verts))
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            m = 0.5 * (np.asarray(verts[i]) + np.asarray(verts[j]))
            verts.append(tuple(m / np.linalg.norm(m)))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in faces.tolist():
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        out += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
    return np.array(verts), np.array(out, dtype=np.int64)


def generate_sphere_mesh(radius, subdivisions, center=(0.0, 0.0, 0.0)):
    """Icosphere: 20 * 4**subdivisions triangles with every vertex on the sphere."""
    if not radius > 0:
        raise InvalidInputError("radius must be > 0")
    if int(subdivisions) != subdivisions or not 0 <= subdivisions <= 6:
        raise InvalidInputError("subdivisions must be an integer in [0, 6]")
    v, f = _icosahedron()
    for _ in range(int(subdivisions)):
        v, f = _subdivide(v, f)
    v = v / np.linalg.norm(v, axis=1)[:, None]
    return TriangleMesh(v * radius + np.asarray(center, dtype=np.float64), f)


def mesh_diameter(mesh):
    """Largest distance between any two vertices."""
    pts = mesh.vertices
    try:
        pts = pts[ConvexHull(pts).vertices]
    except (QhullError, ValueError):
        pass
    return float(pdist(pts).max()) if len(pts) > 1 else 0.0
