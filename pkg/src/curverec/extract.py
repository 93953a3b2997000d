"""Zero level-set extraction and the geometric metrics built on it.

2D: marching squares emitting an unstitched segment soup (metrics and
plotting need no topology). 3D: marching cubes via scikit-image, with
shared vertices so closed surfaces come out watertight. Coordinates are
grid index units in both cases.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree
from skimage import measure

from . import grid

# segments per marching-squares case, as pairs of edge ids
# edges: 0 = (i,j)-(i+1,j), 1 = (i+1,j)-(i+1,j+1), 2 = (i+1,j+1)-(i,j+1),
#        3 = (i,j+1)-(i,j); corner bit k set when phi < 0 at corner k
_MS_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)],
    7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)],
    13: [(0, 1)], 14: [(3, 0)],
}
_EDGE_CORNERS = {0: (0, 1), 1: (1, 2), 2: (2, 3), 3: (3, 0)}
_CORNER_OFFSETS = np.array([(0, 0), (1, 0), (1, 1), (0, 1)], dtype=float)


def marching_squares(phi: np.ndarray) -> np.ndarray:
    """Extract the phi = 0 contour as an (n, 2, 2) array of segments.

    Linear interpolation along cell edges; the two ambiguous saddle
    cases are split according to the sign of the cell-center average.
    """
    if phi.ndim != 2:
        raise ValueError("marching_squares expects a 2D field")
    inside = phi < 0.0
    case = (inside[:-1, :-1].astype(np.int8)
            + 2 * inside[1:, :-1]
            + 4 * inside[1:, 1:]
            + 8 * inside[:-1, 1:])
    cells = np.argwhere((case != 0) & (case != 15))
    segments = []
    for i, j in cells:
        corners = (phi[i, j], phi[i + 1, j], phi[i + 1, j + 1], phi[i, j + 1])
        c = int(case[i, j])
        if c in (5, 10):
            center_inside = sum(corners) < 0.0
            if (c == 5) == center_inside:
                pairs = [(0, 1), (2, 3)]
            else:
                pairs = [(3, 0), (1, 2)]
        else:
            pairs = _MS_CASES[c]
        base = np.array((i, j), dtype=float)
        for ea, eb in pairs:
            pts = []
            for e in (ea, eb):
                a, b = _EDGE_CORNERS[e]
                va, vb = corners[a], corners[b]
                t = va / (va - vb)
                pts.append(base + _CORNER_OFFSETS[a]
                           + t * (_CORNER_OFFSETS[b] - _CORNER_OFFSETS[a]))
            segments.append(pts)
    if not segments:
        return np.zeros((0, 2, 2))
    return np.array(segments)


def marching_cubes(phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extract the phi = 0 isosurface as (vertices, triangles).

    Degenerate (area <= 1e-12) triangles are dropped.
    """
    if phi.ndim != 3:
        raise ValueError("marching_cubes expects a 3D field")
    if phi.min() >= 0.0 or phi.max() < 0.0:
        return np.zeros((0, 3)), np.zeros((0, 3), dtype=int)
    verts, faces, _normals, _vals = measure.marching_cubes(phi, level=0.0)
    areas = _triangle_areas(verts, faces)
    return verts, faces[areas > 1e-12]


def _triangle_areas(verts: np.ndarray, faces: np.ndarray) -> np.ndarray:
    if len(faces) == 0:
        return np.zeros(0)
    a = verts[faces[:, 1]] - verts[faces[:, 0]]
    b = verts[faces[:, 2]] - verts[faces[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(a, b), axis=1)


def mesh_area(verts: np.ndarray, faces: np.ndarray) -> float:
    return float(_triangle_areas(verts, faces).sum())


def mesh_is_watertight(faces: np.ndarray) -> bool:
    """True when every undirected edge is shared by exactly two triangles."""
    if len(faces) == 0:
        return False
    edges = np.concatenate([faces[:, (0, 1)], faces[:, (1, 2)], faces[:, (2, 0)]])
    edges = np.sort(edges, axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return bool(np.all(counts == 2))


def contour_length(segments: np.ndarray) -> float:
    if len(segments) == 0:
        return 0.0
    return float(np.linalg.norm(segments[:, 1] - segments[:, 0], axis=1).sum())


def contour_points(segments: np.ndarray, spacing: float = 0.25) -> np.ndarray:
    """Sample points along the segment soup at most `spacing` apart."""
    if len(segments) == 0:
        return np.zeros((0, 2))
    pts = []
    for p0, p1 in segments:
        n = max(1, int(np.ceil(np.linalg.norm(p1 - p0) / spacing)))
        t = np.linspace(0.0, 1.0, n + 1)[:, None]
        pts.append(p0 + t * (p1 - p0))
    return np.concatenate(pts)


def mesh_points(verts: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Vertices plus triangle centroids, a cheap dense mesh sample."""
    if len(faces) == 0:
        return verts.reshape(-1, 3)
    centroids = verts[faces].mean(axis=1)
    return np.concatenate([verts, centroids])


def geometry_points(geometry) -> np.ndarray:
    """Sample points from a contour (segments array) or a (verts, faces) mesh."""
    if isinstance(geometry, tuple):
        return mesh_points(*geometry)
    return contour_points(geometry)


def hausdorff_to_reference(geometry, reference: np.ndarray) -> float:
    """Symmetric Hausdorff distance between geometry samples and a cloud.

    Empty geometry reports +inf.
    """
    pts = geometry_points(geometry)
    if len(pts) == 0:
        return float("inf")
    reference = np.atleast_2d(np.asarray(reference, dtype=float))
    d_ab = cKDTree(reference).query(pts)[0].max()
    d_ba = cKDTree(pts).query(reference)[0].max()
    return float(max(d_ab, d_ba))


def interp_field(field: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Bilinear/trilinear interpolation of a grid field at point coordinates."""
    pts = np.atleast_2d(pts)
    ndim = field.ndim
    lo = np.clip(np.floor(pts).astype(int), 0,
                 np.array(field.shape) - 2)
    frac = pts - lo
    out = np.zeros(len(pts))
    for corner in range(2 ** ndim):
        bits = [(corner >> ax) & 1 for ax in range(ndim)]
        weight = np.ones(len(pts))
        idx = []
        for ax, bit in enumerate(bits):
            weight *= frac[:, ax] if bit else 1.0 - frac[:, ax]
            idx.append(lo[:, ax] + bit)
        out += weight * field[tuple(idx)]
    return out


def indent_depth(segments: np.ndarray, mouth_center: np.ndarray,
                 mouth_halfwidth: float, depth: float,
                 inward: np.ndarray) -> float:
    """How far contour samples reach into a wedge-shaped concavity.

    The wedge opens at `mouth_center` with half-width `mouth_halfwidth`,
    narrows linearly to a tip at distance `depth` along the unit
    direction `inward`, and is sampled with half a cell of slack so a
    contour hugging the wedge faces still counts. Returns the largest
    penetration distance, 0 when nothing enters.
    """
    pts = contour_points(segments)
    if len(pts) == 0:
        return 0.0
    rel = pts - mouth_center
    along = rel @ inward
    across = np.linalg.norm(rel - np.outer(along, inward), axis=1)
    local_halfwidth = mouth_halfwidth * (1.0 - along / depth)
    mask = (along >= 0.0) & (along <= depth) & (across <= local_halfwidth + 0.5)
    if not np.any(mask):
        return 0.0
    return float(along[mask].max())


def upsample2(phi: np.ndarray) -> np.ndarray:
    """Node-aligned 2x bilinear refinement of a 2D field, (M,N) -> (2M-1,2N-1)."""
    if phi.ndim != 2:
        raise ValueError("upsample2 expects a 2D field")
    m, n = phi.shape
    out = np.zeros((2 * m - 1, 2 * n - 1))
    out[::2, ::2] = phi
    out[1::2, ::2] = 0.5 * (phi[:-1, :] + phi[1:, :])
    out[::2, 1::2] = 0.5 * (phi[:, :-1] + phi[:, 1:])
    out[1::2, 1::2] = 0.25 * (phi[:-1, :-1] + phi[1:, :-1]
                              + phi[:-1, 1:] + phi[1:, 1:])
    return out


def write_contour(path, segments: np.ndarray) -> None:
    """CSV with one x1,y1,x2,y2 line per segment."""
    with open(path, "w") as fh:
        for (x1, y1), (x2, y2) in segments:
            fh.write(f"{x1!r},{y1!r},{x2!r},{y2!r}\n")


def read_contour(path) -> np.ndarray:
    rows = np.loadtxt(path, delimiter=",", ndmin=2)
    if rows.size == 0:
        return np.zeros((0, 2, 2))
    return rows.reshape(-1, 2, 2)


def write_mesh(path, verts: np.ndarray, faces: np.ndarray) -> None:
    """Wavefront-style text mesh: v lines then 1-based f lines."""
    with open(path, "w") as fh:
        for x, y, z in verts:
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for i, j, k in faces:
            fh.write(f"f {i + 1} {j + 1} {k + 1}\n")


def read_mesh(path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(t) for t in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(t) - 1 for t in parts[1:4]])
    return np.array(verts, dtype=float), np.array(faces, dtype=int)
