"""Synthetic point-cloud generators for the test geometries, plus noise
and sparsification. All generators are deterministic given the seed.

2D boundaries are sampled uniformly in arclength (polygon vertices are
always included so sharp corners survive sparse sampling); 3D surfaces
uniformly in area.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import grid

MARGIN_CELLS = 5.0

KINDS_2D = ("circle", "square", "square_indent", "boomerang", "triangle", "star")
KINDS_3D = ("sphere", "pyramid", "yoyo", "icecream")

# square-with-indent proportions, relative to the half-side
INDENT_HALFWIDTH = 0.35
INDENT_DEPTH = 0.7
BOOMERANG_OFFSET = 0.55
YOYO_NECK = 0.35
YOYO_SPACING = 0.8


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    center: tuple = ()
    scale: float = 20.0
    samples: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS_2D + KINDS_3D:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.samples < 1:
            raise ValueError("need at least one sample")

    @property
    def ndim(self) -> int:
        return 2 if self.kind in KINDS_2D else 3


def default_dims(ndim: int) -> tuple[int, ...]:
    return (100, 100) if ndim == 2 else (50, 50, 50)


def _resolve_center(spec: ShapeSpec, dims) -> np.ndarray:
    if spec.center:
        center = np.asarray(spec.center, dtype=float)
        if len(center) != len(dims):
            raise ValueError("center dimensionality does not match grid")
        return center
    return (np.array(dims, dtype=float) - 1.0) / 2.0


def _check_margin(points: np.ndarray, dims) -> np.ndarray:
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    limit = np.array(dims, dtype=float) - 1.0 - MARGIN_CELLS
    if np.any(lo < MARGIN_CELLS) or np.any(hi > limit):
        raise ValueError(
            f"shape spans [{lo}, {hi}] and violates the {MARGIN_CELLS}-cell "
            f"margin of grid {tuple(dims)}")
    return points


def generate(spec: ShapeSpec, dims=None) -> np.ndarray:
    """Sample the boundary of the requested shape as an (n, dim) cloud."""
    if dims is None:
        dims = default_dims(spec.ndim)
    dims = grid.check_dims(dims)
    if len(dims) != spec.ndim:
        raise ValueError(f"{spec.kind} is {spec.ndim}D but grid is {len(dims)}D")
    center = _resolve_center(spec, dims)
    maker = _MAKERS[spec.kind]
    points = maker(center, spec.scale, spec.samples,
                   np.random.default_rng(spec.seed))
    return _check_margin(points, dims)


def perturb(cloud: np.ndarray, sigma: float, keep: float, seed: int,
            dims=None) -> np.ndarray:
    """Gaussian-jitter every coordinate (std sigma), then keep a uniform
    random floor(keep * n) subset. Points jittered past the margin are
    clamped back and flagged with a warning."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if not 0.0 < keep <= 1.0:
        raise ValueError(f"keep must lie in (0, 1], got {keep}")
    cloud = np.atleast_2d(np.asarray(cloud, dtype=float))
    if dims is None:
        dims = default_dims(cloud.shape[1])
    dims = grid.check_dims(dims)
    rng = np.random.default_rng(seed)
    noisy = cloud + (rng.standard_normal(cloud.shape) * sigma if sigma > 0
                     else 0.0)
    lo = MARGIN_CELLS
    hi = np.array(dims, dtype=float) - 1.0 - MARGIN_CELLS
    clamped = np.clip(noisy, lo, hi)
    escaped = int(np.sum(np.any(clamped != noisy, axis=1)))
    if escaped:
        warnings.warn(f"{escaped} perturbed points clamped to the domain margin")
    count = int(np.floor(keep * len(clamped)))
    if count == len(clamped):
        return clamped
    chosen = np.sort(rng.choice(len(clamped), size=count, replace=False))
    return clamped[chosen]


def sparse_square_preset(center=(49.5, 49.5), scale: float = 25.0,
                         offset: float = 1.2) -> np.ndarray:
    """Extremely sparse square: exactly two points around each corner."""
    c = np.asarray(center, dtype=float)
    pts = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            corner = c + scale * np.array([sx, sy])
            # two samples straddling the corner along the two edges
            pts.append(corner - offset * np.array([sx, 0.0]))
            pts.append(corner - offset * np.array([0.0, sy]))
    return np.array(pts)


# ---- 2D boundary constructions ----

def _polyline_samples(vertices: np.ndarray, n: int) -> np.ndarray:
    """Vertices plus uniform-in-arclength fill along a closed polygon."""
    verts = np.asarray(vertices, dtype=float)
    closed = np.vstack([verts, verts[:1]])
    seg = np.diff(closed, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    total = seg_len.sum()
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    fill = max(0, n - len(verts))
    targets = (np.arange(fill) + 0.5) * total / max(fill, 1)
    pts = [verts]
    if fill:
        idx = np.searchsorted(cum, targets, side="right") - 1
        idx = np.clip(idx, 0, len(seg) - 1)
        t = (targets - cum[idx]) / seg_len[idx]
        pts.append(closed[idx] + t[:, None] * seg[idx])
    out = np.concatenate(pts)
    return out[:n] if len(out) > n else out

def _make_circle(center, scale, n, rng):
    theta = 2.0 * np.pi * np.arange(n) / n
    return center + scale * np.column_stack([np.cos(theta), np.sin(theta)])

def _make_square(center, scale, n, rng):
    h = scale
    verts = center + h * np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    return _polyline_samples(verts, n)

def _make_square_indent(center, scale, n, rng):
    h = scale
    w = INDENT_HALFWIDTH * h
    tip_y = -h + INDENT_DEPTH * h  # wedge tip reaches 70% of the way to center
    verts = np.array([
        center + (-h, -h),
        center + (-w, -h),
        center + (0.0, tip_y),
        center + (+w, -h),
        center + (+h, -h),
        center + (+h, +h),
        center + (-h, +h),
    ])
    return _polyline_samples(verts, n)

def _make_triangle(center, scale, n, rng):
    verts = np.array([
        center + (0.0, scale),
        center + (-scale, -0.7 * scale),
        center + (scale, -0.7 * scale),
    ])
    return _polyline_samples(verts, n)

def _make_star(center, scale, n, rng):
    angles = np.pi / 2.0 + 2.0 * np.pi * np.arange(10) / 10.0
    radii = np.where(np.arange(10) % 2 == 0, scale, 0.45 * scale)
    verts = center + radii[:, None] * np.column_stack(
        [np.cos(angles), np.sin(angles)])
    return _polyline_samples(verts, n)

def _make_boomerang(center, scale, n, rng):
    """Crescent: unit-radius outer arc minus an equal circle offset upward."""
    r = scale
    e = BOOMERANG_OFFSET * r
    cut = e / (2.0 * r)  # sin(theta) at the arc junctions
    phi0 = np.arcsin(cut)
    # outer arc: points of circle(center, r) outside the offset circle
    span_out = 2.0 * np.pi - (np.pi - 2.0 * phi0)
    span_in = np.pi - 2.0 * phi0
    n_out = max(2, int(round(n * span_out / (span_out + span_in))))
    n_in = max(2, n - n_out)
    t_out = phi0 - span_out * (np.arange(n_out) + 0.5) / n_out
    outer = center + r * np.column_stack([np.cos(t_out), np.sin(t_out)])
    t_in = -phi0 - span_in * (np.arange(n_in) + 0.5) / n_in
    inner = (center + (0.0, e)
             + r * np.column_stack([np.cos(t_in), np.sin(t_in)]))
    return np.concatenate([outer, inner])


# ---- 3D surface constructions ----

def _sphere_dirs(n, rng):
    z = rng.uniform(-1.0, 1.0, n)
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(t), s * np.sin(t), z])

def _make_sphere(center, scale, n, rng):
    return center + scale * _sphere_dirs(n, rng)

def _make_pyramid(center, scale, n, rng):
    a = scale                 # base half-side
    height = 1.2 * scale
    base_z = -height / 2.0
    apex = center + (0.0, 0.0, height / 2.0)
    base_area = 4.0 * a * a
    side_area = a * np.sqrt(height ** 2 + a ** 2)  # per face
    areas = np.array([base_area] + [side_area] * 4)
    counts = np.maximum(1, np.round(n * areas / areas.sum()).astype(int))
    pts = [center + np.column_stack([
        rng.uniform(-a, a, counts[0]), rng.uniform(-a, a, counts[0]),
        np.full(counts[0], base_z)])]
    corners = [(-a, -a), (a, -a), (a, a), (-a, a)]
    for f in range(4):
        p0 = center + (*corners[f], base_z)
        p1 = center + (*corners[(f + 1) % 4], base_z)
        u = np.sqrt(rng.uniform(0.0, 1.0, counts[1 + f]))
        v = rng.uniform(0.0, 1.0, counts[1 + f])
        # uniform in the triangle (apex, p0, p1)
        pts.append(apex + u[:, None] * ((p0 - apex)
                   + v[:, None] * (p1 - p0)))
    return np.concatenate(pts)[:n]

def _rejection_pool(parts, n, rng):
    """Concatenate kept primitive samples and thin uniformly to n points."""
    kept = np.concatenate([p for p in parts if len(p)])
    if len(kept) < n:
        raise ValueError("rejection sampling underflow; raise the oversample")
    take = np.sort(rng.choice(len(kept), size=n, replace=False))
    return kept[take]

def _make_yoyo(center, scale, n, rng):
    r = scale
    neck = YOYO_NECK * r
    off = YOYO_SPACING * r
    over = 6 * n
    c1 = center + (0.0, 0.0, off)
    c2 = center - (0.0, 0.0, off)
    sphere_area = 4.0 * np.pi * r * r
    cyl_area = 2.0 * np.pi * neck * (2.0 * off)
    total = 2.0 * sphere_area + cyl_area
    n_s = int(over * sphere_area / total)
    n_c = over - 2 * n_s

    def in_cyl(p):
        return ((np.linalg.norm(p[:, :2] - center[:2], axis=1) < neck)
                & (np.abs(p[:, 2] - center[2]) < off))

    def in_ball(p, c):
        return np.linalg.norm(p - c, axis=1) < r

    s1 = c1 + r * _sphere_dirs(n_s, rng)
    s1 = s1[~in_ball(s1, c2) & ~in_cyl(s1)]
    s2 = c2 + r * _sphere_dirs(n_s, rng)
    s2 = s2[~in_ball(s2, c1) & ~in_cyl(s2)]
    t = rng.uniform(0.0, 2.0 * np.pi, n_c)
    z = rng.uniform(-off, off, n_c)
    cyl = center + np.column_stack(
        [neck * np.cos(t), neck * np.sin(t), z])
    cyl = cyl[~in_ball(cyl, c1) & ~in_ball(cyl, c2)]
    return _rejection_pool([s1, s2, cyl], n, rng)

def _make_icecream(center, scale, n, rng):
    s = scale
    apex = center + (0.0, 0.0, -1.0 * s)
    ball_c = center + (0.0, 0.0, 0.1 * s)
    ball_r = 0.75 * s
    carve_c = center + (0.0, 0.0, 1.05 * s)
    carve_r = 0.55 * s
    cone_top_z = ball_c[2]
    cone_r = ball_r                       # cone opens to the ball equator
    cone_h = cone_top_z - apex[2]
    over = 6 * n

    def in_cone(p):
        t = (p[:, 2] - apex[2]) / cone_h
        rad = np.linalg.norm(p[:, :2] - center[:2], axis=1)
        return (t > 0.0) & (t < 1.0) & (rad < t * cone_r)

    def in_ball(p, c, r):
        return np.linalg.norm(p - c, axis=1) < r

    cone_area = np.pi * cone_r * np.sqrt(cone_h ** 2 + cone_r ** 2)
    ball_area = 4.0 * np.pi * ball_r ** 2
    carve_area = 4.0 * np.pi * carve_r ** 2
    total = cone_area + ball_area + carve_area
    n_cone = int(over * cone_area / total)
    n_ball = int(over * ball_area / total)
    n_carve = over - n_cone - n_ball

    t = np.sqrt(rng.uniform(0.0, 1.0, n_cone))
    ang = rng.uniform(0.0, 2.0 * np.pi, n_cone)
    cone = apex + np.column_stack([
        t * cone_r * np.cos(ang), t * cone_r * np.sin(ang), t * cone_h])
    cone = cone[~in_ball(cone, ball_c, ball_r)
                & ~in_ball(cone, carve_c, carve_r)]
    ball = ball_c + ball_r * _sphere_dirs(n_ball, rng)
    ball = ball[~in_cone(ball) & ~in_ball(ball, carve_c, carve_r)]
    carve = carve_c + carve_r * _sphere_dirs(n_carve, rng)
    carve = carve[in_ball(carve, ball_c, ball_r) | in_cone(carve)]
    return _rejection_pool([cone, ball, carve], n, rng)


_MAKERS = {
    "circle": _make_circle,
    "square": _make_square,
    "square_indent": _make_square_indent,
    "boomerang": _make_boomerang,
    "triangle": _make_triangle,
    "star": _make_star,
    "sphere": _make_sphere,
    "pyramid": _make_pyramid,
    "yoyo": _make_yoyo,
    "icecream": _make_icecream,
}
