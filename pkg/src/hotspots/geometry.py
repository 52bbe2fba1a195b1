"""Convex polygonal domains: validation, diameter, inradius, farthest-boundary
distance, minimum enclosing circle, and the critical-point exclusion region.

All tolerances are relative to the domain's length scale so domains of any
size behave identically.  The boundary supremum of ``|p - y|`` over a polygon
is attained at a vertex (on each edge the distance to a fixed point is a
convex function of the parameter), so ``farthest_boundary_distance`` only
inspects vertices.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateArea,
    InternalInvariantViolation,
    NotConvex,
    TooFewVertices,
)

RAY_COUNT = 720
REGION_TOL_REL = 1e-6


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """CCW convex polygon; construct through :func:`validate`.

    ``scale`` is the bounding-box diagonal, used to make tolerances relative.
    """

    vertices: np.ndarray  # (n, 2)
    area: float
    centroid: Point
    scale: float

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edge_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """Outward unit normals and offsets: inside iff normals @ p <= offsets."""
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        normals = np.column_stack([e[:, 1], -e[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        offsets = np.einsum("ij,ij->i", normals, v)
        return normals, offsets


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float


@dataclass(frozen=True, eq=False)
class ExclusionRegion:
    """Sublevel set {p in domain : F(p) <= threshold} of the farthest-boundary
    distance F, sampled as a closed 720-point polyline.

    ``binding`` records, per boundary sample, whether the F-threshold
    ('farthest') or the domain boundary ('domain') stopped the ray; the
    |F - threshold| <= tolerance guarantee applies to 'farthest' samples.
    """

    threshold: float
    boundary: np.ndarray  # (RAY_COUNT, 2), CCW
    seed: Point
    tolerance: float
    binding: tuple[str, ...] = field(repr=False, default=())


def _as_xy(p) -> np.ndarray:
    if isinstance(p, Point):
        return np.array([p.x, p.y])
    return np.asarray(p, dtype=float)


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def validate(raw_vertices) -> ConvexPolygon:
    """Normalize a vertex list into a CCW convex polygon.

    CW input is reversed; consecutive duplicates and collinear vertices are
    dropped.  Raises TooFewVertices / DegenerateArea / NotConvex.
    """
    pts = np.array([_as_xy(p) for p in raw_vertices], dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("vertices must be 2-D points")
    if len(pts) < 3:
        raise TooFewVertices(f"need >= 3 vertices, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertex coordinates must be finite")

    span = pts.max(axis=0) - pts.min(axis=0)
    scale = float(math.hypot(span[0], span[1]))
    if scale == 0.0:
        raise DegenerateArea("all vertices coincide")

    if _shoelace(pts) < 0.0:
        pts = pts[::-1].copy()

    # Drop duplicates and collinear vertices until stable.
    cross_tol = 1e-12 * scale * scale
    dist_tol = 1e-9 * scale
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        keep = np.ones(len(pts), dtype=bool)
        m = len(pts)
        for i in range(m):
            prev = pts[(i - 1) % m]
            cur = pts[i]
            nxt = pts[(i + 1) % m]
            if math.hypot(*(nxt - cur)) <= dist_tol:
                keep[i] = False
                changed = True
                break
            cross = (cur[0] - prev[0]) * (nxt[1] - cur[1]) - (
                cur[1] - prev[1]
            ) * (nxt[0] - cur[0])
            if abs(cross) <= cross_tol:
                keep[i] = False
                changed = True
                break
        pts = pts[keep]

    if len(pts) < 3:
        raise DegenerateArea("fewer than 3 vertices after cleanup")

    area = _shoelace(pts)
    if area <= 1e-12 * scale * scale:
        raise DegenerateArea(f"area {area:g} below degeneracy threshold")

    nxt = np.roll(pts, -1, axis=0)
    nxt2 = np.roll(pts, -2, axis=0)
    e1 = nxt - pts
    e2 = nxt2 - nxt
    crosses = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    if np.any(crosses < -cross_tol):
        raise NotConvex("negative cross product after orientation fix")

    cx_num = np.sum((pts[:, 0] + nxt[:, 0]) * (pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))
    cy_num = np.sum((pts[:, 1] + nxt[:, 1]) * (pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))
    centroid = Point(float(cx_num / (6.0 * area)), float(cy_num / (6.0 * area)))
    return ConvexPolygon(vertices=pts, area=float(area), centroid=centroid, scale=scale)


# --- diameter (rotating calipers) -------------------------------------------

def _hulls(points: list[tuple[float, float]]):
    # Upper/lower hulls by x (Andrew's monotone chain).
    def orient(p, q, r):
        return (q[1] - p[1]) * (r[0] - p[0]) - (q[0] - p[0]) * (r[1] - p[1])

    pts = sorted(points)
    upper: list[tuple[float, float]] = []
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(upper) > 1 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        while len(lower) > 1 and orient(lower[-2], lower[-1], p) >= 0:
            lower.pop()
        upper.append(p)
        lower.append(p)
    return upper, lower


def _antipodal_pairs(points: list[tuple[float, float]]):
    upper, lower = _hulls(points)
    i = 0
    j = len(lower) - 1
    while i < len(upper) - 1 or j > 0:
        yield upper[i], lower[j]
        if i == len(upper) - 1:
            j -= 1
        elif j == 0:
            i += 1
        elif (upper[i + 1][1] - upper[i][1]) * (lower[j][0] - lower[j - 1][0]) > (
            lower[j][1] - lower[j - 1][1]
        ) * (upper[i + 1][0] - upper[i][0]):
            i += 1
        else:
            j -= 1


def diameter(poly: ConvexPolygon) -> tuple[float, tuple[Point, Point]]:
    """Max vertex-pair distance via rotating calipers; first attaining pair wins."""
    pts = [(float(x), float(y)) for x, y in poly.vertices]
    best = -1.0
    best_pair = (pts[0], pts[0])
    for p, q in _antipodal_pairs(pts):
        d_sq = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
        if d_sq > best:
            best = d_sq
            best_pair = (p, q)
    return math.sqrt(best), (Point(*best_pair[0]), Point(*best_pair[1]))


# --- inradius (Chebyshev center) ---------------------------------------------

def inradius(poly: ConvexPolygon) -> tuple[float, Point]:
    """Largest inscribed circle: maximize rho s.t. n_i.c + rho <= n_i.v_i."""
    normals, offsets = poly.edge_normals()
    m = len(normals)
    a_ub = np.column_stack([normals, np.ones(m)])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:
        raise InternalInvariantViolation(f"Chebyshev LP failed: {res.message}")
    cx, cy, rho = res.x
    return float(rho), Point(float(cx), float(cy))


def farthest_boundary_distance(poly: ConvexPolygon, p) -> float:
    """F(p) = max over boundary of |p - y|; for polygons the max sits at a vertex."""
    q = _as_xy(p)
    d = poly.vertices - q
    return math.sqrt(float(np.max(d[:, 0] ** 2 + d[:, 1] ** 2)))


# --- minimum enclosing circle (Welzl) ----------------------------------------

_MEC_EPS = 1e-14


def _circle_from_two(p, q):
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    r = max(math.hypot(cx - p[0], cy - p[1]), math.hypot(cx - q[0], cy - q[1]))
    return cx, cy, r


def _circle_from_three(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    rad = max(
        math.hypot(ux - ax, uy - ay),
        math.hypot(ux - bx, uy - by),
        math.hypot(ux - cx, uy - cy),
    )
    return ux, uy, rad


def _in_circle(c, p, scale) -> bool:
    return math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] + _MEC_EPS * scale


def min_enclosing_circle(poly: ConvexPolygon) -> Circle:
    """Welzl's move-to-front algorithm with a fixed shuffle seed (deterministic)."""
    pts = [(float(x), float(y)) for x, y in poly.vertices]
    scale = poly.scale
    shuffled = list(pts)
    random.Random(1729).shuffle(shuffled)

    c = None
    for i, p in enumerate(shuffled):
        if c is not None and _in_circle(c, p, scale):
            continue
        c = (p[0], p[1], 0.0)
        for j, q in enumerate(shuffled[: i + 1]):
            if _in_circle(c, q, scale):
                continue
            if c[2] == 0.0:
                c = _circle_from_two(p, q)
                continue
            c2 = _circle_from_two(p, q)
            left = None
            right = None
            px, py = p
            qx, qy = q
            for s in shuffled[: j + 1]:
                if _in_circle(c2, s, scale):
                    continue
                cross = (qx - px) * (s[1] - py) - (qy - py) * (s[0] - px)
                cand = _circle_from_three(p, q, s)
                if cand is None:
                    continue
                cand_cross = (qx - px) * (cand[1] - py) - (qy - py) * (cand[0] - px)
                if cross > 0.0 and (left is None or cand_cross > (qx - px) * (left[1] - py) - (qy - py) * (left[0] - px)):
                    left = cand
                elif cross < 0.0 and (right is None or cand_cross < (qx - px) * (right[1] - py) - (qy - py) * (right[0] - px)):
                    right = cand
            if left is None and right is None:
                c = c2
            elif left is None:
                c = right
            elif right is None:
                c = left
            else:
                c = left if left[2] <= right[2] else right
    return Circle(Point(c[0], c[1]), c[2])


# --- containment and the exclusion region ------------------------------------

def contains(poly: ConvexPolygon, p) -> bool:
    """Closed-region membership with a 1e-12*scale boundary band."""
    q = _as_xy(p)
    normals, offsets = poly.edge_normals()
    return bool(np.all(normals @ q <= offsets + 1e-12 * poly.scale))


def exclusion_region(poly: ConvexPolygon, ratio: float) -> ExclusionRegion:
    """Extract {p in domain : F(p) <= ratio * diam} as a 720-ray polyline.

    The sublevel set is an intersection of disks with the domain, hence
    convex; rays from the min-enclosing-circle center (always a member by
    Jung's theorem for ratio >= 1/sqrt(3)) cross its boundary exactly once,
    so per-ray bisection is exhaustive.
    """
    if not 0.5 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0.5, 1), got {ratio}")
    d, _ = diameter(poly)
    threshold = ratio * d
    tol = REGION_TOL_REL * d
    seed = min_enclosing_circle(poly).center
    seed_xy = seed.as_array()

    normals, offsets = poly.edge_normals()
    verts = poly.vertices
    inside_tol = 1e-12 * poly.scale

    def member(q: np.ndarray) -> bool:
        if np.any(normals @ q > offsets + inside_tol):
            return False
        dx = verts[:, 0] - q[0]
        dy = verts[:, 1] - q[1]
        return math.sqrt(float(np.max(dx * dx + dy * dy))) <= threshold

    if not member(seed_xy):
        raise InternalInvariantViolation("min-enclosing-circle center not a member")

    boundary = np.empty((RAY_COUNT, 2))
    binding: list[str] = []
    for i in range(RAY_COUNT):
        theta = 2.0 * math.pi * i / RAY_COUNT
        direction = np.array([math.cos(theta), math.sin(theta)])
        lo, hi = 0.0, 2.0 * d
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if member(seed_xy + mid * direction):
                lo = mid
            else:
                hi = mid
        q = seed_xy + lo * direction
        boundary[i] = q
        f_q = farthest_boundary_distance(poly, q)
        binding.append("farthest" if abs(f_q - threshold) <= 2.0 * tol else "domain")

    return ExclusionRegion(
        threshold=threshold,
        boundary=boundary,
        seed=seed,
        tolerance=tol,
        binding=tuple(binding),
    )


def region_member(poly: ConvexPolygon, region: ExclusionRegion, p) -> bool:
    """Direct predicate the region samples: F(p) <= threshold and p in domain."""
    return contains(poly, p) and farthest_boundary_distance(poly, p) <= region.threshold


def polyline_contains(boundary: np.ndarray, p) -> bool:
    """Membership in the closed polyline (CCW convex fan from its centroid)."""
    q = _as_xy(p)
    a = boundary
    b = np.roll(boundary, -1, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (q[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (q[0] - a[:, 0])
    return bool(np.all(cross >= -1e-12 * (np.abs(cross).max() + 1.0)))
