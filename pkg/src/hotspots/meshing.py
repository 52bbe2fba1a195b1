"""Quasi-uniform triangle meshes of convex polygons for P1 elements.

Convexity is what keeps this simple: the Delaunay triangulation of boundary
samples plus interior points tiles the polygon exactly, so no constrained
triangulation is needed.  Interior points start on a hexagonal lattice with
h/2 clearance from the boundary and are relaxed by barycentric smoothing
(boundary samples never move); each smoothing pass re-triangulates, so the
final mesh is the Delaunay triangulation of its final point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from .errors import InvalidH, PointOutsideMesh, QualityFailure
from .geometry import ConvexPolygon, diameter

MIN_ANGLE_DEG = 20.0
SMOOTHING_PASSES = 10
QUALITY_RETRIES = 3


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Conforming triangulation of a convex polygon.

    ``boundary_edges`` lists vertex index pairs forming one closed CCW loop;
    ``boundary_normals`` are the outward unit normals and
    ``boundary_edge_source`` the polygon edge each mesh edge lies on.
    """

    vertices: np.ndarray            # (n, 2)
    triangles: np.ndarray           # (m, 3) int, CCW
    boundary_edges: np.ndarray      # (b, 2) int, ordered CCW loop
    boundary_normals: np.ndarray    # (b, 2)
    boundary_edge_source: np.ndarray  # (b,) int
    h_max: float
    interior_mask: np.ndarray       # (n,) bool

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)


@dataclass(frozen=True)
class MeshQuality:
    min_angle: float  # degrees
    h_min: float
    h_max: float
    vertex_count: int
    triangle_count: int


def _signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                  - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _orient_ccw(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    flip = _signed_areas(vertices, triangles) < 0.0
    out = triangles.copy()
    out[flip, 1], out[flip, 2] = triangles[flip, 2], triangles[flip, 1]
    return out


def _edge_lengths(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    return np.column_stack([
        np.hypot(*(b - a).T),
        np.hypot(*(c - b).T),
        np.hypot(*(a - c).T),
    ])


def _min_angles_deg(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    ls = np.sort(_edge_lengths(vertices, triangles), axis=1)
    a, b, c = ls[:, 0], ls[:, 1], ls[:, 2]
    cos_min = np.clip((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0)
    return np.degrees(np.arccos(cos_min))


def _outward_normals(vertices: np.ndarray, loop: np.ndarray) -> np.ndarray:
    e = vertices[loop[:, 1]] - vertices[loop[:, 0]]
    n = np.column_stack([e[:, 1], -e[:, 0]])
    return n / np.linalg.norm(n, axis=1)[:, None]


def _source_edges(poly: ConvexPolygon, midpoints: np.ndarray) -> np.ndarray:
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    best = np.full(len(midpoints), -1)
    best_d = np.full(len(midpoints), np.inf)
    for i in range(len(v)):
        a, b = v[i], w[i]
        ab = b - a
        t = np.clip(((midpoints - a) @ ab) / (ab @ ab), 0.0, 1.0)
        proj = a + t[:, None] * ab
        d = np.hypot(*(midpoints - proj).T)
        better = d < best_d
        best[better] = i
        best_d[better] = d[better]
    return best


def _segment_distances(points: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """Min distance from each point to a set of segments (chunked broadcast)."""
    out = np.full(len(points), np.inf)
    ab = seg_b - seg_a
    denom = np.einsum("ij,ij->i", ab, ab)
    chunk = max(1, 2_000_000 // max(len(seg_a), 1))
    for lo in range(0, len(points), chunk):
        p = points[lo:lo + chunk]
        ap = p[:, None, :] - seg_a[None, :, :]
        t = np.clip(np.einsum("pej,ej->pe", ap, ab) / denom[None, :], 0.0, 1.0)
        d = ap - t[:, :, None] * ab[None, :, :]
        out[lo:lo + chunk] = np.sqrt(np.einsum("pej,pej->pe", d, d).min(axis=1))
    return out


def _assemble(poly: ConvexPolygon, points: np.ndarray, n_boundary: int) -> TriMesh:
    tri = Delaunay(points)
    if len(tri.coplanar):
        raise QualityFailure(f"{len(tri.coplanar)} input points omitted by Qhull")
    triangles = _orient_ccw(points, np.sort(tri.simplices, axis=1))
    # Exactly-collinear boundary chains make Qhull emit measure-zero slivers;
    # drop anything area-degenerate relative to its longest edge.
    areas = _signed_areas(points, triangles)
    longest = _edge_lengths(points, triangles).max(axis=1)
    triangles = triangles[areas > 1e-9 * longest * longest]
    used = np.zeros(len(points), dtype=bool)
    used[triangles.ravel()] = True
    if not used.all():
        raise QualityFailure("vertex lost to degenerate-sliver filtering")
    # Boundary samples were laid down CCW along the polygon, so the loop is
    # theirs by construction, independent of triangulation degeneracies.
    loop = np.column_stack([
        np.arange(n_boundary), (np.arange(n_boundary) + 1) % n_boundary
    ])
    normals = _outward_normals(points, loop)
    mids = 0.5 * (points[loop[:, 0]] + points[loop[:, 1]])
    interior = np.ones(len(points), dtype=bool)
    interior[:n_boundary] = False
    return TriMesh(
        vertices=points,
        triangles=triangles,
        boundary_edges=loop,
        boundary_normals=normals,
        boundary_edge_source=_source_edges(poly, mids),
        h_max=float(_edge_lengths(points, triangles).max()),
        interior_mask=interior,
    )


def _smooth(points: np.ndarray, movable: np.ndarray, passes: int) -> np.ndarray:
    pts = points.copy()
    for _ in range(passes):
        tri = Delaunay(pts)
        nbr_sum = np.zeros_like(pts)
        nbr_cnt = np.zeros(len(pts))
        indptr, indices = tri.vertex_neighbor_vertices
        for v in np.nonzero(movable)[0]:
            nbrs = indices[indptr[v]:indptr[v + 1]]
            nbr_sum[v] = pts[nbrs].sum(axis=0)
            nbr_cnt[v] = len(nbrs)
        upd = movable & (nbr_cnt > 0)
        pts[upd] = nbr_sum[upd] / nbr_cnt[upd, None]
    return pts


def generate(poly: ConvexPolygon, h: float) -> TriMesh:
    """Mesh the polygon at target edge length h; min angle >= 20 deg or
    QualityFailure after the circumcenter-insertion retry budget."""
    diam, _ = diameter(poly)
    if not (0.0 < h < diam / 4.0):
        raise InvalidH(f"need 0 < h < diam/4 = {diam / 4.0:g}, got {h}")

    # Boundary samples: spacing <= h on every polygon edge, vertices kept.
    verts = poly.vertices
    nxt = np.roll(verts, -1, axis=0)
    bnd: list[np.ndarray] = []
    for a, b in zip(verts, nxt):
        m = max(1, int(math.ceil(math.hypot(*(b - a)) / h)))
        for j in range(m):
            bnd.append(a + (j / m) * (b - a))
    boundary_pts = np.array(bnd)

    # Hexagonal interior lattice with h/2 clearance (conservative: distance
    # to edge lines underestimates distance to the boundary).
    normals, offsets = poly.edge_normals()
    xmin, ymin = verts.min(axis=0)
    xmax, ymax = verts.max(axis=0)
    rows = []
    dy = h * math.sqrt(3.0) / 2.0
    n_rows = int((ymax - ymin) / dy) + 1
    for r in range(n_rows + 1):
        y = ymin + r * dy
        x0 = xmin + (0.5 * h if r % 2 else 0.0)
        n_cols = int((xmax - x0) / h) + 1
        xs = x0 + h * np.arange(n_cols + 1)
        rows.append(np.column_stack([xs, np.full(len(xs), y)]))
    lattice = np.vstack(rows)
    depth = offsets[None, :] - lattice @ normals.T
    keep = depth.min(axis=1) >= 0.5 * h
    interior_pts = lattice[keep]

    points = np.vstack([boundary_pts, interior_pts]) if len(interior_pts) else boundary_pts
    movable = np.zeros(len(points), dtype=bool)
    movable[len(boundary_pts):] = True
    points = _smooth(points, movable, SMOOTHING_PASSES)
    mesh = _assemble(poly, points, len(boundary_pts))

    for _ in range(QUALITY_RETRIES):
        angles = _min_angles_deg(mesh.vertices, mesh.triangles)
        if angles.min() >= MIN_ANGLE_DEG:
            return mesh
        bad = mesh.triangles[angles < MIN_ANGLE_DEG]
        cc = _circumcenters(mesh.vertices, bad)
        # clearance proportional to the offending triangle, not the global h:
        # badly graded boundary layers need insertions near the boundary
        shortest = _edge_lengths(mesh.vertices, bad).min(axis=1)
        depth = (offsets[None, :] - cc @ normals.T).min(axis=1)
        cc = cc[depth >= 0.45 * shortest]
        if len(cc) == 0:
            break
        points = np.vstack([points, cc])
        movable = np.zeros(len(points), dtype=bool)
        movable[len(boundary_pts):] = True
        points = _smooth(points, movable, SMOOTHING_PASSES)
        mesh = _assemble(poly, points, len(boundary_pts))

    angles = _min_angles_deg(mesh.vertices, mesh.triangles)
    if angles.min() < MIN_ANGLE_DEG:
        raise QualityFailure(
            f"min angle {angles.min():.2f} deg < {MIN_ANGLE_DEG} after retries"
        )
    return mesh


def _circumcenters(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    d = 2.0 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
               - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    b2 = np.einsum("ij,ij->i", b - a, b - a)
    c2 = np.einsum("ij,ij->i", c - a, c - a)
    ux = (c[:, 1] - a[:, 1]) * b2 - (b[:, 1] - a[:, 1]) * c2
    uy = (b[:, 0] - a[:, 0]) * c2 - (c[:, 0] - a[:, 0]) * b2
    return a + np.column_stack([ux, uy]) / d[:, None]


def refine(mesh: TriMesh) -> TriMesh:
    """Split every triangle into 4 by edge midpoints; boundary midpoints stay
    on the (straight) polygon edges, h_max halves."""
    verts = mesh.vertices
    tris = mesh.triangles
    edge_ids: dict[tuple[int, int], int] = {}
    for tri in tris:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            if key not in edge_ids:
                edge_ids[key] = 0
    n0 = len(verts)
    ordered = sorted(edge_ids)
    for pos, key in enumerate(ordered):
        edge_ids[key] = n0 + pos
    new_verts = np.vstack([verts, [0.5 * (verts[a] + verts[b]) for a, b in ordered]])

    def mid(a: int, b: int) -> int:
        return edge_ids[(min(a, b), max(a, b))]

    new_tris = np.empty((4 * len(tris), 3), dtype=tris.dtype)
    for i, (a, b, c) in enumerate(tris):
        mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
        new_tris[4 * i + 0] = (a, mab, mca)
        new_tris[4 * i + 1] = (mab, b, mbc)
        new_tris[4 * i + 2] = (mca, mbc, c)
        new_tris[4 * i + 3] = (mab, mbc, mca)

    loops = []
    norms = []
    srcs = []
    for (a, b), nrm, src in zip(
        mesh.boundary_edges, mesh.boundary_normals, mesh.boundary_edge_source
    ):
        m = mid(a, b)
        loops.append((a, m))
        loops.append((m, b))
        norms.append(nrm)
        norms.append(nrm)
        srcs.append(src)
        srcs.append(src)

    interior = np.ones(len(new_verts), dtype=bool)
    interior[:n0] = mesh.interior_mask
    for a, b in loops:
        interior[a] = False
        interior[b] = False

    return TriMesh(
        vertices=new_verts,
        triangles=new_tris,
        boundary_edges=np.array(loops),
        boundary_normals=np.array(norms),
        boundary_edge_source=np.array(srcs),
        h_max=float(_edge_lengths(new_verts, new_tris).max()),
        interior_mask=interior,
    )


def quality(mesh: TriMesh) -> MeshQuality:
    ls = _edge_lengths(mesh.vertices, mesh.triangles)
    return MeshQuality(
        min_angle=float(_min_angles_deg(mesh.vertices, mesh.triangles).min()),
        h_min=float(ls.min()),
        h_max=float(ls.max()),
        vertex_count=mesh.vertex_count,
        triangle_count=mesh.triangle_count,
    )


def in_circumcircle(a, b, c, p, scale: float, tie: float = 1e-12) -> bool:
    """True iff p lies strictly inside the circumcircle of CCW triangle abc.

    Compensated determinant with an absolute tie band tie*scale^4; ties
    report False (not inside).
    """
    ax, ay = a[0] - p[0], a[1] - p[1]
    bx, by = b[0] - p[0], b[1] - p[1]
    cx, cy = c[0] - p[0], c[1] - p[1]
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    det = math.fsum([
        ax * by * c2, -ax * b2 * cy, -a2 * by * cx,
        ay * b2 * cx, -ay * bx * c2, a2 * bx * cy,
    ])
    if abs(det) <= tie * scale ** 4:
        return False
    return det > 0.0


def boundary_distances(mesh: TriMesh, points: np.ndarray) -> np.ndarray:
    """Distance from each point to the mesh boundary (== the polygon boundary)."""
    seg_a = mesh.vertices[mesh.boundary_edges[:, 0]]
    seg_b = mesh.vertices[mesh.boundary_edges[:, 1]]
    return _segment_distances(np.atleast_2d(points), seg_a, seg_b)


def interpolate(mesh: TriMesh, values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """P1 interpolation of vertex values at arbitrary points inside the mesh.

    Brute-force barycentric location (vectorized over triangles per query);
    fine at desk scale.  Raises PointOutsideMesh.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    tris = mesh.triangles
    a = mesh.vertices[tris[:, 0]]
    b = mesh.vertices[tris[:, 1]]
    c = mesh.vertices[tris[:, 2]]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    out = np.empty(len(pts))
    eps = 1e-12
    for i, p in enumerate(pts):
        l1 = ((b[:, 0] - p[0]) * (c[:, 1] - p[1]) - (b[:, 1] - p[1]) * (c[:, 0] - p[0])) / det
        l2 = ((c[:, 0] - p[0]) * (a[:, 1] - p[1]) - (c[:, 1] - p[1]) * (a[:, 0] - p[0])) / det
        l3 = 1.0 - l1 - l2
        worst = np.minimum(np.minimum(l1, l2), l3)
        hits = np.nonzero(worst >= -eps)[0]
        if len(hits):
            t = hits[0]
        else:
            # heal micro-gaps left by the degenerate-sliver filter
            t = int(np.argmax(worst))
            if worst[t] < -1e-6:
                raise PointOutsideMesh(f"point {p} is outside the mesh")
        out[i] = (
            l1[t] * values[tris[t, 0]]
            + l2[t] * values[tris[t, 1]]
            + l3[t] * values[tris[t, 2]]
        )
    return out


def dump_mesh(mesh: TriMesh, path) -> None:
    """Plain-text dump: header 'HSV-MESH 1', counts, coordinates, index triples."""
    lines = [f"HSV-MESH 1", f"{mesh.vertex_count} {mesh.triangle_count}"]
    for x, y in mesh.vertices:
        lines.append(f"{x!r} {y!r}")
    for i, j, k in mesh.triangles:
        lines.append(f"{i} {j} {k}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
