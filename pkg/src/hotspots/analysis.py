"""Theorem-specific machinery: discrete critical points of the second Neumann
eigenfunction, the radial comparison field anchored at a candidate critical
point, nodal structure, boundary-flux signs, Rayleigh defects, the spectral
inequality suite, and the final verdict.

Critical points of the continuum eigenfunction are approximated by
combinatorial (Banchoff) critical vertices of the P1 interpolant: an interior
vertex is classified by the cyclic sign sequence of psi(neighbor)-psi(vertex)
around its link (0 alternations: extremum, >= 4: saddle, 2: regular).  Ties
within 1e-12*||psi||_inf are resolved by vertex index (simulation of
simplicity).  The verdict flags a critical vertex only if its
farthest-boundary distance undercuts the exclusion threshold by more than
2*h_max, absorbing the O(h) localization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import SpectralConstants, j1_eval, j0_eval
from .errors import (
    AnchorNotVertex,
    AnchorOnBoundary,
    CircleOutsideDomain,
    NotPositiveComponent,
    PointOutsideMesh,
)
from .fem import rayleigh
from .geometry import ConvexPolygon, Point, diameter, farthest_boundary_distance, inradius
from .meshing import TriMesh, boundary_distances, interpolate

TIE_REL = 1e-12
BRANCH_SAMPLES = 256
BRANCH_TIE_REL = 1e-10


@dataclass(frozen=True)
class CriticalPoint:
    vertex_id: int
    location: Point
    value: float
    kind: str  # 'max' | 'min' | 'saddle'
    alternations: int
    farthest_distance: float


@dataclass(frozen=True, eq=False)
class ComparisonField:
    """w(x) = psi(x0) * J0(sqrt(mu2) |x - x0|) - psi(x) on mesh vertices,
    with psi pre-negated so psi(x0) >= 0."""

    anchor: Point
    anchor_index: int
    mu2: float
    psi_at_anchor: float
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class NodalDecomposition:
    segments: np.ndarray          # (s, 2, 2) zero-crossing segments
    labels: np.ndarray            # (n,) component id per vertex, -1 if |w|<=tie
    component_signs: np.ndarray   # (c,) +1 or -1
    touches_boundary: np.ndarray  # (c,) bool
    positive_component_count: int


@dataclass(frozen=True)
class InequalityReport:
    kroger_margin: float              # 4 j0^2 - mu2 diam^2
    payne_weinberger_margin: float    # mu2 diam^2 - pi^2
    strong_kroger_holds: bool         # mu2 diam^2 <= j1^2
    szego_weinberger_margin: float    # pi jp11^2 / area - mu2
    polya_margin: float               # lambda1 - mu2
    hot_spots_certified: bool


@dataclass(frozen=True, eq=False)
class TheoremVerdict:
    threshold: float
    tolerance: float
    critical_points: tuple[CriticalPoint, ...]
    violations: tuple[CriticalPoint, ...]
    passed: bool


@dataclass(frozen=True)
class RayleighDefect:
    dirichlet_energy: float
    mass_energy: float
    boundary_term: float
    combo_rayleigh: float | None  # zero-mean two-component Rayleigh quotient


# --- critical points ----------------------------------------------------------

def _vertex_links(mesh: TriMesh) -> list[np.ndarray]:
    """Neighbors of each vertex sorted by angle around it (cyclic link order)."""
    n = mesh.vertex_count
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for a, b, c in mesh.triangles:
        nbrs[a].update((b, c))
        nbrs[b].update((a, c))
        nbrs[c].update((a, b))
    verts = mesh.vertices
    links = []
    for v in range(n):
        arr = np.fromiter(nbrs[v], dtype=int)
        d = verts[arr] - verts[v]
        links.append(arr[np.argsort(np.arctan2(d[:, 1], d[:, 0]), kind="stable")])
    return links


def _alternations(signs: np.ndarray) -> int:
    return int(np.sum(signs != np.roll(signs, 1)))


def find_critical_points(
    mesh: TriMesh, psi: np.ndarray, poly: ConvexPolygon
) -> list[CriticalPoint]:
    """Banchoff classification of every interior vertex of the P1 field."""
    tie = TIE_REL * float(np.abs(psi).max())
    links = _vertex_links(mesh)
    out = []
    for v in np.nonzero(mesh.interior_mask)[0]:
        link = links[int(v)]
        diffs = psi[link] - psi[v]
        signs = np.where(
            np.abs(diffs) <= tie, np.where(link > v, 1.0, -1.0), np.sign(diffs)
        )
        alt = _alternations(signs)
        if alt == 2:
            continue
        kind = "saddle" if alt >= 4 else ("min" if signs[0] > 0 else "max")
        loc = Point(float(mesh.vertices[v, 0]), float(mesh.vertices[v, 1]))
        out.append(
            CriticalPoint(
                vertex_id=int(v),
                location=loc,
                value=float(psi[v]),
                kind=kind,
                alternations=alt,
                farthest_distance=farthest_boundary_distance(poly, loc),
            )
        )
    return out


def theorem_check(
    points: list[CriticalPoint],
    poly: ConvexPolygon,
    constants: SpectralConstants,
    h_max: float,
) -> TheoremVerdict:
    """Flag critical points deeper inside the exclusion region than 2*h_max."""
    d, _ = diameter(poly)
    threshold = constants.c_excl * d
    tolerance = 2.0 * h_max
    violations = tuple(
        p for p in points if p.farthest_distance <= threshold - tolerance
    )
    return TheoremVerdict(
        threshold=threshold,
        tolerance=tolerance,
        critical_points=tuple(points),
        violations=violations,
        passed=not violations,
    )


# --- comparison field -----------------------------------------------------------

def build_comparison(
    mesh: TriMesh, psi: np.ndarray, mu2: float, x0: Point
) -> ComparisonField:
    """Radial Helmholtz comparison field anchored at the mesh vertex x0."""
    target = np.array([x0.x, x0.y])
    d = mesh.vertices - target
    dist = np.hypot(d[:, 0], d[:, 1])
    idx = int(np.argmin(dist))
    scale = 1.0 + float(np.abs(mesh.vertices).max())
    if dist[idx] > 1e-9 * scale:
        raise AnchorNotVertex(f"{x0} is not a mesh vertex (nearest at {dist[idx]:g})")
    psi = np.asarray(psi, dtype=float)
    if psi[idx] < 0.0:
        psi = -psi
    root_mu = math.sqrt(mu2)
    radial = np.array([j0_eval(root_mu * r) for r in dist])
    w = psi[idx] * radial - psi
    return ComparisonField(
        anchor=Point(float(mesh.vertices[idx, 0]), float(mesh.vertices[idx, 1])),
        anchor_index=idx,
        mu2=mu2,
        psi_at_anchor=float(psi[idx]),
        values=w,
    )


def branch_count(mesh: TriMesh, field: ComparisonField, radius: float) -> int:
    """Sign changes of w around a circle about the anchor (nodal branches)."""
    if radius < 3.0 * mesh.h_max:
        raise ValueError(f"radius {radius:g} < 3*h_max = {3.0 * mesh.h_max:g}")
    theta = 2.0 * math.pi * np.arange(BRANCH_SAMPLES) / BRANCH_SAMPLES
    pts = np.column_stack([
        field.anchor.x + radius * np.cos(theta),
        field.anchor.y + radius * np.sin(theta),
    ])
    try:
        vals = interpolate(mesh, field.values, pts)
    except PointOutsideMesh as exc:
        raise CircleOutsideDomain(
            f"circle of radius {radius:g} leaves the domain"
        ) from exc
    tie = BRANCH_TIE_REL * float(np.abs(field.values).max())
    signs = np.sign(vals)
    signs = signs[np.abs(vals) > tie]
    if len(signs) == 0:
        return 0
    return _alternations(signs)


# --- nodal structure -------------------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def nodal_decomposition(mesh: TriMesh, w: np.ndarray) -> NodalDecomposition:
    """Zero-crossing segments of the P1 interpolant plus signed components.

    A component touches the boundary iff it owns a boundary vertex or any
    vertex within h_max of the boundary; components failing that are the
    interior nodal domains the decomposition exists to detect.
    """
    w = np.asarray(w, dtype=float)
    n = mesh.vertex_count
    tie = TIE_REL * float(np.abs(w).max()) if np.any(w) else 0.0
    signed = np.where(np.abs(w) <= tie, 0, np.where(w > 0.0, 1, -1))

    uf = _UnionFind(n)
    edges = set()
    for a, b, c in mesh.triangles:
        edges.update({(min(a, b), max(a, b)), (min(b, c), max(b, c)), (min(a, c), max(a, c))})
    for a, b in edges:
        if signed[a] != 0 and signed[a] == signed[b]:
            uf.union(a, b)

    labels = np.full(n, -1)
    roots: dict[int, int] = {}
    for v in range(n):
        if signed[v] == 0:
            continue
        r = uf.find(v)
        if r not in roots:
            roots[r] = len(roots)
        labels[v] = roots[r]
    n_comp = len(roots)

    comp_signs = np.zeros(n_comp, dtype=int)
    for v in range(n):
        if labels[v] >= 0:
            comp_signs[labels[v]] = signed[v]

    near = boundary_distances(mesh, mesh.vertices) <= mesh.h_max
    touches = np.zeros(n_comp, dtype=bool)
    boundary_vertex = ~mesh.interior_mask
    for v in range(n):
        if labels[v] >= 0 and (boundary_vertex[v] or near[v]):
            touches[labels[v]] = True

    segments = []
    verts = mesh.vertices
    for tri in mesh.triangles:
        pos = [int(v) for v in tri if w[v] > 0.0]
        neg = [int(v) for v in tri if w[v] <= 0.0]
        if not pos or not neg:
            continue
        solo, duo = (pos[0], neg) if len(pos) == 1 else (neg[0], pos)
        cut = []
        for other in duo:
            t = w[solo] / (w[solo] - w[other])
            cut.append(verts[solo] + t * (verts[other] - verts[solo]))
        segments.append(cut)
    seg_arr = np.array(segments) if segments else np.empty((0, 2, 2))

    return NodalDecomposition(
        segments=seg_arr,
        labels=labels,
        component_signs=comp_signs,
        touches_boundary=touches,
        positive_component_count=int(np.sum(comp_signs > 0)),
    )


# --- boundary flux and support positivity ------------------------------------------

def boundary_flux(field: ComparisonField, mesh: TriMesh) -> np.ndarray:
    """Analytic normal derivative of the radial part at boundary-edge midpoints:
    psi(x0) sqrt(mu2) J0'(sqrt(mu2) r) (x - x0).nu / r.

    Uses the closed form rather than a discrete gradient, isolating the sign
    argument from discretization noise.
    """
    if not mesh.interior_mask[field.anchor_index]:
        raise AnchorOnBoundary("comparison anchor lies on the boundary")
    x0 = np.array([field.anchor.x, field.anchor.y])
    mids = 0.5 * (
        mesh.vertices[mesh.boundary_edges[:, 0]]
        + mesh.vertices[mesh.boundary_edges[:, 1]]
    )
    rel = mids - x0
    r = np.hypot(rel[:, 0], rel[:, 1])
    root_mu = math.sqrt(field.mu2)
    deriv = np.array([-j1_eval(root_mu * ri) for ri in r])
    dots = np.einsum("ij,ij->i", rel, mesh.boundary_normals)
    return field.psi_at_anchor * root_mu * deriv * dots / r


def support_positivity(poly: ConvexPolygon, x0: Point) -> float:
    """min over polygon-edge midpoints of (x - x0).nu; positive for interior x0
    by convexity."""
    normals, _ = poly.edge_normals()
    mids = 0.5 * (poly.vertices + np.roll(poly.vertices, -1, axis=0))
    rel = mids - np.array([x0.x, x0.y])
    return float(np.min(np.einsum("ij,ij->i", rel, normals)))


# --- Rayleigh defect ------------------------------------------------------------------

def rayleigh_defect(
    mesh: TriMesh,
    k_mat,
    m_mat,
    field: ComparisonField,
    decomposition: NodalDecomposition,
    component_id: int,
    flux: np.ndarray,
) -> RayleighDefect:
    """Energies of w restricted to a positive nodal component.

    dirichlet_energy <= mass_energy (+ discretization slack) realizes the
    one-sided Rayleigh bound whenever boundary_term <= 0; combo_rayleigh is
    the quotient of the zero-mean combination of this component with the
    largest-mass other positive component, when one exists.
    """
    w = field.values
    labels = decomposition.labels
    if (
        component_id < 0
        or component_id >= len(decomposition.component_signs)
        or decomposition.component_signs[component_id] <= 0
        or not np.any((labels == component_id) & (w > 0.0))
    ):
        raise NotPositiveComponent(f"component {component_id} is not positive")

    phi = np.where(labels == component_id, w, 0.0)
    dirichlet = float(phi @ (k_mat @ phi))
    mass = field.mu2 * float(phi @ (m_mat @ phi))

    e0 = labels[mesh.boundary_edges[:, 0]] == component_id
    e1 = labels[mesh.boundary_edges[:, 1]] == component_id
    both = e0 & e1
    term = 0.0
    if np.any(both):
        a = mesh.vertices[mesh.boundary_edges[both, 0]]
        b = mesh.vertices[mesh.boundary_edges[both, 1]]
        lengths = np.hypot(*(b - a).T)
        w_mid = 0.5 * (
            w[mesh.boundary_edges[both, 0]] + w[mesh.boundary_edges[both, 1]]
        )
        term = float(np.sum(w_mid * flux[both] * lengths))

    combo = None
    others = [
        c
        for c in range(len(decomposition.component_signs))
        if c != component_id and decomposition.component_signs[c] > 0
    ]
    if others:
        masses = []
        for c in others:
            phi_c = np.where(labels == c, w, 0.0)
            masses.append(float(phi_c @ (m_mat @ phi_c)))
        other = others[int(np.argmax(masses))]
        phi2 = np.where(labels == other, w, 0.0)
        ones = np.ones(mesh.vertex_count)
        m1 = float(ones @ (m_mat @ phi))
        m2 = float(ones @ (m_mat @ phi2))
        u = m2 * phi - m1 * phi2 if (m1 or m2) else phi + phi2
        if np.any(u):
            combo = rayleigh(k_mat, m_mat, u)

    return RayleighDefect(
        dirichlet_energy=dirichlet,
        mass_energy=mass,
        boundary_term=term,
        combo_rayleigh=combo,
    )


# --- inequality suite ---------------------------------------------------------------------

def inequality_checks(
    mu2: float, lambda1: float, poly: ConvexPolygon, constants: SpectralConstants
) -> InequalityReport:
    """Margins of the diameter- and area-based spectral bounds.

    The diameter-based lower bound is used in its dimensionally consistent
    squared form mu2 * diam^2 >= pi^2.
    """
    d, _ = diameter(poly)
    mu_d2 = float(mu2) * d * d
    strong = mu_d2 <= constants.j1 ** 2
    return InequalityReport(
        kroger_margin=float(4.0 * constants.j0 ** 2 - mu_d2),
        payne_weinberger_margin=float(mu_d2 - math.pi ** 2),
        strong_kroger_holds=bool(strong),
        szego_weinberger_margin=float(math.pi * constants.jp11 ** 2 / poly.area - mu2),
        polya_margin=float(lambda1 - mu2),
        hot_spots_certified=bool(strong),
    )


# --- diagnostic --------------------------------------------------------------------------

def steinerberger_diagnostic(mesh: TriMesh, psi: np.ndarray, poly: ConvexPolygon) -> float:
    """Distance from the argmax set of psi to the diameter endpoints, in units
    of the inradius.  Reported only; no pass/fail attaches to it."""
    psi = np.asarray(psi, dtype=float)
    spread = float(psi.max() - psi.min())
    max_set = mesh.vertices[psi >= psi.max() - 1e-9 * spread]
    _, (p, q) = diameter(poly)
    ends = np.array([[p.x, p.y], [q.x, q.y]])
    dmin = min(
        float(np.hypot(*(max_set - e).T).min()) for e in ends
    )
    rho, _ = inradius(poly)
    return dmin / rho
