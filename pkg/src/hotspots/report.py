"""Pipeline orchestration: verified runs, JSON reports, and batch sweeps.

``run_verify`` executes the full chain (realize -> mesh -> assemble -> solve
-> geometry -> exclusion region -> critical points -> verdict -> comparison
diagnostics -> inequalities) and writes ``report.json``.  The report is fully
deterministic for identical inputs; wall-clock timings therefore live in a
``timings.json`` sidecar, not in the canonical report bytes.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import analysis as ana
from . import fem
from .bessel import find_constants
from .domains import DomainSpec, SplitMix64, load_spec, realize, save_spec
from .errors import StageError
from .geometry import (
    Point,
    diameter,
    exclusion_region,
    inradius,
    min_enclosing_circle,
)
from .meshing import boundary_distances, dump_mesh, generate, quality, refine
from .svgfig import render_svg

REPORT_SCHEMA = 1


@dataclass(eq=False)
class VerificationReport:
    """Aggregated machine-readable outcome of one verified run."""

    schema: int
    domain_spec: dict
    geometry: dict
    mesh: dict
    spectrum: dict
    inequalities: dict
    boundary_extrema: list
    interior_critical_points: list
    theorem: dict
    lemma: list
    comparison: list
    steinerberger: list
    render: dict
    timings_ms: dict = field(default_factory=dict)

    def as_dict(self, include_timings: bool = False) -> dict:
        doc = {
            "schema": self.schema,
            "domain_spec": self.domain_spec,
            "geometry": self.geometry,
            "mesh": self.mesh,
            "spectrum": self.spectrum,
            "inequalities": self.inequalities,
            "boundary_extrema": self.boundary_extrema,
            "interior_critical_points": self.interior_critical_points,
            "theorem": self.theorem,
            "lemma": self.lemma,
            "comparison": self.comparison,
            "steinerberger": self.steinerberger,
            "render": self.render,
        }
        if include_timings:
            doc["timings_ms"] = self.timings_ms
        return doc

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


def _plain(obj):
    """Recursively convert numpy containers/scalars to JSON-native values."""
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _critical_point_dict(p: ana.CriticalPoint) -> dict:
    return {
        "vertex_id": p.vertex_id,
        "location": [p.location.x, p.location.y],
        "value": p.value,
        "kind": p.kind,
        "alternations": p.alternations,
        "farthest_distance": p.farthest_distance,
    }


def _spec_echo(spec: DomainSpec) -> dict:
    doc = {k: v for k, v in asdict(spec).items() if v is not None and k != "warnings"}
    if spec.vertices is not None:
        doc["vertices"] = [list(v) for v in spec.vertices]
    doc["warnings"] = list(spec.warnings)
    return doc


class _Stages:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name: str, fn):
        t0 = time.perf_counter()
        try:
            out = fn()
        except StageError:
            raise
        except Exception as exc:
            raise StageError(name, exc) from exc
        self.timings[name] = 1000.0 * (time.perf_counter() - t0)
        return out


def _comparison_diagnostics(mesh, poly, k_mat, m_mat, psi, mu2, anchor_vertex,
                            diagnostic_only, eig_index):
    consts = find_constants()
    anchor = Point(float(mesh.vertices[anchor_vertex, 0]),
                   float(mesh.vertices[anchor_vertex, 1]))
    fld = ana.build_comparison(mesh, psi, mu2, anchor)
    flux = ana.boundary_flux(fld, mesh)
    f_anchor = ana.farthest_boundary_distance(poly, anchor)
    flux_bound_applies = math.sqrt(mu2) * f_anchor <= consts.j1
    clearance = float(boundary_distances(mesh, mesh.vertices[anchor_vertex])[0])
    d, _ = diameter(poly)
    radius = min(0.9 * clearance, max(3.0 * mesh.h_max, 0.05 * d))
    branches = None
    if radius >= 3.0 * mesh.h_max:
        branches = ana.branch_count(mesh, fld, radius)

    nd = ana.nodal_decomposition(mesh, fld.values)
    defects = []
    for comp in np.nonzero(nd.component_signs > 0)[0]:
        try:
            rd = ana.rayleigh_defect(mesh, k_mat, m_mat, fld, nd, int(comp), flux)
        except ana.NotPositiveComponent:
            continue
        defects.append({
            "component": int(comp),
            "dirichlet_energy": rd.dirichlet_energy,
            "mass_energy": rd.mass_energy,
            "boundary_term": rd.boundary_term,
            "combo_rayleigh": rd.combo_rayleigh,
        })
        if len(defects) >= 2:
            break

    return {
        "eigenvector": eig_index,
        "anchor_vertex": int(anchor_vertex),
        "anchor": [anchor.x, anchor.y],
        "diagnostic_only": diagnostic_only,
        "psi_at_anchor": fld.psi_at_anchor,
        "support_positivity": ana.support_positivity(poly, anchor),
        "flux_bound_applies": bool(flux_bound_applies),
        "flux_min": float(flux.min()),
        "flux_max": float(flux.max()),
        "branch_radius": radius if branches is not None else None,
        "branch_count": branches,
        "nodal_components": int(len(nd.component_signs)),
        "positive_components": int(nd.positive_component_count),
        "interior_nodal_components": int(np.sum(~nd.touches_boundary)),
        "rayleigh_defects": defects,
    }


def run_verify(
    spec_path,
    h: float | None = None,
    refinements: int = 0,
    k: int = 4,
    tol: float = 1e-8,
    out_dir=None,
    svg: bool = False,
    show_nodal: bool = False,
    show_mesh: bool = False,
    dump_mesh_file: bool = False,
    seed: int = 0,
) -> VerificationReport:
    """Full verification pipeline for one domain spec. Writes report.json
    (and figure.svg / mesh.txt on request) into out_dir when given."""
    stages = _Stages()
    consts = find_constants()

    spec = stages.run("input", lambda: load_spec(spec_path))
    poly = stages.run("realize", lambda: realize(spec))
    d, endpoints = diameter(poly)
    if h is None:
        h = d / 50.0

    mesh = stages.run("mesh", lambda: generate(poly, h))
    for _ in range(max(0, refinements)):
        mesh = stages.run("refine", lambda: refine(mesh))
    mq = quality(mesh)

    k_mat = stages.run("assemble", lambda: fem.assemble_stiffness(mesh))
    m_mat = stages.run("assemble_mass", lambda: fem.assemble_mass(mesh))
    k_eig = max(k, 3)
    neumann = stages.run(
        "solve_neumann", lambda: fem.solve_neumann(k_mat, m_mat, k=k_eig, tol=tol, seed=seed)
    )
    dirichlet = stages.run(
        "solve_dirichlet",
        lambda: fem.solve_dirichlet(mesh, k=1, tol=tol, seed=seed, k_mat=k_mat, m_mat=m_mat),
    )
    mu2 = float(neumann.eigenvalues[1])
    lambda1 = float(dirichlet.eigenvalues[0])

    rho, rho_center = stages.run("geometry", lambda: inradius(poly))
    mec = min_enclosing_circle(poly)
    region = stages.run("exclusion_region", lambda: exclusion_region(poly, consts.c_excl))

    def analyze():
        vecs = fem.mu2_eigenspace(neumann, seed=seed)
        per_vec = []
        for psi in vecs:
            cps = ana.find_critical_points(mesh, psi, poly)
            verdict = ana.theorem_check(cps, poly, consts, mesh.h_max)
            nd = ana.nodal_decomposition(mesh, psi)
            bverts = np.nonzero(~mesh.interior_mask)[0]
            bvals = psi[bverts]
            imax = bverts[int(np.argmax(bvals))]
            imin = bverts[int(np.argmin(bvals))]
            per_vec.append({
                "critical_points": cps,
                "verdict": verdict,
                "nodal": nd,
                "boundary_max": (int(imax), mesh.vertices[imax], float(psi[imax])),
                "boundary_min": (int(imin), mesh.vertices[imin], float(psi[imin])),
                "steinerberger": ana.steinerberger_diagnostic(mesh, psi, poly),
                "psi": psi,
            })
        return vecs, per_vec

    vecs, per_vec = stages.run("analysis", analyze)

    def compare():
        out = []
        any_critical = False
        for j, info in enumerate(per_vec):
            for cp in info["critical_points"]:
                any_critical = True
                out.append(_comparison_diagnostics(
                    mesh, poly, k_mat, m_mat, info["psi"], mu2,
                    cp.vertex_id, False, j,
                ))
        if not any_critical:
            seed_xy = np.array([mec.center.x, mec.center.y])
            cand = np.nonzero(mesh.interior_mask)[0]
            rel = mesh.vertices[cand] - seed_xy
            anchor_vertex = int(cand[np.argmin(np.hypot(rel[:, 0], rel[:, 1]))])
            out.append(_comparison_diagnostics(
                mesh, poly, k_mat, m_mat, per_vec[0]["psi"], mu2,
                anchor_vertex, True, 0,
            ))
        return out

    comparison = stages.run("comparison", compare)
    ineq = stages.run(
        "inequalities", lambda: ana.inequality_checks(mu2, lambda1, poly, consts)
    )

    theorem = {
        "threshold": per_vec[0]["verdict"].threshold,
        "tolerance": per_vec[0]["verdict"].tolerance,
        "eigenvectors": [
            {
                "passed": info["verdict"].passed,
                "violations": [_critical_point_dict(p) for p in info["verdict"].violations],
            }
            for info in per_vec
        ],
        "passed": all(info["verdict"].passed for info in per_vec),
    }

    nodal_segments = per_vec[0]["nodal"].segments

    report = VerificationReport(
        schema=REPORT_SCHEMA,
        domain_spec=_plain(_spec_echo(spec)),
        geometry=_plain({
            "diameter": d,
            "diameter_endpoints": [[endpoints[0].x, endpoints[0].y],
                                   [endpoints[1].x, endpoints[1].y]],
            "inradius": rho,
            "inradius_center": [rho_center.x, rho_center.y],
            "area": poly.area,
            "min_enclosing_circle": {
                "center": [mec.center.x, mec.center.y],
                "radius": mec.radius,
            },
            "exclusion_threshold": region.threshold,
            "exclusion_tolerance": region.tolerance,
        }),
        mesh=_plain({
            "h_target": h,
            "refinements": refinements,
            "min_angle": mq.min_angle,
            "h_min": mq.h_min,
            "h_max": mq.h_max,
            "vertex_count": mq.vertex_count,
            "triangle_count": mq.triangle_count,
        }),
        spectrum=_plain({
            "boundary_condition": "neumann",
            "eigenvalues": neumann.eigenvalues,
            "residuals": neumann.residuals,
            "lambda1": lambda1,
            "dirichlet_residuals": dirichlet.residuals,
            "degenerate_pair": fem.nearly_degenerate_pair(neumann),
            "analyzed_eigenvectors": len(vecs),
        }),
        inequalities=_plain(asdict(ineq)),
        boundary_extrema=_plain([
            {
                "eigenvector": j,
                "max": {"vertex_id": info["boundary_max"][0],
                        "location": list(info["boundary_max"][1]),
                        "value": info["boundary_max"][2]},
                "min": {"vertex_id": info["boundary_min"][0],
                        "location": list(info["boundary_min"][1]),
                        "value": info["boundary_min"][2]},
            }
            for j, info in enumerate(per_vec)
        ]),
        interior_critical_points=_plain([
            {
                "eigenvector": j,
                "points": [_critical_point_dict(p) for p in info["critical_points"]],
            }
            for j, info in enumerate(per_vec)
        ]),
        theorem=_plain(theorem),
        lemma=_plain([
            {
                "eigenvector": j,
                "components": len(info["nodal"].component_signs),
                "positive_components": info["nodal"].positive_component_count,
                "all_touch_boundary": bool(info["nodal"].touches_boundary.all()),
            }
            for j, info in enumerate(per_vec)
        ]),
        comparison=_plain(comparison),
        steinerberger=_plain([info["steinerberger"] for info in per_vec]),
        render=_plain({
            "polygon": poly.vertices,
            "region_boundary": region.boundary,
            "nodal_segments": nodal_segments,
        }),
        timings_ms=dict(stages.timings),
    )

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        (out / "timings.json").write_text(
            json.dumps(report.timings_ms, indent=2) + "\n", encoding="utf-8"
        )
        if dump_mesh_file:
            dump_mesh(mesh, out / "mesh.txt")
        if svg:
            write_report_svg(report, out / "figure.svg",
                             show_nodal=show_nodal, show_mesh=show_mesh,
                             mesh=mesh if show_mesh else None)
    return report


def write_report_svg(report: VerificationReport | dict, out_path,
                     show_nodal: bool = False, show_mesh: bool = False, mesh=None):
    doc = report.as_dict() if isinstance(report, VerificationReport) else report
    criticals = [
        p["location"]
        for entry in doc["interior_critical_points"]
        for p in entry["points"]
    ]
    extrema = []
    for entry in doc["boundary_extrema"]:
        extrema.append(entry["max"]["location"])
        extrema.append(entry["min"]["location"])
    mesh_edges = None
    if show_mesh and mesh is not None:
        seen = set()
        for tri in mesh.triangles:
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                seen.add((min(a, b), max(a, b)))
        mesh_edges = [
            [list(mesh.vertices[a]), list(mesh.vertices[b])] for a, b in sorted(seen)
        ]
    render_svg(
        polygon=doc["render"]["polygon"],
        region_boundary=doc["render"]["region_boundary"],
        critical_points=criticals,
        boundary_extrema=extrema,
        out_path=out_path,
        nodal_segments=doc["render"]["nodal_segments"] if show_nodal else None,
        mesh_edges=mesh_edges,
    )


# --- sweep ---------------------------------------------------------------------

def _sweep_domain_spec(master_seed: int, index: int) -> DomainSpec:
    rng = SplitMix64((master_seed << 20) ^ index)
    child_seed = rng.next_u64()
    n = 5 + int(rng.uniform() * 56)  # 5..60 hull samples
    return DomainSpec(kind="random_convex", seed=child_seed, n=min(n, 60), diameter=2.0)


def _sweep_one(args: tuple) -> dict:
    master_seed, index, h_rel, out_root, k, tol = args
    spec = _sweep_domain_spec(master_seed, index)
    out_dir = Path(out_root) / f"domain_{index:03d}"
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_path = out_dir / "spec.json"
    save_spec(spec, spec_path)
    try:
        poly = realize(spec)
        d, _ = diameter(poly)
        report = run_verify(spec_path, h=h_rel * d, k=k, tol=tol, out_dir=out_dir)
    except StageError as exc:
        return {"index": index, "error": str(exc), "stage": exc.stage}
    ineq = report.inequalities
    return {
        "index": index,
        "passed": report.theorem["passed"],
        "violations": sum(len(e["violations"]) for e in report.theorem["eigenvectors"]),
        "strong_kroger": ineq["strong_kroger_holds"],
        "kroger_margin": ineq["kroger_margin"],
        "payne_weinberger_margin": ineq["payne_weinberger_margin"],
        "polya_margin": ineq["polya_margin"],
        "szego_weinberger_margin": ineq["szego_weinberger_margin"],
    }


def run_sweep(count: int, seed: int, h_rel: float, out_dir, k: int = 4,
              tol: float = 1e-8) -> dict:
    """Verify `count` seeded random convex domains; deterministic given seed.

    Parallelism is capped by the HSV_THREADS environment variable; results
    merge in index order so the summary bytes do not depend on the cap.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(seed, i, h_rel, str(out), k, tol) for i in range(count)]
    workers = int(os.environ.get("HSV_THREADS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, count))
    if workers == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, jobs))

    ok = [r for r in results if "error" not in r]
    failures = [r for r in results if "error" in r]
    summary = {
        "schema": REPORT_SCHEMA,
        "count": count,
        "seed": seed,
        "h_rel": h_rel,
        "pass_count": sum(1 for r in ok if r["passed"]),
        "violation_count": sum(r["violations"] for r in ok),
        "strong_kroger_count": sum(1 for r in ok if r["strong_kroger"]),
        "min_margins": {
            name: (min(r[name] for r in ok) if ok else None)
            for name in ("kroger_margin", "payne_weinberger_margin",
                         "polya_margin", "szego_weinberger_margin")
        },
        "failures": failures,
        "domains": results,
    }
    (out / "summary.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    return summary
