#!/usr/bin/env python3
"""Render the exclusion-region figures for a disk and a 2:1 ellipse.

The gray band is where critical points of the second Neumann eigenfunction
may live; the white region is excluded. Writes disk.svg and ellipse.svg.
"""

import argparse
from pathlib import Path

from hotspots.bessel import find_constants
from hotspots.domains import DomainSpec, realize
from hotspots.geometry import exclusion_region
from hotspots.svgfig import render_svg


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="figures", help="output directory")
    parser.add_argument("--n", type=int, default=512, help="polygonization samples")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ratio = find_constants().c_excl

    for name, spec in [
        ("disk", DomainSpec(kind="disk", radius=1.0, polygonization_n=args.n)),
        ("ellipse", DomainSpec(kind="ellipse", a=2.0, b=1.0, polygonization_n=args.n)),
    ]:
        poly = realize(spec)
        region = exclusion_region(poly, ratio)
        path = out / f"{name}.svg"
        render_svg(
            polygon=poly.vertices.tolist(),
            region_boundary=region.boundary.tolist(),
            critical_points=[],
            boundary_extrema=[],
            out_path=path,
        )
        print(f"{name}: threshold {region.threshold:.6f}, wrote {path}")


if __name__ == "__main__":
    main()
