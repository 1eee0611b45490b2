"""Density of states along Barycentric refinements.

Refines a few seed complexes, prints the l1 distance between successive
spectral functions of the Kirchhoff Laplacian and their ratios, and for the
cycle the sup distance of the integrated density of states to the arcsin law.
Two seeds of the same dimension are also compared generation by generation.

    python3 scripts/dos_convergence.py --generations 4 --csv out/
"""

from __future__ import annotations

import argparse
from pathlib import Path

from isodirac.catalog import complete, cycle
from isodirac.complex import Complex, barycentric_refine, skeleton_graph
from isodirac.io import write_spectrum_csv
from isodirac.spectral import ids_sup_distance, l1_distance, spectrum

SEEDS = {
    "cycle4": lambda: cycle(4),
    "cycle7": lambda: cycle(7),
    "triangle": lambda: complete(3),
    "tetrahedron surface": lambda: Complex(tuple(x for x in complete(4).simplices if len(x) <= 3)),
}


def spectra(c: Complex, generations: int) -> list:
    out = []
    for gen in range(generations + 1):
        out.append(spectrum(skeleton_graph(c)[0].kirchhoff()))
        if gen < generations:
            c = barycentric_refine(c)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--generations", type=int, default=4)
    ap.add_argument("--csv", type=Path, help="directory for per-generation eigenvalue files")
    args = ap.parse_args()

    runs = {name: spectra(make(), args.generations) for name, make in SEEDS.items()}
    for name, seq in runs.items():
        print(f"\n{name}")
        print(f"{'gen':>4} {'n':>7} {'l1 to prev':>12} {'ratio':>8} {'sup arcsin':>11}")
        prev = None
        for gen, vals in enumerate(seq):
            d = l1_distance(seq[gen - 1], vals) if gen else None
            ratio = d / prev if d is not None and prev else None
            sup = ids_sup_distance(vals) if name.startswith("cycle") else None
            print(f"{gen:>4} {len(vals):>7} {d if d is not None else float('nan'):>12.5f} "
                  f"{ratio if ratio is not None else float('nan'):>8.3f} {sup if sup is not None else float('nan'):>11.4f}")
            prev = d
            if args.csv:
                args.csv.mkdir(parents=True, exist_ok=True)
                write_spectrum_csv(args.csv / f"{name.replace(' ', '_')}_gen{gen}.csv", vals)

    print("\nuniversality: l1 distance between the two 2-dimensional sequences")
    for gen, (a, b) in enumerate(zip(runs["triangle"], runs["tetrahedron surface"])):
        print(f"{gen:>4} {l1_distance(a, b):>10.5f}")


if __name__ == "__main__":
    main()
