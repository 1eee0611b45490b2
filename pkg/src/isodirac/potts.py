"""Vertex colourings, their level-set interfaces and interface statistics.

A colouring takes values in ``{0, ..., k}``. Its level set is the set of host
simplices on which every value appears. Realized as the containment graph on
those simplices it is an induced subgraph of the host's refinement graph, and
on an m-manifold host it is empty or an (m-k)-manifold.
"""

from __future__ import annotations

from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .complex import Complex, ComplexError, Graph, Simplex, euler_characteristic, f_vector, skeleton_graph, whitney_complex
from .spectral import DEFAULT_TOL, betti
from .topology import DEFAULT_BUDGET, TopologySearch, _deep, gauss_bonnet

__all__ = [
    "Coloring",
    "random_coloring",
    "LevelSet",
    "level_set",
    "InterfaceReport",
    "verify_interface",
    "host_is_manifold",
    "interface_record",
    "BettiStatistics",
    "betti_statistics",
    "sample_seeds",
]


@dataclass(frozen=True)
class Coloring:
    assignment: Mapping[int, int]
    k: int
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be non-negative")
        bad = {v: c for v, c in self.assignment.items() if not 0 <= c <= self.k}
        if bad:
            raise ValueError(f"values outside 0..{self.k}: {bad}")

    def image(self, x: Simplex) -> frozenset[int]:
        return frozenset(self.assignment[v] for v in x)


def random_coloring(c: Complex, k: int, seed: int | None = None) -> Coloring:
    """Independent uniform values in ``{0..k}`` per vertex, drawn with PCG64."""
    if k < 0:
        raise ValueError("k must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    values = rng.integers(0, k + 1, size=len(c.vertices))
    return Coloring({v: int(x) for v, x in zip(c.vertices, values)}, k, seed)


@dataclass(frozen=True)
class LevelSet:
    """Host simplices attaining all values, with their containment graph.

    Graph vertex ``i`` is ``simplices[i]``.
    """

    simplices: tuple[Simplex, ...]
    graph: Graph

    @property
    def empty(self) -> bool:
        return not self.simplices


def level_set(c: Complex, f: Coloring) -> LevelSet:
    missing = [v for v in c.vertices if v not in f.assignment]
    if missing:
        raise ValueError(f"colouring undefined on vertices {missing[:5]}")
    full = frozenset(range(f.k + 1))
    members = tuple(x for x in c.simplices if len(x) > f.k and f.image(x) == full)
    pos = {x: i for i, x in enumerate(members)}
    edges = []
    for x in members:
        sx = set(x)
        for y in members:
            if len(y) < len(x) and sx.issuperset(y):
                edges.append((pos[y], pos[x]))
    return LevelSet(members, Graph.from_edges(len(members), edges))


@lru_cache(maxsize=64)
def host_is_manifold(c: Complex, m: int, budget: int = DEFAULT_BUDGET) -> bool:
    """Manifold check of a host complex through its 1-skeleton (cached per complex)."""
    g, ids = skeleton_graph(c)
    flag = {tuple(ids[v] for v in x) for x in whitney_complex(g).simplices}
    if flag != set(c.simplices):
        return False
    search = TopologySearch(g, budget)
    return _deep(lambda: search.manifold(frozenset(range(g.n)), m), g.n)


@dataclass(frozen=True)
class InterfaceReport:
    status: Literal["empty", "manifold", "violation"]
    dimension: int
    level_set: LevelSet
    witness: Simplex | None = None


def verify_interface(c: Complex, f: Coloring, m: int, k: int | None = None, budget: int = DEFAULT_BUDGET) -> InterfaceReport:
    """Check that the level set of ``f`` on an m-manifold host is an (m-k)-manifold."""
    k = f.k if k is None else k
    if k != f.k:
        raise ValueError(f"colouring has k={f.k}, expected {k}")
    if not host_is_manifold(c, m, budget):
        raise ComplexError(f"host is not a verified {m}-manifold")
    ls = level_set(c, f)
    dim = m - k
    if ls.empty:
        return InterfaceReport("empty", dim, ls)
    search = TopologySearch(ls.graph, budget)
    bad = _deep(lambda: search.manifold_witness(frozenset(range(ls.graph.n)), dim), ls.graph.n)
    if dim < 0 or bad is not None:
        return InterfaceReport("violation", dim, ls, ls.simplices[bad] if bad is not None else None)
    return InterfaceReport("manifold", dim, ls)


def interface_record(c: Complex, f: Coloring, tol: float = DEFAULT_TOL, m: int | None = None) -> dict:
    """Topological summary of a level set as a JSON-ready dict.

    Betti numbers, f-vector and Euler characteristic are those of the closed
    realization (the Whitney complex of the level-set graph). Passing the host
    dimension ``m`` adds the manifold verdict of :func:`verify_interface`.
    """
    q = c.dim
    if m is not None:
        report = verify_interface(c, f, m)
        ls = report.level_set
        verdict = {"status": report.status, "dimension": report.dimension,
                   "witness": list(report.witness) if report.witness else None}
    else:
        ls = level_set(c, f)
        verdict = {}
    if ls.empty:
        rec = {"seed": f.seed, "empty": True, "f_vector": [], "betti": [0] * (q + 1), "chi": 0, "gauss_bonnet_ok": True}
        return rec | verdict
    closed = whitney_complex(ls.graph)
    b = list(betti(closed, tol))
    gb = gauss_bonnet(ls.graph)
    rec = {
        "seed": f.seed,
        "empty": False,
        "f_vector": list(f_vector(closed)),
        "betti": b + [0] * (q + 1 - len(b)),
        "chi": euler_characteristic(closed),
        "gauss_bonnet_ok": gb.ok,
    }
    return rec | verdict


def sample_seeds(seed: int | None, samples: int) -> list[int]:
    """Independent per-sample seeds spawned from one root seed."""
    children = np.random.SeedSequence(seed).spawn(samples)
    return [int(s.generate_state(1, np.uint64)[0]) for s in children]


@dataclass(frozen=True)
class BettiStatistics:
    mean: tuple[float, ...]
    records: list[dict] = field(repr=False)
    empty_count: int = 0


def betti_statistics(
    c: Complex,
    k: int,
    samples: int,
    seed: int | None = None,
    tol: float = DEFAULT_TOL,
    threads: int = 1,
    m: int | None = None,
) -> BettiStatistics:
    """Mean interface Betti vector over random colourings; empty interfaces count as zero."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    seeds = sample_seeds(seed, samples)

    def one(s: int) -> dict:
        return interface_record(c, random_coloring(c, k, s), tol, m)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one, seeds))
    else:
        records = [one(s) for s in seeds]
    total = np.sum([r["betti"] for r in records], axis=0)
    return BettiStatistics(tuple(float(x) / samples for x in total), records, sum(r["empty"] for r in records))
