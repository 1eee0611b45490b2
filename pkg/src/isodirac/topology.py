"""Alexandrov topology, sphere/manifold recognition and Gauss-Bonnet curvature.

Graph notions follow the inductive definitions: ``K_1`` is contractible, a
graph is contractible if some vertex ``v`` has a contractible unit sphere
``S(v)`` and ``G - v`` is contractible; the empty graph is the (-1)-sphere;
a d-manifold has all unit spheres (d-1)-spheres; a d-sphere is a d-manifold
that becomes contractible after removing one vertex.

Recognition is a search. Every recursive call works on an induced subgraph
of the graph passed in, so results are memoized by vertex set. A node budget
bounds the search; running out raises :class:`UndecidedError`.
"""

from __future__ import annotations

import sys
import threading
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, TypeVar

from .complex import (
    Complex,
    ComplexError,
    Graph,
    Simplex,
    euler_characteristic,
    f_vector,
    maximal_cliques,
    order_complex,
    whitney_complex,
)

__all__ = [
    "UndecidedError",
    "DEFAULT_BUDGET",
    "star",
    "core",
    "SphereSplit",
    "sphere_split",
    "graph_unit_sphere",
    "is_contractible",
    "is_sphere",
    "is_manifold",
    "curvature",
    "curvatures",
    "GaussBonnet",
    "gauss_bonnet",
    "TopologySearch",
]

DEFAULT_BUDGET = 2_000_000

T = TypeVar("T")


class UndecidedError(RuntimeError):
    """The recognition search exhausted its node budget."""


def _require(c: Complex, x: Simplex) -> Simplex:
    x = tuple(sorted(x))
    if x not in c:
        raise ComplexError(f"simplex {list(x)} not in complex")
    return x


def star(c: Complex, x: Simplex) -> frozenset[Simplex]:
    """All simplices containing ``x``, ``x`` included (the smallest open set around it)."""
    x = _require(c, x)
    sx = set(x)
    return frozenset(y for y in c.simplices if len(y) >= len(x) and sx.issubset(y))


def core(c: Complex, x: Simplex) -> frozenset[Simplex]:
    """All non-empty subsets of ``x``."""
    x = _require(c, x)
    return frozenset(y for y in c.simplices if len(y) <= len(x) and set(y).issubset(x))


@dataclass(frozen=True)
class SphereSplit:
    """Stable and unstable parts of the unit sphere of a simplex ``x``.

    ``stable`` holds the proper faces of ``x`` and ``unstable`` the proper
    cofaces. As subsets of the refinement their order complexes join to the
    unit sphere of ``x`` there.
    """

    host: Complex
    center: Simplex
    stable: frozenset[Simplex]
    unstable: frozenset[Simplex]

    def stable_complex(self) -> Complex:
        return order_complex(self.host, self.stable)

    def unstable_complex(self) -> Complex:
        return order_complex(self.host, self.unstable)


def sphere_split(c: Complex, x: Simplex) -> SphereSplit:
    x = _require(c, x)
    return SphereSplit(c, x, core(c, x) - {x}, star(c, x) - {x})


def graph_unit_sphere(g: Graph, v: int) -> Graph:
    """Subgraph induced by the neighbours of ``v``, relabelled to ``0..deg-1``."""
    return g.induced(g.neighbors(v))


class TopologySearch:
    """Memoized, budgeted recognition on induced subgraphs of one graph.

    Not thread-safe; create one per thread or per query.
    """

    def __init__(self, g: Graph, budget: int = DEFAULT_BUDGET):
        self.adj = g.adjacency
        self.budget = budget
        self.nodes = 0
        self._contractible: dict[frozenset[int], bool] = {}
        self._sphere: dict[tuple[frozenset[int], int], bool] = {}

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise UndecidedError(f"search budget of {self.budget} nodes exhausted")

    def sphere_of(self, V: frozenset[int], v: int) -> frozenset[int]:
        return self.adj[v] & V

    def _connected(self, V: frozenset[int]) -> bool:
        start = next(iter(V))
        seen = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for w in self.adj[u] & V:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(V)

    def contractible(self, V: frozenset[int]) -> bool:
        if not V:
            return False
        if len(V) == 1:
            return True
        hit = self._contractible.get(V)
        if hit is not None:
            return hit
        self._tick()
        degrees = {v: len(self.adj[v] & V) for v in V}
        if any(d == len(V) - 1 for d in degrees.values()):
            result = True  # cone over the rest, hence contractible
        elif not self._connected(V):
            result = False
        else:
            result = False
            for v in sorted(V, key=lambda u: (degrees[u], u)):
                if self.contractible(self.sphere_of(V, v)) and self.contractible(V - {v}):
                    result = True
                    break
        self._contractible[V] = result
        return result

    def manifold(self, V: frozenset[int], d: int) -> bool:
        if d < 0:
            return False
        return all(self.sphere(self.sphere_of(V, v), d - 1) for v in sorted(V))

    def manifold_witness(self, V: frozenset[int], d: int) -> int | None:
        """First vertex whose unit sphere is not a (d-1)-sphere, or None."""
        for v in sorted(V):
            if not self.sphere(self.sphere_of(V, v), d - 1):
                return v
        return None

    def sphere(self, V: frozenset[int], d: int) -> bool:
        if d == -1:
            return not V
        if d < -1 or not V:
            return False
        key = (V, d)
        hit = self._sphere.get(key)
        if hit is not None:
            return hit
        self._tick()
        result = (
            self._euler(V) == 1 + (-1) ** d
            and self.manifold(V, d)
            and any(self.contractible(V - {v}) for v in sorted(V))
        )
        self._sphere[key] = result
        return result

    def _euler(self, V: frozenset[int]) -> int:
        # cheap necessary condition for spheres
        verts = sorted(V)
        pos = {v: i for i, v in enumerate(verts)}
        sub = Graph.from_edges(
            len(verts), [(pos[u], pos[w]) for u in verts for w in self.adj[u] & V if u < w]
        )
        return euler_characteristic(whitney_complex(sub))


def _deep(fn: Callable[[], T], depth: int) -> T:
    """Run ``fn`` in a worker thread with room for ``depth`` nested search calls."""
    if depth < 500:
        return fn()
    box: dict[str, object] = {}

    def target() -> None:
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 4 * depth + 1000))
        try:
            box["value"] = fn()
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(512 * 1024 * 1024)
    try:
        worker = threading.Thread(target=target)
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_size)
    if "error" in box:
        raise box["error"]  # type: ignore[misc]
    return box["value"]  # type: ignore[return-value]


def is_contractible(g: Graph, budget: int = DEFAULT_BUDGET) -> bool:
    search = TopologySearch(g, budget)
    return _deep(lambda: search.contractible(frozenset(range(g.n))), g.n)


def is_sphere(g: Graph, d: int, budget: int = DEFAULT_BUDGET) -> bool:
    search = TopologySearch(g, budget)
    return _deep(lambda: search.sphere(frozenset(range(g.n)), d), g.n)


def is_manifold(g: Graph, m: int, budget: int = DEFAULT_BUDGET) -> bool:
    if m < 0:
        raise ComplexError("manifold dimension must be non-negative")
    search = TopologySearch(g, budget)
    return _deep(lambda: search.manifold(frozenset(range(g.n)), m), g.n)


def curvature(g: Graph, v: int) -> Fraction:
    """Gauss-Bonnet curvature ``sum_k (-1)^k f_{k-1}(S(v)) / (k+1)`` with ``f_{-1} = 1``."""
    fv = (1, *f_vector(whitney_complex(graph_unit_sphere(g, v))))
    return sum((Fraction((-1) ** k * fk, k + 1) for k, fk in enumerate(fv)), Fraction(0))


def curvatures(g: Graph) -> list[Fraction]:
    # count cliques through each vertex once instead of rebuilding every unit sphere
    counts: list[dict[int, int]] = [dict() for _ in range(g.n)]
    c = whitney_complex(g)
    for x in c.simplices:
        k = len(x) - 1
        for v in x:
            counts[v][k] = counts[v].get(k, 0) + 1
    return [sum((Fraction((-1) ** k * n, k + 1) for k, n in cv.items()), Fraction(0)) for cv in counts]


class GaussBonnet(NamedTuple):
    total: Fraction
    chi: int
    ok: bool


def gauss_bonnet(g: Graph) -> GaussBonnet:
    total = sum(curvatures(g), Fraction(0))
    chi = euler_characteristic(whitney_complex(g))
    return GaussBonnet(total, chi, total == chi)
