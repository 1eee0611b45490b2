"""Finite abstract simplicial complexes and simple graphs.

Simplices are strictly increasing tuples of non-negative vertex ids. A
:class:`Complex` keeps its simplices in canonical order (by dimension, then
lexicographic), which fixes the block layout of every matrix built from it.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "ComplexError",
    "Simplex",
    "Graph",
    "Complex",
    "canonical_simplex",
    "generate_complex",
    "maximal_cliques",
    "whitney_complex",
    "f_vector",
    "euler_characteristic",
    "join",
    "complex_to_graph",
    "order_complex",
    "barycentric_refine",
    "skeleton_graph",
    "stirling2",
    "stirling_refinement_matrix",
]

Simplex = tuple[int, ...]


class ComplexError(ValueError):
    """Invalid simplex, complex or graph input."""


def canonical_simplex(vertices: Iterable[int]) -> Simplex:
    """Return the sorted tuple form of a vertex set, validating the ids."""
    vs = tuple(sorted(set(int(v) for v in vertices)))
    if not vs:
        raise ComplexError("simplices must be non-empty")
    if vs[0] < 0:
        raise ComplexError(f"vertex ids must be non-negative, got {vs[0]}")
    return vs


def _order_key(x: Simplex) -> tuple[int, Simplex]:
    return (len(x), x)


@dataclass(frozen=True)
class Graph:
    """Finite simple graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ComplexError("vertex count must be non-negative")
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ComplexError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ComplexError(f"edge ({u}, {v}) out of range for n={self.n}")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(clean))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> Graph:
        return cls(n, frozenset(tuple(e) for e in edges))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def neighbors(self, v: int) -> frozenset[int]:
        if not 0 <= v < self.n:
            raise ComplexError(f"vertex {v} not in graph with n={self.n}")
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph, relabelled to ``0..k-1`` in increasing id order."""
        vs = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(vs)}
        edges = [(pos[u], pos[w]) for u, w in self.edges if u in pos and w in pos]
        return Graph.from_edges(len(vs), edges)

    def kirchhoff(self) -> np.ndarray:
        """Kirchhoff (combinatorial Laplacian) matrix ``deg - adjacency``."""
        L = np.zeros((self.n, self.n))
        for u, v in self.edges:
            L[u, v] = L[v, u] = -1.0
            L[u, u] += 1.0
            L[v, v] += 1.0
        return L


@dataclass(frozen=True)
class Complex:
    """Finite abstract simplicial complex in canonical order.

    Use :meth:`from_simplices` or :func:`generate_complex` to build one; the
    bare constructor trusts its input.
    """

    simplices: tuple[Simplex, ...]

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable[int]], close: bool = False) -> Complex:
        """Canonicalize a simplex list.

        With ``close=False`` the list must already be closed under taking
        non-empty subsets; otherwise the downward closure is taken.
        """
        members = {canonical_simplex(x) for x in simplices}
        if close:
            return generate_complex(members)
        for x in members:
            if len(x) > 1:
                for j in range(len(x)):
                    face = x[:j] + x[j + 1 :]
                    if face not in members:
                        raise ComplexError(f"not closed: face {list(face)} of {list(x)} missing")
        return cls(tuple(sorted(members, key=_order_key)))

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.simplices)

    def __contains__(self, x: object) -> bool:
        return x in self.index

    @cached_property
    def index(self) -> dict[Simplex, int]:
        return {x: i for i, x in enumerate(self.simplices)}

    @property
    def dim(self) -> int:
        return len(self.simplices[-1]) - 1 if self.simplices else -1

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(x[0] for x in self.simplices if len(x) == 1)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Block boundaries ``0 = b_0 < ... < b_{q+1} = n`` per dimension."""
        return (0, *itertools.accumulate(f_vector(self)))

    def faces(self, x: Simplex) -> list[Simplex]:
        """Codimension-one faces of ``x``, ordered by the index of the dropped vertex."""
        return [x[:j] + x[j + 1 :] for j in range(len(x))] if len(x) > 1 else []


def generate_complex(facets: Iterable[Iterable[int]]) -> Complex:
    """Downward closure of a list of vertex sets."""
    members: set[Simplex] = set()
    for facet in facets:
        x = canonical_simplex(facet)
        if x in members:
            continue
        for r in range(1, len(x) + 1):
            members.update(itertools.combinations(x, r))
    return Complex(tuple(sorted(members, key=_order_key)))


def maximal_cliques(g: Graph) -> list[Simplex]:
    """Maximal cliques by Bron-Kerbosch with Tomita pivoting."""
    adj = g.adjacency
    out: list[Simplex] = []
    # explicit stack; recursion depth would equal the clique number otherwise
    stack = [(frozenset(), frozenset(range(g.n)), frozenset())]
    while stack:
        R, P, X = stack.pop()
        if not P:
            if not X and R:
                out.append(tuple(sorted(R)))
            continue
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in P - adj[pivot]:
            stack.append((R | {v}, P & adj[v], X & adj[v]))
            P = P - {v}
            X = X | {v}
    return sorted(out)


def whitney_complex(g: Graph) -> Complex:
    """Complex of all complete subgraphs of ``g``."""
    return generate_complex(maximal_cliques(g))


def f_vector(c: Complex) -> tuple[int, ...]:
    counts = [0] * (c.dim + 1)
    for x in c.simplices:
        counts[len(x) - 1] += 1
    return tuple(counts)


def euler_characteristic(c: Complex) -> int:
    return sum((-1) ** k * fk for k, fk in enumerate(f_vector(c)))


def join(a: Complex, b: Complex, relabel: bool = True) -> Complex:
    """Join ``a * b = a | b | {x | y}``.

    With ``relabel`` the ids of ``b`` are shifted past the largest id of ``a``;
    otherwise the vertex sets must already be disjoint.
    """
    if relabel and a.simplices:
        shift = max(a.vertices) + 1
        bs = [tuple(v + shift for v in y) for y in b.simplices]
    else:
        bs = list(b.simplices)
        if set(a.vertices) & {v for y in bs for v in y}:
            raise ComplexError("join without relabelling needs disjoint vertex sets")
    members = set(a.simplices) | set(bs)
    members.update(tuple(sorted(x + y)) for x in a.simplices for y in bs)
    return Complex(tuple(sorted(members, key=_order_key)))


def complex_to_graph(c: Complex) -> Graph:
    """Containment graph: one vertex per simplex (canonical index), edges for strict inclusion."""
    idx = c.index
    edges = []
    for x in c.simplices:
        i = idx[x]
        for r in range(1, len(x)):
            edges.extend((idx[y], i) for y in itertools.combinations(x, r))
    return Graph.from_edges(len(c), edges)


def order_complex(c: Complex, members: Iterable[Simplex] | None = None) -> Complex:
    """Complex of chains ``x_0 < x_1 < ...`` among ``members`` under inclusion.

    Vertices of the result are canonical indices into ``c``.
    """
    idx = c.index
    chosen = sorted(idx[x] for x in members) if members is not None else range(len(c))
    keep = set(chosen)
    # chains[i]: chains whose top element is simplex i
    chains: dict[int, list[tuple[int, ...]]] = {}
    for i in chosen:
        x = c.simplices[i]
        tops = [(i,)]
        for r in range(1, len(x)):
            for y in itertools.combinations(x, r):
                j = idx[y]
                if j in keep:
                    tops.extend(ch + (i,) for ch in chains[j])
        chains[i] = tops
    # chain tuples are already increasing since faces precede cofaces
    return Complex(tuple(sorted((ch for tops in chains.values() for ch in tops), key=_order_key)))


def barycentric_refine(c: Complex) -> Complex:
    return order_complex(c)


def skeleton_graph(c: Complex) -> tuple[Graph, tuple[int, ...]]:
    """1-skeleton of ``c`` as a :class:`Graph` plus the vertex ids it relabels.

    Graph vertex ``i`` corresponds to complex vertex ``ids[i]``.
    """
    ids = c.vertices
    pos = {v: i for i, v in enumerate(ids)}
    edges = [(pos[x[0]], pos[x[1]]) for x in c.simplices if len(x) == 2]
    return Graph.from_edges(len(ids), edges), ids


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind."""
    if n == k:
        return 1
    if k <= 0 or k > n:
        return 0
    return sum((-1) ** j * math.comb(k, j) * (k - j) ** n for j in range(k + 1)) // math.factorial(k)


def stirling_refinement_matrix(q: int) -> np.ndarray:
    """Integer matrix mapping the f-vector of a complex of dimension <= q to its refinement's.

    Entry ``(i, j)`` (0-based) counts the ``i``-chains produced by one
    ``j``-simplex: the surjections from ``j+1`` vertices onto ``i+1`` levels,
    ``S(j+1, i+1) * (i+1)!``.
    """
    if q < 0:
        raise ComplexError("q must be non-negative")
    A = np.zeros((q + 1, q + 1), dtype=np.int64)
    for i in range(q + 1):
        for j in range(i, q + 1):
            A[i, j] = stirling2(j + 1, i + 1) * math.factorial(i + 1)
    return A
