"""Shared complexes, hypothesis strategies and the acceptance summary hook."""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from isodirac.catalog import complete, cross_polytope, cycle, icosahedron, octahedron, point, zero_sphere
from isodirac.complex import Complex, Graph, barycentric_refine, generate_complex, join, whitney_complex

EDGE = generate_complex([(1, 2)])


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def random_whitney(seed: int, n: int = 9, p: float = 0.5) -> Complex:
    return whitney_complex(random_graph(n, p, seed))


# Complexes shared across the suite; every one with at most 200 simplices also
# enters the exact-arithmetic Betti comparison.
NAMED_COMPLEXES = {
    "point": point,
    "sphere0": zero_sphere,
    "edge": lambda: EDGE,
    "K3": lambda: complete(3),
    "K4": lambda: complete(4),
    "K5": lambda: complete(5),
    "C4": lambda: cycle(4),
    "C5": lambda: cycle(5),
    "C8": lambda: cycle(8),
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "C4*C4": lambda: join(cycle(4), cycle(4)),
    "octahedron*C7": lambda: join(octahedron(), cycle(7)),
    "K3 refined": lambda: barycentric_refine(complete(3)),
    "octahedron refined": lambda: barycentric_refine(octahedron()),
    "cross-polytope 3": lambda: cross_polytope(3),
    "cross-polytope 5": lambda: cross_polytope(5),
    "skeleton1 K4": lambda: Complex(tuple(x for x in complete(4).simplices if len(x) <= 2)),
    "skeleton2 K4": lambda: Complex(tuple(x for x in complete(4).simplices if len(x) <= 3)),
    "two triangles at a vertex": lambda: generate_complex([(1, 2, 3), (3, 4, 5)]),
    "torus 7": lambda: generate_complex(
        [(i % 7 + 1, (i + 1) % 7 + 1, (i + 3) % 7 + 1) for i in range(7)]
        + [(i % 7 + 1, (i + 2) % 7 + 1, (i + 3) % 7 + 1) for i in range(7)]
    ),
    **{f"random {s}": (lambda s=s: random_whitney(s)) for s in range(10)},
}

SMALL = [name for name, make in NAMED_COMPLEXES.items() if len(make()) <= 200]


@st.composite
def graphs(draw, max_n: int = 8) -> Graph:
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def symmetric_matrices(draw, max_n: int = 8):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    A = np.random.default_rng(seed).normal(size=(n, n))
    return A + A.T


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    def record(number: int, ok: bool, detail: str) -> None:
        _ACCEPTANCE.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
