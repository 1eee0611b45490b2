"""Named complexes: octahedron, cross-polytopes, cycles, complete graphs and joins.

Builtins use 1-based vertex ids like the listings they reproduce.
"""

from __future__ import annotations

import itertools

from .complex import Complex, ComplexError, generate_complex, join

__all__ = ["OCTAHEDRON_FACETS", "octahedron", "icosahedron", "cross_polytope", "cycle", "complete", "point", "zero_sphere", "builtin", "BUILTINS"]

OCTAHEDRON_FACETS = [
    (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6),
    (2, 3, 5), (2, 3, 6), (2, 4, 5), (2, 4, 6),
]  # fmt: skip

_ICOSAHEDRON_FACETS = [
    (1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
    (2, 3, 8), (3, 4, 9), (4, 5, 10), (5, 6, 11), (2, 6, 7),
    (2, 7, 8), (3, 8, 9), (4, 9, 10), (5, 10, 11), (6, 7, 11),
    (7, 8, 12), (8, 9, 12), (9, 10, 12), (10, 11, 12), (7, 11, 12),
]  # fmt: skip


def octahedron() -> Complex:
    return generate_complex(OCTAHEDRON_FACETS)


def icosahedron() -> Complex:
    return generate_complex(_ICOSAHEDRON_FACETS)


def cross_polytope(dim: int) -> Complex:
    """Boundary of the (dim+1)-dimensional cross-polytope, a dim-sphere on ``2(dim+1)`` vertices."""
    if dim < 0:
        raise ComplexError("dimension must be non-negative")
    pairs = [(2 * i + 1, 2 * i + 2) for i in range(dim + 1)]
    return generate_complex(itertools.product(*pairs))


def cycle(n: int) -> Complex:
    if n < 3:
        raise ComplexError("a cycle needs at least 3 vertices")
    return generate_complex((i + 1, (i + 1) % n + 1) for i in range(n))


def complete(n: int) -> Complex:
    """Whitney complex of ``K_n``: the full (n-1)-simplex."""
    if n < 1:
        raise ComplexError("K_n needs n >= 1")
    return generate_complex([range(1, n + 1)])


def point() -> Complex:
    return generate_complex([(1,)])


def zero_sphere() -> Complex:
    return generate_complex([(1,), (2,)])


BUILTINS = {
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "point": point,
    "sphere0": zero_sphere,
}


def builtin(spec: str, dim: int | None = None) -> Complex:
    """Resolve ``name``, ``name:param`` or a ``*``-separated join of those.

    Parametrized names: ``cycle:n``, ``complete:n``, ``cross-polytope:d``
    (``d`` may come from ``dim`` instead), ``skeleton:k:<spec>``.
    """
    spec = spec.strip()
    if spec.startswith("skeleton:"):
        _, k, rest = spec.split(":", 2)
        inner = builtin(rest, dim)
        return Complex(tuple(x for x in inner.simplices if len(x) <= int(k) + 1))
    if "*" in spec:
        parts = [builtin(p, dim) for p in spec.split("*")]
        out = parts[0]
        for p in parts[1:]:
            out = join(out, p)
        return out
    name, _, param = spec.partition(":")
    if name in BUILTINS:
        return BUILTINS[name]()
    if name == "cycle":
        return cycle(int(param))
    if name == "complete":
        return complete(int(param))
    if name == "cross-polytope":
        d = int(param) if param else dim
        if d is None:
            raise ComplexError("cross-polytope needs a dimension")
        return cross_polytope(d)
    raise ComplexError(f"unknown builtin {spec!r}")
