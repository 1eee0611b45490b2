"""Isospectral Dirac deformations, refinement spectra and level-set manifolds of simplicial complexes."""

__version__ = "0.1.0"

from .complex import (
    Complex,
    ComplexError,
    Graph,
    barycentric_refine,
    complex_to_graph,
    euler_characteristic,
    f_vector,
    generate_complex,
    join,
    stirling_refinement_matrix,
    whitney_complex,
)
from .spectral import betti, dirac, hodge, supertrace

__all__ = [
    "__version__",
    "Complex",
    "ComplexError",
    "Graph",
    "barycentric_refine",
    "betti",
    "complex_to_graph",
    "dirac",
    "euler_characteristic",
    "f_vector",
    "generate_complex",
    "hodge",
    "join",
    "stirling_refinement_matrix",
    "supertrace",
    "whitney_complex",
]
