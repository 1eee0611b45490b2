import itertools
import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from isodirac.catalog import complete, cross_polytope, cycle, octahedron, point
from isodirac.complex import Graph, barycentric_refine, euler_characteristic, f_vector, join, skeleton_graph, whitney_complex
from isodirac.spectral import (
    arcsin_cdf,
    betti,
    betti_exact,
    block_supertrace,
    derivative_blocks,
    diagonal_blocks,
    dirac,
    exact_rank,
    exterior_derivative,
    expm_symmetric,
    hodge,
    ids_sup_distance,
    ids_value,
    incidence_sign,
    l1_distance,
    lidskii_check,
    nullity,
    spectral_function_value,
    spectrum,
    supertrace,
    supertrace_power,
)

from conftest import EDGE, NAMED_COMPLEXES, SMALL, graphs, random_graph, symmetric_matrices

SUPERTRACE_TIMES = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0]


def inversion_sign(x, y) -> int:
    """Sign of the permutation taking (missing vertex, *y) to the sorted x."""
    (v,) = set(x) - set(y)
    seq = [v, *y]
    inversions = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


# incidence and Dirac ------------------------------------------------------------------------


def test_incidence_sign_examples():
    assert incidence_sign((1, 2), (1,)) == -1
    assert incidence_sign((1, 2), (2,)) == 1
    assert incidence_sign((1, 2, 3), (1, 2)) == 1
    assert incidence_sign((1, 2, 3), (4,)) == 0


@pytest.mark.parametrize("x", [tuple(range(1, k + 1)) for k in range(2, 7)] + [(2, 5, 7, 11)])
def test_incidence_sign_matches_permutation_parity(x):
    for y in itertools.combinations(x, len(x) - 1):
        assert incidence_sign(x, y) == inversion_sign(x, y)


def test_edge_complex_dirac():
    D = dirac(EDGE)
    assert D.entries.tolist() == [[0, 0, -1], [0, 0, 1], [-1, 1, 0]]
    # characteristic polynomial of this matrix is x^3 - 2x
    assert np.allclose(np.sort(np.roots([1, 0, -2, 0]).real), spectrum(D.entries))


def test_dirac_sizes():
    assert dirac(octahedron()).offsets == (0, 6, 18, 26)
    assert dirac(cross_polytope(5)).entries.shape == (728, 728)


def test_edge_complex_hodge():
    L0, L1 = hodge(EDGE)
    assert L0.tolist() == [[1, -1], [-1, 1]]
    assert L1.tolist() == [[2]]
    assert [L.shape[0] for L in hodge(octahedron())] == [6, 12, 8]
    assert [L.tolist() for L in hodge(point())] == [[[0]]]


@pytest.mark.parametrize("name", list(NAMED_COMPLEXES))
def test_dirac_structure(name):
    c = NAMED_COMPLEXES[name]()
    d = exterior_derivative(c)
    assert np.abs(d @ d).max(initial=0) == 0  # integer entries: exact
    D = dirac(c)
    assert np.array_equal(D.entries, D.entries.T)
    L = D.entries @ D.entries
    offs = D.offsets
    for a in range(len(offs) - 1):
        for b in range(len(offs) - 1):
            block = L[offs[a] : offs[a + 1], offs[b] : offs[b + 1]]
            if a != b:
                assert np.abs(block).max(initial=0) <= 1e-12
    blocks = hodge(c)
    for k, Lk in enumerate(blocks):
        assert np.array_equal(Lk, L[offs[k] : offs[k + 1], offs[k] : offs[k + 1]])
    # L_0 is the Kirchhoff matrix of the 1-skeleton
    assert np.array_equal(blocks[0], skeleton_graph(c)[0].kirchhoff())


# Betti numbers -------------------------------------------------------------------------------


def test_betti_examples():
    assert betti(octahedron()) == (1, 0, 1)
    assert betti(cross_polytope(5)) == (1, 0, 0, 0, 0, 1)
    assert betti(EDGE) == (1, 0)
    assert betti(NAMED_COMPLEXES["torus 7"]()) == (1, 2, 1)
    assert betti(NAMED_COMPLEXES["sphere0"]()) == (2,)


def test_betti_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        betti(EDGE, tol=0)


@pytest.mark.parametrize("name", SMALL)
def test_float_betti_matches_exact(name):
    c = NAMED_COMPLEXES[name]()
    assert betti(c) == betti_exact(c)


@pytest.mark.parametrize("name", list(NAMED_COMPLEXES))
def test_euler_poincare(name):
    c = NAMED_COMPLEXES[name]()
    assert euler_characteristic(c) == sum((-1) ** k * b for k, b in enumerate(betti(c)))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.6, 1.0]))
def test_exact_rank_matches_sympy(m, n, seed, density):
    rng = np.random.default_rng(seed)
    A = rng.integers(-3, 4, size=(m, n)) * (rng.random((m, n)) < density)
    # make the last row dependent to force rank deficiency
    if m > 2:
        A[-1] = A[0] - 2 * A[1]
    assert exact_rank(A.tolist()) == sympy.Matrix(A.tolist()).rank()


def test_exact_rank_edge_cases():
    assert exact_rank([]) == 0
    assert exact_rank([[0, 0], [0, 0]]) == 0
    assert exact_rank([[2, 4], [1, 2]]) == 1


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9))
def test_betti_float_vs_exact_random(g):
    c = whitney_complex(g)
    if len(c):
        assert betti(c) == betti_exact(c)


def test_nullity_threshold_is_relative():
    # cutoff is tol * max(1, sigma_max)
    assert nullity(np.diag([1e6, 1e-1])) == 0
    assert nullity(np.diag([1e6, 1e-3])) == 1
    assert nullity(np.diag([1e-3, 1e-3])) == 0
    assert nullity(np.diag([1.0, 1e-9])) == 1
    assert nullity(np.zeros((3, 3))) == 3


# supertraces ----------------------------------------------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.0])
def test_octahedron_mckean_singer(t):
    assert abs(supertrace(hodge(octahedron()), t) - 2) <= 1e-8


def test_supertrace_at_zero_is_alternating_block_sizes():
    c = NAMED_COMPLEXES["C4*C4"]()
    fv = f_vector(c)
    assert supertrace(hodge(c), 0.0) == sum((-1) ** k * n for k, n in enumerate(fv))


@pytest.mark.parametrize("name", list(NAMED_COMPLEXES))
def test_mckean_singer_and_power_supertraces(name):
    c = NAMED_COMPLEXES[name]()
    blocks = hodge(c)
    chi = euler_characteristic(c)
    for t in SUPERTRACE_TIMES:
        assert abs(supertrace(blocks, t) - chi) <= 1e-8
    for p in range(1, 5):
        # relative to the size of the traces involved
        scale = max(1.0, max(float(np.trace(np.linalg.matrix_power(L, p))) for L in blocks))
        assert abs(supertrace_power(blocks, p)) <= 1e-8 * scale


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=9), st.floats(0, 4))
def test_mckean_singer_random(g, t):
    c = whitney_complex(g)
    if len(c):
        assert abs(supertrace(hodge(c), t) - euler_characteristic(c)) <= 1e-8


def test_block_supertrace_matches_heat_supertrace():
    c = octahedron()
    D = dirac(c)
    L = D.entries @ D.entries
    assert abs(block_supertrace(expm_symmetric(L, -1.0), D.offsets) - supertrace(hodge(c), 1.0)) <= 1e-12


def test_supertrace_rejects_negative_time():
    with pytest.raises(ValueError):
        supertrace(hodge(EDGE), -1.0)


@pytest.mark.parametrize("name", ["C4", "C5", "C8", "skeleton1 K4"])
def test_one_dimensional_isospectrality(name):
    c = NAMED_COMPLEXES[name]()
    blocks = hodge(c)
    assert len(blocks) == 2
    nz = [np.sort(w[w > 1e-8]) for w in (np.linalg.eigvalsh(blocks[0]), np.linalg.eigvalsh(blocks[1]))]
    assert len(nz[0]) == len(nz[1])
    assert np.allclose(nz[0], nz[1], atol=1e-8)


# spectrum ------------------------------------------------------------------------------------


def test_spectrum_examples():
    assert np.allclose(spectrum(Graph.from_edges(2, [(0, 1)]).kirchhoff()), [0, 2])
    c4 = skeleton_graph(cycle(4))[0].kirchhoff()
    expected = np.sort([2 - 2 * math.cos(2 * math.pi * k / 4) for k in range(4)])
    assert np.allclose(spectrum(c4), expected, atol=1e-12)
    assert np.allclose(spectrum(dirac(EDGE).entries), [-math.sqrt(2), 0, math.sqrt(2)])


@pytest.mark.parametrize("n", [5, 8, 13, 32])
def test_cycle_spectrum_matches_circulant(n):
    expected = np.sort([2 - 2 * math.cos(2 * math.pi * k / n) for k in range(n)])
    assert np.allclose(spectrum(skeleton_graph(cycle(n))[0].kirchhoff()), expected, atol=1e-12)


def test_spectrum_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        spectrum(np.zeros((2, 3)))


@settings(max_examples=50, deadline=None)
@given(symmetric_matrices(max_n=30))
def test_eigen_residual_bound(M):
    w, U = np.linalg.eigh(M)
    assert np.allclose(w, spectrum(M))
    n = M.shape[0]
    residual = np.linalg.norm(M @ U - U * w, 2)
    assert residual <= n * np.finfo(float).eps * np.linalg.norm(M, 2) * 10


# spectral functions ---------------------------------------------------------------------------


def test_spectral_function_examples():
    s = np.array([0.0, 1.0, 3.0])
    assert spectral_function_value(s, 0.0) == 0.0
    assert spectral_function_value(s, 1.0) == 3.0
    assert spectral_function_value(np.array([0.0, 2.0]), 0.75) == 2.0
    with pytest.raises(ValueError):
        spectral_function_value(s, 1.5)


def test_ids_examples():
    s = np.array([0.0, 2.0])
    assert ids_value(s, 1.0) == 0.5
    assert ids_value(s, -0.1) == 0.0
    assert ids_value(s, 2.0) == 1.0
    assert ids_value(s, 7.0) == 1.0


def test_l1_distance_examples():
    assert l1_distance(np.array([0.0, 2.0]), np.array([0.0, 2.0])) == 0.0
    assert l1_distance(np.array([0.0, 2.0]), np.array([0.0, 4.0])) == 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), st.lists(st.floats(-5, 5), min_size=1, max_size=12))
def test_l1_distance_matches_fine_riemann_sum(a, b):
    a, b = np.sort(a), np.sort(b)
    # midpoints of a grid fine enough to hit every step of both functions
    m = math.lcm(len(a), len(b)) * 4
    x = (np.arange(m) + 0.5) / m
    Fa = a[np.ceil(x * len(a)).astype(int) - 1]
    Fb = b[np.ceil(x * len(b)).astype(int) - 1]
    assert l1_distance(a, b) == pytest.approx(float(np.mean(np.abs(Fa - Fb))), abs=1e-12)
    assert l1_distance(a, b) == pytest.approx(l1_distance(b, a), abs=1e-12)


def test_cycle_refinement_distances_decrease():
    spectra = [spectrum(skeleton_graph(cycle(n))[0].kirchhoff()) for n in (8, 16, 32, 64)]
    d = [l1_distance(a, b) for a, b in zip(spectra[:-1], spectra[1:])]
    assert all(x >= 0 for x in d)
    assert d[0] > d[1] > d[2]


def test_refinement_of_cycle_distances_decrease():
    c = cycle(8)
    spectra = []
    for _ in range(4):
        spectra.append(spectrum(skeleton_graph(c)[0].kirchhoff()))
        c = barycentric_refine(c)
    d = [l1_distance(a, b) for a, b in zip(spectra[:-1], spectra[1:])]
    assert d[0] > d[1] > d[2] > 0


# Lidskii and the arcsin law ----------------------------------------------------------------


def test_lidskii_identical():
    A = np.diag([1.0, 2.0])
    assert lidskii_check(A, A) == (0.0, 0.0, True)


def test_lidskii_single_edge():
    g = random_graph(10, 0.4, 3)
    h = Graph.from_edges(g.n, sorted(g.edges)[1:])
    result = lidskii_check(g.kirchhoff(), h.kirchhoff())
    assert result.rhs == 4 and result.ok


@settings(max_examples=200, deadline=None)
@given(symmetric_matrices(max_n=10), st.integers(0, 2**32 - 1))
def test_lidskii_random_pairs(A, seed):
    E = np.random.default_rng(seed).normal(size=A.shape)
    assert lidskii_check(A, A + E + E.T).ok


def test_lidskii_size_mismatch():
    with pytest.raises(ValueError):
        lidskii_check(np.eye(2), np.eye(3))


@settings(max_examples=80, deadline=None)
@given(graphs(max_n=10), st.data())
def test_kirchhoff_stability_under_edge_edits(g, data):
    pairs = list(itertools.combinations(range(g.n), 2))
    if not pairs:
        return
    edits = data.draw(st.sets(st.sampled_from(pairs), max_size=4))
    h = Graph.from_edges(g.n, set(g.edges) ^ edits)
    lhs = float(np.sum(np.abs(spectrum(g.kirchhoff()) - spectrum(h.kirchhoff()))))
    assert lhs <= 4 * len(edits) + 1e-9


def test_arcsin_cdf_examples():
    assert arcsin_cdf(0.0) == 0.0
    assert arcsin_cdf(4.0) == pytest.approx(1.0, abs=1e-15)
    assert arcsin_cdf(2.0) == pytest.approx(0.5, abs=1e-15)
    assert arcsin_cdf(-1.0) == 0.0 and arcsin_cdf(9.0) == pytest.approx(1.0)


def test_ids_sup_distance_sees_jumps():
    # a single eigenvalue at 2 has a jump of size 1 at the median of the law
    assert ids_sup_distance(np.array([2.0])) == pytest.approx(0.5, abs=1e-12)


def test_cycle_ids_approaches_arcsin_law():
    values = [ids_sup_distance(spectrum(skeleton_graph(cycle(n))[0].kirchhoff())) for n in (16, 64, 256)]
    assert values[0] > values[1] > values[2]
    assert values[2] <= 0.05


@pytest.mark.parametrize("name", ["edge", "K4", "octahedron", "C4*C4", "torus 7", "random 3", "cross-polytope 3"])
def test_block_assembly_matches_full_dirac(name):
    c = NAMED_COMPLEXES[name]()
    D = dirac(c)
    full = exterior_derivative(c)
    offs = c.offsets
    for k, blk in enumerate(derivative_blocks(c)):
        assert np.array_equal(blk, full[offs[k + 1] : offs[k + 2], offs[k] : offs[k + 1]])
    for a, b in zip(hodge(c), hodge(D)):
        assert np.array_equal(a, b)


def test_symmetric_nullity_matches_svd():
    rng = np.random.default_rng(5)
    for rank in range(0, 12, 3):
        B = rng.normal(size=(12, rank))
        L = B @ B.T
        L = 0.5 * (L + L.T)
        s = np.linalg.svd(L, compute_uv=False)
        assert nullity(L) == int(np.sum(s < 1e-8 * max(1.0, s[0]))) == 12 - rank
