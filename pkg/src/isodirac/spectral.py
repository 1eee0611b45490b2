"""Dirac and Hodge matrices, Betti numbers, supertraces and spectral functions.

Matrices are dense ``float64`` arrays indexed by the canonical simplex order
of a :class:`~isodirac.complex.Complex`. The exterior derivative ``d`` sits
in the block sub-diagonal (row = higher simplex, column = face) and the
Dirac matrix is ``D = d + d.T``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .complex import Complex, Simplex

__all__ = [
    "DEFAULT_TOL",
    "incidence_sign",
    "exterior_derivative",
    "derivative_blocks",
    "DiracMatrix",
    "dirac",
    "diagonal_blocks",
    "hodge",
    "nullity",
    "betti",
    "betti_from_blocks",
    "exact_rank",
    "betti_exact",
    "supertrace",
    "supertrace_power",
    "block_supertrace",
    "spectrum",
    "expm_symmetric",
    "spectral_function_value",
    "ids_value",
    "l1_distance",
    "LidskiiCheck",
    "lidskii_check",
    "arcsin_cdf",
    "ids_sup_distance",
]

DEFAULT_TOL = 1e-8


def incidence_sign(x: Simplex, y: Simplex) -> int:
    """Orientation sign of face ``y`` in ``x``: ``(-1)**j`` for the dropped index ``j``, else 0."""
    if len(x) != len(y) + 1:
        return 0
    for j, v in enumerate(x):
        if x[:j] + x[j + 1 :] == tuple(y):
            return -1 if j % 2 else 1
    return 0


def exterior_derivative(c: Complex) -> np.ndarray:
    """Full ``n x n`` exterior derivative, block sub-diagonal."""
    n = len(c)
    d = np.zeros((n, n))
    idx = c.index
    for i, x in enumerate(c.simplices):
        for j, face in enumerate(c.faces(x)):
            d[i, idx[face]] = -1.0 if j % 2 else 1.0
    return d


@dataclass(frozen=True)
class DiracMatrix:
    """Symmetric Dirac matrix with the block boundaries of its dimension sectors."""

    entries: np.ndarray
    offsets: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def dirac(c: Complex) -> DiracMatrix:
    d = exterior_derivative(c)
    return DiracMatrix(d + d.T, c.offsets)


def diagonal_blocks(M: np.ndarray, offsets: Sequence[int]) -> list[np.ndarray]:
    return [M[a:b, a:b].copy() for a, b in zip(offsets[:-1], offsets[1:])]


def derivative_blocks(c: Complex) -> list[np.ndarray]:
    """Blocks ``d_k`` of the exterior derivative, mapping k-forms (columns) to (k+1)-forms (rows)."""
    offs = c.offsets
    idx = c.index
    blocks = []
    for k in range(len(offs) - 2):
        d = np.zeros((offs[k + 2] - offs[k + 1], offs[k + 1] - offs[k]))
        for i, x in enumerate(c.simplices[offs[k + 1] : offs[k + 2]]):
            for j, face in enumerate(c.faces(x)):
                d[i, idx[face] - offs[k]] = -1.0 if j % 2 else 1.0
        blocks.append(d)
    return blocks


def hodge(c: Complex | DiracMatrix) -> list[np.ndarray]:
    """Diagonal blocks ``L_0 .. L_q`` of ``L = D @ D``."""
    if isinstance(c, DiracMatrix):
        return diagonal_blocks(c.entries @ c.entries, c.offsets)
    # L_k = d_{k-1} d_{k-1}^T + d_k^T d_k, without forming the full Dirac matrix
    d = derivative_blocks(c)
    sizes = [b - a for a, b in zip(c.offsets[:-1], c.offsets[1:])]
    out = []
    for k, f in enumerate(sizes):
        L = np.zeros((f, f))
        if k > 0:
            L += d[k - 1] @ d[k - 1].T
        if k < len(d):
            L += d[k].T @ d[k]
        out.append(L)
    return out


def nullity(M: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values below ``tol * max(1, sigma_max)``.

    Symmetric input uses ``|eigenvalues|``, which are its singular values.
    """
    if M.size == 0:
        return M.shape[0]
    if M.shape[0] == M.shape[1] and np.array_equal(M, M.T):
        s = np.sort(np.abs(np.linalg.eigvalsh(M)))[::-1]
    else:
        s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s < tol * max(1.0, s[0])))


def betti_from_blocks(blocks: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    return tuple(nullity(L, tol) for L in blocks)


def betti(c: Complex, tol: float = DEFAULT_TOL) -> tuple[int, ...]:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return betti_from_blocks(hodge(c), tol)


def exact_rank(rows: list[list[int]]) -> int:
    """Rank over the rationals of an integer matrix (fraction-free Bareiss elimination)."""
    A = [list(r) for r in rows]
    if not A or not A[0]:
        return 0
    m, n = len(A), len(A[0])
    rank, prev = 0, 1
    for col in range(n):
        pivot = next((r for r in range(rank, m) if A[r][col] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        p = A[rank][col]
        for r in range(rank + 1, m):
            a = A[r][col]
            if a:
                A[r] = [(p * A[r][j] - a * A[rank][j]) // prev for j in range(n)]
            else:
                A[r] = [(p * A[r][j]) // prev for j in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def betti_exact(c: Complex) -> tuple[int, ...]:
    """Betti numbers from exact ranks of the incidence blocks: ``b_k = f_k - r_k - r_{k-1}``."""
    fv = [b - a for a, b in zip(c.offsets[:-1], c.offsets[1:])]
    idx = c.index
    ranks = []
    for k in range(len(fv) - 1):
        lo = c.offsets[k]
        rows = []
        for x in c.simplices[c.offsets[k + 1] : c.offsets[k + 2]]:
            row = [0] * fv[k]
            for j, face in enumerate(c.faces(x)):
                row[idx[face] - lo] = -1 if j % 2 else 1
            rows.append(row)
        ranks.append(exact_rank(rows))
    ranks.append(0)
    return tuple(fv[k] - ranks[k] - (ranks[k - 1] if k else 0) for k in range(len(fv)))


def expm_symmetric(M: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(t M)`` for symmetric ``M`` through its eigendecomposition."""
    w, U = np.linalg.eigh(M)
    return (U * np.exp(t * w)) @ U.T


def block_supertrace(M: np.ndarray, offsets: Sequence[int]) -> float:
    """``sum_k (-1)^k tr(M_kk)`` over the diagonal blocks of ``M``."""
    return float(sum((-1) ** k * np.trace(M[a:b, a:b]) for k, (a, b) in enumerate(zip(offsets[:-1], offsets[1:]))))


def supertrace(blocks: Sequence[np.ndarray], t: float) -> float:
    """Heat supertrace ``sum_k (-1)^k tr(exp(-t L_k))``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    total = 0.0
    for k, L in enumerate(blocks):
        if L.size:
            total += (-1) ** k * float(np.sum(np.exp(-t * np.linalg.eigvalsh(L))))
    return total


def supertrace_power(blocks: Sequence[np.ndarray], power: int) -> float:
    return float(sum((-1) ** k * np.trace(np.linalg.matrix_power(L, power)) for k, L in enumerate(blocks)))


def spectrum(m: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("spectrum needs a square matrix")
    if not np.allclose(m, m.T, rtol=0.0, atol=atol * max(1.0, float(np.abs(m).max(initial=0.0)))):
        raise ValueError("spectrum needs a symmetric matrix")
    return np.linalg.eigvalsh(m)


def spectral_function_value(s: np.ndarray, x: float) -> float:
    """``F(x) = lambda_{ceil(n x)}`` (1-based) with ``F(0) = 0``."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    n = len(s)
    return float(s[max(1, math.ceil(n * x)) - 1])


def ids_value(s: np.ndarray, lam: float) -> float:
    """Integrated density of states: fraction of eigenvalues ``<= lam``."""
    if len(s) == 0:
        return 0.0
    return float(np.searchsorted(s, lam, side="right")) / len(s)


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``int_0^1 |F_a - F_b| dx`` for the step functions of two sorted spectra."""
    na, nb = len(a), len(b)
    # every step of F_a lies on the grid k/na, so merge the two grids
    grid = np.union1d(np.arange(na + 1) / na, np.arange(nb + 1) / nb)
    mid = 0.5 * (grid[:-1] + grid[1:])
    ia = np.minimum(np.ceil(mid * na).astype(int), na) - 1
    ib = np.minimum(np.ceil(mid * nb).astype(int), nb) - 1
    return float(np.sum(np.diff(grid) * np.abs(np.asarray(a)[ia] - np.asarray(b)[ib])))


class LidskiiCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def lidskii_check(A: np.ndarray, B: np.ndarray) -> LidskiiCheck:
    """Compare ``sum |alpha_j - beta_j|`` with the entrywise l1 norm of ``A - B``."""
    if A.shape != B.shape:
        raise ValueError(f"size mismatch {A.shape} vs {B.shape}")
    lhs = float(np.sum(np.abs(spectrum(A) - spectrum(B))))
    rhs = float(np.sum(np.abs(A - B)))
    return LidskiiCheck(lhs, rhs, lhs <= rhs + 1e-9)


def arcsin_cdf(x: float | np.ndarray) -> float | np.ndarray:
    """``(2/pi) arcsin(sqrt(x)/2)`` on ``[0, 4]``, clamped outside."""
    x = np.clip(x, 0.0, 4.0)
    return 2.0 / np.pi * np.arcsin(np.sqrt(x) / 2.0)


def ids_sup_distance(s: np.ndarray, lo: float = 0.05, hi: float = 3.95, points: int = 2001) -> float:
    """Sup over ``[lo, hi]`` of ``|IDS(lam) - arcsin_cdf(lam)|``.

    A uniform grid is refined with the eigenvalues inside the window, where
    both one-sided limits of the step function are compared.
    """
    s = np.asarray(s)
    n = len(s)
    grid = np.linspace(lo, hi, points)
    worst = float(np.max(np.abs(np.searchsorted(s, grid, side="right") / n - arcsin_cdf(grid))))
    jumps = s[(s >= lo) & (s <= hi)]
    if len(jumps):
        ref = arcsin_cdf(jumps)
        right = np.searchsorted(s, jumps, side="right") / n
        left = np.searchsorted(s, jumps, side="left") / n
        worst = max(worst, float(np.max(np.abs(right - ref))), float(np.max(np.abs(left - ref))))
    return worst
