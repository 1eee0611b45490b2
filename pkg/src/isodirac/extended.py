"""Fixed-point big-integer replay of the QR flow.

The flow shrinks the block sub-diagonal part ``c_t`` of ``D_t``: its smallest
nonzero singular values decay like ``exp(-t * spread)`` with ``spread`` the
range of ``g`` over the spectrum, while rounding errors in those entries are
amplified by the same factor. Past a modest ``t`` double precision can no
longer tell the rank of ``c_t`` apart from noise. This module recomputes
``D_t`` with every number stored as a Python integer scaled by ``2**bits``,
which makes the working precision a free parameter.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

__all__ = ["FixedFlow", "to_fixed", "to_float", "fixed_flow", "fixed_deform", "fixed_singular_values", "precision_for"]


def precision_for(dynamic_digits: float, margin: int = 20) -> int:
    """Decimal digits needed to separate singular values ``~10**-dyn`` from amplified noise."""
    return int(math.ceil(2.0 * max(dynamic_digits, 0.0))) + margin


def to_fixed(M: np.ndarray, bits: int) -> np.ndarray:
    """Exact dyadic values of ``M`` scaled by ``2**bits`` (truncated below ``2**-bits``)."""
    one = 1 << bits
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        out[idx] = int(Fraction(float(x)) * one)
    return out


def _mul(A: np.ndarray, B: np.ndarray, bits: int) -> np.ndarray:
    return A.dot(B) >> bits


def _expm(A: np.ndarray, bits: int, norm_bound: float) -> np.ndarray:
    """``exp(A)`` by scaling and squaring with a Taylor series; ``norm_bound >= ||A||``."""
    n = A.shape[0]
    one = 1 << bits
    s = max(0, math.ceil(math.log2(max(norm_bound, 1e-300)))) + 6
    A = np.where(A >= 0, A >> s, -((-A) >> s))
    eye = np.identity(n, dtype=object) * one
    E = eye.copy()
    term = eye
    k = 1
    while True:
        term = _mul(term, A, bits)
        term = np.where(term >= 0, term // k, -((-term) // k))
        E = E + term
        if max(abs(x) for x in term.flat) == 0:
            break
        k += 1
    for _ in range(s):
        E = _mul(E, E, bits)
    return E


def _qr_q(M: np.ndarray, bits: int) -> np.ndarray:
    """Orthogonal factor of ``M`` by Gram-Schmidt with re-orthogonalization."""
    n = M.shape[1]
    one = 1 << bits
    Q = np.empty(M.shape, dtype=object)
    for j in range(n):
        u = M[:, j].copy()
        for _ in range(2):
            if j:
                h = Q[:, :j].T.dot(u) >> bits
                u = u - (Q[:, :j].dot(h) >> bits)
        r = math.isqrt(int(sum(x * x for x in u)))
        if r == 0:
            raise np.linalg.LinAlgError(f"column {j} vanished at {bits} bits")
        Q[:, j] = (u * one) // r
    return Q


class FixedFlow(NamedTuple):
    """Scaled integer factors of ``exp(-t g(D0) - shift) = Q R`` and ``D_t = Q.T D0 Q``."""

    Q: np.ndarray
    R: np.ndarray
    D: np.ndarray
    bits: int
    shift: float


def fixed_flow(D0: np.ndarray, g: Sequence[float], t: float, digits: int, with_r: bool = False) -> FixedFlow:
    """QR flow in fixed point with ``digits`` decimal digits.

    ``shift`` is the largest exponent ``-t g(lambda)``; subtracting it keeps
    the exponential bounded and only rescales ``R``. ``R`` is computed when
    ``with_r`` is set and is ``None`` otherwise.
    """
    n = D0.shape[0]
    bits = int(math.ceil(digits * math.log2(10))) + 32
    D = to_fixed(D0, bits)
    one = 1 << bits
    eye = np.identity(n, dtype=object)
    G = np.zeros((n, n), dtype=object)
    for c in reversed(tuple(g)):
        G = _mul(G, D, bits) + int(Fraction(float(c)) * one) * eye
    w = np.linalg.eigvalsh(D0)
    expo = -t * np.polynomial.polynomial.polyval(w, tuple(g))
    shift_value = float(expo.max())
    shift = int(Fraction(shift_value) * one)
    tt = int(Fraction(float(t)) * one)
    A = -((G * tt) >> bits) - shift * eye
    E = _expm(A, bits, float(expo.max() - expo.min()) + 1.0)
    Q = _qr_q(E, bits)
    R = _mul(Q.T, E, bits) if with_r else None
    return FixedFlow(Q, R, _mul(_mul(Q.T, D, bits), Q, bits), bits, shift_value)


def fixed_deform(D0: np.ndarray, g: Sequence[float], t: float, digits: int) -> tuple[np.ndarray, int]:
    """``D_t`` for ``exp(-t g(D0)) = Q R`` computed in fixed point with ``digits`` decimal digits.

    Returns the scaled integer matrix and its scale exponent ``bits``.
    """
    flow = fixed_flow(D0, g, t, digits)
    return flow.D, flow.bits


def to_float(M: np.ndarray, bits: int) -> np.ndarray:
    """Nearest doubles of a scaled integer matrix."""
    out = np.empty(M.shape, dtype=float)
    for idx, x in np.ndenumerate(M):
        out[idx] = float(Fraction(int(x), 1 << bits))
    return out


def fixed_singular_values(block: np.ndarray, bits: int, digits: int) -> list[float]:
    """Singular values of a scaled integer block, as floats (tiny values keep their exponent)."""
    if block.size == 0:
        return []
    with mpmath.workdps(digits):
        scale = mpmath.mpf(2) ** -bits
        M = mpmath.matrix([[mpmath.mpf(int(x)) * scale for x in row] for row in block.tolist()])
        sv = mpmath.svd_r(M, compute_uv=False)
        return sorted((float(x) if x > mpmath.mpf(10) ** -300 else 0.0 for x in sv), reverse=True)
