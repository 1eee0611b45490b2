"""Isospectral QR deformation of Dirac matrices and the matching Lax ODE.

``qr_deform`` factors ``exp(-t g(D0)) = Q R`` and returns ``D_t = Q.T D0 Q``.
Differentiating the factorization gives ``D' = [D, B]`` with
``B = g(D)^+ - g(D)^-`` built from the *entrywise* strictly upper and lower
triangles of ``g(D)``; that is the generator ``lax_integrate`` uses by
default. The block-projected generator produces the same flow up to a
block-diagonal orthogonal change of basis inside each dimension sector.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .extended import fixed_deform, fixed_flow, fixed_singular_values, precision_for, to_float
from .spectral import DEFAULT_TOL, DiracMatrix, block_supertrace, diagonal_blocks, expm_symmetric, nullity

__all__ = [
    "SingularMatrixError",
    "GSpec",
    "BlockSplit",
    "block_labels",
    "block_split",
    "bracket_generator",
    "apply_g",
    "matrix_polynomial",
    "qr_decompose",
    "DeformationState",
    "qr_deform",
    "split_deformed",
    "band_leakage",
    "lax_rhs",
    "lax_integrate",
    "dynamic_range",
    "DeformedBetti",
    "deformed_betti",
    "deformation_report",
]

FLOAT_DYNAMIC_LIMIT = 4.0
FLOAT_FLOW_LIMIT = 6.0
EXTENDED_SIZE_LIMIT = 400


class SingularMatrixError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class GSpec:
    """Polynomial ``g(x) = c_0 + c_1 x + ... + c_p x^p``."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs or not any(coeffs):
            raise ValueError("g needs at least one nonzero coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def parse(cls, text: str) -> GSpec:
        return cls(tuple(float(c) for c in text.split(",")))

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)


def _as_g(g: GSpec | Iterable[float]) -> GSpec:
    return g if isinstance(g, GSpec) else GSpec(tuple(g))


def block_labels(offsets: Sequence[int], n: int | None = None) -> np.ndarray:
    offsets = list(offsets)
    if n is not None and (offsets[0] != 0 or offsets[-1] != n):
        raise ValueError(f"offsets {offsets} do not partition range({n})")
    if any(b <= a for a, b in zip(offsets[:-1], offsets[1:])):
        raise ValueError(f"offsets must be strictly increasing: {offsets}")
    return np.repeat(np.arange(len(offsets) - 1), np.diff(offsets))


@dataclass(frozen=True)
class BlockSplit:
    plus: np.ndarray
    minus: np.ndarray
    zero: np.ndarray


def block_split(A: np.ndarray, offsets: Sequence[int]) -> BlockSplit:
    """Split ``A`` into strictly upper blocks, strictly lower blocks and diagonal blocks."""
    lab = block_labels(offsets, A.shape[0])
    rows, cols = lab[:, None], lab[None, :]
    return BlockSplit(np.where(rows < cols, A, 0.0), np.where(rows > cols, A, 0.0), np.where(rows == cols, A, 0.0))


def bracket_generator(A: np.ndarray, offsets: Sequence[int]) -> np.ndarray:
    parts = block_split(A, offsets)
    return parts.plus - parts.minus


def apply_g(D: np.ndarray, g: GSpec | Iterable[float]) -> np.ndarray:
    """``g(D)`` by functional calculus on the eigendecomposition of symmetric ``D``."""
    g = _as_g(g)
    w, U = np.linalg.eigh(D)
    return (U * g(w)) @ U.T


def matrix_polynomial(D: np.ndarray, g: GSpec | Iterable[float]) -> np.ndarray:
    """``g(D)`` by Horner's rule."""
    g = _as_g(g)
    out = np.zeros_like(D, dtype=float)
    eye = np.eye(D.shape[0])
    for c in reversed(g.coeffs):
        out = out @ D + c * eye
    return out


def qr_decompose(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt QR with one re-orthogonalization pass.

    ``R`` has a positive diagonal, which makes the factorization unique.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[1]
    Q = np.zeros_like(M)
    R = np.zeros((n, n))
    scale = np.linalg.norm(M)
    for k in range(n):
        v = M[:, k]
        u = v.copy()
        for _ in range(2):
            h = Q[:, :k].T @ u
            u -= Q[:, :k] @ h
            R[:k, k] += h
        r = np.linalg.norm(u)
        if r <= 16 * np.finfo(float).eps * max(scale, 1e-300):
            raise SingularMatrixError(f"matrix is numerically singular at column {k}")
        R[k, k] = r
        Q[:, k] = u / r
    return Q, R


@dataclass(frozen=True)
class DeformationState:
    """Result of the QR flow at time ``t``.

    ``exp(-t g(D0)) = exp(log_scale) * Q @ R``; the scalar factor absorbs the
    exponent shifts used to avoid overflow.
    """

    t: float
    Q: np.ndarray
    R: np.ndarray
    D: np.ndarray
    offsets: tuple[int, ...]
    log_scale: float = 0.0
    substeps: int = 1
    method: Literal["float64", "extended"] = "float64"
    digits: int = 16


def _unpack(D0) -> tuple[np.ndarray, tuple[int, ...] | None]:
    if isinstance(D0, DiracMatrix):
        return D0.entries, D0.offsets
    return np.asarray(D0, dtype=float), None


def qr_deform(
    D0: DiracMatrix | np.ndarray,
    g: GSpec | Iterable[float],
    t: float,
    offsets: Sequence[int] | None = None,
    max_spread: float = 8.0,
    precision: Literal["auto", "float64", "extended"] = "auto",
    extended_limit: int = EXTENDED_SIZE_LIMIT,
) -> DeformationState:
    """Deform ``D0`` to ``D_t = Q.T @ D0 @ Q`` where ``exp(-t g(D0)) = Q R``.

    In double precision, when ``|t| * (max g - min g)`` over the spectrum
    exceeds ``max_spread`` the time interval is split; the flow property
    ``Q_{s+u} = Q_s Q_u(D_s)`` keeps every factored exponential well
    conditioned. Splitting does not stop rounding errors from growing like
    ``10**dyn`` (see ``dynamic_range``), and past ``dyn`` of about 6 the
    double precision flow can even settle on the wrong limit. With
    ``precision="auto"`` such flows are recomputed in fixed point with
    ``2 dyn + 20`` digits (Gram-Schmidt on singular values down to
    ``10**-dyn`` needs twice that many), for matrices up to ``extended_limit`` rows.
    """
    g = _as_g(g)
    D, offs = _unpack(D0)
    offs = tuple(offsets) if offsets is not None else offs
    if offs is None:
        offs = (0, D.shape[0])
    n = D.shape[0]
    if t == 0 or n == 0:
        return DeformationState(float(t), np.eye(n), np.eye(n), D.copy(), offs)
    dyn = dynamic_range(D, g, t)
    if precision == "extended" or (precision == "auto" and dyn > FLOAT_FLOW_LIMIT and n <= extended_limit):
        digits = precision_for(dyn)
        for _ in range(4):
            flow = fixed_flow(D, g.coeffs, t, digits, with_r=True)
            Q = to_float(flow.Q, flow.bits)
            if np.abs(Q.T @ Q - np.eye(n)).max() <= 1e-12:
                break
            digits += precision_for(dyn)
        else:
            raise np.linalg.LinAlgError(f"fixed point QR flow lost orthogonality at {digits} digits")
        Dt = to_float(flow.D, flow.bits)
        Dt = 0.5 * (Dt + Dt.T)
        R = np.triu(to_float(flow.R, flow.bits))
        return DeformationState(float(t), Q, R, Dt, offs, flow.shift, 1, "extended", digits)
    w = np.linalg.eigvalsh(D)
    gw = g(w)
    spread = abs(t) * float(gw.max() - gw.min())
    steps = max(1, math.ceil(spread / max_spread))
    h = t / steps
    Q = np.eye(n)
    R = np.eye(n)
    log_scale = 0.0
    Dt = D
    for _ in range(steps):
        w, U = np.linalg.eigh(Dt)
        expo = -h * g(w)
        shift = float(expo.max())
        Qs, Rs = qr_decompose((U * np.exp(expo - shift)) @ U.T)
        Q = Q @ Qs
        R = Rs @ R
        log_scale += shift
        Dt = Qs.T @ Dt @ Qs
        Dt = 0.5 * (Dt + Dt.T)
    return DeformationState(float(t), Q, R, Dt, offs, log_scale, steps)


def split_deformed(D: np.ndarray, offsets: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(c, m)`` with ``D = c + c.T + m``.

    ``c`` is the block sub-diagonal part (the sector of the exterior derivative)
    and ``m`` the diagonal blocks.
    """
    parts = block_split(D, offsets)
    return parts.minus, parts.zero


def band_leakage(D: np.ndarray, offsets: Sequence[int]) -> float:
    """Largest entry outside the block tri-diagonal band."""
    lab = block_labels(offsets, D.shape[0])
    far = np.abs(lab[:, None] - lab[None, :]) > 1
    return float(np.abs(D[far]).max(initial=0.0))


def lax_rhs(D: np.ndarray, g: GSpec | Iterable[float], offsets: Sequence[int]) -> np.ndarray:
    """Commutator ``[B, D] = B D - D B`` with ``B = g(D)^+ - g(D)^-``."""
    B = bracket_generator(apply_g(D, g), offsets)
    return B @ D - D @ B


def lax_integrate(
    D0: DiracMatrix | np.ndarray,
    g: GSpec | Iterable[float],
    t: float,
    steps: int,
    generator: Literal["triangular", "block"] = "triangular",
) -> np.ndarray:
    """Classical RK4 integration of ``D' = [D, B]``, the flow realized by :func:`qr_deform`.

    ``generator="triangular"`` projects onto entrywise triangles (one block per
    index) and reproduces ``qr_deform`` exactly; ``"block"`` uses the dimension
    sectors of a :class:`DiracMatrix`.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    g = _as_g(g)
    D, offs = _unpack(D0)
    if generator == "triangular":
        offs = tuple(range(D.shape[0] + 1))
    elif offs is None:
        raise ValueError("block generator needs a DiracMatrix with offsets")
    h = t / steps

    def f(X: np.ndarray) -> np.ndarray:
        return -lax_rhs(X, g, offs)

    X = D.copy()
    for _ in range(steps):
        k1 = f(X)
        k2 = f(X + 0.5 * h * k1)
        k3 = f(X + 0.5 * h * k2)
        k4 = f(X + h * k3)
        X = X + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return X


def dynamic_range(D0: DiracMatrix | np.ndarray, g: GSpec | Iterable[float], t: float) -> float:
    """Decimal orders of magnitude ``|t| * (max g - min g) / ln 10`` spanned by ``exp(-t g(D0))``."""
    g = _as_g(g)
    D, _ = _unpack(D0)
    if D.shape[0] == 0:
        return 0.0
    gw = g(np.linalg.eigvalsh(D))
    return abs(t) * float(gw.max() - gw.min()) / math.log(10)


class DeformedBetti(NamedTuple):
    betti: tuple[int, ...]
    method: Literal["float64", "extended", "unresolved"]
    digits: int
    dynamic_range: float


def _betti_from_ranks(fv: Sequence[int], ranks: Sequence[int]) -> tuple[int, ...]:
    r = [*ranks, 0]
    return tuple(fv[k] - r[k] - (r[k - 1] if k else 0) for k in range(len(fv)))


def deformed_betti(
    D0: DiracMatrix,
    g: GSpec | Iterable[float],
    t: float,
    tol: float = DEFAULT_TOL,
    extended_limit: int = EXTENDED_SIZE_LIMIT,
) -> DeformedBetti:
    """Kernel dimensions of the diagonal blocks of ``(c_t + c_t.T)**2``.

    Since ``c_t c_t = 0`` these are ``f_k - rank c_k - rank c_{k-1}`` with
    ``c_k`` the block of ``c_t`` from dimension ``k`` to ``k+1``; ranks of
    the unsquared blocks keep half the dynamic range of the squared operator.

    The smallest nonzero singular values of ``c_t`` scale like ``10**-dyn``
    with ``dyn = dynamic_range(D0, g, t)`` and rounding noise like
    ``10**(dyn - digits)``. Double precision (cutoff ``tol``) is used while
    ``dyn <= 4``; beyond that the flow is recomputed in fixed point with
    ``2 dyn + 20`` digits and cutoff ``10**(-digits/2)``. Matrices larger
    than ``extended_limit`` fall back to double precision and are flagged
    ``"unresolved"``.
    """
    g = _as_g(g)
    offs = D0.offsets
    fv = [b - a for a, b in zip(offs[:-1], offs[1:])]
    scale = max(1.0, float(np.abs(np.linalg.eigvalsh(D0.entries)).max(initial=0.0)))
    dyn = dynamic_range(D0, g, t)
    if dyn <= FLOAT_DYNAMIC_LIMIT or D0.n > extended_limit:
        c, _ = split_deformed(qr_deform(D0, g, t, precision="float64").D, offs)
        cutoff = tol * scale
        ranks = []
        for k in range(len(fv) - 1):
            block = c[offs[k + 1] : offs[k + 2], offs[k] : offs[k + 1]]
            ranks.append(int(np.sum(np.linalg.svd(block, compute_uv=False) > cutoff)))
        method = "float64" if dyn <= FLOAT_DYNAMIC_LIMIT else "unresolved"
        return DeformedBetti(_betti_from_ranks(fv, ranks), method, 16, dyn)
    digits = precision_for(dyn)
    Dt, bits = fixed_deform(D0.entries, g.coeffs, t, digits)
    cutoff = 10.0 ** (-digits / 2) * scale
    ranks = []
    for k in range(len(fv) - 1):
        sv = fixed_singular_values(Dt[offs[k + 1] : offs[k + 2], offs[k] : offs[k + 1]], bits, digits)
        ranks.append(sum(x > cutoff for x in sv))
    return DeformedBetti(_betti_from_ranks(fv, ranks), "extended", digits, dyn)


def deformation_report(
    D0: DiracMatrix,
    g: GSpec | Iterable[float],
    t: float,
    steps: int | None = None,
    tol: float = 1e-8,
) -> dict:
    """Checks of one deformation: drift, band, ``c c = 0``, Betti and McKean-Singer."""
    g = _as_g(g)
    state = qr_deform(D0, g, t)
    offs = D0.offsets
    ref = np.linalg.eigvalsh(D0.entries)
    drift = float(np.max(np.abs(np.linalg.eigvalsh(state.D) - ref), initial=0.0))
    c, m = split_deformed(state.D, offs)
    C = c + c.T
    betti0 = [nullity(L, tol) for L in diagonal_blocks(D0.entries @ D0.entries, offs)]
    deformed = deformed_betti(D0, g, t, tol)
    betti_t = list(deformed.betti)
    L_t = state.D @ state.D
    record = {
        "t": float(t),
        "g": list(g.coeffs),
        "substeps": state.substeps,
        "spectral_drift": drift,
        "band_leakage": band_leakage(state.D, offs),
        "cc_max": float(np.abs(c @ c).max(initial=0.0)),
        "diagonal_block_norm": float(np.abs(m).max(initial=0.0)),
        "betti": betti_t,
        "betti_ok": None if deformed.method == "unresolved" else betti_t == betti0,
        "betti_method": deformed.method,
        "dynamic_range": deformed.dynamic_range,
        "mckean_singer": block_supertrace(expm_symmetric(L_t, -1.0), offs),
        "mckean_singer_c": block_supertrace(expm_symmetric(C @ C, -1.0), offs),
    }
    if steps:
        record["lax_steps"] = steps
        record["lax_diff"] = float(np.abs(lax_integrate(D0, g, t, steps) - state.D).max())
    return record
