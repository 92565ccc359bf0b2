"""Wedge-evaluation point of a bundle and sampled stability diagnostics.

The wedge of r basis sections is pointwise a section of the determinant line
bundle; expanding every r-fold wedge in the monomial basis of that line
bundle yields a matrix whose surjectivity witnesses global generation and
whose orbit under the basis-change action carries the stability information
probed by ``kempf_ness_profile``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from .errors import ConstructionError, InvalidInputError
from .sections import SectionBasis, parse_bundle_id

__all__ = ["GiesekerPoint", "gieseker_point", "kempf_ness_profile", "wedge_power_matrix"]

SOLVE_RTOL = 1e-10


def _det_bundle(bundle_id: str) -> tuple[str, int]:
    """Determinant line bundle of a built-in: (manifold, degree)."""
    family, degrees, manifold = parse_bundle_id(bundle_id)
    if family in ("LineP1", "LineP2"):
        return manifold, degrees[0]
    if family == "Sum":
        return manifold, degrees[0] + degrees[1]
    return "P2", 3  # tangent bundle: anticanonical degree


def _monomial_columns(manifold: str, degree: int, nodes: NDArray) -> NDArray:
    """Monomial basis of the degree-d line bundle evaluated at sample nodes."""
    if manifold == "P1":
        z = nodes[:, 0]
        return np.stack([z**m for m in range(degree + 1)], axis=-1)
    z1, z2 = nodes[:, 0], nodes[:, 1]
    cols = [z1**a * z2**b for a in range(degree + 1) for b in range(degree - a + 1)]
    return np.stack(cols, axis=-1)


def _sample_indices(B: SectionBasis, count: int) -> NDArray:
    # Generic well-conditioned nodes: |z| nearest 1, deterministic tie-break.
    radii = np.sum(np.abs(B.scheme.nodes) ** 2, axis=1)
    order = np.argsort(np.abs(radii - 1.0), kind="stable")
    if count > order.shape[0]:
        raise InvalidInputError(
            f"not enough quadrature nodes ({order.shape[0]}) for {count} sample points"
        )
    return order[:count]


@dataclass(frozen=True)
class GiesekerPoint:
    """Matrix of the r-fold wedge evaluation map in fixed bases.

    Rows follow the monomial basis of the determinant line bundle (dimension
    M); columns follow the r-subsets of the section basis in lexicographic
    order (dimension C(N, r)).  ``solve_residual`` is the worst relative
    residual of the per-column expansion solves.
    """

    bundle_id: str
    rank: int
    dim: int
    matrix: NDArray[np.complex128] = field(repr=False)
    subsets: tuple[tuple[int, ...], ...]
    solve_residual: float

    @property
    def codomain_dim(self) -> int:
        return self.matrix.shape[0]

    def matrix_rank(self) -> int:
        return int(np.linalg.matrix_rank(self.matrix))


def gieseker_point(B: SectionBasis) -> GiesekerPoint:
    """Expand every r-fold wedge of basis sections in the determinant bundle basis.

    Solves the (overdetermined, consistent) linear system at 2M generic
    quadrature nodes per column; a residual above 1e-10 relative signals a
    section-evaluation inconsistency and raises ConstructionError.
    """
    manifold, det_degree = _det_bundle(B.bundle_id)
    r, N = B.rank, B.dim
    subsets = tuple(combinations(range(N), r))
    probe = _monomial_columns(manifold, det_degree, B.scheme.nodes[:1])
    M = probe.shape[1]
    idx = _sample_indices(B, 2 * M)
    nodes = B.scheme.nodes[idx]
    vander = _monomial_columns(manifold, det_degree, nodes)

    S = B.evals[idx]  # (2M, r, N)
    cols = np.empty((2 * M, len(subsets)), dtype=np.complex128)
    for c, I in enumerate(subsets):
        cols[:, c] = np.linalg.det(S[:, :, I])

    coeffs, _, _, _ = np.linalg.lstsq(vander, cols, rcond=None)
    residual = vander @ coeffs - cols
    col_norms = np.linalg.norm(cols, axis=0)
    res_norms = np.linalg.norm(residual, axis=0)
    floor = SOLVE_RTOL * max(float(col_norms.max()), 1.0)
    rel = float((res_norms / np.maximum(col_norms, floor)).max())
    if rel > SOLVE_RTOL:
        raise ConstructionError(
            f"wedge expansion inconsistent for {B.bundle_id}: relative solve "
            f"residual {rel:.3e} exceeds {SOLVE_RTOL:.0e}"
        )
    return GiesekerPoint(
        bundle_id=B.bundle_id,
        rank=r,
        dim=N,
        matrix=coeffs,
        subsets=subsets,
        solve_residual=rel,
    )


def wedge_power_matrix(A: NDArray, r: int) -> NDArray:
    """r-th compound matrix: entry (I, J) is the minor det A[I, J], subsets lex-ordered."""
    N = A.shape[0]
    subsets = list(combinations(range(N), r))
    K = len(subsets)
    out = np.empty((K, K), dtype=np.complex128)
    for i, I in enumerate(subsets):
        rows = A[np.array(I), :]
        for j, J in enumerate(subsets):
            out[i, j] = np.linalg.det(rows[:, np.array(J)])
    return out


def kempf_ness_profile(point: GiesekerPoint, direction: NDArray, ts) -> NDArray:
    """log squared Frobenius norm of the wedge-action orbit along e^(t * direction).

    ``direction`` must be a traceless Hermitian N x N matrix.  The returned
    profile f(t) = log || T o wedge^r(e^(t direction)) ||_F^2 is a log-sum-exp
    of exponentials and therefore convex on every grid.
    """
    lam = np.asarray(direction, dtype=np.complex128)
    N = point.dim
    if lam.shape != (N, N):
        raise InvalidInputError(f"direction has shape {lam.shape}, expected ({N}, {N})")
    scale = float(np.abs(lam).max())
    if scale == 0.0:
        base = 2.0 * np.log(np.linalg.norm(point.matrix))
        return np.full(len(ts), base)
    if np.abs(lam - lam.conj().T).max() > 1e-12 * scale:
        raise InvalidInputError("direction must be Hermitian")
    if abs(np.trace(lam)) > 1e-10 * scale * N:
        raise InvalidInputError(f"direction must be traceless, got trace {np.trace(lam):.3e}")

    d, U = np.linalg.eigh(lam)
    W = wedge_power_matrix(U, point.rank)
    rotated = point.matrix @ W
    weight = np.array([sum(d[i] for i in J) for J in point.subsets])
    sq = np.sum(np.abs(rotated) ** 2, axis=0)
    mask = sq > 0.0
    log_sq = np.log(sq[mask])
    w_act = weight[mask]
    ts = np.asarray(ts, dtype=float)
    return np.array([logsumexp(2.0 * t * w_act + log_sq) for t in ts])
