"""Built-in holomorphic vector bundles with explicit global-section bases.

Supported bundle ids (string form):

    LineP1(k)   degree-k line bundle on P1, k >= 1; basis 1, z, ..., z^k
    LineP2(k)   degree-k line bundle on P2, k >= 1; monomials z1^a z2^b with
                a+b <= k, ordered (a, b) lexicographic, a outermost
    Sum(a,b)    rank-2 direct sum of degrees a and b on P1, a, b >= 1;
                block-concatenated line-bundle bases
    TangentP2   holomorphic tangent bundle of P2; the eight vector fields of
                the traceless 3x3 generators acting on homogeneous coordinates

All section values are taken in one affine chart (the removed locus has
measure zero) in the chart's standard local frame, together with the
reference background fiber metric expressed in that same frame.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .core import FiberMetricField
from .errors import InvalidInputError
from .geometry import QuadratureScheme

__all__ = ["SectionBasis", "build_sections", "background_metric", "parse_bundle_id"]

_BUNDLE_RE = re.compile(r"^(LineP1|LineP2)\((\d+)\)$|^Sum\((\d+),\s*(\d+)\)$|^(TangentP2)$")


def parse_bundle_id(bundle_id: str) -> tuple[str, tuple[int, ...], str]:
    """Split a bundle id into (family, degrees, manifold_id)."""
    m = _BUNDLE_RE.match(bundle_id.strip())
    if not m:
        raise InvalidInputError(
            f"unrecognized bundle id {bundle_id!r}; expected LineP1(k), LineP2(k), "
            f"Sum(a,b), or TangentP2"
        )
    if m.group(1):
        family, k = m.group(1), int(m.group(2))
        if k < 1:
            raise InvalidInputError(f"line bundle degree must be >= 1, got {k}")
        return family, (k,), "P1" if family == "LineP1" else "P2"
    if m.group(5):
        return "TangentP2", (), "P2"
    a, b = int(m.group(3)), int(m.group(4))
    if a < 1 or b < 1:
        raise InvalidInputError(f"Sum(a,b) requires a, b >= 1, got ({a}, {b})")
    return "Sum", (a, b), "P1"


@dataclass(frozen=True)
class SectionBasis:
    """Reference basis of global sections evaluated at quadrature nodes.

    ``evals`` has shape (n_nodes, r, N); column i of the r x N slice at node q
    is the i-th basis section in the affine local frame.  ``frame_weight`` is
    the background fiber metric in the same frame.
    """

    bundle_id: str
    manifold_id: str
    rank: int
    dim: int
    scheme: QuadratureScheme
    evals: NDArray[np.complex128] = field(repr=False)
    frame_weight: FiberMetricField = field(repr=False)
    min_section_sv: float = 0.0

    @property
    def node_count(self) -> int:
        return self.evals.shape[0]

    def check_scheme(self, scheme: QuadratureScheme) -> None:
        if scheme is not self.scheme and (
            scheme.manifold_id != self.manifold_id
            or scheme.node_count != self.node_count
        ):
            raise InvalidInputError(
                f"quadrature scheme ({scheme.manifold_id}, {scheme.node_count} nodes) does "
                f"not match the one this basis was built on ({self.manifold_id}, "
                f"{self.node_count} nodes)"
            )


def _line_p1_evals(k: int, z: NDArray) -> NDArray:
    return np.stack([z**j for j in range(k + 1)], axis=-1)[:, None, :]


def _line_p1_weight(k: int, z: NDArray) -> NDArray:
    return ((1.0 + np.abs(z) ** 2) ** (-k))[:, None, None].astype(np.complex128)


def _line_p2_evals(k: int, z1: NDArray, z2: NDArray) -> NDArray:
    cols = [z1**a * z2**b for a in range(k + 1) for b in range(k - a + 1)]
    return np.stack(cols, axis=-1)[:, None, :]


def _line_p2_weight(k: int, z1: NDArray, z2: NDArray) -> NDArray:
    s = np.abs(z1) ** 2 + np.abs(z2) ** 2
    return ((1.0 + s) ** (-k))[:, None, None].astype(np.complex128)


# Traceless 3x3 generators in fixed order: the six elementary off-diagonal
# matrices E[mu,nu] (row-major over mu != nu), then the two diagonal ones
# diag(1,-1,0) and diag(0,1,-1).
def _sl3_generators() -> list[NDArray]:
    gens = []
    for mu in range(3):
        for nu in range(3):
            if mu != nu:
                g = np.zeros((3, 3))
                g[mu, nu] = 1.0
                gens.append(g)
    gens.append(np.diag([1.0, -1.0, 0.0]))
    gens.append(np.diag([0.0, 1.0, -1.0]))
    return gens


def vector_field_on_chart(gen: NDArray, z1: NDArray, z2: NDArray) -> NDArray:
    """Holomorphic vector field of a 3x3 generator, components in (d/dz1, d/dz2).

    The generator acts on homogeneous coordinates; in the affine chart
    zeta = (1, z1, z2) the induced field is V_j = (A zeta)_j - z_j (A zeta)_0.
    """
    one = np.ones_like(z1)
    zeta = np.stack([one, z1, z2], axis=-1)
    az = zeta @ gen.T.astype(complex)
    v1 = az[..., 1] - z1 * az[..., 0]
    v2 = az[..., 2] - z2 * az[..., 0]
    return np.stack([v1, v2], axis=-1)


def _tangent_p2_evals(z1: NDArray, z2: NDArray) -> NDArray:
    cols = [vector_field_on_chart(g, z1, z2) for g in _sl3_generators()]
    return np.stack(cols, axis=-1).transpose(0, 1, 2)  # (n, 2, 8)


def _tangent_p2_weight(z1: NDArray, z2: NDArray) -> NDArray:
    # Fubini-Study metric on the tangent bundle in the affine frame:
    # h0 = ((1+|z|^2) I - z z^dagger) / (1+|z|^2)^2  with z = (z1, z2).
    s = np.abs(z1) ** 2 + np.abs(z2) ** 2
    zcol = np.stack([z1, z2], axis=-1)
    outer = zcol[:, :, None] * zcol.conj()[:, None, :]
    h0 = ((1.0 + s)[:, None, None] * np.eye(2)[None] - outer) / ((1.0 + s) ** 2)[:, None, None]
    return h0


def build_sections(bundle_id: str, scheme: QuadratureScheme) -> SectionBasis:
    """Evaluate the reference section basis of ``bundle_id`` on ``scheme``.

    Raises InvalidInputError for unknown ids, degrees < 1, or a bundle that
    does not live on the scheme's manifold.
    """
    family, degrees, manifold = parse_bundle_id(bundle_id)
    if manifold != scheme.manifold_id:
        raise InvalidInputError(
            f"bundle {bundle_id} lives on {manifold}, but the scheme is for {scheme.manifold_id}"
        )
    if manifold == "P1":
        z = scheme.nodes[:, 0]
        if family == "LineP1":
            k = degrees[0]
            evals = _line_p1_evals(k, z)
            weight = _line_p1_weight(k, z)
            rank, dim = 1, k + 1
        else:  # Sum
            a, b = degrees
            n = z.shape[0]
            dim = a + b + 2
            evals = np.zeros((n, 2, dim), dtype=np.complex128)
            evals[:, 0, : a + 1] = _line_p1_evals(a, z)[:, 0, :]
            evals[:, 1, a + 1 :] = _line_p1_evals(b, z)[:, 0, :]
            weight = np.zeros((n, 2, 2), dtype=np.complex128)
            weight[:, 0, 0] = _line_p1_weight(a, z)[:, 0, 0]
            weight[:, 1, 1] = _line_p1_weight(b, z)[:, 0, 0]
            rank = 2
    else:
        z1, z2 = scheme.nodes[:, 0], scheme.nodes[:, 1]
        if family == "LineP2":
            k = degrees[0]
            evals = _line_p2_evals(k, z1, z2)
            weight = _line_p2_weight(k, z1, z2)
            rank, dim = 1, (k + 1) * (k + 2) // 2
        else:  # TangentP2
            evals = _tangent_p2_evals(z1, z2)
            weight = _tangent_p2_weight(z1, z2)
            rank, dim = 2, 8

    evals = np.ascontiguousarray(evals, dtype=np.complex128)
    evals.setflags(write=False)
    sv = np.linalg.svd(evals, compute_uv=False)
    min_sv = float(sv[:, -1].min())
    if min_sv <= 0.0:
        raise InvalidInputError(
            f"section basis of {bundle_id} fails global generation at a node "
            f"(min singular value {min_sv})"
        )
    return SectionBasis(
        bundle_id=bundle_id,
        manifold_id=manifold,
        rank=rank,
        dim=dim,
        scheme=scheme,
        evals=evals,
        frame_weight=FiberMetricField(weight),
        min_section_sv=min_sv,
    )


def background_metric(bundle_id: str, scheme: QuadratureScheme) -> FiberMetricField:
    """Standard Fubini-Study-induced background fiber metric at the scheme nodes."""
    return build_sections(bundle_id, scheme).frame_weight
