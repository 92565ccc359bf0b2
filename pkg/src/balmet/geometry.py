"""Quadrature schemes for the unit-mass Fubini-Study volume on P1 and P2.

The volume form is normalized so the total mass is V = 1 on both manifolds.
In the affine chart this measure reads

    P1:  dVol = (1/pi)   (1+|z|^2)^-2           dx dy
    P2:  dVol = (2/pi^2) (1+|z1|^2+|z2|^2)^-3   dx1 dy1 dx2 dy2

Both schemes are tensor products of Gauss-Legendre rules in the radial
variables and uniform (trapezoid) rules in the angles, in coordinates chosen
so that the rational monomial family  |z|^(2j) (1+|z|^2)^-k  (resp. its P2
analogue) is integrated exactly, to roundoff, once the order exceeds the
degree.  The achieved worst-case error over the shipped moment corpus is
measured at build time and stored as ``eps_quad``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import InvalidInputError, NumericalDomainError

__all__ = ["QuadratureScheme", "build_quadrature", "integrate"]

# Absolute errors below this are indistinguishable from accumulated roundoff,
# so eps_quad is floored here to keep downstream thresholds meaningful.
EPS_QUAD_FLOOR = 1e-14


@dataclass(frozen=True)
class QuadratureScheme:
    """Nodes, positive weights, and metadata for one manifold.

    ``nodes`` has shape (n, dim) with dim = 1 for P1 and 2 for P2; entries are
    the affine-chart complex coordinates.  ``weights`` are positive and sum to
    ``total_mass`` (= 1).  The scheme is immutable after construction.
    """

    manifold_id: str
    order: int
    nodes: NDArray[np.complex128] = field(repr=False)
    weights: NDArray[np.float64] = field(repr=False)
    total_mass: float
    eps_quad: float

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]


def _gauss_legendre_01(n: int) -> tuple[NDArray, NDArray]:
    """Gauss-Legendre nodes/weights transplanted to (0, 1) with weight sum 1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _build_p1(order: int) -> tuple[NDArray, NDArray]:
    # z = tan(theta/2) e^{i phi}; dVol = (1/4pi) sin(theta) dtheta dphi.
    # Gauss-Legendre in t = cos(theta), uniform in phi (2*order+1 points, so
    # angular frequencies up to 2*order are integrated without aliasing).
    t, a = np.polynomial.legendre.leggauss(order)
    m = 2 * order + 1
    phi = 2.0 * np.pi * np.arange(m) / m
    rho = np.sqrt((1.0 - t) / (1.0 + t))
    z = (rho[:, None] * np.exp(1j * phi)[None, :]).reshape(-1, 1)
    w = np.repeat(a / 2.0, m) / m
    return z, w


def _build_p2(order: int) -> tuple[NDArray, NDArray]:
    # Radial simplex coordinates: with s_j = |z_j|^2, set
    #   s1 + s2 = x/(1-x),  s1/(s1+s2) = v,   x, v in (0,1),
    # which turns the measure into (1/(2 pi^2)) * x dx dv dphi1 dphi2 and every
    # monomial moment into a polynomial integrand; a per-coordinate map
    # s_j = u_j/(1-u_j) would leave a non-polynomial 1/(1-u1*u2) factor whose
    # corner singularity defeats Gauss exactness.
    x, ax = _gauss_legendre_01(order)
    v, av = _gauss_legendre_01(order)
    m = 2 * order + 1
    phi = 2.0 * np.pi * np.arange(m) / m

    xg, vg, p1g, p2g = np.meshgrid(x, v, phi, phi, indexing="ij")
    wxg, wvg = np.meshgrid(ax * x, av, indexing="ij")
    total = xg * vg / (1.0 - xg)
    s1 = total
    s2 = xg * (1.0 - vg) / (1.0 - xg)
    z1 = np.sqrt(s1) * np.exp(1j * p1g)
    z2 = np.sqrt(s2) * np.exp(1j * p2g)
    w = 2.0 * wxg[:, :, None, None] * wvg[:, :, None, None] * np.ones_like(xg) / m**2
    nodes = np.stack([z1.ravel(), z2.ravel()], axis=-1)
    return nodes, w.ravel()


def _moment_error(nodes: NDArray, weights: NDArray, manifold_id: str, order: int) -> float:
    """Worst absolute quadrature error over the in-budget moment corpus entries."""
    from .oracle import load_moment_corpus

    corpus = load_moment_corpus()
    sq = np.abs(nodes) ** 2
    err = 0.0
    if manifold_id == "P1":
        s = sq[:, 0]
        budget = 2 * order - 1
        for (j, k), exact in corpus.p1.items():
            if k > budget:
                continue
            got = float(np.real(np.sum(weights * s**j / (1.0 + s) ** k)))
            err = max(err, abs(got - float(exact)))
    else:
        s1, s2 = sq[:, 0], sq[:, 1]
        budget = 2 * order - 2
        for (a, b, k), exact in corpus.p2.items():
            if k > budget:
                continue
            got = float(np.real(np.sum(weights * s1**a * s2**b / (1.0 + s1 + s2) ** k)))
            err = max(err, abs(got - float(exact)))
    return max(err, EPS_QUAD_FLOOR)


def build_quadrature(manifold_id: str, order: int) -> QuadratureScheme:
    """Build the quadrature scheme for ``manifold_id`` ("P1" or "P2").

    Parameters
    ----------
    manifold_id : str
        "P1" or "P2".
    order : int
        Radial Gauss-Legendre order, >= 2.  Node count is order*(2*order+1)
        on P1 and order^2*(2*order+1)^2 on P2.  Monomial moments of weight
        degree k are exact for k <= 2*order-1 (P1) resp. k <= 2*order-2 (P2).

    Returns
    -------
    QuadratureScheme
        Immutable scheme with unit total mass and measured ``eps_quad``.
    """
    if order < 2:
        raise InvalidInputError(f"quadrature order must be >= 2, got {order}")
    if manifold_id == "P1":
        nodes, weights = _build_p1(order)
    elif manifold_id == "P2":
        nodes, weights = _build_p2(order)
    else:
        raise InvalidInputError(f"unsupported manifold_id {manifold_id!r}; expected 'P1' or 'P2'")
    nodes = np.ascontiguousarray(nodes, dtype=np.complex128)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    eps = _moment_error(nodes, weights, manifold_id, order)
    return QuadratureScheme(
        manifold_id=manifold_id,
        order=order,
        nodes=nodes,
        weights=weights,
        total_mass=1.0,
        eps_quad=eps,
    )


def integrate(scheme: QuadratureScheme, f, deterministic: bool = False) -> complex:
    """Integrate a scalar field against the scheme: sum_q w_q f(x_q).

    ``f`` may be an array of per-node values or a callable mapping the full
    (n, dim) node array to per-node values.  With ``deterministic=True`` the
    weighted values are summed sequentially in node order (compensated);
    otherwise a pairwise tree reduction is used.
    """
    values = f(scheme.nodes) if callable(f) else np.asarray(f)
    if values.shape != (scheme.node_count,):
        raise InvalidInputError(
            f"field has shape {values.shape}, expected ({scheme.node_count},)"
        )
    bad = ~np.isfinite(values)
    if np.any(bad):
        q = int(np.argmax(bad))
        raise NumericalDomainError(
            f"non-finite field value {values[q]} at node {q}, coordinates {scheme.nodes[q]}"
        )
    terms = scheme.weights * values
    if deterministic:
        if np.iscomplexobj(terms):
            return complex(math.fsum(terms.real), math.fsum(terms.imag))
        return complex(math.fsum(terms), 0.0)
    return complex(np.sum(terms))
