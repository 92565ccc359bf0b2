"""Inner products on section space, fiber metrics, and the maps between them.

Conventions (fixed once, used everywhere):

  * A Gram matrix G stores the inner product so that the pointwise section
    density is  mu(x) = S(x) G^-1 S(x)^dagger,  where the columns of the
    r x N matrix S(x) are the basis sections in the local frame.  Under a
    basis change s' = s A the Gram transforms as G -> A^dagger G A and every
    derived field is unchanged.
  * The averaging map from fiber metrics to Gram matrices carries the factor
    N/(V r), so its fixed points have unit-scale normalization: the section
    density of a fixed point inverts the fiber metric exactly.
  * Energies are reported relative to the bundle's background fiber metric
    and to the reference basis (log det of the reference Gram is the zero
    point); both choices only shift the functionals by constants.

Inversions go through Cholesky factors (never an explicit inverse); geodesics
through the generalized Hermitian eigenproblem of the endpoint pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .errors import (
    ConditioningError,
    DegenerateDensityError,
    InvalidInputError,
    NumericalDomainError,
)
from .geometry import QuadratureScheme

__all__ = [
    "HermitianForm",
    "FiberMetricField",
    "GeodesicSpec",
    "fs",
    "hilb",
    "t_operator",
    "bergman",
    "energy_i",
    "z_functional",
    "z_tilde",
    "normalize",
    "geodesic",
    "geodesic_spec",
    "trace_identity_residual",
]

HERMITICITY_RTOL = 1e-13
# Degeneracy guard: reject matrices whose spectrum collapses entirely.
PD_FLOOR_RTOL = 1e-300


@dataclass(frozen=True)
class HermitianForm:
    """Positive-definite Hermitian N x N Gram matrix of an inner product.

    The constructor checks Hermiticity to 1e-13 relative, stores the exactly
    symmetrized matrix read-only, and rejects matrices that are not positive
    definite.
    """

    gram: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=np.complex128)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InvalidInputError(f"gram must be square, got shape {g.shape}")
        scale = float(np.abs(g).max())
        if not np.isfinite(scale) or scale == 0.0:
            raise NumericalDomainError("gram has non-finite or all-zero entries")
        asym = float(np.abs(g - g.conj().T).max())
        if asym > HERMITICITY_RTOL * scale:
            raise InvalidInputError(
                f"gram is not Hermitian: max asymmetry {asym:.3e} exceeds "
                f"{HERMITICITY_RTOL:.0e} * scale ({scale:.3e})"
            )
        g = 0.5 * (g + g.conj().T)
        evals = np.linalg.eigvalsh(g)
        if evals[0] <= PD_FLOOR_RTOL * evals[-1] or evals[0] <= 0.0:
            raise ConditioningError(
                f"gram is not positive definite: min eigenvalue {evals[0]:.6e}, "
                f"max eigenvalue {evals[-1]:.6e}"
            )
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def log_det(self) -> float:
        _, ld = np.linalg.slogdet(self.gram)
        return float(ld)


@dataclass(frozen=True)
class FiberMetricField:
    """Per-node r x r Hermitian positive-definite fiber metric values, shape (n, r, r)."""

    values: NDArray[np.complex128] = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 3 or v.shape[1] != v.shape[2]:
            raise InvalidInputError(f"fiber metric values must have shape (n, r, r), got {v.shape}")
        if not np.all(np.isfinite(v)):
            q = int(np.argmax(~np.isfinite(v).all(axis=(1, 2))))
            raise NumericalDomainError(f"non-finite fiber metric at node {q}")
        asym = np.abs(v - v.conj().transpose(0, 2, 1)).max(axis=(1, 2))
        scale = np.abs(v).max(axis=(1, 2))
        q = int(np.argmax(asym - 1e-10 * scale))
        if asym[q] > 1e-10 * scale[q]:
            raise InvalidInputError(
                f"fiber metric not Hermitian at node {q}: asymmetry {asym[q]:.3e}"
            )
        v = 0.5 * (v + v.conj().transpose(0, 2, 1))
        evals = np.linalg.eigvalsh(v)
        worst = int(np.argmin(evals[:, 0]))
        if evals[worst, 0] <= 0.0:
            raise ConditioningError(
                f"fiber metric not positive definite at node {worst}: "
                f"min eigenvalue {evals[worst, 0]:.6e}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def node_count(self) -> int:
        return self.values.shape[0]

    @property
    def rank(self) -> int:
        return self.values.shape[1]


def _as_form(H) -> HermitianForm:
    return H if isinstance(H, HermitianForm) else HermitianForm(np.asarray(H))


def _as_values(h) -> NDArray:
    return h.values if isinstance(h, FiberMetricField) else np.asarray(h, dtype=np.complex128)


def _wsum(weights: NDArray, values: NDArray, deterministic: bool) -> float:
    if deterministic:
        return math.fsum((weights * values).tolist())
    return float(np.sum(weights * values))


def _density(gram: NDArray, evals: NDArray) -> NDArray:
    """Section density mu(x) = S(x) G^-1 S(x)^dagger at every node, shape (n, r, r)."""
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"Cholesky factorization failed: {exc}") from exc
    n, r, N = evals.shape
    X = scipy.linalg.solve_triangular(L, evals.reshape(n * r, N).conj().T, lower=True)
    X = X.reshape(N, n, r)
    mu = np.einsum("inr,ins->nrs", X.conj(), X)
    return 0.5 * (mu + mu.conj().transpose(0, 2, 1))


def _logdet_hermitian_stack(values: NDArray, what: str) -> NDArray:
    sign, logdet = np.linalg.slogdet(values)
    good = np.isfinite(logdet) & (sign.real > 0.5)
    if not np.all(good):
        q = int(np.argmax(~good))
        raise NumericalDomainError(f"{what} has non-positive determinant at node {q}")
    return logdet


def fs(H, B) -> FiberMetricField:
    """Fiber metric with unit section density: h(x) = (S(x) G^-1 S(x)^dagger)^-1.

    Basis independent: recomputing from s' = s A with Gram A^dagger G A gives
    the same field.  Homogeneous of degree one: fs(c H) = c fs(H).
    """
    form = _as_form(H)
    if form.dim != B.dim:
        raise InvalidInputError(f"gram dimension {form.dim} != basis dimension {B.dim}")
    mu = _density(form.gram, B.evals)
    evals = np.linalg.eigvalsh(mu)
    worst = int(np.argmin(evals[:, 0]))
    if evals[worst, 0] <= PD_FLOOR_RTOL * max(evals[worst, -1], 1.0):
        raise DegenerateDensityError(
            f"section density singular at node {worst} (min eigenvalue "
            f"{evals[worst, 0]:.6e}); global generation lost numerically"
        )
    h = np.linalg.inv(mu)
    return FiberMetricField(0.5 * (h + h.conj().transpose(0, 2, 1)))


def hilb(h, B, Q: QuadratureScheme, deterministic: bool = False) -> HermitianForm:
    """Gram matrix of the averaged inner product, with the N/(V r) factor.

    G_ij = (N / (V r)) sum_q w_q (S_q^dagger h_q S_q)_ij, conjugate-symmetrized.
    Homogeneous of degree one: hilb(c h) = c hilb(h).
    """
    B.check_scheme(Q)
    values = _as_values(h)
    if values.shape != (B.node_count, B.rank, B.rank):
        raise InvalidInputError(
            f"fiber metric has shape {values.shape}, expected "
            f"({B.node_count}, {B.rank}, {B.rank})"
        )
    flag = not deterministic
    G = np.einsum(
        "q,qri,qrs,qsj->ij", Q.weights, B.evals.conj(), values, B.evals, optimize=flag
    )
    G *= B.dim / (Q.total_mass * B.rank)
    G = 0.5 * (G + G.conj().T)
    try:
        return HermitianForm(G)
    except ConditioningError as exc:
        raise ConditioningError(
            f"averaged Gram is not positive definite (quadrature too coarse?): {exc}"
        ) from exc


def t_operator(H, B, Q: QuadratureScheme, deterministic: bool = False) -> HermitianForm:
    """One step of the fixed-point map: average the unit-density fiber metric."""
    return hilb(fs(H, B), B, Q, deterministic=deterministic)


def bergman(h, B, Q: QuadratureScheme, deterministic: bool = False) -> NDArray:
    """Per-node kernel endomorphism B(x) = S(x) G_L2^-1 S(x)^dagger h(x), shape (n, r, r).

    G_L2 is the plain weighted Gram (no N/(V r) factor), so the integrated
    trace of the result equals N.  At a fixed point of the iteration the
    field is the constant N/(V r) times the identity at every node.
    """
    B_basis = B
    B_basis.check_scheme(Q)
    values = _as_values(h)
    flag = not deterministic
    GL2 = np.einsum(
        "q,qri,qrs,qsj->ij", Q.weights, B_basis.evals.conj(), values, B_basis.evals, optimize=flag
    )
    GL2 = 0.5 * (GL2 + GL2.conj().T)
    evals = np.linalg.eigvalsh(GL2)
    if evals[0] <= 0.0:
        raise ConditioningError(
            f"L2 Gram is singular: min eigenvalue {evals[0]:.6e}, max {evals[-1]:.6e}"
        )
    D = _density(GL2, B_basis.evals)
    return np.einsum("nrs,nst->nrt", D, values)


def energy_i(h, B, Q: QuadratureScheme, deterministic: bool = False) -> float:
    """Integrated log-determinant of h against the background: sum_q w_q log det(h h0^-1).

    This is the closed-form path integral of the trace-of-variation energy;
    it satisfies energy_i(e^a h) = energy_i(h) + a r V.
    """
    B.check_scheme(Q)
    values = _as_values(h)
    ld = _logdet_hermitian_stack(values, "fiber metric")
    ld0 = _logdet_hermitian_stack(B.frame_weight.values, "background metric")
    return _wsum(Q.weights, ld - ld0, deterministic)


def z_functional(H, B, Q: QuadratureScheme, deterministic: bool = False) -> float:
    """Energy of an inner product: minus the background-relative energy of fs(H).

    Computed directly from the density, Z(G) = sum_q w_q log det(mu_q h0_q);
    convex along geodesics and non-increasing under the fixed-point map.
    """
    form = _as_form(H)
    B.check_scheme(Q)
    mu = _density(form.gram, B.evals)
    ld_mu = _logdet_hermitian_stack(mu, "section density")
    ld0 = _logdet_hermitian_stack(B.frame_weight.values, "background metric")
    return _wsum(Q.weights, ld_mu + ld0, deterministic)


def z_tilde(H, B, Q: QuadratureScheme, deterministic: bool = False) -> float:
    """Scale-invariant energy: z_functional plus (r V / N) log det of the Gram."""
    form = _as_form(H)
    z = z_functional(form, B, Q, deterministic=deterministic)
    return z + (B.rank * Q.total_mass / B.dim) * form.log_det()


def normalize(H) -> HermitianForm:
    """Rescale to unit determinant: (det G)^(-1/N) G.  Idempotent."""
    form = _as_form(H)
    return HermitianForm(form.gram * math.exp(-form.log_det() / form.dim))


@dataclass(frozen=True)
class GeodesicSpec:
    """Geodesic between two inner products, in exponent-interpolation form.

    ``frame`` columns are orthonormal for the base form and diagonalize the
    target with eigenvalues e^lambda; the point at parameter t has matrix
    frame^-dagger diag(e^(t lambda)) frame^-1.
    """

    base: HermitianForm
    exponents: NDArray[np.float64] = field(repr=False)
    frame: NDArray[np.complex128] = field(repr=False)
    _frame_inv: NDArray[np.complex128] = field(repr=False)

    def at(self, t: float) -> HermitianForm:
        d = np.exp(t * self.exponents)
        g = self._frame_inv.conj().T @ (d[:, None] * self._frame_inv)
        return HermitianForm(0.5 * (g + g.conj().T))


def geodesic_spec(H0, H1) -> GeodesicSpec:
    """Solve the generalized eigenproblem pairing the endpoints."""
    f0, f1 = _as_form(H0), _as_form(H1)
    if f0.dim != f1.dim:
        raise InvalidInputError(f"endpoint dimensions differ: {f0.dim} vs {f1.dim}")
    try:
        vals, V = scipy.linalg.eigh(f1.gram, f0.gram)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise ConditioningError(f"generalized eigenproblem failed: {exc}") from exc
    if vals[0] <= 0.0:
        raise ConditioningError(f"geodesic exponents invalid: min generalized eigenvalue {vals[0]:.6e}")
    return GeodesicSpec(
        base=f0,
        exponents=np.log(vals),
        frame=V,
        _frame_inv=np.linalg.inv(V),
    )


def geodesic(H0, H1, t: float) -> HermitianForm:
    """Point at parameter t on the geodesic from H0 (t=0) to H1 (t=1)."""
    return geodesic_spec(H0, H1).at(t)


def trace_identity_residual(H, B, Q: QuadratureScheme, deterministic: bool = False) -> float:
    """|tr(T(H) H^-1) - N|; a health check on weights and per-node solves.

    The identity holds exactly for the discrete measure (the integrand is the
    constant N/V), so the residual measures accumulated roundoff only.
    """
    form = _as_form(H)
    T = t_operator(form, B, Q, deterministic=deterministic)
    return abs(float(np.trace(np.linalg.solve(form.gram, T.gram)).real) - B.dim)
