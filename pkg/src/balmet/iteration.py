"""Fixed-point iteration driver with diagnostics and convergence classification.

Each step applies the averaging map to the previous Gram and records the
scale-invariant energy, log determinant, determinant ratio, trace-identity
residual, normalized eigenvalue spread, and the operator-norm step delta of
the determinant-normalized iterates.  Convergence is declared on the
normalized sequence (the overall scale converges separately through the log
determinant), divergence on the spread exceeding a ceiling, and violations
of the per-step decrease laws beyond the quadrature budget abort the run as
numerical failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from .core import (
    HermitianForm,
    _as_form,
    bergman,
    fs,
    normalize,
    t_operator,
    z_tilde,
)
from .errors import BalmetError, InvalidInputError
from .geometry import QuadratureScheme

__all__ = [
    "Classification",
    "IterationTrace",
    "RunResult",
    "run",
    "classify",
    "boundedness_radius",
    "bergman_sup_residual",
    "random_gram",
]

MONOTONICITY_SLACK_FACTOR = 100.0


class Classification(str, Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    DIVERGED = "Diverged"
    NUMERICAL_FAILURE = "NumericalFailure"


COLUMNS = ("step", "z_tilde", "log_det", "det_ratio", "trace_residual", "spread", "delta")


@dataclass
class IterationTrace:
    """Per-step diagnostics; row 0 is the initial state (transition fields NaN)."""

    z_tilde: list[float] = field(default_factory=list)
    log_det: list[float] = field(default_factory=list)
    det_ratio: list[float] = field(default_factory=list)
    trace_residual: list[float] = field(default_factory=list)
    spread: list[float] = field(default_factory=list)
    delta: list[float] = field(default_factory=list)

    def append(self, z_tilde, log_det, det_ratio, trace_residual, spread, delta):
        self.z_tilde.append(float(z_tilde))
        self.log_det.append(float(log_det))
        self.det_ratio.append(float(det_ratio))
        self.trace_residual.append(float(trace_residual))
        self.spread.append(float(spread))
        self.delta.append(float(delta))

    def __len__(self) -> int:
        return len(self.z_tilde)

    def rows(self):
        for n in range(len(self)):
            yield (
                n,
                self.z_tilde[n],
                self.log_det[n],
                self.det_ratio[n],
                self.trace_residual[n],
                self.spread[n],
                self.delta[n],
            )


@dataclass(frozen=True)
class RunResult:
    classification: Classification
    final_gram: HermitianForm
    iterations: int
    diagnostics: dict


def boundedness_radius(H) -> float:
    """Two-sided eigenvalue radius of the determinant-normalized Gram.

    Returns max(lambda_max, 1/lambda_min) of (det G)^(-1/N) G; always >= 1,
    invariant under rescaling of the input.
    """
    g = normalize(_as_form(H)).gram
    evals = np.linalg.eigvalsh(g)
    return float(max(evals[-1], 1.0 / evals[0]))


def classify(
    trace: IterationTrace, tol: float, spread_max: float, max_iter: int
) -> Classification:
    """Pure threshold classification of a completed trace.

    Divergence (any spread beyond the ceiling) takes precedence, then
    convergence (last step delta within tol), else the iteration budget was
    exhausted.
    """
    if any(s > spread_max for s in trace.spread):
        return Classification.DIVERGED
    if len(trace) > 1 and trace.delta[-1] <= tol:
        return Classification.CONVERGED
    return Classification.MAX_ITERATIONS


def run(
    H0,
    B,
    Q: QuadratureScheme,
    tol: float = 1e-8,
    spread_max: float = 1e6,
    max_iter: int = 500,
    deterministic: bool = False,
) -> tuple[RunResult, IterationTrace]:
    """Iterate the averaging map from H0 and classify the outcome.

    Parameters
    ----------
    H0 : HermitianForm or array
        Initial Gram matrix (positive definite, dimension B.dim).
    tol : float
        Operator-norm threshold on consecutive determinant-normalized
        iterates; delta <= tol declares convergence.
    spread_max : float
        Ceiling on the normalized eigenvalue radius; crossing it declares
        divergence (the iterates leave every bounded set at this radius).
    max_iter : int
        Step budget.

    Returns
    -------
    (RunResult, IterationTrace)
        The result carries the final raw Gram (scale attached), the step
        count, and final diagnostics including the kernel sup-residual.

    Notes
    -----
    The scale-invariant energy and the log determinant are non-increasing
    along exact iterates; an increase beyond 100 * eps_quad is reported as
    NumericalFailure with the offending step in the diagnostics.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    if spread_max <= 1:
        raise InvalidInputError(f"spread_max must exceed 1, got {spread_max}")
    if max_iter < 1:
        raise InvalidInputError(f"max_iter must be >= 1, got {max_iter}")

    H = _as_form(H0)
    if H.dim != B.dim:
        raise InvalidInputError(f"initial gram dimension {H.dim} != basis dimension {B.dim}")
    slack = MONOTONICITY_SLACK_FACTOR * Q.eps_quad
    trace = IterationTrace()

    zt = z_tilde(H, B, Q, deterministic=deterministic)
    ld = H.log_det()
    spread = boundedness_radius(H)
    trace.append(zt, ld, np.nan, np.nan, spread, np.nan)

    classification = None
    failure: dict = {}
    H_norm = normalize(H).gram
    iterations = 0

    if spread > spread_max:
        classification = Classification.DIVERGED

    while classification is None and iterations < max_iter:
        step = iterations + 1
        try:
            H_next = t_operator(H, B, Q, deterministic=deterministic)
        except BalmetError as exc:
            classification = Classification.NUMERICAL_FAILURE
            failure = {"failure_step": step, "failure_reason": str(exc)}
            break

        ratio_matrix = np.linalg.solve(H.gram, H_next.gram)
        trace_res = abs(float(np.trace(ratio_matrix).real) - B.dim)
        det_ratio = float(np.exp(H_next.log_det() - ld))
        H_next_norm = normalize(H_next).gram
        delta = float(np.linalg.norm(H_next_norm - H_norm, 2))
        zt_next = z_tilde(H_next, B, Q, deterministic=deterministic)
        ld_next = H_next.log_det()
        spread = boundedness_radius(H_next)
        trace.append(zt_next, ld_next, det_ratio, trace_res, spread, delta)
        iterations = step

        if zt_next > zt + slack or ld_next > ld + slack:
            classification = Classification.NUMERICAL_FAILURE
            failure = {
                "failure_step": step,
                "failure_reason": (
                    f"monotonicity violated: z_tilde increase {zt_next - zt:.3e}, "
                    f"log_det increase {ld_next - ld:.3e}, allowed {slack:.3e}"
                ),
            }
        H, H_norm, zt, ld = H_next, H_next_norm, zt_next, ld_next
        if classification is None:
            if spread > spread_max:
                classification = Classification.DIVERGED
            elif delta <= tol:
                classification = Classification.CONVERGED

    if classification is None:
        classification = Classification.MAX_ITERATIONS

    diagnostics = {
        "final_z_tilde": trace.z_tilde[-1],
        "final_log_det": trace.log_det[-1],
        "final_spread": trace.spread[-1],
        "final_delta": trace.delta[-1],
        "final_det_ratio": trace.det_ratio[-1],
        "final_trace_residual": trace.trace_residual[-1],
        "eps_quad": Q.eps_quad,
        **failure,
    }
    if classification in (Classification.CONVERGED, Classification.MAX_ITERATIONS):
        diagnostics["bergman_sup_residual"] = bergman_sup_residual(
            H, B, Q, deterministic=deterministic
        )
    return RunResult(classification, H, iterations, diagnostics), trace


def bergman_sup_residual(H, B, Q: QuadratureScheme, deterministic: bool = False) -> float:
    """Sup over nodes of the spectral distance of the kernel field from N/(V r) times Id."""
    kernel = bergman(fs(H, B), B, Q, deterministic=deterministic)
    target = B.dim / (Q.total_mass * B.rank)
    dev = kernel - target * np.eye(B.rank)[None]
    return float(np.linalg.svd(dev, compute_uv=False)[:, 0].max())


def random_gram(dim: int, amplitude: float, seed: int) -> HermitianForm:
    """Seeded random positive-definite Gram: L L^dagger with L = I + amplitude * Hermitian noise.

    The Hermitian Gaussian perturbation is normalized to unit spectral norm,
    so amplitude < 1 keeps L invertible and bounds the condition number of the
    result by ((1+amplitude)/(1-amplitude))^2; a positivity floor remains as a
    safety net for downstream Cholesky factors.
    """
    if not 0 <= amplitude < 1:
        raise InvalidInputError(f"amplitude must lie in [0, 1), got {amplitude}")
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    herm = 0.5 * (noise + noise.conj().T)
    norm = np.linalg.norm(herm, 2)
    if norm > 0:
        herm /= norm
    L = np.eye(dim) + amplitude * herm
    G = L @ L.conj().T
    evals = np.linalg.eigvalsh(G)
    floor = 1e-12 * evals[-1]
    if evals[0] < floor:
        G = G + (floor - evals[0]) * np.eye(dim)
    return HermitianForm(G)
