"""Batch front end: TOML run configs, trace CSV / result JSON artifacts, figures.

Exit codes: 0 converged, 2 iteration budget exhausted, 3 diverged,
4 invalid input, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import tomli

from . import __version__
from .core import (
    HermitianForm,
    geodesic,
    normalize,
    t_operator,
    trace_identity_residual,
    z_functional,
    z_tilde,
)
from .errors import BalmetError, InvalidInputError
from .geometry import build_quadrature
from .gieseker import gieseker_point, kempf_ness_profile
from .iteration import Classification, IterationTrace, random_gram, run
from .oracle import load_moment_corpus
from .sections import build_sections, parse_bundle_id

__all__ = ["RunConfig", "load_config", "run_command", "verify_command", "report_command", "main"]

EXIT_CODES = {
    Classification.CONVERGED: 0,
    Classification.MAX_ITERATIONS: 2,
    Classification.DIVERGED: 3,
    Classification.NUMERICAL_FAILURE: 5,
}
EXIT_INVALID_INPUT = 4

CSV_HEADER = "step,z_tilde,log_det,det_ratio,trace_residual,spread,delta"


@dataclass(frozen=True)
class RunConfig:
    bundle: str
    manifold: str
    order: int
    initial_kind: str
    amplitude: float
    seed: int
    initial_path: Path | None
    tol: float
    spread_max: float
    max_iter: int
    deterministic: bool
    trace_path: Path
    result_path: Path


def load_config(path) -> RunConfig:
    """Parse and validate a TOML run configuration.

    Relative output/input paths are resolved against the config directory.
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise InvalidInputError(f"config file {path} is not valid TOML: {exc}") from exc

    problem = raw.get("problem", {})
    initial = raw.get("initial", {})
    run_tbl = raw.get("run", {})
    output = raw.get("output", {})
    base = path.parent

    bundle = problem.get("bundle")
    if not isinstance(bundle, str):
        raise InvalidInputError("config requires problem.bundle (string)")
    _, _, manifold = parse_bundle_id(bundle)
    declared = problem.get("manifold", manifold)
    if declared != manifold:
        raise InvalidInputError(
            f"problem.manifold is {declared!r} but bundle {bundle} lives on {manifold}"
        )
    order = problem.get("order", 6)
    if not isinstance(order, int) or order < 2:
        raise InvalidInputError(f"problem.order must be an integer >= 2, got {order!r}")

    kind = initial.get("kind", "identity")
    if kind not in ("identity", "random", "file"):
        raise InvalidInputError(f"initial.kind must be identity, random, or file, got {kind!r}")
    amplitude = float(initial.get("amplitude", 0.2))
    if not 0 <= amplitude < 1:
        raise InvalidInputError(f"initial.amplitude must lie in [0, 1), got {amplitude}")
    seed = initial.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise InvalidInputError(f"initial.seed must be a nonnegative integer, got {seed!r}")
    initial_path = initial.get("path")
    if kind == "file":
        if not isinstance(initial_path, str):
            raise InvalidInputError("initial.kind = 'file' requires initial.path")
        initial_path = base / initial_path
    else:
        initial_path = None

    tol = float(run_tbl.get("tol", 1e-8))
    spread_max = float(run_tbl.get("spread_max", 1e6))
    max_iter = run_tbl.get("max_iter", 500)
    deterministic = bool(run_tbl.get("deterministic", True))
    if tol <= 0:
        raise InvalidInputError(f"run.tol must be positive, got {tol}")
    if spread_max <= 1:
        raise InvalidInputError(f"run.spread_max must exceed 1, got {spread_max}")
    if not isinstance(max_iter, int) or max_iter < 1:
        raise InvalidInputError(f"run.max_iter must be a positive integer, got {max_iter!r}")

    return RunConfig(
        bundle=bundle,
        manifold=manifold,
        order=order,
        initial_kind=kind,
        amplitude=amplitude,
        seed=seed,
        initial_path=initial_path,
        tol=tol,
        spread_max=spread_max,
        max_iter=max_iter,
        deterministic=deterministic,
        trace_path=base / output.get("trace", "trace.csv"),
        result_path=base / output.get("result", "result.json"),
    )


def _gram_to_pairs(gram: np.ndarray) -> list[list[float]]:
    flat = gram.reshape(-1)
    return [[float(v.real), float(v.imag)] for v in flat]


def _gram_from_pairs(pairs, dim: int) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (dim * dim, 2):
        raise InvalidInputError(
            f"gram entry list has shape {arr.shape}, expected ({dim * dim}, 2)"
        )
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)


def _load_initial_gram(path: Path, dim: int) -> HermitianForm:
    if not path.is_file():
        raise InvalidInputError(f"initial gram file not found: {path}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"initial gram file {path} is not valid JSON: {exc}") from exc
    pairs = payload.get("gram", payload.get("final_gram"))
    if pairs is None:
        raise InvalidInputError(f"initial gram file {path} has neither 'gram' nor 'final_gram'")
    file_dim = payload.get("dim")
    if file_dim is not None and file_dim != dim:
        raise InvalidInputError(f"initial gram dimension {file_dim} != bundle dimension {dim}")
    return HermitianForm(_gram_from_pairs(pairs, dim))


def write_trace_csv(trace: IterationTrace, path: Path) -> None:
    lines = [CSV_HEADER]
    for step, *vals in trace.rows():
        lines.append(str(step) + "," + ",".join(f"{v:.17g}" for v in vals))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def run_command(config_path) -> int:
    """Execute the configured iteration; write trace CSV and result JSON."""
    try:
        config = load_config(config_path)
        scheme = build_quadrature(config.manifold, config.order)
        basis = build_sections(config.bundle, scheme)
        if config.initial_kind == "identity":
            H0 = HermitianForm(np.eye(basis.dim, dtype=complex))
        elif config.initial_kind == "random":
            H0 = random_gram(basis.dim, config.amplitude, config.seed)
        else:
            H0 = _load_initial_gram(config.initial_path, basis.dim)
    except BalmetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    result, trace = run(
        H0,
        basis,
        scheme,
        tol=config.tol,
        spread_max=config.spread_max,
        max_iter=config.max_iter,
        deterministic=config.deterministic,
    )
    write_trace_csv(trace, config.trace_path)

    exit_code = EXIT_CODES[result.classification]
    payload = {
        "classification": result.classification.value,
        "exit_code": exit_code,
        "iterations": result.iterations,
        "bundle": config.bundle,
        "dim": basis.dim,
        "rank": basis.rank,
        "final_gram": _gram_to_pairs(result.final_gram.gram),
        "bergman_sup_residual": result.diagnostics.get("bergman_sup_residual"),
        "diagnostics": {
            k: v for k, v in result.diagnostics.items() if k != "bergman_sup_residual"
        },
        "quadrature": {
            "order": scheme.order,
            "node_count": scheme.node_count,
            "eps_quad": scheme.eps_quad,
        },
        "run": {
            "tol": config.tol,
            "spread_max": config.spread_max,
            "max_iter": config.max_iter,
            "deterministic": config.deterministic,
            "initial": config.initial_kind,
            "seed": config.seed if config.initial_kind == "random" else None,
            "amplitude": config.amplitude if config.initial_kind == "random" else None,
        },
    }
    config.result_path.parent.mkdir(parents=True, exist_ok=True)
    config.result_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(
        f"{config.bundle}: {result.classification.value} after {result.iterations} iterations "
        f"(trace: {config.trace_path}, result: {config.result_path})"
    )
    return exit_code


def _verify_checks(config: RunConfig):
    scheme = build_quadrature(config.manifold, config.order)
    basis = build_sections(config.bundle, scheme)
    det = config.deterministic
    eps = scheme.eps_quad
    N = basis.dim

    corpus = load_moment_corpus()
    yield ("quadrature vs oracle moments", eps, 1e-12, eps <= 1e-12)

    grams = [random_gram(N, 0.5, seed) for seed in range(20)]
    worst_trace = max(trace_identity_residual(G, basis, scheme, deterministic=det) for G in grams)
    yield ("trace identity residual", worst_trace, 100 * eps, worst_trace <= 100 * eps)

    worst_mono = -np.inf
    for G in grams:
        T = t_operator(G, basis, scheme, deterministic=det)
        dz = z_functional(T, basis, scheme, det) - z_functional(G, basis, scheme, det)
        dld = T.log_det() - G.log_det()
        dzt = z_tilde(T, basis, scheme, det) - z_tilde(G, basis, scheme, det)
        worst_mono = max(worst_mono, dz, dld, dzt)
    yield ("energy/log-det decrease under step", worst_mono, 100 * eps, worst_mono <= 100 * eps)

    worst_scale = max(
        abs(z_tilde(HermitianForm(c * G.gram), basis, scheme, det) - z_tilde(G, basis, scheme, det))
        for G in grams[:5]
        for c in (1e-3, 1e3)
    )
    yield ("scale invariance of z_tilde", worst_scale, 1e-10, worst_scale <= 1e-10)

    ts = np.linspace(0.0, 1.0, 9)
    min_second = np.inf
    for seed in range(10):
        G0 = random_gram(N, 0.5, 1000 + seed)
        G1 = random_gram(N, 0.5, 2000 + seed)
        vals = np.array([z_functional(geodesic(G0, G1, t), basis, scheme, det) for t in ts])
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        min_second = min(min_second, float(second.min()))
    yield ("energy convexity along geodesics", min_second, -10 * eps, min_second >= -10 * eps)

    point = gieseker_point(basis)
    rank, M = point.matrix_rank(), point.codomain_dim
    yield ("wedge-map surjectivity rank", float(rank), float(M), rank == M)

    rng = np.random.default_rng(7)
    grid = np.linspace(-2.0, 2.0, 9)
    min_prof = np.inf
    for _ in range(5):
        noise = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        lam = 0.5 * (noise + noise.conj().T)
        lam -= (np.trace(lam).real / N) * np.eye(N)
        prof = kempf_ness_profile(point, lam, grid)
        second = prof[:-2] - 2 * prof[1:-1] + prof[2:]
        min_prof = min(min_prof, float(second.min()))
    yield ("wedge-orbit profile convexity", min_prof, -1e-12, min_prof >= -1e-12)


def verify_command(config_path) -> int:
    """Run the invariant suite on the configured problem; print a pass/fail table."""
    try:
        config = load_config(config_path)
        rows = list(_verify_checks(config))
    except BalmetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT

    width = max(len(name) for name, *_ in rows) + 2
    all_ok = True
    print(f"{'check':<{width}}{'status':<8}{'value':>14}{'threshold':>14}")
    for name, value, threshold, ok in rows:
        all_ok &= ok
        print(f"{name:<{width}}{'PASS' if ok else 'FAIL':<8}{value:>14.4e}{threshold:>14.4e}")
    print(f"verification {'passed' if all_ok else 'FAILED'} for {config.bundle}")
    return 0 if all_ok else 1


def report_command(trace_path, out_dir=None, fmt: str = "png") -> int:
    """Render diagnostic figures for an existing trace CSV."""
    from .plots import render_trace_figures

    try:
        written = render_trace_figures(trace_path, out_dir=out_dir, fmt=fmt)
    except BalmetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="balmet",
        description="Balanced-metric solver for holomorphic bundles on projective spaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a configured iteration")
    p_run.add_argument("config", help="path to a TOML run configuration")

    p_verify = sub.add_parser("verify", help="run the invariant suite on a configured problem")
    p_verify.add_argument("config", help="path to a TOML run configuration")

    p_report = sub.add_parser("report", help="render figures from a trace CSV")
    p_report.add_argument("trace", help="path to a trace CSV written by 'run'")
    p_report.add_argument("--out-dir", default=None, help="directory for figures (default: CSV directory)")
    p_report.add_argument("--format", default="png", choices=("png", "pdf", "svg"))

    args = parser.parse_args(argv)
    if args.command == "run":
        return run_command(args.config)
    if args.command == "verify":
        return verify_command(args.config)
    return report_command(args.trace, out_dir=args.out_dir, fmt=args.format)


if __name__ == "__main__":
    sys.exit(main())
