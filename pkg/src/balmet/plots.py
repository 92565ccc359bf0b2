"""Figure rendering for iteration traces (used by the report subcommand)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InvalidInputError

__all__ = ["load_trace_csv", "render_trace_figures"]

plt.rcParams.update(
    {
        "figure.figsize": (6.0, 4.0),
        "figure.dpi": 110,
        "savefig.dpi": 150,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "font.size": 10,
    }
)


def load_trace_csv(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"trace file not found: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    expected = {"step", "z_tilde", "log_det", "det_ratio", "trace_residual", "spread", "delta"}
    names = set(data.dtype.names or ())
    if not expected <= names:
        raise InvalidInputError(
            f"trace file {path} is missing columns {sorted(expected - names)}"
        )
    return np.atleast_1d(data)


def _finite(x, y):
    m = np.isfinite(y)
    return x[m], y[m]


def render_trace_figures(trace_path, out_dir=None, fmt: str = "png") -> list[Path]:
    """Render the standard diagnostic figures for a trace CSV.

    Writes <stem>_energy, <stem>_convergence, and <stem>_stability images
    next to the CSV (or into ``out_dir``) and returns the written paths.
    """
    trace_path = Path(trace_path)
    data = load_trace_csv(trace_path)
    out_dir = Path(out_dir) if out_dir is not None else trace_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = trace_path.stem
    step = data["step"]
    written: list[Path] = []

    fig, axes = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.0))
    axes[0].plot(step, data["z_tilde"], marker=".", color="#1f497d")
    axes[0].set_ylabel("scale-invariant energy")
    axes[1].plot(step, data["log_det"], marker=".", color="#742d18")
    axes[1].set_ylabel("log det")
    axes[1].set_xlabel("step")
    fig.suptitle("Energy decrease along the iteration")
    fig.tight_layout()
    path = out_dir / f"{stem}_energy.{fmt}"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots()
    x, y = _finite(step, np.asarray(data["delta"]))
    ax.semilogy(x, np.maximum(y, 1e-300), marker=".", color="#1f497d", label="step delta")
    x, y = _finite(step, np.abs(np.asarray(data["det_ratio"]) - 1.0))
    ax.semilogy(x, np.maximum(y, 1e-300), marker=".", color="#742d18", label="|det ratio - 1|")
    ax.set_xlabel("step")
    ax.set_ylabel("residual")
    ax.set_title("Convergence of normalized iterates")
    ax.legend()
    fig.tight_layout()
    path = out_dir / f"{stem}_convergence.{fmt}"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots()
    ax.semilogy(step, data["spread"], marker=".", color="#1f497d", label="eigenvalue spread")
    x, y = _finite(step, np.asarray(data["trace_residual"]))
    ax.semilogy(x, np.maximum(y, 1e-300), marker=".", color="#742d18", label="trace residual")
    ax.set_xlabel("step")
    ax.set_title("Boundedness and quadrature health")
    ax.legend()
    fig.tight_layout()
    path = out_dir / f"{stem}_stability.{fmt}"
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    return written
