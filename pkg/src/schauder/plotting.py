"""PNG renderings of the CLI reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_instability(traces, path):
    """Two panels: ``F`` against its reconstructions, ``f`` against its estimates.

    ``traces`` maps column names to arrays as produced by the
    ``demo-instability`` command.
    """
    t = traces["t"]
    fig, (ax_F, ax_f) = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    ax_F.plot(t, traces["F"], color="black", lw=2, label="F")
    ax_f.plot(t, traces["f"], color="black", lw=2, label="f")
    for key in traces:
        if key.startswith("F_hat"):
            ax_F.plot(t, traces[key], lw=1, label=key.replace("F_hat_f0=", "f0 = "))
        elif key.startswith("f_hat"):
            ax_f.plot(t, traces[key], lw=1, label=key.replace("f_hat_f0=", "f0 = "))
    ax_F.set_title("antiderivative")
    ax_f.set_title("derivative")
    for ax in (ax_F, ax_f):
        ax.set_xlabel("t")
        ax.legend()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_dettable(rows, path):
    """``log10 |det|`` against ``n`` with reference values where known."""
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
    ax.plot(ns, [r["computed"] for r in rows], "o-", label="computed")
    ref = [(r["n"], r["reference"]) for r in rows if r["reference"] is not None]
    if ref:
        ax.plot(*zip(*ref), "x", ms=9, label="reference")
    ax.set_xlabel("n")
    ax.set_ylabel("log10 |det|")
    ax.legend()
    fig.savefig(path, dpi=120)
    plt.close(fig)
