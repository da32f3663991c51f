"""Figure rendering for the CLI report paths (PNG files beside the CSV output)."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_singular_values(singular_values, path):
    sv = np.asarray(singular_values, dtype=float)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    positive = sv > 0
    ax.semilogy(np.arange(1, sv.size + 1)[positive], sv[positive], "o-", ms=3)
    ax.set_xlabel("mode index")
    ax.set_ylabel("singular value")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_error_scatter(params, errors, path, title=""):
    params = np.atleast_2d(np.asarray(params, dtype=float))
    errors = np.asarray(errors, dtype=float)
    ok = np.isfinite(errors) & (errors > 0)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    if params.shape[1] == 1:
        ax.semilogy(params[ok, 0], errors[ok], ".", ms=4)
        ax.set_xlabel("parameter")
        ax.set_ylabel("relative error")
    else:
        sc = ax.scatter(params[ok, 0], params[ok, 1],
                        c=np.log10(errors[ok]), s=12, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="log10 relative error")
        ax.set_xlabel("parameter 1")
        ax.set_ylabel("parameter 2")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep(sizes, errors, path):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogy(sizes, errors, "o-")
    ax.set_xlabel("training set size")
    ax.set_ylabel("average relative error")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_comparison(params, errors_a, errors_b, labels, path):
    params = np.atleast_2d(np.asarray(params, dtype=float))
    order = np.argsort(params[:, 0])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogy(params[order, 0], np.asarray(errors_a)[order], ".-",
                ms=4, label=labels[0])
    ax.semilogy(params[order, 0], np.asarray(errors_b)[order], ".--",
                ms=4, label=labels[1])
    ax.set_xlabel("parameter")
    ax.set_ylabel("relative error")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
