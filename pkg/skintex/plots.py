"""
Figures for a training run: the performance curve and generalization outputs.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .mlp import Label  # noqa: E402


def plot_performance(trace, goal, path, figsize=(10, 6)):
    """
    Plot SSE per epoch on a log axis with the goal as a horizontal line.

    Args:
        trace: TrainTrace from training
        goal: The SSE goal
        path: Output PNG filename
        figsize: Figure size tuple
    """
    epochs = np.arange(0, trace.epochs + 1)
    history = np.concatenate([[trace.initial_sse], trace.sse_history()])

    fig, ax = plt.subplots(figsize=figsize)
    ax.semilogy(epochs, history, color="steelblue", label="Train")
    ax.axhline(goal, color="black", linestyle=":", label="Goal")
    ax.set_xlabel(f"{trace.epochs} Epochs", fontsize=10)
    ax.set_ylabel("Sum squared error", fontsize=10)
    ax.set_title(f"Performance is {trace.final_sse:.6g}, Goal is {goal:g}", fontsize=12, fontweight="bold")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_generalization(report, path, figsize=(12, 8)):
    """
    Plot network output per held-out sample against the desired output.

    One panel per class; misclassified samples are drawn in red.

    Args:
        report: EvalReport from evaluate
        path: Output PNG filename
        figsize: Figure size tuple
    """
    fig, axes = plt.subplots(2, 1, figsize=figsize, sharey=True)
    for ax, label in zip(axes, (Label.SKIN, Label.NON_SKIN)):
        outputs = [o for o in report.outputs if o.label is label]
        scores = np.array([o.score for o in outputs])
        wrong = np.array([o.predicted is not label for o in outputs], dtype=bool)
        index = np.arange(1, len(outputs) + 1)

        ax.plot(index, np.full(len(outputs), label.target), color="black", linestyle="--", label="Desired")
        ax.plot(index, scores, marker="o", color="steelblue", label="Actual")
        if wrong.any():
            ax.scatter(index[wrong], scores[wrong], color="red", zorder=3, label="Misclassified")
        ax.set_ylim(-1.1, 1.1)
        ax.set_xlabel("Sample", fontsize=10)
        ax.set_ylabel("Network output", fontsize=10)
        ax.set_title(f"Generalization output for {label.value} input images", fontsize=12, fontweight="bold")
        ax.legend(loc="center right")

    fig.tight_layout()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
