"""Rendering orbit statistics to image files.

matplotlib is imported lazily and pinned to the Agg backend, so rendering
works headless and importing this module stays cheap for callers that
never plot.
"""

from __future__ import annotations

from typing import Sequence

from .dynamics import OrbitRecord

__all__ = ["render_orbit_plot"]


def render_orbit_plot(
    records: Sequence[OrbitRecord],
    operator_names: Sequence[str],
    path: str,
) -> None:
    """Norms (solid) and target distances (dashed) per operator over time.

    Requires stats-mode records.  The vertical axis is logarithmic because
    the interesting regimes span many orders of magnitude; nonpositive
    values are simply not drawn on that scale.
    """
    if any(record.norms is None for record in records):
        raise ValueError("plotting needs stats-mode records")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    times = [record.n for record in records]
    with_distances = bool(records) and records[0].distances is not None
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, name in enumerate(operator_names):
        series = [record.norms[i] for record in records]
        ax.plot(times, series, label=f"norm {name}")
        if with_distances:
            series = [record.distances[i] for record in records]
            ax.plot(times, series, linestyle="--", label=f"distance {name}")
    ax.set_yscale("log")
    ax.set_xlabel("time n")
    ax.set_ylabel("size")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
