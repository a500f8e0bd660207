import logging
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

logger = logging.getLogger(__name__)

METRICS = {"makespan": "Makespan (steps)", "avg_fuel": "Average sum-of-fuel (edges)"}


def plot_sweep(summary: pd.DataFrame, out_dir: str) -> List[str]:
    """
    One SVG per metric: median versus n with an interquartile band, one panel
    per maze size, one line per strategy/solver. The fuel chart carries the
    median optimal path length as a dashed reference.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = summary[["maze_w", "maze_h"]].drop_duplicates().sort_values(["maze_w", "maze_h"])
    written = []
    for metric, label in METRICS.items():
        fig, axes = plt.subplots(1, len(sizes), figsize=(5 * len(sizes), 4), squeeze=False)
        for ax, (_, size) in zip(axes[0], sizes.iterrows()):
            panel = summary[(summary["maze_w"] == size["maze_w"]) & (summary["maze_h"] == size["maze_h"])]
            for (strategy, solver), line in panel.groupby(["strategy", "solver"], sort=True):
                line = line.sort_values("n")
                ax.plot(line["n"], line[f"{metric}_median"], marker="o", label=f"{strategy}/{solver}")
                ax.fill_between(line["n"], line[f"{metric}_q1"], line[f"{metric}_q3"], alpha=0.2)
            if metric == "avg_fuel":
                ax.axhline(panel["optimal_d_median"].median(), linestyle="--", color="black", linewidth=1,
                           label="shortest path")
            ax.set_xscale("log")
            ax.set_title(f"{size['maze_w']}x{size['maze_h']}")
            ax.set_xlabel("agents (n)")
            ax.set_ylabel(label)
            ax.legend(fontsize=7)
        fig.tight_layout()
        path = out / f"{metric}.svg"
        fig.savefig(path, format="svg")
        plt.close(fig)
        logger.info("wrote %s", path)
        written.append(str(path))
    return written
