"""Figure rendering for report paths.

Every CLI command that writes a report can also drop PNG figures next to
it. Rendering is kept out of the metric modules so library users never
pay the matplotlib import unless they ask for figures.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
}


def _save(fig, out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_sweep_figures(reports, out_dir):
    """Loss-versus-sparsity curves per method, plus mask divergence when
    the rows carry jaccard diagnostics. Returns the written paths."""
    by_method = {}
    for rep in reports:
        by_method.setdefault(rep.method, []).append(rep)
    paths = []
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for method in sorted(by_method):
            rows = sorted(by_method[method], key=lambda r: r.sparsity)
            ax.plot(
                [r.sparsity for r in rows],
                [r.metrics["loss"] for r in rows],
                marker="o",
                label=method,
            )
        ax.set_xlabel("sparsity ratio")
        ax.set_ylabel("reference-task loss")
        ax.set_title("loss vs sparsity")
        ax.legend()
        paths.append(_save(fig, out_dir, "loss_vs_sparsity.png"))

        divergence_keys = sorted(
            {k for rep in reports for k in rep.metrics if k.startswith("jaccard_vs_")}
        )
        if divergence_keys:
            fig, ax = plt.subplots()
            for method in sorted(by_method):
                rows = sorted(by_method[method], key=lambda r: r.sparsity)
                for key in divergence_keys:
                    pts = [(r.sparsity, r.metrics[key]) for r in rows if key in r.metrics]
                    if not pts:
                        continue
                    other = key[len("jaccard_vs_") :]
                    ax.plot(
                        [p[0] for p in pts],
                        [p[1] for p in pts],
                        marker="s",
                        label="%s vs %s" % (method, other),
                    )
            ax.set_xlabel("sparsity ratio")
            ax.set_ylabel("pruned-set jaccard")
            ax.set_ylim(-0.05, 1.05)
            ax.set_title("mask agreement across methods")
            ax.legend(fontsize=7)
            paths.append(_save(fig, out_dir, "mask_divergence.png"))
    return paths


def render_fairness_figures(rows, out_dir):
    """Per-summary second-order SPD bars and the deviation histogram."""
    paths = []
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        spds = [row["spd_second_order"] for row in rows]
        ax.bar(range(len(spds)), spds, color="#418ab3")
        ax.axhline(0.0, color="black", linewidth=0.8)
        ax.set_xlabel("summary index")
        ax.set_ylabel("second-order SPD")
        ax.set_title("per-summary parity shift")
        paths.append(_save(fig, out_dir, "fairness_spd.png"))

        fig, ax = plt.subplots()
        ax.hist([row["uer"] for row in rows], bins=min(20, max(3, len(rows))), color="#7a9f35")
        ax.set_xlabel("underrepresentation error")
        ax.set_ylabel("summaries")
        ax.set_title("UER distribution")
        paths.append(_save(fig, out_dir, "fairness_uer.png"))
    return paths
