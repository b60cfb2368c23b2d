"""SVG line plots derived from result tables.  Never writes CSV."""

from __future__ import annotations

from collections import defaultdict

from .experiments import ResultTable


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "hardening"
    import matplotlib.pyplot as plt

    return plt, plt.subplots(figsize=(5.0, 3.6))


def _groups(table: ResultTable, key: str, x: str, *ys: str):
    out = defaultdict(list)
    for row in table.rows:
        rec = dict(zip(table.columns, row))
        out[rec[key]].append((rec[x],) + tuple(rec[y] for y in ys))
    return out


def plot_table(table: ResultTable, path) -> None:
    plt, (fig, ax) = _figure()
    exp = table.config.experiment
    if exp in ("cv2-vs-antennas", "cv2-vs-formula"):
        ycol = "cv2_formula" if exp == "cv2-vs-formula" else "asymptote"
        style = "-" if exp == "cv2-vs-formula" else "k--"
        for p, pts in sorted(_groups(table, "p_rays", "n_antennas", "cv2_mc", ycol).items()):
            xs = [v[0] for v in pts]
            line = ax.plot(xs, [v[1] for v in pts], "o-", label=f"P={p}")[0]
            ax.plot(xs, [v[2] for v in pts], style, color=line.get_color() if style == "-" else None, alpha=0.7)
        ax.set_xlabel("antennas per side $N_t = N_r$")
        ax.set_ylabel("$CV^2$")
        ax.set_yscale("log")
    elif exp == "e2-vs-spacing":
        for kind, pts in _groups(table, "array_type", "spacing_over_lambda", "n_e2").items():
            ax.plot([v[0] for v in pts], [v[1] for v in pts], "o-", label=kind.upper())
        ax.axhline(1.0, color="k", ls="--", lw=0.8)
        ax.set_xlabel(r"spacing $\Delta d / \lambda$")
        ax.set_ylabel(r"$N\,\mathcal{E}^2$")
    elif exp == "e2-vs-antennas":
        inv = {}
        for kind, pts in _groups(table, "array_type", "n_antennas", "e2", "inv_n").items():
            ax.plot([v[0] for v in pts], [v[1] for v in pts], "o-", label=kind.upper())
            inv.update({v[0]: v[2] for v in pts})
        xs = sorted(inv)
        ax.plot(xs, [inv[x] for x in xs], "k--", label="1/N")
        ax.set_xlabel("antennas $N$")
        ax.set_ylabel(r"$\mathcal{E}^2$")
        ax.set_yscale("log")
    else:
        pts = [dict(zip(table.columns, r)) for r in table.rows]
        xs = [p["n_antennas"] for p in pts]
        ax.plot(xs, [p["cv2_mc"] for p in pts], "o-", label="Monte Carlo")
        ax.plot(xs, [p["cv2_exact"] for p in pts], "k--", label=r"Tr$(R^2)$/Tr$(R)^2$")
        ax.set_xlabel("antennas $N$")
        ax.set_ylabel("$CV^2$")
        ax.set_yscale("log")
    ax.set_xscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
