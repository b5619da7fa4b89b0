"""The six standard figure layouts for darwin-mbl tables.

Every renderer draws exactly what its input table contains (no recomputed
physics, no smoothing, no randomness) and returns a small dict of the
numbers it displayed, so tests can hold the drawing to the table.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import ResultsTable, TableError


def _unique_in_order(values) -> list:
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def render_redundancy_plateau(table: ResultsTable, out_path: str) -> dict:
    """Rescaled mutual information versus fragment fraction, one curve per
    disorder strength, with the deficit area against the perfect plateau
    shaded; the shaded area per curve is exactly the table's LR value."""
    table.require("h", "l", "f", "mi_over_HS", "LR")
    h_col = table.column("h")
    fig, ax = plt.subplots(figsize=(6, 4))
    areas = {}
    for i, h in enumerate(_unique_in_order(h_col.tolist())):
        mask = h_col == h
        f = table.column("f")[mask]
        y = table.column("mi_over_HS")[mask]
        order = np.argsort(f)
        f, y = f[order], y[order]
        # plateau deficit of the plotted points, fractions below one
        area = float(np.abs(1.0 - y[f < 1.0]).sum())
        areas[h] = area
        table_lr = float(table.column("LR")[mask][0])
        if abs(area - table_lr) > 1e-9:
            raise TableError(
                f"{table.path}: shaded area {area!r} disagrees with LR column "
                f"{table_lr!r} at h={h}"
            )
        shade = 0.35 - 0.2 * (i % 2)
        ax.plot(f, y, "o-", label=f"h = {h:g} (LR = {table_lr:.3g})")
        ax.fill_between(f, y, 1.0, where=f < 1.0, alpha=shade)
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel("fragment fraction f = l/L")
    ax.set_ylabel("averaged mutual information / system entropy")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"areas": areas}


def render_disorder_sweeps(
    lr_table: ResultsTable, ee_table: ResultsTable, out_path: str
) -> dict:
    """Two panels versus disorder strength: redundancy deficit on top,
    entanglement entropy per site below, one curve per chain size."""
    lr_table.require("L", "h", "LR_mean")
    ee_table.require("L", "h", "SE_per_site_mean")
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
    curves = 0
    for table, ax, column, err_column, label in (
        (lr_table, top, "LR_mean", "LR_stderr", "LR"),
        (ee_table, bottom, "SE_per_site_mean", "SE_per_site_stderr", "S_E/L"),
    ):
        sizes = _unique_in_order(table.column("L").tolist())
        for L in sizes:
            mask = table.column("L") == L
            h = table.column("h")[mask]
            y = table.column(column)[mask]
            order = np.argsort(h)
            err = None
            if err_column in table.columns:
                err = table.column(err_column)[mask][order]
            ax.errorbar(h[order], y[order], yerr=err, fmt="o-", label=f"L = {int(L)}")
            curves += 1
        ax.set_ylabel(label)
        ax.legend()
    bottom.set_xlabel("disorder strength h")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"curves": curves}


def render_collapse(table: ResultsTable, out_path: str) -> dict:
    """Observable against the rescaled variable, one marker set per size."""
    table.require("L", "x", "y")
    fig, ax = plt.subplots(figsize=(6, 4))
    for L in _unique_in_order(table.column("L").tolist()):
        mask = table.column("L") == L
        x = table.column("x")[mask]
        y = table.column("y")[mask]
        order = np.argsort(x)
        ax.plot(x[order], y[order], "o", label=f"L = {int(L)}")
    h_c = table.meta.get("h_c", "?")
    nu = table.meta.get("nu", "?")
    ax.set_xlabel(f"sgn(h - h_c) L |h - h_c|^nu   (h_c = {h_c}, nu = {nu})")
    ax.set_ylabel(table.meta.get("collapse_observable", "observable"))
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"h_c": h_c, "nu": nu}


def render_mobility_edge(table: ResultsTable, out_path: str) -> dict:
    """Nearest-neighbour heatmaps of LR and S_E over the (h, eps) plane for
    the largest tabulated size, with crossing markers from the metadata."""
    table.require("L", "eps", "h", "LR_mean", "SE_mean")
    sizes = sorted(set(table.column("L").tolist()))
    L = sizes[-1]
    mask = table.column("L") == L
    h_vals = np.array(sorted(set(table.column("h")[mask].tolist())))
    e_vals = np.array(sorted(set(table.column("eps")[mask].tolist())))
    fig, axes = plt.subplots(2, 1, figsize=(6, 8))
    shown = {}
    for ax, column, marker, title in (
        (axes[0], "LR_mean", "s", "lack of redundancy"),
        (axes[1], "SE_mean", "D", "entanglement entropy"),
    ):
        grid = np.full((e_vals.size, h_vals.size), np.nan)
        for row_idx in range(table.n_rows):
            if table.column("L")[row_idx] != L:
                continue
            i = int(np.searchsorted(e_vals, table.column("eps")[row_idx]))
            j = int(np.searchsorted(h_vals, table.column("h")[row_idx]))
            grid[i, j] = table.column(column)[row_idx]
        mesh = ax.pcolormesh(h_vals, e_vals, grid, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=title)
        observable = "LR" if column == "LR_mean" else "SE_per_site"
        marks = [
            (float(c["h_c"]), float(c["eps"]))
            for c in table.crossings()
            if c.get("observable") == observable and c.get("h_c") not in (None, "none")
        ]
        if marks:
            xs, ys = zip(*marks)
            ax.plot(xs, ys, marker, color="black", ms=8, lw=0)
        shown[column] = len(marks)
        ax.set_ylabel("normalized energy eps")
    axes[1].set_xlabel("disorder strength h")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"L": L, "markers": shown}


def render_lambda_sweep(table: ResultsTable, out_path: str) -> dict:
    """Redundancy deficit versus disorder, one curve per (eps, lambda)."""
    table.require("L", "eps", "lambda", "h", "LR_mean")
    fig, ax = plt.subplots(figsize=(6, 4))
    groups = _unique_in_order(
        list(zip(table.column("eps").tolist(), table.column("lambda").tolist()))
    )
    for eps, lam in groups:
        mask = (table.column("eps") == eps) & (table.column("lambda") == lam)
        h = table.column("h")[mask]
        y = table.column("LR_mean")[mask]
        order = np.argsort(h)
        ax.plot(h[order], y[order], "o-", label=f"eps = {eps:g}, lambda = {lam:g}")
    ax.set_xlabel("disorder strength h")
    ax.set_ylabel("LR")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"curves": len(groups)}


def render_fixed_initial(table: ResultsTable, out_path: str) -> dict:
    """Redundancy deficit versus the evolution disorder for a fixed
    localized initial eigenstate, one curve per lambda."""
    table.require("L", "lambda", "h", "LR_mean")
    fig, ax = plt.subplots(figsize=(6, 4))
    lams = _unique_in_order(table.column("lambda").tolist())
    for lam in lams:
        mask = table.column("lambda") == lam
        h = table.column("h")[mask]
        y = table.column("LR_mean")[mask]
        order = np.argsort(h)
        ax.plot(h[order], y[order], "o-", label=f"lambda = {lam:g}")
    note = ", ".join(
        f"{k} = {table.meta[k]}" for k in ("init_h", "init_eps") if k in table.meta
    )
    ax.set_xlabel(f"evolution disorder h'  ({note})" if note else "evolution disorder h'")
    ax.set_ylabel("LR")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return {"curves": len(lams)}
