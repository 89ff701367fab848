"""Render benchmark figures from rhobench result CSVs.

Four figure families, one renderer each:

* ``heatmap``   success rates on a dimension (x) by plateau-size (y) grid,
                one panel per (algorithm, fid), cells annotated, color
                scale fixed to [0, 1] across panels; input: success.csv
* ``ecdf``      fraction of targets reached over a log evaluation axis,
                one panel per (fid, n, rho), one line per algorithm;
                input: ecdf.csv
* ``ert``       expected running time against plateau size, one panel per
                (fid, n), one line per algorithm; input: ert.csv
* ``landscape`` 1D step plot or 2D heatmap of an exported landscape grid
                with the best cell marked; input: landscape CSV

Standalone usage: ``render --kind <k> --input <csv> --out <img>``.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import warnings
from typing import Dict, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SUCCESS_COLUMNS = ("algorithm", "fid", "n", "rho", "budget", "rate")
ECDF_COLUMNS = ("algorithm", "fid", "n", "rho", "budget", "fraction")
ERT_COLUMNS = ("algorithm", "fid", "n", "rho", "target", "ert")


class SchemaError(ValueError):
    """Input CSV does not carry the columns a figure family needs."""


def load_rows(path) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def require_columns(rows: List[Dict[str, str]], columns: Sequence[str],
                    path) -> None:
    have = set(rows[0].keys()) if rows else set()
    missing = [c for c in columns if c not in have]
    if missing:
        raise SchemaError(
            f"{path} is missing required column(s) {missing}; "
            f"found {sorted(have)}"
        )


def rho_order(tags: Sequence[str]) -> List[str]:
    """Plateau-size tags sorted None first, then ascending."""
    numeric = sorted({t for t in tags if t != "None"}, key=float)
    return (["None"] if "None" in tags else []) + numeric


def build_heatmap_grid(rows: List[Dict[str, str]]):
    """Pivot success rows into per-(algorithm, fid) dimension-by-rho grids.

    Returns (panels, dims, rhos) where panels maps (algorithm, fid) to a
    len(rhos) x len(dims) array of rates (NaN where absent). The grid
    shape is the full dims-by-rhos cross-product of the input.
    """
    dims = sorted({int(r["n"]) for r in rows})
    rhos = rho_order([r["rho"] for r in rows])
    panels: Dict[Tuple[str, str], np.ndarray] = {}
    for row in rows:
        key = (row["algorithm"], row["fid"])
        grid = panels.setdefault(key, np.full((len(rhos), len(dims)), np.nan))
        grid[rhos.index(row["rho"]), dims.index(int(row["n"]))] = \
            float(row["rate"])
    return panels, dims, rhos


def render_heatmap(rows: List[Dict[str, str]], out) -> None:
    panels, dims, rhos = build_heatmap_grid(rows)
    names = sorted(panels)
    fig, axes = plt.subplots(1, len(names),
                             figsize=(2.2 + 1.3 * len(dims) * len(names),
                                      1.2 + 0.6 * len(rhos)),
                             squeeze=False)
    for ax, key in zip(axes[0], names):
        grid = panels[key]
        image = ax.imshow(grid, vmin=0.0, vmax=1.0, cmap="viridis",
                          aspect="auto", origin="upper")
        for i in range(len(rhos)):
            for j in range(len(dims)):
                if not math.isnan(grid[i, j]):
                    ax.text(j, i, f"{grid[i, j]:.2f}", ha="center",
                            va="center", fontsize=8,
                            color="white" if grid[i, j] < 0.6 else "black")
        ax.set_xticks(range(len(dims)), [str(d) for d in dims])
        ax.set_yticks(range(len(rhos)), rhos)
        ax.set_xlabel("dimension")
        ax.set_title(f"{key[0]} / f{key[1]}", fontsize=10)
    axes[0][0].set_ylabel("plateau size")
    fig.colorbar(image, ax=axes, shrink=0.8, label="success rate")
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_ecdf(rows: List[Dict[str, str]], out) -> None:
    panels: Dict[Tuple[str, str, str], Dict[str, List[Tuple[int, float]]]] = {}
    for row in rows:
        panel = panels.setdefault((row["fid"], row["n"], row["rho"]), {})
        panel.setdefault(row["algorithm"], []).append(
            (int(row["budget"]), float(row["fraction"])))
    keys = sorted(panels, key=lambda k: (k[0], k[1], rho_order([k[2]])[0]))
    keys = [k for k in keys if panels[k]]
    fig, axes = plt.subplots(1, len(keys),
                             figsize=(1.0 + 3.0 * len(keys), 3.0),
                             squeeze=False, sharey=True)
    for ax, key in zip(axes[0], keys):
        for algorithm in sorted(panels[key]):
            curve = sorted(panels[key][algorithm])
            ax.plot([b for b, _ in curve], [f for _, f in curve],
                    label=algorithm, drawstyle="steps-post")
        ax.set_xscale("log")
        ax.set_ylim(0.0, 1.03)
        ax.set_xlabel("evaluations")
        ax.set_title(f"f{key[0]} n={key[1]} rho={key[2]}", fontsize=9)
    axes[0][0].set_ylabel("fraction of targets reached")
    axes[0][-1].legend(fontsize=8)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_ert(rows: List[Dict[str, str]], out) -> None:
    panels: Dict[Tuple[str, str], Dict[str, Dict[str, float]]] = {}
    for row in rows:
        panel = panels.setdefault((row["fid"], row["n"]), {})
        panel.setdefault(row["algorithm"], {})[row["rho"]] = float(row["ert"])
    keys = sorted(panels)
    fig, axes = plt.subplots(1, len(keys),
                             figsize=(1.0 + 3.2 * len(keys), 3.2),
                             squeeze=False)
    for ax, key in zip(axes[0], keys):
        tags = rho_order([t for alg in panels[key].values() for t in alg])
        positions = range(len(tags))
        for algorithm in sorted(panels[key]):
            values = [panels[key][algorithm].get(t, math.nan) for t in tags]
            finite = [v if math.isfinite(v) else math.nan for v in values]
            ax.plot(positions, finite, marker="o", label=algorithm)
            for x, v in zip(positions, values):
                if not math.isfinite(v):
                    ax.annotate("inf", (x, 1), ha="center", fontsize=7)
        ax.set_xticks(list(positions), tags, rotation=45)
        ax.set_yscale("log")
        ax.set_xlabel("plateau size")
        ax.set_title(f"f{key[0]} n={key[1]}", fontsize=10)
    axes[0][0].set_ylabel("expected running time")
    axes[0][-1].legend(fontsize=8)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render_landscape(rows: List[Dict[str, str]], out,
                     points: Optional[List[Dict[str, str]]] = None) -> None:
    if rows and "x2" in rows[0]:
        x1 = np.array([float(r["x1"]) for r in rows])
        x2 = np.array([float(r["x2"]) for r in rows])
        f = np.array([float(r["f"]) for r in rows])
        side = int(round(math.sqrt(len(rows))))
        fig, ax = plt.subplots(figsize=(4.6, 4.0))
        mesh = ax.pcolormesh(x1.reshape(side, side), x2.reshape(side, side),
                             f.reshape(side, side), shading="nearest",
                             cmap="viridis")
        best = int(np.argmin(f))
        ax.plot(x1[best], x2[best], "o", color="red", markersize=10,
                markerfacecolor="none", markeredgewidth=2,
                label="best cell")
        if points:
            ax.plot([float(p["x1"]) for p in points],
                    [float(p["x2"]) for p in points], "x", color="blue",
                    markersize=6, label="best found")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.legend(fontsize=8)
        fig.colorbar(mesh, ax=ax, label="f")
    else:
        x1 = np.array([float(r["x1"]) for r in rows])
        f = np.array([float(r["f"]) for r in rows])
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        ax.step(x1, f, where="post")
        best = int(np.argmin(f))
        ax.plot(x1[best], f[best], "o", color="red", markersize=9,
                markerfacecolor="none", markeredgewidth=2, label="best cell")
        if points:
            ax.plot([float(p["x1"]) for p in points],
                    [float(p["f"]) for p in points], "x", color="blue",
                    label="best found")
        ax.set_xlabel("x1")
        ax.set_ylabel("f")
        ax.legend(fontsize=8)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)


def render(kind: str, input_path, out, points_path=None) -> None:
    """Render one figure family from a result CSV onto an image file."""
    rows = load_rows(input_path)
    if not rows:
        warnings.warn(f"{input_path} has no data rows; nothing rendered")
        return
    if kind == "heatmap":
        require_columns(rows, SUCCESS_COLUMNS, input_path)
        render_heatmap(rows, out)
    elif kind == "ecdf":
        require_columns(rows, ECDF_COLUMNS, input_path)
        render_ecdf(rows, out)
    elif kind == "ert":
        require_columns(rows, ERT_COLUMNS, input_path)
        render_ert(rows, out)
    elif kind == "landscape":
        require_columns(rows, ("x1", "f"), input_path)
        points = load_rows(points_path) if points_path else None
        render_landscape(rows, out, points)
    else:
        raise ValueError(f"unknown figure kind {kind!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a benchmark figure from a rhobench result CSV.",
    )
    parser.add_argument("--kind", required=True,
                        choices=["heatmap", "ecdf", "ert", "landscape"])
    parser.add_argument("--input", required=True, help="input CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--points", default=None,
                        help="optional CSV of best-found points "
                             "(landscape overlay)")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.input, args.out, args.points)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
