"""Figure rendering sidecar for rhobench result CSVs."""

from .render import build_heatmap_grid, render, rho_order

__all__ = ["build_heatmap_grid", "render", "rho_order"]
