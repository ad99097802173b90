"""Batch figure rendering for layerconv CSV outputs."""

from .figures import plot_embed, plot_layer, plot_rates, render_report

__version__ = "0.1.0"
