"""Figure rendering for nfmimo benchmark CSV output."""

from .render import PlotSpec, RenderError, Series, collect_series, load_rows, render

__version__ = "0.1.0"
