"""Figure rendering for spikelattice campaign outputs."""

from .figures import KINDS, FigureSpec, PlotData, PlotError, Series, build_figure, prepare, render

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "FigureSpec",
    "PlotData",
    "PlotError",
    "Series",
    "build_figure",
    "prepare",
    "render",
    "__version__",
]
