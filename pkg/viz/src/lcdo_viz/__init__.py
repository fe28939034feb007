"""Static plots for droplet-solver outputs (trace.csv, sweep.csv, final.vtk)."""

from .plots import slice_figure, sweep_figure, trace_figure
from .readers import read_sweep, read_trace, read_vtk

__version__ = "0.1.0"
