from .plots import fit_loglog_slope, plot_convergence, plot_field_magnitude, plot_timeseries
from .schemas import SchemaError, read_field, read_series, read_summary

__all__ = [n for n in dir() if not n.startswith("_")]
