from .cases import BenchResult, build_simulation, run_benchmark
from .config import BenchmarkConfig, ConfigError, load_config
from .diagnostics import (
    StrouhalResult,
    compute_strouhal,
    error_norms,
    oscillation_summary,
    validate_series,
)

__all__ = [n for n in dir() if not n.startswith("_")]
