"""Benchmark configuration: flat `key = value` files with [section] headers.

CLI flags override file values; every parameter has a benchmark-specific
default.  The `n` parameter follows each benchmark's grid parameterization:
cells per cylinder diameter, per channel width, per domain height unit for
the band, and the coarse-level count for the flexible-beam case (whose cell
size is H/(4 n)).
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from ..kernels import parse_kernel

__all__ = ["BenchmarkConfig", "ConfigError", "load_config"]

BENCHMARKS = ("cylinder", "channel", "turek_hron", "band")


class ConfigError(ValueError):
    pass


_DEFAULTS = {
    "cylinder": {
        "n": 16, "t_end": 150.0, "cfl": 0.1, "rho": 1.0, "mu": 0.005,
        "u_ref": 1.0, "d_ref": 1.0, "kernel": "bspline3", "mfac": 2.0,
        "paper_domain": False, "sample_every": 4, "pulse_sign": 1.0,
    },
    "channel": {
        "n": 16, "t_end": 70.0, "cfl": 0.15, "rho": 1.0, "mu": 0.01,
        "u_ref": 1.0, "d_ref": 1.0, "kernel": "pwl", "mfac": 2.0,
        "steady_tol": 1e-6, "sample_every": 20,
    },
    "turek_hron": {
        "n": 32, "t_end": 12.0, "cfl": 0.25, "rho": 1000.0, "mu": 1.0,
        "u_ref": 3.0, "d_ref": 1.0, "kernel": "bspline3", "mfac": 2.0,
        "shear_modulus": 2.0e6, "sample_every": 8,
    },
    "band": {
        "n": 64, "t_end": 2.0, "cfl": 0.2, "rho": 1.0, "mu": 0.01,
        "u_ref": 1.0, "d_ref": 1.0, "kernel": "bspline3", "mfac": 0.5,
        "shear_modulus": 200.0, "traction": 5.0, "steady_tol": 1e-4,
        "sample_every": 50, "band_eta": 150.0, "load_ramp": 0.1,
    },
}

_COMMON = {
    "c_kappa": 0.1, "c_eta": 0.1, "c_wall": 0.05, "beta_factor": 10.0,
    "rho_q": 0.5, "dump_format": "csv", "dump_every": 0, "extended": False,
    "scheme": "ppm", "poisson_tol": 1e-9, "coupling_mode": "adaptive",
    "dt_override": 0.0, "seed": 0,
}


@dataclass
class BenchmarkConfig:
    benchmark: str
    out_dir: Path = Path("out")
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(
                f"unknown benchmark {self.benchmark!r}; "
                f"expected one of {BENCHMARKS}"
            )
        merged = dict(_COMMON)
        merged.update(_DEFAULTS[self.benchmark])
        for key, value in self.params.items():
            if key not in merged:
                raise ConfigError(f"unknown config key {key!r}")
            merged[key] = type(merged[key])(value) if not isinstance(
                merged[key], bool) else _as_bool(value)
        self.params = merged
        try:
            self.kernel_id = parse_kernel(str(merged["kernel"]))
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if merged["mfac"] <= 0 or merged["n"] <= 0:
            raise ConfigError("mfac and n must be positive")
        if merged["dump_format"] not in ("csv", "bin"):
            raise ConfigError("dump_format must be csv or bin")

    def __getitem__(self, key):
        return self.params[key]

    @property
    def reynolds(self) -> float:
        p = self.params
        if self.benchmark == "cylinder":
            return p["rho"] * p["u_ref"] * 1.0 / p["mu"]
        if self.benchmark == "channel":
            return p["rho"] * 1.0 * (2.0 / 3.0) * p["u_ref"] / p["mu"]
        if self.benchmark == "turek_hron":
            return p["rho"] * 2.0 * 0.1 / p["mu"]
        return p["rho"] * p["u_ref"] * 1.0 / p["mu"]


def _as_bool(v):
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def load_config(path) -> dict:
    """Read a flat key=value config file; sections are merged in order."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            flat[key] = value
    return flat
