"""On-disk formats: field dumps, checkpoints, and CSV time series.

Field dumps (`ifedfield v1`) hold the staggered arrays with a two-line text
header followed by either CSV rows or raw little-endian float64 blocks.
Checkpoints (`ifedchk v1`) are npz containers with every array needed to
resume a run bitwise-identically: flow state, AB2 history, structural states,
and the per-element quadrature-rule memory.
"""

from __future__ import annotations

import csv
import io as _io
import numpy as np

from .fluid import FlowState, MACGrid

__all__ = [
    "write_field",
    "read_field",
    "save_checkpoint",
    "load_checkpoint",
    "CsvLog",
]


def write_field(state: FlowState, grid: MACGrid, path, fmt: str = "csv") -> None:
    if fmt not in ("csv", "bin"):
        raise ValueError("fmt must be 'csv' or 'bin'")
    header = (
        f"ifedfield v1 {fmt}\n"
        f"{grid.nx} {grid.ny} {grid.h!r} {grid.x0!r} {grid.y0!r} {state.t!r}\n"
    )
    with open(path, "wb") as f:
        f.write(header.encode())
        if fmt == "bin":
            for arr in (state.u, state.v, state.p):
                f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        else:
            text = _io.StringIO()
            w = csv.writer(text)
            for name, arr in (("u", state.u), ("v", state.v), ("p", state.p)):
                w.writerow([name])
                for row in arr:
                    w.writerow([repr(float(x)) for x in row])
            f.write(text.getvalue().encode())


def read_field(path):
    """Returns (meta dict, u, v, p)."""
    with open(path, "rb") as f:
        magic = f.readline().decode().split()
        if magic[:2] != ["ifedfield", "v1"]:
            raise ValueError(f"not an ifedfield v1 file: {path}")
        fmt = magic[2]
        nx, ny, h, x0, y0, t = f.readline().decode().split()
        meta = {"nx": int(nx), "ny": int(ny), "h": float(h),
                "x0": float(x0), "y0": float(y0), "t": float(t)}
        shapes = [(meta["nx"] + 1, meta["ny"]), (meta["nx"], meta["ny"] + 1),
                  (meta["nx"], meta["ny"])]
        arrays = []
        if fmt == "bin":
            for shape in shapes:
                n = shape[0] * shape[1]
                arrays.append(
                    np.frombuffer(f.read(8 * n), dtype="<f8").reshape(shape)
                )
        else:
            reader = csv.reader(_io.StringIO(f.read().decode()))
            current, rows = None, []
            blocks = {}
            for row in reader:
                if len(row) == 1 and row[0] in ("u", "v", "p"):
                    if current:
                        blocks[current] = rows
                    current, rows = row[0], []
                else:
                    rows.append([float(x) for x in row])
            blocks[current] = rows
            for name, shape in zip(("u", "v", "p"), shapes):
                arr = np.array(blocks[name])
                if arr.shape != shape:
                    raise ValueError(f"{name} block has shape {arr.shape}, "
                                     f"expected {shape}")
                arrays.append(arr)
    return meta, *arrays


def save_checkpoint(sim, path) -> None:
    data = {
        "format": np.array("ifedchk v1"),
        "t": np.array(sim.flow.t),
        "step_count": np.array(sim.step_count),
        "u": sim.flow.u, "v": sim.flow.v, "p": sim.flow.p,
        "n_bodies": np.array(len(sim.bodies)),
    }
    if sim.flow.prev_convective is not None:
        data["prev_Nu"], data["prev_Nv"] = sim.flow.prev_convective
    if getattr(sim.stokes, "_phi_prev", None) is not None:
        data["phi_prev"] = sim.stokes._phi_prev
    for k, body in enumerate(sim.bodies):
        data[f"body{k}_positions"] = body.state.positions
        data[f"body{k}_velocities"] = body.state.velocities
        data[f"body{k}_forces"] = body.state.forces
        if body.quad_cache.rule_index is not None:
            data[f"body{k}_rules"] = body.quad_cache.rule_index
            data[f"body{k}_diams"] = body.quad_cache.diameter
    np.savez(path, **data)


def load_checkpoint(sim, path) -> None:
    """Restore a checkpoint into a freshly configured Simulation in place."""
    with np.load(path, allow_pickle=False) as z:
        if str(z["format"]) != "ifedchk v1":
            raise ValueError(f"not an ifedchk v1 file: {path}")
        if int(z["n_bodies"]) != len(sim.bodies):
            raise ValueError("checkpoint body count does not match simulation")
        sim.flow.u[...] = z["u"]
        sim.flow.v[...] = z["v"]
        sim.flow.p[...] = z["p"]
        sim.flow.t = float(z["t"])
        sim.step_count = int(z["step_count"])
        if "prev_Nu" in z:
            sim.flow.prev_convective = (z["prev_Nu"].copy(), z["prev_Nv"].copy())
        else:
            sim.flow.prev_convective = None
        sim.stokes._phi_prev = z["phi_prev"].copy() if "phi_prev" in z else None
        for k, body in enumerate(sim.bodies):
            body.state.positions = z[f"body{k}_positions"].copy()
            body.state.velocities = z[f"body{k}_velocities"].copy()
            body.state.forces = z[f"body{k}_forces"].copy()
            body.state.time = sim.flow.t
            if f"body{k}_rules" in z:
                body.quad_cache.rule_index = z[f"body{k}_rules"].copy()
                body.quad_cache.diameter = z[f"body{k}_diams"].copy()


class CsvLog:
    """Incremental RFC-4180 CSV writer that flushes every row."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)

    def writerow(self, row):
        self._writer.writerow(
            [f"{x:.17g}" if isinstance(x, float) else x for x in row]
        )
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
