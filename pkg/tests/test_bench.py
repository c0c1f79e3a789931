import subprocess
import sys

import numpy as np
import pytest

from ifed.bench import (
    BenchmarkConfig,
    ConfigError,
    compute_strouhal,
    error_norms,
    load_config,
    oscillation_summary,
    run_benchmark,
    validate_series,
)
from ifed.bench.cases import _build_band, _build_channel, channel_error_fields

RNG = np.random.default_rng(17)


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def test_config_defaults_and_reynolds():
    cfg = BenchmarkConfig("cylinder")
    assert cfg["n"] == 16 and cfg["kernel"] == "bspline3"
    assert abs(cfg.reynolds - 200.0) < 1e-12
    assert abs(BenchmarkConfig("channel").reynolds - 200.0 / 3.0) < 1e-12
    assert abs(BenchmarkConfig("turek_hron").reynolds - 200.0) < 1e-12


def test_config_rejects_unknowns():
    with pytest.raises(ConfigError):
        BenchmarkConfig("cylinder", params={"not_a_key": 1})
    with pytest.raises(ConfigError):
        BenchmarkConfig("vortex_street")
    with pytest.raises(ConfigError):
        BenchmarkConfig("cylinder", params={"kernel": "gauss"})
    with pytest.raises(ConfigError):
        BenchmarkConfig("cylinder", params={"mfac": -1})


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text(
        "[benchmark]\nkernel = ib4\nmfac = 1.5\n[numerics]\ncfl = 0.2\n"
    )
    flat = load_config(path)
    cfg = BenchmarkConfig("channel", params=flat)
    assert cfg["kernel"] == "ib4" and cfg["mfac"] == 1.5 and cfg["cfl"] == 0.2
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def test_strouhal_pure_sinusoid():
    t = np.linspace(0.0, 50.0, 4001)
    y = np.sin(2 * np.pi * t / 5.0)
    st = compute_strouhal(t, y, 1.0, 1.0)
    assert abs(st.value - 0.2) < 1e-6
    assert st.periods_used >= 4


def test_strouhal_with_noise():
    t = np.linspace(0.0, 50.0, 4001)
    y = np.sin(2 * np.pi * t / 5.0) + 0.01 * RNG.standard_normal(t.size)
    st = compute_strouhal(t, y, 1.0, 1.0)
    assert abs(st.value - 0.2) < 1e-3


def test_strouhal_rejects_constant():
    t = np.linspace(0.0, 10.0, 101)
    with pytest.raises(ValueError, match="no oscillation"):
        compute_strouhal(t, np.ones_like(t), 1.0, 1.0)


def test_error_norms_cases():
    h = 0.1
    zero = np.zeros((5, 5))
    out = error_norms([(zero, None)], h)
    assert out["l1"] == out["l2"] == out["linf"] == 0.0

    c = 0.7
    field = np.full((10, 10), c)
    mask = np.zeros((10, 10), dtype=bool)
    mask[2:6, 3:8] = True
    area = mask.sum() * h * h
    out = error_norms([(field, mask)], h)
    assert abs(out["l2"] - c * np.sqrt(area)) < 1e-14
    assert abs(out["l1"] - c * area) < 1e-14
    assert out["linf"] == c

    # brute-force comparison
    err = RNG.standard_normal((8, 6))
    mask = RNG.random((8, 6)) > 0.4
    out = error_norms([(err, mask)], h)
    acc_abs = acc_sq = 0.0
    linf = 0.0
    for i in range(8):
        for j in range(6):
            if mask[i, j]:
                acc_abs += abs(err[i, j])
                acc_sq += err[i, j] ** 2
                linf = max(linf, abs(err[i, j]))
    assert out["l1"] == h * h * acc_abs
    assert out["l2"] == np.sqrt(h * h * acc_sq)
    assert out["linf"] == linf


def test_oscillation_summary():
    t = np.linspace(0.0, 10.0, 1001)
    y = 0.3 + 1.7 * np.sin(2 * np.pi * t)
    mid, amp = oscillation_summary(t, y, window=0.5)
    assert abs(mid - 0.3) < 1e-3
    assert abs(amp - 1.7) < 1e-3


def test_validate_series():
    good = np.array([[0.0, 1.0], [1.0, 2.0]])
    validate_series(good)
    with pytest.raises(ValueError):
        validate_series(np.array([[1.0, 1.0], [1.0, 2.0]]))
    with pytest.raises(ValueError):
        validate_series(np.array([[0.0, np.nan]]))


# ---------------------------------------------------------------------------
# geometry and runners
# ---------------------------------------------------------------------------

def test_band_geometry_blocks():
    cfg = BenchmarkConfig("band", params={"n": 16})
    sim = _build_band(cfg)
    names = [b.name for b in sim.bodies]
    assert names == ["band", "block_bottom", "block_top"]
    bot = sim.bodies[1].mesh
    top = sim.bodies[2].mesh
    assert abs(bot.nodes[:, 1].min() - 0.0) < 1e-12
    assert abs(bot.nodes[:, 1].max() - 0.1) < 1e-12
    assert abs(top.nodes[:, 1].min() - 0.9) < 1e-12
    assert abs(top.nodes[:, 1].max() - 1.0) < 1e-12
    # blocks use a finer structural mesh (mfac 0.5)
    from ifed.structure import mfac_of

    assert mfac_of(bot, sim.grid.h).value < 0.75
    # band is anchored where it meets the blocks
    band = sim.bodies[0]
    ys = band.mesh.nodes[band.anchor_nodes][:, 1]
    assert np.all((np.abs(ys - 0.1) < 1e-9) | (np.abs(ys - 0.9) < 1e-9))


def test_channel_norm_mask_two_ways():
    cfg = BenchmarkConfig("channel", params={"n": 8, "kernel": "pwl"})
    sim = _build_channel(cfg)
    sim.flow.u += 0.01 * RNG.standard_normal(sim.flow.u.shape)
    pairs = channel_error_fields(sim, cfg)
    fast = error_norms(pairs, sim.grid.h)
    # brute force: accumulate masked entries elementwise
    acc_abs = acc_sq = 0.0
    linf = 0.0
    for err, mask in pairs:
        for i in range(err.shape[0]):
            for j in range(err.shape[1]):
                if mask[i, j]:
                    acc_abs += abs(err[i, j])
                    acc_sq += err[i, j] ** 2
                    linf = max(linf, abs(err[i, j]))
    h = sim.grid.h
    assert fast["linf"] == linf
    assert abs(fast["l1"] - h * h * acc_abs) <= 1e-14 * fast["l1"]
    assert abs(fast["l2"] - np.sqrt(h * h * acc_sq)) <= 1e-14 * fast["l2"]


def test_cylinder_zero_inflow_stays_zero(tmp_path):
    cfg = BenchmarkConfig("cylinder", tmp_path, params={
        "n": 4, "t_end": 0.5, "u_ref": 0.0, "sample_every": 2,
        "dt_override": 0.02,
    })
    result = run_benchmark(cfg)
    assert result.series.size > 0
    assert np.max(np.abs(result.series[:, 1:])) == 0.0


def test_turek_hron_refuses_large_n_without_extended(tmp_path):
    cfg = BenchmarkConfig("turek_hron", tmp_path, params={"n": 64})
    with pytest.raises(ConfigError, match="extended"):
        run_benchmark(cfg)


@pytest.mark.slow
def test_cylinder_mirror_symmetry():
    # mirroring the whole problem top-to-bottom (mesh included, pulse sign
    # flipped) negates C_L and preserves C_D up to roundoff growth
    from ifed.bench.cases import _build_cylinder
    from ifed.structure import Assembler, ReferenceMesh

    def run(mirror):
        cfg = BenchmarkConfig("cylinder", params={
            "n": 8, "pulse_sign": -1.0 if mirror else 1.0})
        sim = _build_cylinder(cfg)
        body = sim.bodies[0]
        if mirror:
            nodes = body.mesh.nodes.copy()
            nodes[:, 1] = 16.0 - nodes[:, 1]
            elems = body.mesh.elements[:, [0, 2, 1]]
            body.mesh = ReferenceMesh(nodes, elems)
            body.state.positions = nodes.copy()
        masses = Assembler(body.mesh).lumped_mass()
        series = []
        while sim.flow.t < 3.0:
            sim.step()
            if sim.step_count % 8 == 0:
                F = body.force_density(body.state.positions,
                                       body.state.velocities, sim.flow.t)
                tot = -np.sum(F * masses[:, None], axis=0)
                series.append([tot[0], tot[1]])
        return np.array(series)

    a = run(False)
    b = run(True)
    assert np.max(np.abs(a[:, 1] + b[:, 1])) < 1e-6
    assert np.max(np.abs(a[:, 0] - b[:, 0])) < 1e-6


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _cli(*args):
    return subprocess.run([sys.executable, "-m", "ifed.bench.cli", *args],
                          capture_output=True, text=True)


def test_cli_exit_codes(tmp_path):
    r = _cli("run", "--benchmark", "nonsense", "--out", str(tmp_path))
    assert r.returncode == 3
    r = _cli("run", "--benchmark", "cylinder", "--kernel", "gauss",
             "--out", str(tmp_path))
    assert r.returncode == 3
    r = _cli("run", "--benchmark", "cylinder", "--out", str(tmp_path / "o"),
             "n=4", "t_end=0.1", "u_ref=0.0", "dt_override=0.02")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "o" / "series.csv").exists()
    assert (tmp_path / "o" / "summary.csv").exists()


def test_cli_sweep(tmp_path):
    r = _cli("sweep", "--benchmark", "cylinder",
             "--grid", "kernels=pwl,ib3,mfacs=2,ns=4",
             "--out", str(tmp_path), "--jobs", "2",
             "t_end=0.1", "u_ref=0.0", "dt_override=0.02")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "cylinder" / "pwl_m2_n4" / "summary.csv").exists()
    assert (tmp_path / "cylinder" / "ib3_m2_n4" / "summary.csv").exists()


def test_all_kernels_and_mfacs_build():
    # every benchmark accepts any kernel and any mfac via just two keys
    from ifed.bench.cases import build_simulation
    from ifed.kernels import KernelId

    for benchmark, n in (("cylinder", 4), ("channel", 8), ("band", 16)):
        for kernel in ("pwl", "ib5", "bspline6"):
            for mfac in (0.5, 1.0, 4.0):
                cfg = BenchmarkConfig(benchmark, params={
                    "n": n, "kernel": kernel, "mfac": mfac})
                sim = build_simulation(cfg)
                assert sim.bodies, (benchmark, kernel, mfac)


@pytest.mark.slow
def test_tethered_disc_temporal_order(tmp_path):
    # probe displacement converges at first order or better in dt
    from ifed.fluid import (BoundarySpec, MACGrid,
                            NormalTractionTangentialVelocity,
                            NormalVelocityTangentialTraction,
                            VelocityDirichlet, apply_fixed_faces)
    from ifed.kernels import KernelId
    from ifed.structure import Tether, disc_mesh
    from ifed.timestepper import Body, Simulation

    def run(dt):
        grid = MACGrid(64, 32, 0.125, rho=1.0, mu=0.05)
        bc = BoundarySpec(
            left=VelocityDirichlet(1.0, 0.0),
            right=NormalTractionTangentialVelocity(0.0, 0.0),
            bottom=NormalVelocityTangentialTraction(0.0, 0.0),
            top=NormalVelocityTangentialTraction(0.0, 0.0),
        )
        mesh = disc_mesh(0.5, 0.25, center=(2.5, 2.0))
        # fixed penalty parameters: every dt integrates the same problem
        body = Body("disc", mesh, Tether(900.0, 30.0), KernelId.BSPLINE3)
        sim = Simulation(grid, bc, [body], dt)
        sim.flow.u[...] = 1.0
        apply_fixed_faces(sim.flow, grid, bc, 0.0)
        sim.stokes.project(sim.flow)
        while sim.flow.t < 1.0 - 1e-12:
            sim.step()
        return body.state.positions[0].copy()

    ref = run(0.0025)
    e1 = np.linalg.norm(run(0.01) - ref)
    e2 = np.linalg.norm(run(0.005) - ref)
    assert e2 < e1
    order = np.log2(e1 / max(e2, 1e-16))
    assert order >= 0.9, (e1, e2, order)
