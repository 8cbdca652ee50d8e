"""A10: figure scripts regenerate all four figures from real solver
outputs without error, and every output is byte-identical across two
renders.  The solver is driven through its command line only.
"""

import shutil
import subprocess

import pytest

from frmfigs import (amplitude_trace, schedule_timeline, snapshot_gallery,
                     stability_map)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

RUN_CFG = """\
[schedule]
t1 = 0.5
t2 = 1.0
t3 = 1.5
t4 = 2.0
[grid]
n_rho = 32
n_z = 64
rho_max = 6.0
z_max_pi = 2.0
[endcap]
z_cap = 4.71238898038469
[solver]
dt = 2e-3
t_end = 3.0
sample_stride = 5
snapshot_times = 0, 0.5, 1, 1.5, 2, 3
[run]
e_number = 0.5
"""

SWEEP_CFG = """\
[solver]
t_end = 200
[sweep]
x_name = g0f_abs
x_min = 0.5
x_max = 1.5
x_count = 51
y_name = omega_frm
y_min = 20
y_max = 30
y_count = 2
runner = VA
links = g1f=4*g0f_abs
"""


def run_solver(args):
    proc = subprocess.run(["frmsol"] + args, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    if shutil.which("frmsol") is None:
        pytest.skip("solver CLI not installed")
    root = tmp_path_factory.mktemp("a10")
    run_cfg = root / "run.cfg"
    run_cfg.write_text(RUN_CFG)
    sweep_cfg = root / "sweep.cfg"
    sweep_cfg.write_text(SWEEP_CFG)

    run_solver(["threshold", "--epsilon", "25", "--out", str(root)])
    run_solver(["gpe", "--config", str(run_cfg), "--out", str(root / "run")])
    run_solver(["sweep", "--config", str(sweep_cfg),
                "--out", str(root / "map")])

    snapshots = sorted((root / "run").glob("snapshot_t*.bin"))
    assert len(snapshots) == 6
    return {
        "config": run_cfg,
        "observables": root / "run" / "observables.csv",
        "snapshots": snapshots,
        "map": root / "map" / "stability_map.csv",
        "thresholds": root / "threshold.json",
        "dir": root,
    }


def render_twice(module, args, out_dir, stem):
    first = out_dir / f"{stem}_1.png"
    second = out_dir / f"{stem}_2.png"
    assert module.main(args + ["--out", str(first)]) == 0
    assert module.main(args + ["--out", str(second)]) == 0
    data = first.read_bytes()
    assert data[:8] == PNG_MAGIC and len(data) > 1000
    assert data == second.read_bytes()


def test_A10_schedule_timeline(artifacts):
    render_twice(schedule_timeline, ["--in", str(artifacts["config"])],
                 artifacts["dir"], "timeline")


def test_A10_snapshot_gallery(artifacts):
    paths = [str(p) for p in artifacts["snapshots"]]
    render_twice(snapshot_gallery, ["--in"] + paths,
                 artifacts["dir"], "gallery")


def test_A10_amplitude_trace(artifacts):
    render_twice(amplitude_trace,
                 ["--in", str(artifacts["observables"]), "--t4", "2.0"],
                 artifacts["dir"], "amplitude")


def test_A10_stability_map_with_overlay(artifacts):
    render_twice(stability_map,
                 ["--in", str(artifacts["map"]),
                  "--overlay-thresholds", str(artifacts["thresholds"])],
                 artifacts["dir"], "map")
