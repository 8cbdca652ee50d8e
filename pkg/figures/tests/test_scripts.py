"""End-to-end script tests on synthetic inputs."""

import numpy as np
import pytest

from figdata import MAP_CSV, OBSERVABLES_CSV, THRESHOLD_JSON
from frmfigs import (amplitude_trace, schedule_timeline, snapshot_gallery,
                     stability_map)
from frmfigs.schedule_timeline import (epsilon_curve, g_curve,
                                       omega_perp_curve)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def assert_png(path):
    data = path.read_bytes()
    assert data[:8] == PNG_MAGIC
    assert len(data) > 1000


def reference_params():
    return {"g_init": 10.0, "g0f_abs": 22.5, "g1f": 90.0, "omega_frm": 40.0,
            "eps_f": 25.0, "omega_perp0": 0.3,
            "t1": 30.0, "t2": 100.0, "t3": 120.0, "t4": 130.0}


def test_schedule_curves_match_protocol():
    p = reference_params()
    t = np.array([0.0, 30.0, 65.0, 100.0, 110.0, 125.0, 200.0])
    g = g_curve(p, t)
    assert g[0] == 10.0
    assert g[1] == 10.0
    assert g[2] == pytest.approx(5.0)
    assert g[3] == 0.0
    assert g[4] == 0.0
    # half-way through turn-on the envelope is 0.5
    assert g[5] == pytest.approx(
        0.5 * (-22.5 + 90.0 * np.sin(40.0 * 125.0)))
    assert g[6] == pytest.approx(-22.5 + 90.0 * np.sin(40.0 * 200.0))
    eps = epsilon_curve(p, t)
    assert eps[0] == 0.0
    assert eps[2] == pytest.approx(25.0 * 0.65)
    assert eps[6] == 25.0
    om = omega_perp_curve(p, t)
    assert om[0] == 0.3
    assert om[4] == 0.3
    assert om[5] == pytest.approx(0.15)
    assert om[6] == 0.0


def test_schedule_timeline_script(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[schedule]\ng1f = 0\n[grid]\nn_z = 64\n")
    out = tmp_path / "timeline.png"
    assert schedule_timeline.main(
        ["--in", str(cfg), "--out", str(out)]) == 0
    assert_png(out)


def test_schedule_timeline_missing_input(tmp_path, capsys):
    out = tmp_path / "x.png"
    code = schedule_timeline.main(
        ["--in", str(tmp_path / "none.cfg"), "--out", str(out)])
    assert code == 1
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


def test_gallery_six_panels(tmp_path, make_snapshot):
    paths = [make_snapshot(f"s{i}.bin", time=float(i), width=1.0 + 0.2 * i)
             for i in range(6)]
    out = tmp_path / "gallery.png"
    args = ["--in"] + [str(p) for p in paths] + ["--out", str(out)]
    assert snapshot_gallery.main(args) == 0
    assert_png(out)


def test_gallery_single_panel(tmp_path, make_snapshot):
    out = tmp_path / "one.png"
    assert snapshot_gallery.main(
        ["--in", str(make_snapshot()), "--out", str(out)]) == 0
    assert_png(out)


def test_gallery_mismatched_grids(tmp_path, make_snapshot, capsys):
    a = make_snapshot("a.bin", n_z=32)
    b = make_snapshot("b.bin", n_z=64)
    out = tmp_path / "bad.png"
    code = snapshot_gallery.main(
        ["--in", str(a), str(b), "--out", str(out)])
    assert code == 1
    assert "different grids" in capsys.readouterr().err


def test_gallery_corrupt_header(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"nope")
    code = snapshot_gallery.main(
        ["--in", str(bad), "--out", str(tmp_path / "x.png")])
    assert code == 1


def test_amplitude_trace_script(tmp_path):
    csv = tmp_path / "observables.csv"
    csv.write_text(OBSERVABLES_CSV)
    out = tmp_path / "amplitude.png"
    assert amplitude_trace.main(
        ["--in", str(csv), "--out", str(out), "--t4", "1.0"]) == 0
    assert_png(out)


def test_amplitude_trace_empty_csv(tmp_path, capsys):
    csv = tmp_path / "observables.csv"
    csv.write_text("")
    code = amplitude_trace.main(
        ["--in", str(csv), "--out", str(tmp_path / "x.png")])
    assert code == 1


def test_stability_map_script(tmp_path):
    csv = tmp_path / "map.csv"
    csv.write_text(MAP_CSV)
    out = tmp_path / "map.png"
    assert stability_map.main(["--in", str(csv), "--out", str(out)]) == 0
    assert_png(out)


def test_stability_map_with_overlay(tmp_path):
    csv = tmp_path / "map.csv"
    csv.write_text(MAP_CSV)
    thr = tmp_path / "threshold.json"
    thr.write_text(THRESHOLD_JSON)
    out = tmp_path / "map.png"
    assert stability_map.main(
        ["--in", str(csv), "--out", str(out),
         "--overlay-thresholds", str(thr)]) == 0
    assert_png(out)


def test_stability_map_single_cell(tmp_path):
    csv = tmp_path / "map.csv"
    csv.write_text("g0f_abs,omega_frm,verdict,runtime_s\n1,40,Stable,0.5\n")
    out = tmp_path / "single.png"
    assert stability_map.main(["--in", str(csv), "--out", str(out)]) == 0
    assert_png(out)


def test_stability_map_overlay_axis_mismatch(tmp_path, capsys):
    csv = tmp_path / "map.csv"
    csv.write_text("t1,omega_frm,verdict,runtime_s\n10,40,Stable,0.5\n")
    thr = tmp_path / "threshold.json"
    thr.write_text(THRESHOLD_JSON)
    code = stability_map.main(
        ["--in", str(csv), "--out", str(tmp_path / "x.png"),
         "--overlay-thresholds", str(thr)])
    assert code == 1
    assert "no analytic overlay" in capsys.readouterr().err


def test_stability_map_overlay_missing_value(tmp_path, capsys):
    csv = tmp_path / "map.csv"
    csv.write_text(MAP_CSV)
    thr = tmp_path / "threshold.json"
    thr.write_text('{"epsilon_threshold": 0.46}')
    code = stability_map.main(
        ["--in", str(csv), "--out", str(tmp_path / "x.png"),
         "--overlay-thresholds", str(thr)])
    assert code == 1
    assert "g0_min" in capsys.readouterr().err


def test_inputs_not_mutated(tmp_path, make_snapshot):
    csv = tmp_path / "map.csv"
    csv.write_text(MAP_CSV)
    snap = make_snapshot()
    before_csv = csv.read_bytes()
    before_snap = snap.read_bytes()
    stability_map.main(["--in", str(csv), "--out", str(tmp_path / "a.png")])
    snapshot_gallery.main(["--in", str(snap),
                           "--out", str(tmp_path / "b.png")])
    assert csv.read_bytes() == before_csv
    assert snap.read_bytes() == before_snap


def test_every_script_deterministic(tmp_path, make_snapshot):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("[schedule]\n")
    obs = tmp_path / "observables.csv"
    obs.write_text(OBSERVABLES_CSV)
    mapping = tmp_path / "map.csv"
    mapping.write_text(MAP_CSV)
    snap = make_snapshot()
    jobs = [
        (schedule_timeline, ["--in", str(cfg)]),
        (amplitude_trace, ["--in", str(obs)]),
        (stability_map, ["--in", str(mapping)]),
        (snapshot_gallery, ["--in", str(snap)]),
    ]
    for module, args in jobs:
        first = tmp_path / f"{module.__name__.rsplit('.', 1)[-1]}_1.png"
        second = tmp_path / f"{module.__name__.rsplit('.', 1)[-1]}_2.png"
        assert module.main(args + ["--out", str(first)]) == 0
        assert module.main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
