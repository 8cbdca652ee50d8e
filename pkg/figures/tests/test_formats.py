"""Reader tests against handwritten artifacts and corruptions."""

import numpy as np
import pytest

from figdata import MAP_CSV, OBSERVABLES_CSV, THRESHOLD_JSON, snapshot_bytes
from frmfigs.formats import (FormatError, read_observables, read_schedule_config,
                             read_snapshot, read_thresholds, read_verdict_map)


def test_snapshot_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    values = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    path = tmp_path / "snap.bin"
    path.write_bytes(snapshot_bytes(values, rho_max=3.0, z_max=9.0, time=2.5))
    snap = read_snapshot(path)
    assert snap.n_rho == 4 and snap.n_z == 6
    assert snap.rho_max == 3.0 and snap.z_max == 9.0
    assert snap.time == 2.5
    np.testing.assert_array_equal(snap.values, values)
    assert snap.rho[0] == pytest.approx(3.0 / 4 / 2)
    assert snap.z[0] == pytest.approx(-9.0 + 9.0 / 6)
    assert len(snap.z) == 6


def test_snapshot_corruptions(tmp_path):
    good = snapshot_bytes(np.ones((2, 3), dtype=complex))
    cases = {
        "truncated_header.bin": good[:8],
        "bad_dims.bin": b"x\n3\n1.0 2.0\n0.0\n" + b"\0" * 96,
        "short_payload.bin": good[:-8],
        "negative_dim.bin": b"-2\n3\n1.0 2.0\n0.0\n" + b"\0" * 96,
    }
    for name, raw in cases.items():
        path = tmp_path / name
        path.write_bytes(raw)
        with pytest.raises(FormatError):
            read_snapshot(path)


def test_observables(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text(OBSERVABLES_CSV)
    columns = read_observables(path)
    np.testing.assert_allclose(columns["t"], [0.0, 1.0, 2.0])
    np.testing.assert_allclose(columns["peak"], [0.5, 0.55, 0.52])
    assert "cell_0" in columns


def test_observables_errors(tmp_path):
    path = tmp_path / "obs.csv"
    path.write_text("")
    with pytest.raises(FormatError, match="empty"):
        read_observables(path)
    path.write_text("t,amplitude\n0,1\n")
    with pytest.raises(FormatError, match="missing columns"):
        read_observables(path)
    path.write_text("t,peak\n")
    with pytest.raises(FormatError, match="no data rows"):
        read_observables(path)
    path.write_text("t,peak\n0,high\n")
    with pytest.raises(FormatError, match="non-numeric"):
        read_observables(path)


def test_verdict_map(tmp_path):
    path = tmp_path / "map.csv"
    path.write_text(MAP_CSV)
    vmap = read_verdict_map(path)
    assert vmap.x_name == "g0f_abs"
    assert vmap.y_name == "omega_frm"
    np.testing.assert_allclose(vmap.xs, [0.5, 1.0])
    np.testing.assert_allclose(vmap.ys, [20.0, 40.0])
    assert vmap.verdicts[0, 0] == "Expand"
    assert vmap.verdicts[0, 1] == "Failed"
    assert vmap.verdicts[1, 1] == "Collapse"


def test_verdict_map_errors(tmp_path):
    path = tmp_path / "map.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(FormatError, match="header"):
        read_verdict_map(path)
    path.write_text("x,y,verdict,runtime_s\n0,0,Sideways,1\n")
    with pytest.raises(FormatError, match="unknown verdict"):
        read_verdict_map(path)
    path.write_text("x,y,verdict,runtime_s\n0,0,Stable,1\n0,1,Stable,1\n"
                    "1,0,Stable,1\n")
    with pytest.raises(FormatError, match="complete grid"):
        read_verdict_map(path)


def test_schedule_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("[schedule]\ng0f_abs = 30\n[grid]\nn_z = 64\n")
    params = read_schedule_config(path)
    assert params["g0f_abs"] == 30.0
    assert params["g1f"] == 90.0
    assert params["t4"] == 130.0


def test_schedule_config_errors(tmp_path):
    with pytest.raises(FormatError, match="not found"):
        read_schedule_config(tmp_path / "missing.cfg")
    path = tmp_path / "run.cfg"
    path.write_text("[schedule]\nbogus = 1\n")
    with pytest.raises(FormatError, match="unknown schedule key"):
        read_schedule_config(path)
    path.write_text("[schedule]\nt4 = 10\n")
    with pytest.raises(FormatError, match="stage times"):
        read_schedule_config(path)
    path.write_text("[schedule]\ng1f = soft\n")
    with pytest.raises(FormatError, match="not a number"):
        read_schedule_config(path)


def test_thresholds(tmp_path):
    path = tmp_path / "threshold.json"
    path.write_text(THRESHOLD_JSON)
    payload = read_thresholds(path)
    assert payload["g0_min"] == pytest.approx(0.91831, abs=1e-4)
    path.write_text("[1, 2]")
    with pytest.raises(FormatError, match="JSON object"):
        read_thresholds(path)
    path.write_text("{twisted")
    with pytest.raises(FormatError, match="not valid JSON"):
        read_thresholds(path)
