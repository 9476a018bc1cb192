import json
import subprocess
import sys
from pathlib import Path

import pytest

from tphase.cli import EXIT_BLOWUP, EXIT_CONFIG, EXIT_NONCONVERGED, EXIT_OK, main
from tphase.io import read_csv, read_snapshot

SLAB = """
[numerics]
epsilon = 0.05
dt = 1e-5
t_end = 2e-4
Nx = 64
Ny = 8
Ly = 0.5
output_every = 5
"""


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def only_dir(root: Path) -> Path:
    (d,) = [p for p in root.iterdir() if p.is_dir()]
    return d


def test_run_writes_diagnostics_manifest_and_snapshots(tmp_path, capsys):
    cfg = write(tmp_path, SLAB + "[output]\nsnapshot_every = 10\nfield_csv = true\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == EXIT_OK
    d = only_dir(tmp_path / "out")
    assert d.name.startswith("run-")
    rows = read_csv(d / "diagnostics.csv")
    assert len(rows) >= 1 and "energy_total" in rows[0]
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["status"] == "ok" and manifest["extra"]["exit_code"] == 0
    assert manifest["parameters"]["numerics"]["Nx"] == 64
    snaps = sorted(p.name for p in (d / "snapshots").iterdir())
    assert "final_phi.bin" in snaps and "initial_psi.bin" in snaps and "step000000020_phi.bin" in snaps
    assert "final_phi.csv" in snaps
    assert read_snapshot(d / "snapshots" / "final_phi.bin").time == pytest.approx(2e-4)
    assert "run:" in capsys.readouterr().out


def test_out_directory_from_environment(tmp_path, monkeypatch):
    cfg = write(tmp_path, SLAB)
    monkeypatch.setenv("TPHASE_OUT", str(tmp_path / "env"))
    assert main(["run", str(cfg), "--out", str(tmp_path / "ignored")]) == EXIT_OK
    assert (tmp_path / "env").is_dir() and not (tmp_path / "ignored").exists()


def test_alpha_two_is_a_config_error(tmp_path, capsys):
    cfg = write(tmp_path, SLAB + "alpha = 2\n")
    assert main(["run", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "alpha must exceed 3" in capsys.readouterr().err


def test_inconsistent_gamma2_with_unequal_tensions(tmp_path, capsys):
    cfg = write(tmp_path, SLAB + "[model]\ncoefficients = inconsistent\n[surface_tensions]\nsigma13 = 1.0\nsigma23 = 2.0\n")
    assert main(["check", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "sigma13 == sigma23" in capsys.readouterr().err


@pytest.mark.parametrize("text", ["[numerics]\nNx = 100\n", "[nonsense]\n", "[numerics]\ndt = fast\n"])
def test_bad_configs_exit_one(tmp_path, text):
    assert main(["run", str(write(tmp_path, text)), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_missing_config_exits_one(tmp_path):
    assert main(["run", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_blow_up_exits_two(tmp_path, capsys):
    text = SLAB.replace("dt = 1e-5", "dt = 1.0").replace("t_end = 2e-4", "t_end = 10.0") + "stabilization = 0\n"
    text = text.replace("Nx = 64\nNy = 8\nLy = 0.5", "Nx = 32\nNy = 32\nLy = 1.0")
    text += "[initial]\nshape = lens\nperturbation = 0.3\n"
    assert main(["run", str(write(tmp_path, text)), "--out", str(tmp_path / "o")]) == EXIT_BLOWUP
    assert "halvings" in capsys.readouterr().err
    assert json.loads((only_dir(tmp_path / "o") / "manifest.json").read_text())["status"] == "blow-up"


def test_required_equilibrium_not_reached_exits_three(tmp_path):
    cfg = write(tmp_path, SLAB + "[model]\nrequire_equilibrium = true\n[initial]\nshape = lens\ncentre_y = 0.25\nradius = 0.1\n")
    assert main(["run", str(cfg), "--out", str(tmp_path)]) == EXIT_NONCONVERGED


SWEEP = """
[numerics]
epsilon = 0.02
dt = 1e-5
t_end = 1e-2
Nx = 128
Ny = 8
Ly = 0.25
output_every = 500
"""


def test_cusp_sweep_single_point(tmp_path):
    cfg = write(tmp_path, SWEEP + "[cusp_sweep]\nratios = 3\nmodes = inconsistent\n")
    assert main(["cusp-sweep", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
    d = only_dir(tmp_path)
    rows = read_csv(d / "cusp_summary.csv")
    assert len(rows) == 1 and float(rows[0]["cusp_height"]) > 0.05
    assert (d / "cusp_inconsistent_r3_diagnostics.csv").exists()
    assert (d / "snapshots" / "cusp_inconsistent_r3_psi.bin").exists()


def test_cusp_sweep_parallel_matches_serial(tmp_path):
    cfg = write(tmp_path, SWEEP.replace("t_end = 1e-2", "t_end = 2e-3") + "[cusp_sweep]\nratios = 2, 4\nmodes = inconsistent, consistent\n")
    assert main(["cusp-sweep", str(cfg), "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["cusp-sweep", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "2"]) == EXIT_OK
    a = only_dir(tmp_path / "a") / "cusp_summary.csv"
    b = only_dir(tmp_path / "b") / "cusp_summary.csv"
    assert a.read_bytes() == b.read_bytes()
    rows = read_csv(a)
    assert len(rows) == 4
    assert all(float(r["cusp_height"]) < 1e-2 for r in rows if r["mode"] == "consistent")
    inc = [float(r["cusp_height"]) for r in rows if r["mode"] == "inconsistent"]
    assert inc[1] > inc[0]


def test_jobs_must_be_positive(tmp_path):
    assert main(["run", str(write(tmp_path, SLAB)), "--out", str(tmp_path), "--jobs", "0"]) == EXIT_CONFIG


COMPARE = """
[numerics]
epsilon = 0.05
dt = 1e-5
t_end = 1e-4
Nx = 32
Ny = 32
output_every = 5
"""


def test_compare_identical_series_is_zero(tmp_path):
    cfg = write(tmp_path, COMPARE + "[compare]\nkind = identical\n")
    assert main(["compare", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
    rows = read_csv(only_dir(tmp_path) / "compare.csv")
    assert len(rows) == 3
    assert all(float(r[k]) == 0.0 for r in rows for k in ("l2_c", "l2_d", "l2_c3", "relative_energy_difference"))


def test_compare_mismatched_grids_exit_one(tmp_path, capsys):
    cfg = write(tmp_path, COMPARE + "[compare]\nkind = matching\n[compare.second]\nNx = 64\n")
    assert main(["compare", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "grid" in capsys.readouterr().err


def test_check_reports_every_identity(tmp_path, capsys):
    cfg = Path(__file__).resolve().parent.parent / "configs" / "check.ini"
    assert main(["check", str(cfg), "--out", str(tmp_path)]) == EXIT_OK
    d = only_dir(tmp_path)
    report = (d / "check_report.txt").read_text()
    assert "gradient check" in report and "round trip" in report and "pinned potential parameters" in report
    rows = read_csv(d / "check.csv")
    assert rows and all(r["ok"] == "1" for r in rows)


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "tphase.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("tphase ")
