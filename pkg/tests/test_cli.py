"""Config parsing and CLI end-to-end tests on small problems."""

import os

import numpy as np
import pytest

from helmtrap.cli import main
from helmtrap.config import ExperimentConfig, load_config, parse_config_text
from helmtrap.csvio import Checkpoint, read_csv, write_csv
from helmtrap.errors import ParameterError


def test_config_round_trip():
    cfg = ExperimentConfig(geometry="ellipse", k_list=(5.0, 7.5), theta=0.25,
                           ppw=12.0, workers=2, timings=True)
    text = cfg.to_text()
    back = parse_config_text(text)
    assert back == cfg


def test_config_error_line_numbers():
    with pytest.raises(ParameterError, match="line 2"):
        parse_config_text("geometry = circle\nbad_key = 3\n")
    with pytest.raises(ParameterError, match="line 3"):
        parse_config_text("geometry = circle\n# ok\nppw = abc\n")
    with pytest.raises(ParameterError, match="key = value"):
        parse_config_text("geometry circle\n")


def test_config_wavenumber_sources():
    cfg = parse_config_text("k_start = 1\nk_stop = 2\nk_step = 0.5\n")
    assert cfg.wavenumbers() == (1.0, 1.5, 2.0)
    cfg = parse_config_text("k_list = 3.0, 1.0\n")
    assert cfg.wavenumbers() == (3.0, 1.0)
    with pytest.raises(ParameterError):
        parse_config_text("k_list = 1.0\nk_start = 1\nk_stop = 2\nk_step = 1\n")
    with pytest.raises(ParameterError):
        parse_config_text("k_start = 1\n").wavenumbers()


def test_config_validation_errors():
    with pytest.raises(ParameterError):
        parse_config_text("geometry = cube\n")
    with pytest.raises(ParameterError):
        parse_config_text("l0 = 0.5\nl1 = 0.3\n")
    with pytest.raises(ParameterError):
        parse_config_text("rect_orientation = diag\n")


def test_load_config_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("geometry = circle\nk_list = 4.0\n# comment\nppw = 10\n")
    cfg = load_config(path, overrides=["ppw=12", "theta=0.5"])
    assert cfg.geometry == "circle" and cfg.ppw == 12.0 and cfg.theta == 0.5
    with pytest.raises(ParameterError):
        load_config(tmp_path / "missing.cfg")


def test_checkpoint_resume(tmp_path):
    path = tmp_path / "rows.csv"
    ck = Checkpoint(path, "iterations")
    ck.record(1.0, (1.0, 10, 5, True))
    # a second checkpoint instance sees the completed row
    ck2 = Checkpoint(path, "iterations")
    assert ck2.done(1.0) and not ck2.done(2.0)
    ck2.record(2.0, (2.0, 20, 7, False))
    ck2.finalize()
    schema, header, rows = read_csv(path)
    assert schema == "iterations"
    assert [r[0] for r in rows] == ["1.0", "2.0"]
    assert not os.path.exists(str(path) + ".partial")


def test_csv_schema_guard(tmp_path):
    with pytest.raises(ParameterError):
        write_csv(tmp_path / "x.csv", "bogus", [])
    with pytest.raises(ParameterError):
        write_csv(tmp_path / "y.csv", "iterations", [(1.0, 2)])


def test_cli_sweep_deterministic_and_resumable(tmp_path):
    out = tmp_path / "sw"
    args = ["sweep-iterations", "--set", "geometry=circle",
            "--set", "k_list=4.0,5.0,6.0", "--set", f"output_dir={out}"]
    assert main(args) == 0
    first = (out / "iterations.csv").read_bytes()
    fit_first = (out / "iterations-fit.csv").read_bytes()
    assert main(args) == 0
    assert (out / "iterations.csv").read_bytes() == first
    assert (out / "iterations-fit.csv").read_bytes() == fit_first
    schema, header, rows = read_csv(out / "iterations.csv")
    assert schema == "iterations" and len(rows) == 3
    assert all(r[3] == "1" for r in rows)


def test_cli_sweep_parallel_workers_match_serial(tmp_path):
    out1, out2 = tmp_path / "w1", tmp_path / "w2"
    base = ["sweep-iterations", "--set", "geometry=circle",
            "--set", "k_list=4.0,5.0,6.0"]
    assert main(base + ["--set", f"output_dir={out1}"]) == 0
    assert main(base + ["--set", "workers=2", "--set", f"output_dir={out2}"]) == 0
    assert (out1 / "iterations.csv").read_bytes() == (out2 / "iterations.csv").read_bytes()


def test_cli_sweep_resumes_from_partial(tmp_path, monkeypatch):
    out = tmp_path / "sw2"
    os.makedirs(out)
    # pre-seed a completed row for k=4.0 with a sentinel iteration count;
    # the sweep must keep it untouched and only compute k=5.0
    with open(out / "iterations.csv.partial", "w") as fh:
        fh.write("4.0;4.0,999,123,1\n")
    args = ["sweep-iterations", "--set", "geometry=circle",
            "--set", "k_list=4.0,5.0", "--set", f"output_dir={out}"]
    assert main(args) == 0
    _, _, rows = read_csv(out / "iterations.csv")
    assert rows[0] == ["4.0", "999", "123", "1"]
    assert rows[1][0] == "5.0" and rows[1][1] != "999"


def test_cli_sweep_empty_k_list(tmp_path):
    out = tmp_path / "swe"
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("geometry = circle\nk_list =\n" + f"output_dir = {out}\n")
    assert main(["sweep-iterations", "--config", str(cfg)]) == 0
    schema, header, rows = read_csv(out / "iterations.csv")
    assert schema == "iterations" and rows == []


def test_cli_gmres_error_unit_tolerance(tmp_path):
    # tol = 1 accepts x0 = 0 after zero iterations: the error is O(1)
    out = tmp_path / "gt1"
    assert main(["gmres-error", "--set", "geometry=circle", "--set", "k_list=4.0",
                 "--set", "gmres_tol=1", "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "gmres-error.csv")
    assert rows[0][2] == "0"
    assert float(rows[0][3]) == pytest.approx(1.0, abs=1e-12)


def test_cli_spectrum_identity_hook(tmp_path):
    out = tmp_path / "sp"
    assert main(["spectrum", "--debug-identity", "--set", "k_list=1.0",
                 "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "spectrum.csv")
    assert all(float(r[2]) == 1.0 and float(r[3]) == 0.0 for r in rows)


def test_cli_spectrum_emits_rotated_for_neumann_b(tmp_path):
    out = tmp_path / "spb"
    assert main(["spectrum", "--set", "geometry=circle", "--set", "k_list=3.0",
                 "--set", "formulation=neumann-b",
                 "--set", f"output_dir={out}"]) == 0
    schema, _, rows = read_csv(out / "spectrum-rotated.csv")
    assert schema == "spectrum" and rows
    _, _, plain = read_csv(out / "spectrum.csv")
    z = complex(float(plain[0][2]), float(plain[0][3]))
    zr = complex(float(rows[0][2]), float(rows[0][3]))
    assert zr == pytest.approx((2.0 / 1j) * z, rel=1e-12)


def test_cli_flow_small_grid(tmp_path):
    out = tmp_path / "fl"
    assert main(["flow", "--set", "geometry=circle",
                 "--set", "k_start=3.0", "--set", "k_stop=3.1",
                 "--set", "k_step=0.025", "--set", f"output_dir={out}"]) == 0
    schema, _, rows = read_csv(out / "flow.csv")
    assert schema == "flow"
    ks = sorted({r[1] for r in rows})
    assert len(ks) == 5


def test_cli_galerkin_error_decreases(tmp_path):
    out = tmp_path / "ge"
    assert main(["galerkin-error", "--set", "geometry=circle",
                 "--set", "k_list=3.0", "--set", "ppw=6",
                 "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "galerkin-error.csv")
    errs = {int(r[1]): float(r[3]) for r in rows}
    assert errs[1] > errs[2] > errs[3] > 0.0


def test_cli_gmres_error_tracks_tolerance(tmp_path):
    out = tmp_path / "ger"
    assert main(["gmres-error", "--set", "geometry=circle", "--set", "k_list=4.0",
                 "--set", "gmres_tol=1e-12", "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "gmres-error.csv")
    assert float(rows[0][3]) <= 1e-8


def test_cli_weyl_counts(tmp_path):
    out = tmp_path / "wy"
    assert main(["weyl", "--set", "geometry=small-cavity", "--set", "k_list=10.0",
                 "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "weyl.csv")
    assert rows[0][0] == "small-cavity"
    assert float(rows[0][2]) > 0


def test_cli_quasimodes(tmp_path):
    out = tmp_path / "qm"
    assert main(["quasimodes", "--set", "m_max=1", "--set", f"output_dir={out}"]) == 0
    schema, _, rows = read_csv(out / "quasimodes.csv")
    assert schema == "quasimodes" and len(rows) == 2
    assert float(rows[0][6]) == pytest.approx(3.7771558627774433, rel=1e-9)


def test_cli_field_grid(tmp_path):
    out = tmp_path / "fd"
    assert main(["field", "--set", "geometry=circle", "--set", "k_list=3.0",
                 "--set", "grid_nx=5", "--set", "grid_ny=5",
                 "--set", f"output_dir={out}"]) == 0
    _, _, rows = read_csv(out / "field.csv")
    assert len(rows) == 25
