import json

import pytest

from pipewr.cli import main


def _solve_args(tmp_path, *extra):
    return ["solve",
            "--out-json", str(tmp_path / "report.json"),
            "--out-residuals", str(tmp_path / "residuals.csv"),
            *extra]


def test_solve_writes_report_and_residuals(tmp_path):
    rc = main(_solve_args(tmp_path, "--method", "nnwr", "--mode", "classical",
                          "--Nx", "63", "--Nt", "32", "--N", "2", "--K", "8",
                          "--tol", "1e-8"))
    assert rc == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["converged"] is True
    assert doc["method"] == "nnwr"
    lines = (tmp_path / "residuals.csv").read_text().strip().split("\n")
    assert lines[0] == "k,residual_Linf"
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_solve_single_subdomain(tmp_path, capsys):
    rc = main(_solve_args(tmp_path, "--N", "1", "--Nx", "63", "--Nt", "32"))
    assert rc == 0
    out = capsys.readouterr().out
    assert "data_messages=0" in out


def test_solve_bad_block_count_exits_1(tmp_path, capsys):
    rc = main(_solve_args(tmp_path, "--mode", "pipeline", "--Nx", "63",
                          "--Nt", "8", "--N", "2", "--K", "1", "--J", "3"))
    assert rc == 1
    assert "J must divide Nt" in capsys.readouterr().err


def test_solve_unconverged_exits_2(tmp_path):
    rc = main(_solve_args(tmp_path, "--Nx", "63", "--Nt", "32", "--N", "2",
                          "--K", "1", "--tol", "1e-14"))
    assert rc == 2


def test_validate_nnwr(capsys):
    rc = main(["validate", "--method", "nnwr", "--Nx", "63", "--Nt", "32",
               "--N", "4", "--K", "3", "--J", "8"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_validate_dnwr(capsys):
    rc = main(["validate", "--method", "dnwr", "--Nx", "63", "--Nt", "32",
               "--N", "5", "--K", "2", "--J", "8"])
    assert rc == 0
    assert "PASS" in capsys.readouterr().out


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("method = nnwr\nNx = 63\nNt = 32\nN = 2\nK = 1\ntol = 1e-14\n")
    # flags win: override K so the run converges
    rc = main(_solve_args(tmp_path, "--config", str(cfg), "--K", "8",
                          "--tol", "1e-8"))
    assert rc == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["K"] == 8
    assert doc["Nx"] == 63


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    rc = main(_solve_args(tmp_path, "--config", str(cfg)))
    assert rc == 1
    assert "bogus" in capsys.readouterr().err


def test_efficiency_table_simulate_deterministic(tmp_path):
    out = tmp_path / "eff.csv"
    argv = ["efficiency-table", "--method", "nnwr", "--K", "4",
            "--J-list", "8,64,4096", "--out", str(out)]
    assert main(argv) == 0
    first = out.read_bytes()
    assert main(argv) == 0
    assert out.read_bytes() == first
    lines = first.decode().strip().split("\n")
    assert lines[0] == "J,simulated_efficiency,theoretical_efficiency"
    assert lines[1] == f"8,{8/15:.6f},{8/15:.6f}"
    assert lines[2] == f"64,{64/71:.6f},{64/71:.6f}"


def test_efficiency_table_dnwr_bound_violation(capsys):
    rc = main(["efficiency-table", "--method", "dnwr", "--N", "8", "--K", "4",
               "--J-list", "8"])
    assert rc == 1
    assert "J >" in capsys.readouterr().err


def test_efficiency_table_empty_j_list(capsys):
    rc = main(["efficiency-table", "--J-list", ","])
    assert rc == 1


def test_efficiency_table_measure_smoke(tmp_path, capsys):
    out = tmp_path / "eff.csv"
    rc = main(["efficiency-table", "--measure", "--method", "nnwr",
               "--N", "2", "--K", "1", "--J-list", "4",
               "--Nx", "63", "--Nt", "32", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "J,actual_efficiency,theoretical_efficiency"
    J, actual, theo = lines[1].split(",")
    assert J == "4" and float(actual) > 0.0
    assert float(theo) == pytest.approx(4 / 5)
