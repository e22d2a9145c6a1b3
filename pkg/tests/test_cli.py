import csv
import io
import math
import subprocess
import sys

import pytest

from cubecover import cli
from cubecover import quantization as quant
from cubecover.designs import build_dn_delta, write_design_csv


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- parsing and usage errors ---------------------------------------------------------


def test_list_parsers():
    assert cli.parse_int_list("3-5,10") == (3, 4, 5, 10)
    assert cli.parse_float_list("0.7:1.1:0.1") == (0.7, 0.8, 0.9, 1.0, 1.1)
    assert cli.parse_float_list("0.5,2") == (0.5, 2.0)
    assert cli.grid_values(0.40, 0.60, 0.005)[-1] == 0.6
    assert len(cli.grid_values(0.40, 0.60, 0.005)) == 41


@pytest.mark.parametrize(
    "argv",
    [
        ["quant-table", "--d", ""],
        ["quant-table", "--d", "0"],
        ["cover-table", "--gamma", "1.5"],
        ["curve", "--delta-step", "0"],
        ["curve", "--delta-start", "0.8", "--delta-stop", "0.2"],
        ["quant-table", "--samples", "10"],
        ["quant-table", "--bogus"],
        ["nonsense"],
        ["cdf", "--d", "3", "--design", "hexagons"],
        ["cdf", "--d", "3,4"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, _ = run_cli(capsys, *argv)
    assert code == cli.EXIT_USAGE


def test_io_errors_exit_3(capsys, tmp_path):
    code, _, err = run_cli(capsys, "eval", "--d", "3", "--design", f"custom:{tmp_path / 'missing.csv'}", "--samples", "1000")
    assert code == cli.EXIT_IO and "missing.csv" in err
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("x1,x2,x3\n0,0,0\n1,2\n")
    code, _, err = run_cli(capsys, "eval", "--d", "3", "--design", f"custom:{ragged}", "--samples", "1000")
    assert code == cli.EXIT_IO and "ragged" in err
    bad = tmp_path / "dn.txt"
    bad.write_text("d s a m\n2 1 0 2\n")
    code, _, _ = run_cli(capsys, "quant-table", "--d", "3", "--direction-numbers", str(bad), "--samples", "1000")
    assert code == cli.EXIT_IO
    code, _, _ = run_cli(capsys, "quant-table", "--d", "3", "--samples", "1000", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == cli.EXIT_IO


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cubecover.cli", "quant-table", "--d", "2", "--samples", "1000"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "d,design,qd,stderr,method"


# -- quant-table -------------------------------------------------------------------------------


def test_quant_table_d3(capsys):
    code, out, _ = run_cli(capsys, "quant-table", "--d", "3", "--samples", "2000")
    assert code == 0
    rows = parse(out)
    assert list(rows[0]) == list(cli.QUANT_TABLE_HEADER)
    star = [r for r in rows if r["design"] == "dn-delta*"][0]
    assert float(star["qd"]) == pytest.approx(2 ** (-2 / 3) * (1 / 12 + 11 / 144), rel=5e-6)


def test_quant_table_structured_rows(capsys):
    code, out, _ = run_cli(capsys, "quant-table", "--samples", "1000")
    assert code == 0
    rows = parse(out)
    star = {int(r["d"]): float(r["qd"]) for r in rows if r["design"] == "dn-delta*"}
    assert [round(star[d], 4) for d in (5, 7, 10, 15, 20)] == [0.0876, 0.0827, 0.0804, 0.0798, 0.0800]
    assert all(float(r["qd"]) == pytest.approx(1 / 12, rel=1e-6) for r in rows if r["design"] == "dn0")
    assert all(r["method"] == "MonteCarlo" and float(r["stderr"]) > 0 for r in rows if r["design"] == "sobol")


# -- cover-table ----------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def cover_rows():
    config = cli.RunConfig(command="cover-table", d_list=(10, 20), delta_grid=(0.40, 0.60, 0.005), samples=200_000)
    return parse(cli.run(config))


def test_cover_table_optimal_delta_d10(cover_rows):
    opt = [r for r in cover_rows if r["d"] == "10" and r["design"] == "dn-delta-opt" and r["gamma"] == "0.01"][0]
    assert abs(float(opt["delta"]) - 0.52) <= 0.02


def test_cover_table_half_d20(cover_rows):
    half = [r for r in cover_rows if r["d"] == "20" and r["design"] == "dn-delta-1/2"]
    assert float(half[0]["R"]) == pytest.approx(0.3417, abs=0.005)
    full = [r for r in half if r["gamma"] == "0"][0]
    assert float(full["R"]) == pytest.approx(0.5714, abs=0.0005)


def test_cover_table_dn0_full_cover(cover_rows):
    rows = [r for r in cover_rows if r["design"] == "dn0" and r["gamma"] == "0"]
    assert [float(r["R"]) for r in rows] == [0.5, 0.5]


# -- curve ---------------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def curve_d5():
    config = cli.RunConfig(
        command="curve",
        d_list=(5,),
        r_list=(0.7, 0.8, 0.9, 1.0, 1.1),
        delta_grid=(0.0, 1.0, 0.05),
        samples=10**6,
    )
    return parse(cli.run(config))


def test_curve_schema(curve_d5):
    assert list(curve_d5[0]) == list(cli.CURVE_HEADER)
    assert len(curve_d5) == 21 * 5


def test_curve_approx_vs_mc_d5(curve_d5):
    for row in curve_d5:
        gap = abs(float(row["approx"]) - float(row["mc"]))
        assert gap <= max(3 * float(row["mc_stderr"]), 0.01), row


@pytest.mark.xfail(strict=True, reason="in d = 5 the approximated coverage undercuts the approximated lower bound by up to 0.0075")
def test_curve_sandwich_d5(curve_d5):
    for row in curve_d5:
        assert float(row["lower"]) <= float(row["approx"]) <= float(row["upper"]) + 1e-6, row


def test_curve_zero_radius_row(capsys):
    code, out, _ = run_cli(capsys, "curve", "--d", "4", "--r", "0", "--delta-start", "0.5", "--delta-stop", "0.5", "--samples", "1000")
    assert code == 0
    (row,) = parse(out)
    assert all(float(row[k]) == 0.0 for k in ("approx", "mc", "mc_stderr", "lower", "upper"))


def test_curve_uses_full_precision(capsys):
    _, out, _ = run_cli(capsys, "curve", "--d", "3", "--r", "0.77", "--delta-start", "0.3", "--delta-stop", "0.3", "--samples", "1000")
    (row,) = parse(out)
    assert float(row["approx"]) == cli.cov.coverage_dn_delta(3, 0.3, 0.77).value


# -- cdf and eval -----------------------------------------------------------------------------------


def test_cdf_reaches_one_beyond_full_cover(capsys):
    code, out, _ = run_cli(capsys, "cdf", "--d", "4", "--design", "dn-delta,dn0", "--R-grid", "0:1:0.25", "--samples", "5000")
    assert code == 0
    rows = parse(out)
    assert list(rows[0]) == ["design", "R", "cdf"]
    assert {r["design"] for r in rows} == {"dn-delta", "dn0"}
    for r in rows:
        if float(r["R"]) == 0:
            assert float(r["cdf"]) == 0
        if float(r["R"]) == 1:
            assert float(r["cdf"]) == 1


def test_eval_custom_design(capsys, tmp_path):
    path = tmp_path / "pts.csv"
    write_design_csv(build_dn_delta(4, 0.5), path)
    code, out, _ = run_cli(capsys, "eval", "--d", "4", "--design", f"custom:{path}", "--design", "dn-delta", "--delta", "0.5", "--samples", "20000")
    assert code == 0
    custom, structured = parse(out)
    assert custom["design"] == "custom" and custom["R_1"] == ""
    assert custom["qd"] == structured["qd"] and custom["R_gamma"] == structured["R_gamma"]
    assert float(structured["qd"]) == pytest.approx(quant.qd_dn_delta(4, 0.5), abs=5e-3)


def test_eval_dimension_mismatch(capsys, tmp_path):
    path = tmp_path / "pts.csv"
    write_design_csv(build_dn_delta(3, 0.5), path)
    code, _, _ = run_cli(capsys, "eval", "--d", "4", "--design", f"custom:{path}", "--samples", "1000")
    assert code == cli.EXIT_USAGE


def test_out_file(capsys, tmp_path):
    out = tmp_path / "q.csv"
    code, stdout, _ = run_cli(capsys, "quant-table", "--d", "2", "--samples", "1000", "--out", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text().startswith("d,design,qd,stderr,method\n")


# -- validate -------------------------------------------------------------------------------------


VALIDATE_ARGS = ("validate", "--d", "3,4", "--samples", "20000")


def test_validate_passes_and_is_repeatable(capsys):
    code1, out1, _ = run_cli(capsys, *VALIDATE_ARGS)
    code2, out2, _ = run_cli(capsys, *VALIDATE_ARGS, "--workers", "2")
    assert code1 == code2 == 0
    assert out1 == out2
    assert "FAIL" not in out1 and out1.rstrip().endswith("checks passed")


def test_validate_catches_corrupted_optimal_delta(capsys, monkeypatch):
    monkeypatch.setattr(quant, "optimal_delta", lambda d: 0.5 - 1.0 / (d * (d + 2)))
    code, out, _ = run_cli(capsys, *VALIDATE_ARGS)
    assert code == cli.EXIT_VALIDATION
    assert "FAIL  optimal_delta d=3" in out


def test_mc_commands_ignore_worker_count(capsys):
    args = ("cdf", "--d", "5", "--design", "dn-delta,sobol", "--samples", "150000", "--R-grid", "0.2:0.6:0.1")
    _, one, _ = run_cli(capsys, *args, "--workers", "1")
    _, three, _ = run_cli(capsys, *args, "--workers", "3")
    assert one == three
