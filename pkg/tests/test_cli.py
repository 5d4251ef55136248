import json

import pytest

from rieszstrat import cli


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


DENSITY_ARGS = ["density",
                "--field.name", "riesz_sum",
                "--field.centers", "0,0,0",
                "--field.weights", "1.5",
                "--field.p", "3", "--field.n", "3",
                "--analysis.x", "0,0,0",
                "--quadrature.count", "512", "--quadrature.seed", "0"]


def test_density_command_reports_kernel_weight(capsys):
    code, out = run_cli(DENSITY_ARGS, capsys)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == cli.SCHEMA
    assert report["command"] == "density"
    assert report["seed"] == 0 and report["quadrature_count"] == 512
    assert report["results"]["theta_S"] == pytest.approx(1.5, rel=1e-6)


def test_reports_are_deterministic(capsys):
    _, first = run_cli(DENSITY_ARGS, capsys)
    _, second = run_cli(DENSITY_ARGS, capsys)
    assert first == second


def test_count_command_finds_all_components(capsys):
    code, out = run_cli([
        "count",
        "--field.name", "riesz_sum",
        "--field.centers", "0.3,0,0;-0.3,0.2,0",
        "--field.weights", "1.0,2.0",
        "--field.p", "3", "--field.n", "3",
        "--analysis.c", "0.9",
        "--analysis.grid_step", "0.05",
        "--quadrature.count", "256",
    ], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["results"]["components"] == 2
    assert len(report["results"]["points"]) >= 2


def test_config_file_with_flag_override(tmp_path, capsys):
    ini = tmp_path / "job.ini"
    ini.write_text(
        "[field]\nname = riesz_sum\ncenters = 0,0,0\nweights = 1.0\n"
        "p = 3\nn = 3\n[quadrature]\ncount = 256\nseed = 0\n")
    out_path = tmp_path / "report.json"
    code = cli.main(["density", "--config", str(ini),
                     "--field.weights", "2.0",
                     "--output.path", str(out_path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    report = json.loads(out_path.read_text())
    assert report["config"]["field"]["weights"] == "2.0"
    assert report["results"]["theta_S"] == pytest.approx(2.0, rel=1e-6)


def test_energy_on_pure_kernel_is_flat(capsys):
    code, out = run_cli([
        "energy",
        "--field.name", "riesz_sum",
        "--field.centers", "0,0,0,0",
        "--field.weights", "1.2",
        "--field.p", "3", "--field.n", "4",
        "--analysis.radii", "0.1,0.3,0.5",
        "--analysis.family_count", "8",
        "--quadrature.count", "256",
    ], capsys)
    assert code == 0
    results = json.loads(out)["results"]
    assert results["theta_F"] == pytest.approx([2.4, 2.4, 2.4], abs=1e-6)
    assert results["theta_F_nondecreasing"]
    assert results["theta_G_nondecreasing"]


def test_unknown_flag_is_usage_error(capsys):
    code = cli.main(DENSITY_ARGS + ["--bogus", "1"])
    assert code == 2


def test_unknown_field_is_usage_error(capsys):
    code = cli.main(["density", "--field.name", "no_such_field"])
    assert code == 2


def test_missing_config_file_is_usage_error(capsys):
    code = cli.main(["density", "--config", "/nonexistent/job.ini"])
    assert code == 2


def test_infeasible_analysis_exits_three(capsys):
    # p = 4 in dimension 3 is outside the admissible kernel range
    code = cli.main(["density",
                     "--field.name", "riesz_sum",
                     "--field.centers", "0,0,0",
                     "--field.weights", "1.0",
                     "--field.p", "4", "--field.n", "3"])
    assert code == 3


def test_verify_subset_passes(capsys):
    code, out = run_cli(["verify", "--analysis.criteria", "1,2",
                         "--quadrature.seed", "0"], capsys)
    assert code == 0
    lines = [ln for ln in out.splitlines() if ln.startswith("criterion")]
    assert len(lines) == 2 and all("PASS" in ln for ln in lines)
    report = json.loads(out[out.index("{"):])
    assert report["results"]["all_passed"]
