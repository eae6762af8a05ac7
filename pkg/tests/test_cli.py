import json
import math
import subprocess
import sys

import pytest

from hodgeheat.cli import (COMMANDS, InputError, RunConfig, execute, main, parse_grid,
                           parse_z_grid)


def run(args, stdin=None):
    proc = subprocess.run([sys.executable, "-m", "hodgeheat", *args], input=stdin,
                          capture_output=True, text=True, timeout=120)
    return proc.returncode, proc.stdout, proc.stderr


def generate(*spec):
    code, out, _ = run(["generate", *spec])
    assert code == 0
    return out


def test_hollow_triangle_spectrum_from_pipe():
    code, out, _ = run(["spectrum", "--degree", "1"], stdin=generate("cycle", "3", "hollow"))
    assert code == 0
    eig = json.loads(out)["spectra"][0]["eigenvalues"]
    assert eig == pytest.approx([0, 3, 3], abs=1e-12)


def test_filled_triangle_curvature_from_pipe():
    code, out, _ = run(["curvature", "--degree", "1"], stdin=generate("cycle", "3", "filled"))
    assert code == 0
    rows = json.loads(out)["curvature"]
    assert [r["curvature"] for r in rows] == pytest.approx([3, 3, 3])


def test_missing_face_exits_two(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"simplices": [[0], [1], [2], [0, 1], [0, 2], [0, 1, 2]]}))
    code, _, err = run(["validate", "--complex", str(path)])
    assert code == 2
    assert "missing face [1, 2]" in err and "[0, 1, 2]" in err


def test_bad_json_exits_two_with_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"top_simplices": [[0, 1]')
    code, _, err = run(["validate", "--complex", str(path)])
    assert code == 2
    assert f"{path}:1:" in err


def test_validate_passes(capsys):
    assert main(["validate", "--generate", "torus"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] and {r["check"] for r in doc["reports"]} == {"coboundary-squared", "closure", "stokes"}


def test_report_schema_and_determinism(capsys):
    args = ["dgg-check", "--generate", "path 5", "--t-grid", "log:0.1:5:6", "--seed", "7"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    doc = json.loads(first)
    rep = doc["reports"][0]
    assert {"check", "params", "samples", "max_violation", "pass"} <= set(rep)
    assert "runtime" not in rep
    assert doc["header"]["seed"] == 7
    assert len(doc["header"]["t_grid"]) == 6


def test_timings_flag_adds_runtime(capsys):
    assert main(["heat", "--generate", "path 3", "--t-grid", "1,2", "--timings"]) == 0
    assert "runtime" in json.loads(capsys.readouterr().out)["reports"][0]


def test_failed_check_exits_one_with_sample(capsys):
    code = main(["heat", "--generate", "path 4", "--t-grid", "1", "--tolerance", "-1"])
    assert code == 1
    assert "worst sample" in capsys.readouterr().err


def test_series_csv(tmp_path, capsys):
    csv_path = tmp_path / "series.csv"
    assert main(["domination-check", "--generate", "cycle 4", "--t-grid", "0.5,1",
                 "--series", str(csv_path)]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "check,degree,t,lhs,rhs,slack"
    assert len(lines) > 2


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["betti", "--generate", "torus", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["betti"] == {"0": 1, "1": 2, "2": 1}


def test_degree_out_of_range_exits_two(capsys):
    assert main(["spectrum", "--generate", "path 3", "--degree", "4"]) == 2
    assert "out of range" in capsys.readouterr().err


def test_metric_file(tmp_path, capsys):
    met = tmp_path / "m.json"
    met.write_text(json.dumps({"pairs": [["0", "1", 0.5]]}))
    assert main(["dgg-check", "--generate", "path 2", "--metric", "file",
                 "--metric-file", str(met), "--degree", "0", "--t-grid", "1"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"pairs": [["0", "7", 1.0]]}))
    assert main(["dgg-check", "--generate", "path 2", "--metric", "file",
                 "--metric-file", str(bad), "--degree", "0"]) == 2


def test_vertex_metric_refuses_edges(capsys):
    assert main(["dgg-check", "--generate", "cycle 3", "--metric", "combinatorial"]) == 2
    assert "lives on vertices" in capsys.readouterr().err


def test_non_intrinsic_metric_is_rescaled(capsys):
    assert main(["dgg-check", "--generate", "cycle 3", "--metric", "combinatorial",
                 "--degree", "0", "--t-grid", "1"]) == 0
    notes = json.loads(capsys.readouterr().out)["reports"][0]["notes"]
    assert any("auto-rescaled" in n for n in notes)


def test_augmented_betti_warns(capsys):
    assert main(["betti", "--generate", "cycle 3", "--augmented", "on"]) == 0
    captured = capsys.readouterr()
    assert "reduced" in captured.err
    assert json.loads(captured.out)["reduced"] is True


def test_report_on_hollow_triangle(capsys):
    assert main(["report", "--generate", "cycle 3 hollow", "--samples", "20"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] and doc["betti"] == {"0": 1, "1": 1}
    assert doc["skipped"] and doc["skipped"][0]["check"] == "exhaustion"


def test_resolvent_and_exhaust_commands(capsys):
    assert main(["resolvent-check", "--generate", "path 4", "--z-grid=-1,-2+0.5j"]) == 0
    assert main(["exhaust", "--generate", "path 5", "--centre", "2", "--t-grid", "1"]) == 0


@pytest.mark.parametrize("command", ["energy-check", "contraction-check", "l1-check", "growth",
                                     "laplacian"])
def test_other_commands_succeed(command, capsys):
    assert main([command, "--generate", "cycle 4", "--t-grid", "0.5,2", "--samples", "3"]) == 0


def test_every_command_has_help():
    for command in COMMANDS:
        code, out, _ = run([command, "--help"])
        assert code == 0 and "usage" in out


def test_usage_error_exits_two(capsys):
    assert main(["spectrum", "--bogus"]) == 2
    assert main(["spectrum", "--t-grid", "log:1:2"]) == 2


@pytest.mark.parametrize("text, expected", [
    ("log:1:100:3", [1, 10, 100]),
    ("lin:0:1:3", [0, 0.5, 1]),
    ("0:2:3", [0, 1, 2]),
    ("1.5,2,inf", [1.5, 2, math.inf]),
])
def test_parse_grid(text, expected):
    assert parse_grid(text) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["", "log:1:2:0", "a,b", "1:2"])
def test_parse_grid_errors(text):
    with pytest.raises(InputError):
        parse_grid(text)


def test_parse_z_grid():
    assert parse_z_grid("-1, -2+1j") == [-1 + 0j, -2 + 1j]
    assert len(parse_z_grid("rect:-2:-1:-1:1:2:3")) == 6
    with pytest.raises(InputError):
        parse_z_grid("rect:1:2")


def test_run_config_rejects_empty_grid():
    with pytest.raises(InputError, match="t-grid"):
        RunConfig("heat", t_grid=[])


def test_execute_generate_and_conflicting_sources():
    code, text, _ = execute(RunConfig("generate", generate=["path", "2"]))
    assert code == 0 and json.loads(text)["top_simplices"] == [[0, 1]]
    with pytest.raises(InputError, match="not both"):
        execute(RunConfig("betti", complex_path="x.json", generate=["path", "2"]))
