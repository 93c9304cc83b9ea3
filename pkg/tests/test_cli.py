import json
import subprocess
import sys

import pytest

from dyadic_bmo import cli
from dyadic_bmo.cubes import root_address
from dyadic_bmo.john_nirenberg import JnReport


def run_cli(args):
    return cli.main(args)


def gen_file(tmp_path, name, *args):
    path = tmp_path / name
    assert run_cli(["gen", "--output", str(path), *args]) == 0
    return path


def test_gen_then_norm(tmp_path, capsys):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--n", "1", "--levels", "1")
    assert run_cli(["norm", "--input", str(step)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"bmo_norm": 0.5, "argmax_cube": {"level": 0, "index": [0]}}


def test_norm_to_output_file(tmp_path):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--levels", "1")
    out = tmp_path / "norm.json"
    assert run_cli(["norm", "--input", str(step), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["bmo_norm"] == 0.5


def test_jn_on_constant_exits_1(tmp_path, capsys):
    const = gen_file(tmp_path, "const.json", "--kind", "constant", "--levels", "2")
    assert run_cli(["jn", "--input", str(const)]) == 1
    assert "BMO norm is zero" in capsys.readouterr().err


def test_gen_spike_decompose_hand_trace(tmp_path, capsys):
    spike = gen_file(
        tmp_path, "spike.json", "--kind", "spike", "--n", "1", "--levels", "2",
        "--param", "h=12",
    )
    assert run_cli(["decompose", "--input", str(spike), "--theta", "1.01"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["generations"][0] == [
        {
            "level": 2,
            "index": [3],
            "base_average": 0.5,
            "own_average": 2.0,
            "oscillation": 1.5,
        }
    ]
    assert doc["features"]["passed"] is True
    assert all(c["passed"] for c in doc["containment"])


def test_jn_csv_and_json(tmp_path, capsys):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--levels", "1")
    assert run_cli(["jn", "--input", str(step), "--format", "csv", "--steps", "10"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "alpha,empirical,bound"
    assert len(lines) == 11
    out = tmp_path / "jn.json"
    assert run_cli(["jn", "--input", str(step), "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["dominated"] is True and doc["check"] == "john-nirenberg-distribution"


def test_expint_csv(tmp_path, capsys):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--levels", "2")
    assert run_cli(["expint", "--input", str(step), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "zeta,lhs,bound,admissible"
    assert len(lines) == 21


def test_duality_random_and_file_atoms(tmp_path, capsys):
    phi = gen_file(
        tmp_path, "m.json", "--kind", "dyadic_martingale", "--levels", "6", "--seed", "4"
    )
    assert run_cli(["duality", "--input", str(phi), "--random-atoms", "20"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] is True and doc["terms"] == 20

    atoms = {"terms": [{"kappa": 2.0, "support": {"level": 0, "index": [0]}, "kind": "haar", "axis": 0}]}
    atoms_path = tmp_path / "atoms.json"
    atoms_path.write_text(json.dumps(atoms))
    assert run_cli(["duality", "--input", str(phi), "--atoms", str(atoms_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] is True


def test_exit_2_when_domination_fails(tmp_path, monkeypatch):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--levels", "1")
    fake = JnReport(
        cube=root_address(1), norm=1.0, alphas=[1.0], empirical=[2.0], bound=[1.0],
        dominated=False, max_ratio=2.0,
    )
    monkeypatch.setattr(cli, "verify_jn", lambda *a, **k: fake)
    out = tmp_path / "jn.json"
    assert run_cli(["jn", "--input", str(step), "--output", str(out)]) == 2
    # the report is still written for inspection
    assert json.loads(out.read_text())["dominated"] is False


def test_exit_1_on_missing_input_no_partial_output(tmp_path, capsys):
    out = tmp_path / "out.json"
    assert run_cli(["jn", "--input", str(tmp_path / "nope.json"), "--output", str(out)]) == 1
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_exit_1_on_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1, "levels": 1, "origin": [0], "side": 1, "values": [1, 2, 3]}')
    assert run_cli(["norm", "--input", str(bad)]) == 1
    assert "expected 2 values" in capsys.readouterr().err


def test_malformed_flags_exit_1():
    with pytest.raises(SystemExit) as exc:
        run_cli(["gen", "--kind", "nope", "--output", "x.json"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        run_cli(["jn"])
    assert exc.value.code == 1


def test_bad_cube_flag(tmp_path, capsys):
    step = gen_file(tmp_path, "step.json", "--kind", "step", "--levels", "2")
    assert run_cli(["jn", "--input", str(step), "--cube", "1:0,0"]) == 1
    assert "--cube" in capsys.readouterr().err


def test_gen_csv_rejects_2d(tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert run_cli([
        "gen", "--kind", "constant", "--n", "2", "--levels", "1",
        "--format", "csv", "--output", str(out),
    ]) == 1
    assert "n=1" in capsys.readouterr().err
    assert not out.exists()


def test_expint_on_constant_exits_1(tmp_path, capsys):
    const = gen_file(tmp_path, "c.json", "--kind", "constant", "--levels", "2")
    assert run_cli(["expint", "--input", str(const)]) == 1
    assert "BMO norm is zero" in capsys.readouterr().err


def test_gen_csv_format(tmp_path):
    out = tmp_path / "m.csv"
    assert run_cli([
        "gen", "--kind", "dyadic_martingale", "--levels", "3", "--seed", "1",
        "--format", "csv", "--output", str(out),
    ]) == 0
    assert out.read_text().splitlines()[0] == "value"
    assert run_cli(["norm", "--input", str(out)]) == 0


def test_plot_flag_writes_png(tmp_path):
    spike = gen_file(
        tmp_path, "spike.json", "--kind", "spike", "--levels", "3", "--param", "h=9"
    )
    png = tmp_path / "jn.png"
    assert run_cli([
        "jn", "--input", str(spike), "--output", str(tmp_path / "jn.csv"),
        "--format", "csv", "--plot", str(png),
    ]) == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_plot_failure_leaves_no_output(tmp_path, capsys):
    cube3 = gen_file(
        tmp_path, "m3.json", "--kind", "dyadic_martingale", "--n", "3", "--levels", "2"
    )
    out = tmp_path / "dec.json"
    png = tmp_path / "dec.png"
    assert run_cli([
        "decompose", "--input", str(cube3), "--theta", "1.5",
        "--output", str(out), "--plot", str(png),
    ]) == 1
    assert not out.exists() and not png.exists()
    assert "n in" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = tmp_path / "step.json"
    proc = subprocess.run(
        [sys.executable, "-m", "dyadic_bmo", "gen", "--kind", "step",
         "--levels", "1", "--output", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    proc = subprocess.run(
        [sys.executable, "-m", "dyadic_bmo", "norm", "--input", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["bmo_norm"] == 0.5
