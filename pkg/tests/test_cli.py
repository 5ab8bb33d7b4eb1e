import json
import math
import subprocess
import sys

import jsonschema
import pytest

from biorth.cli import run_command
from biorth.fileio import write_matrix
from biorth.report import load_schema


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, A in {
        "upper": [[1, 1], [0, 1]],
        "twins": [[1, 2], [1, 2]],
        "rect": [[1, 0, 0], [0, 1, 1]],
    }.items():
        paths[name] = tmp_path / f"{name}.json"
        write_matrix(paths[name], A)
    paths["bad"] = tmp_path / "bad.json"
    paths["bad"].write_text('{"rows": 2, "cols": 2, "entries": [[1, 0]]}')
    return paths


def run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def validate(env):
    jsonschema.validate(env, load_schema("envelope"))
    if env["status"] != "error":
        jsonschema.validate(env["payload"], load_schema(env["subcommand"]))


def test_ineq_hand_example(capsys, files):
    code, env, _ = run_json(capsys, "ineq", files["upper"])
    assert code == 0 and env["status"] == "ok"
    assert env["payload"]["product"] == pytest.approx(math.sqrt(10), rel=1e-11)
    validate(env)


def test_dual_linear_dependence_exit_2(capsys, files):
    code, env, err = run_json(capsys, "dual", files["twins"])
    assert code == 2
    assert "linearly dependent" in err
    assert env["status"] == "error"
    validate(env)


def test_malformed_file_names_file_and_field(capsys, files):
    code, _, err = run(capsys, "matrix", files["bad"])
    assert code == 2
    assert "bad.json" in err and "'entries'" in err


def test_unknown_flag_exit_2(capsys, files):
    code, out, err = run(capsys, "dual", files["upper"], "--bogus")
    assert code == 2 and out == ""
    assert "unrecognized arguments" in err


def test_missing_subcommand_exit_2(capsys):
    assert run(capsys)[0] == 2


def test_dual_writes_partner(capsys, files):
    code, env, _ = run_json(capsys, "dual", files["rect"])
    assert code == 0 and env["payload"]["certified"] is True
    assert env["payload"]["dual"]["rows"] == 2
    validate(env)


def test_matrix_and_ineq_agree_on_dual(capsys, files, tmp_path):
    _, env, _ = run_json(capsys, "matrix", files["upper"])
    assert env["payload"]["product"] == pytest.approx(math.sqrt(10), rel=1e-11)
    assert env["payload"]["swapped"]["product"] == pytest.approx(2.0, rel=1e-11)
    validate(env)
    wrong = tmp_path / "w.json"
    write_matrix(wrong, [[2, 0], [0, 2]])
    code, env, err = run_json(capsys, "ineq", files["upper"], "--dual", wrong)
    assert code == 1 and env["status"] == "violation"
    assert "residual" in err


def test_proofchain_deterministic(capsys):
    _, a, _ = run_json(capsys, "proofchain", "--n", 16, "--grid", 2048, "--seed", 7)
    _, b, _ = run_json(capsys, "proofchain", "--n", 16, "--grid", 2048, "--seed", 7)
    a.pop("timestamp"), b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["payload"]["ok"] is True
    validate(dict(a, timestamp="x"))


def test_lebesgue_plot_and_audit(capsys, tmp_path):
    svg = tmp_path / "l.svg"
    code, env, _ = run_json(capsys, "lebesgue", "--m", 16, 32, 64, "--audit", "--richardson", "--plot", svg)
    assert code == 0
    assert ">lebesgue</text>" in svg.read_text()
    assert all(r["kappa"] <= math.pi * (1 + 1e-12) for r in env["payload"]["rows"])
    validate(env)


def test_csv_and_json_share_names(capsys):
    _, env, _ = run_json(capsys, "lebesgue", "--m", 16, 32)
    code, out, _ = run(capsys, "lebesgue", "--m", 16, 32, "--format", "csv")
    header = out.splitlines()[0].split(",")
    assert sorted(header) == sorted(env["payload"]["rows"][0])


@pytest.mark.parametrize(
    "argv",
    [
        ["maximal", "--n", 6],
        ["salem", "--n", 8],
        ["salem", "--freqs", "[1, 3, 7]", "--coeffs", "[1, [0, 1], 0.5]", "--grid", 64],
        ["corollary", "--kind", "maxmaxmax", "--n", 6],
        ["corollary", "--kind", "decreasing", "--coeffs", "[3, 2, 1]"],
        ["corollary", "--kind", "littlewood", "--n", 6],
        ["corollary", "--kind", "maximal-lemma", "--n", 16],
        ["menshov", "--n", 8, "--grid", 512],
        ["menshov", "--n", 8, "--grid", 512, "--mix-seed", 3],
        ["search", "--n", 2, "--restarts", 2, "--budget", 300],
        ["search", "--n", 2, "--restarts", 2, "--budget", 300, "--field", "complex", "--audit"],
        ["constants", "--ns", 2, 3, "--restarts", 1, "--budget", 200],
    ],
)
def test_payloads_match_schema(capsys, argv):
    code, env, _ = run_json(capsys, *argv)
    assert code == 0, env
    assert env["status"] == "ok"
    assert env["parameters"]["subcommand"] == argv[0]
    validate(env)


def test_search_out_file(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, stdout, _ = run(capsys, "search", "--n", 2, "--restarts", 1, "--budget", 200, "--out", out)
    assert code == 0 and stdout == ""
    env = json.loads(out.read_text())
    assert env["payload"]["f_best"] >= 2 / math.sqrt(3) * (1 - 1e-9)


def test_constants_empty_table_csv(capsys):
    with pytest.warns(UserWarning):
        code, out, _ = run(capsys, "constants", "--ns", 1, "--format", "csv")
    assert code == 0
    assert out == "n,f_best,ln_n,c_empirical\n"


def test_precondition_errors_exit_2(capsys):
    assert run(capsys, "salem", "--n", 4, "--grid", 4)[0] == 2
    assert run(capsys, "maximal", "--freqs", "[1, 1]")[0] == 2
    assert run(capsys, "maximal")[0] == 2
    assert run(capsys, "corollary", "--kind", "decreasing", "--coeffs", "[1, 2]")[0] == 2
    assert run(capsys, "search", "--n", 0)[0] == 2
    assert run(capsys, "search", "--n", 2, "--field", "octonion")[0] == 2


def test_console_script_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "biorth", "ineq", str(files["upper"]), "--format", "csv"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0].startswith("c_empirical,")
