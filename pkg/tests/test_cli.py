import csv
import io
import json

import pytest

from schattenlab import cli

ATOMS = {"schema": 1, "atoms": [{"label": "a", "mass": 1}, {"label": "b", "mass": 2}], "diffuse": []}
MIXED = {"atoms": [{"label": "a", "mass": 1}], "diffuse": [{"interval": [0, 1], "density": [{"sub": [0, 1], "value": 1}]}]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return {
        "atoms": write("atoms.json", ATOMS),
        "f_atoms": write("f_atoms.json", {"atoms": {"a": 3, "b": [0, 4]}}),
        "mixed": write("mixed.json", MIXED),
        "f_mixed": write("f_mixed.json", {"atoms": {"a": 1}, "diffuse": [[{"sub": [0, 1], "value": 2}]]}),
        "group": write("group.json", {"builtin": "S3", "representation": "sign", "function": [1, 0, 0, 0, 0, 0]}),
        "tmp": tmp_path,
    }


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_classify_member(capsys, files):
    code, out = run(capsys, "classify", "--space", files["atoms"], "--function", files["f_atoms"], "--p", "2")
    rep = json.loads(out)
    assert code == 0 and rep["agree"] is True
    assert rep["exact"]["verdict"] == "Member" and rep["exact"]["norm"] == pytest.approx(5.0)


def test_classify_not_member(capsys, files):
    code, out = run(capsys, "classify", "--space", files["mixed"], "--function", files["f_mixed"], "--p", "1.5")
    rep = json.loads(out)
    assert code == 0
    assert rep["exact"]["verdict"] == rep["numeric"]["verdict"] == "NotMember"


def test_norm_reports_singular_values(capsys, files):
    code, out = run(capsys, "norm", "--space", files["atoms"], "--function", files["f_atoms"], "--p", "inf")
    rep = json.loads(out)
    assert code == 0 and rep["dimension"] == 2
    assert rep["report"]["norm"] == pytest.approx(4.0) and rep["report"]["p"] == "inf"


def test_sweep_csv(capsys, files):
    code, out = run(capsys, "sweep", "--space", files["atoms"], "--function", files["f_atoms"], "--p-grid", "1,2,inf", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["p"] for r in rows] == ["1.0", "2.0", "inf"]
    assert [float(r["norm"]) for r in rows] == pytest.approx([7.0, 5.0, 4.0])
    assert {r["verdict"] for r in rows} == {"Member"}


def test_diverge_linear_rate(capsys, files):
    code, out = run(capsys, "diverge", "--space", files["mixed"], "--function", files["f_mixed"], "--p", "1.5")
    rep = json.loads(out)
    assert code == 0 and rep["diagnosis"]["result"] == "Diverges"
    assert rep["diagnosis"]["linear_rate"] == pytest.approx(2 * 2**1.5, rel=1e-12)


def test_diverge_with_override_records_it(capsys, files):
    code, out = run(capsys, "diverge", "--space", files["mixed"], "--function", files["f_mixed"], "--slope-tol", "100", "--modes", "1,2,3,4")
    rep = json.loads(out)
    assert code == 0 and rep["diagnosis"]["result"] == "Converged"
    assert rep["overrides"] == {"slope_tol": 100.0}
    assert [m for m, _ in rep["partials"]] == [1, 2, 3, 4]


def test_diverge_inconclusive_exit_code(capsys, files, monkeypatch):
    # partial sums whose increments shrink by 0.8: neither verdict is safe
    values = {m: sum(0.8**k for k in range(i + 1)) for i, m in enumerate(cli.DEFAULT_MODES)}
    monkeypatch.setattr(cli, "trace_power_partial", lambda space, f, p, sched: values[sched.m_max])
    code, out = run(capsys, "diverge", "--space", files["mixed"], "--function", files["f_mixed"])
    assert code == 2 and json.loads(out)["diagnosis"]["result"] == "Inconclusive"


def test_group_command(capsys, files):
    code, out = run(capsys, "group", "--group", files["group"], "--p", "2")
    rep = json.loads(out)
    assert code == 0
    assert (rep["order"], rep["rep_dim"], rep["kernel_dim"], rep["quotient_dim"]) == (6, 1, 5, 1)
    assert rep["schatten"]["norm"] == pytest.approx(1.0)


def test_group_from_cayley_table(capsys, tmp_path):
    path = tmp_path / "z2.json"
    path.write_text(json.dumps({"cayley": [[0, 1], [1, 0]], "representation": "trivial"}))
    code, out = run(capsys, "group", "--group", str(path))
    assert code == 0 and json.loads(out)["kernel_dim"] == 1


def test_sequence_command_to_file(capsys, files):
    out_path = files["tmp"] / "seq.json"
    code, out = run(capsys, "fig2", "--space", files["atoms"], "--p-grid", "1,2,inf", "--out", str(out_path))
    assert code == 0 and out == ""
    rep = json.loads(out_path.read_text())
    assert rep["passed"] and rep["columns"] == ["E_1", "E_2", "E_0", "E_inf"]


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--space", "/nonexistent.json", "--function", "/nonexistent.json"],
        ["norm"],
        ["diverge", "--space", "SPACE", "--function", "FUNC", "--modes", "3,2,5,6"],
        ["group", "--group", "BAD"],
    ],
)
def test_errors_exit_one_with_json(capsys, files, argv, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    argv = [{"SPACE": files["mixed"], "FUNC": files["f_mixed"], "BAD": str(bad)}.get(a, a) for a in argv]
    code, out = run(capsys, *argv)
    rep = json.loads(out)
    assert code == 1 and set(rep) == {"error", "message"}


def test_schema_error_message_carries_path(capsys, tmp_path):
    space = tmp_path / "s.json"
    space.write_text(json.dumps({"atoms": [{"label": "a", "mass": -1}]}))
    code, out = run(capsys, "norm", "--space", str(space), "--function", str(space))
    assert code == 1 and json.loads(out)["message"].startswith("$.atoms[0].mass")


@pytest.mark.parametrize("argv", [["norm", "--p", "0.5"], ["frobnicate"], ["diverge", "--modes", "a,b"]])
def test_usage_errors_exit_one(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 1 and json.loads(out)["error"] == "CliError"
