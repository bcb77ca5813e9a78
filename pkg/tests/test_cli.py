"""End-to-end checks of the command line front end.

Everything goes through ``main(argv)`` so the exit-code contract is
exercised the same way a shell would see it.
"""

import json

import numpy as np
import pytest

from manifold_descent.cli import _fmt, _json_float, main


def _write_matrix(path, dim, rows):
    path.write_text(json.dumps({"dim": dim, "rows": rows}))
    return str(path)


def test_fmt_non_finite_spellings():
    assert _fmt(float("nan"), "%.8g") == "nan"
    assert _fmt(float("inf"), "%.8g") == "inf"
    assert _fmt(float("-inf"), "%.8g") == "-inf"
    assert _fmt(0.5, "%.8g") == "0.5"


def test_json_float_null_for_non_finite():
    assert _json_float(float("nan")) == "null"
    assert _json_float(float("inf")) == "null"
    assert _json_float(1.0) == "1"


def test_run_scenario_table(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "5"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].split()[:2] == ["scenario", "method"]
    assert "example7" in lines[1] and "r_backtracking" in lines[1]


def test_run_scenario_json_key_order(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "5", "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 0
    payload = json.loads(out)
    assert isinstance(payload, list) and len(payload) == 1
    rec = json.loads(
        out.strip()[1:-1].strip().rstrip(","),
        object_pairs_hook=lambda pairs: [k for k, _ in pairs],
    )
    assert rec == ["scenario_id", "method", "final_point", "final_value",
                   "steps", "termination", "flags"]


def test_run_scenario_csv(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "5", "--format", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "scenario_id,method,steps,termination,flags,final_value,final_point"
    fields = lines[1].split(",")
    assert fields[0] == "example7"
    assert len(fields[6].split()) == 2


def test_run_missing_method(capsys):
    rc = main(["run", "--scenario", "example7"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "--method" in err


def test_run_scenario_and_matrix_conflict(tmp_path, capsys):
    path = _write_matrix(tmp_path / "a.json", 2, [[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(SystemExit) as exc:
        main(["run", "--scenario", "example7", "--matrix", path])
    capsys.readouterr()
    assert exc.value.code == 2


def test_run_unknown_scenario(capsys):
    rc = main(["run", "--scenario", "example99", "--method", "r_backtracking"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "example99" in err


def test_run_unknown_method(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "sgd"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "sgd" in err


def test_run_matrix_identity_table(tmp_path, capsys):
    path = _write_matrix(tmp_path / "eye.json", 2, [[1.0, 0.0], [0.0, 1.0]])
    rc = main(["run", "--matrix", path, "--method", "r_backtracking"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lambda1 = 1"
    assert lines[1].startswith("vector  = (")


def test_run_matrix_json_and_csv(tmp_path, capsys):
    path = _write_matrix(tmp_path / "d.json", 2, [[4.0, 0.0], [0.0, -1.0]])
    rc = main(["run", "--matrix", path, "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 0
    payload = json.loads(out)
    assert abs(payload["lambda1"] - (-1.0)) < 1e-6
    vec = np.asarray(payload["vector"])
    assert abs(np.linalg.norm(vec) - 1.0) < 1e-8

    rc = main(["run", "--matrix", path, "--format", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "lambda1,x0,x1"
    assert abs(float(lines[1].split(",")[0]) - (-1.0)) < 1e-6


def test_run_matrix_asymmetric(tmp_path, capsys):
    path = _write_matrix(tmp_path / "bad.json", 2, [[1.0, 2.0], [0.0, 1.0]])
    rc = main(["run", "--matrix", path])
    err = capsys.readouterr().err
    assert rc == 2
    assert "configuration error" in err


def test_run_matrix_non_finite_entries(tmp_path, capsys):
    path = _write_matrix(tmp_path / "inf.json", 2,
                         [[1.0, float("inf")], [float("inf"), 1.0]])
    rc = main(["run", "--matrix", path])
    err = capsys.readouterr().err
    assert rc == 3
    assert "numerical failure" in err


def test_run_matrix_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    rc = main(["run", "--matrix", str(path)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "configuration error" in err


def test_run_matrix_wrong_shape(tmp_path, capsys):
    path = _write_matrix(tmp_path / "shape.json", 3, [[1.0, 0.0], [0.0, 1.0]])
    rc = main(["run", "--matrix", path])
    err = capsys.readouterr().err
    assert rc == 2
    assert "does not match" in err


def test_run_matrix_not_a_dict(tmp_path, capsys):
    path = tmp_path / "list.json"
    path.write_text("[[1, 0], [0, 1]]")
    rc = main(["run", "--matrix", str(path)])
    assert rc == 2
    capsys.readouterr()


def test_run_bad_deltas_string(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_new_q_newton",
               "--deltas", "0,abc"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "configuration error" in err


def test_run_duplicate_deltas_rejected(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_new_q_newton",
               "--deltas", "1,1"])
    assert rc == 2
    capsys.readouterr()


def test_run_random_deltas_smoke(capsys):
    rc = main(["run", "--scenario", "example7", "--method", "r_new_q_newton",
               "--random-deltas", "--seed", "3", "--iters", "30"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "example7" in out


def test_corpus_json_deterministic(capsys):
    rc = main(["corpus", "--format", "json"])
    first = capsys.readouterr().out
    assert rc == 0
    rc = main(["corpus", "--format", "json"])
    second = capsys.readouterr().out
    assert rc == 0
    assert first == second
    payload = json.loads(first)
    assert len(payload) == 108


def test_corpus_csv_row_count(capsys):
    rc = main(["corpus", "--format", "csv"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 109
    assert lines[0].startswith("scenario_id,method,")


def test_trace_header_matches_dimension(capsys):
    rc = main(["trace", "--scenario", "example1", "--method", "r_newton",
               "--iters", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "iter,f,grad_norm,step_size,x0"

    rc = main(["trace", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.strip().splitlines()[0] == "iter,f,grad_norm,step_size,x0,x1"


def test_trace_zero_iters_one_row(capsys):
    rc = main(["trace", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "0"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    assert lines[1].split(",")[0] == "0"


def test_trace_kink_problem_newton_reaches_tiny_iterate(capsys):
    rc = main(["trace", "--scenario", "example1", "--method", "r_newton",
               "--iters", "38"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.strip().splitlines()
    assert len(lines) == 40
    assert abs(float(lines[-1].split(",")[4])) <= 1e-10


def test_trace_backtracking_values_monotone(capsys):
    rc = main(["trace", "--scenario", "example7", "--method", "r_backtracking",
               "--iters", "20"])
    out = capsys.readouterr().out
    assert rc == 0
    values = [float(line.split(",")[1]) for line in out.strip().splitlines()[1:]]
    assert len(values) >= 2
    assert all(b <= a for a, b in zip(values, values[1:]))
