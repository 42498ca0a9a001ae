import csv
import io
import json

import pytest

from jetcircle.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_runtime(text):
    data = json.loads(text)
    data.pop("runtime_ms", None)
    return data


def test_count_both_routes(capsys):
    code, out, _ = run(capsys, "count", "--n", "1", "--m", "0", "--method", "both")
    data = json.loads(out)
    assert code == EXIT_PASS and data["match"] and data["value"] == 1
    assert data["results"]["characters"]["value"] == data["results"]["direct"]["value"]


def test_count_with_explicit_form(capsys):
    code, out, _ = run(capsys, "count", "--form", "diag:1,1,1", "--e", "1", "--m", "0")
    assert code == EXIT_PASS and json.loads(out)["value"] == 145


@pytest.mark.parametrize(
    "argv",
    [
        ("count", "--field", "4", "--n", "1"),
        ("count", "--form", "11=1", "--n", "1"),
        ("count", "--n", "2", "--form", "diag:1"),
        ("verify", "nosuch"),
        ("count", "--n", "1", "--output", "xml"),
        ("verify", "recursion", "--n", "1", "--m", "0"),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err


def test_budget_exit(capsys):
    code, out, err = run(capsys, "count", "--n", "2", "--m", "1", "--e", "2", "--budget", "1000")
    assert code == EXIT_BUDGET and "budget" in err and not out


def test_failing_check_exits_one(capsys):
    # at m = 1 the jet counts for the diagonal cubic drift by more than the spread limit
    code, out, _ = run(capsys, "jets", "--n", "2", "--ms", "1")
    data = json.loads(out)
    assert code == EXIT_FAIL and data["pass"] is False


def test_output_is_deterministic(capsys):
    argv = ("verify", "weyl", "--n", "2", "--samples", "5", "--seed", "7")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert strip_runtime(first) == strip_runtime(second)
    assert first.splitlines()[0] == "{"


def test_seed_selects_the_sample_stream():
    from jetcircle.seeding import suite_rng

    a = suite_rng(1, "weyl").integers(0, 5, size=20)
    assert (a == suite_rng(1, "weyl").integers(0, 5, size=20)).all()
    assert (a != suite_rng(2, "weyl").integers(0, 5, size=20)).any()
    assert (a != suite_rng(1, "shrink").integers(0, 5, size=20)).any()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"field": "7", "n": 1, "e": 0, "m": 1, "method": "both"}))
    code, out, _ = run(capsys, "count", "--config", str(cfg))
    data = json.loads(out)
    assert code == EXIT_PASS and data["params"]["field"] == "7" and data["match"]
    # flags on the command line win over the file
    code, out, _ = run(capsys, "count", "--config", str(cfg), "--m", "0")
    assert json.loads(out)["params"]["m"] == 0


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"fields": 5}))
    code, _, err = run(capsys, "count", "--config", str(cfg))
    assert code == EXIT_USAGE and "fields" in err


def test_budget_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("JETCIRCLE_BUDGET", "100")
    code, _, _ = run(capsys, "count", "--n", "2", "--m", "1")
    assert code == EXIT_BUDGET


def test_csv_output(capsys):
    code, out, _ = run(capsys, "arcs", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_PASS
    assert [r["J"] for r in rows] == ["0", "1", "2"]
    assert [r["class_count"] for r in rows] == ["1", "25", "625"]


def test_pretty_output(capsys):
    code, out, _ = run(capsys, "exponent", "--n", "33", "--m-max", "1", "--output", "pretty")
    assert code == EXIT_PASS and "-1/4" in out


def test_exponent_spot_value(capsys):
    code, out, _ = run(capsys, "exponent", "--n", "33", "--m-max", "1")
    rows = json.loads(out)["rows"]
    assert code == EXIT_PASS and rows[1]["E"] == "-1/4"


def test_arcs_layers(capsys):
    code, out, _ = run(capsys, "arcs", "--n", "1", "--m", "1", "--layers")
    data = json.loads(out)
    assert code == EXIT_PASS
    assert data["pass"]


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "box-sum", "--m", "0", "--N", "1"),
        ("verify", "ball-integral", "--m", "1", "--N", "1"),
        ("verify", "arcs"),
        ("verify", "diagonal", "--n", "2", "--m", "1"),
        ("verify", "recursion", "--n", "1", "--m", "1"),
        ("verify", "projective", "--n", "2", "--e", "0"),
        ("verify", "minor", "--n", "1", "--m", "0"),
        ("verify", "shrink", "--n", "1", "--samples", "2", "--ab-max", "2"),
    ],
)
def test_verify_suites_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_PASS and json.loads(out)["pass"]


def test_jets_m_list_alias(capsys):
    code, out, _ = run(capsys, "jets", "--n", "2", "--m", "0", "--fields", "5,7")
    data = json.loads(out)
    assert code == EXIT_PASS and data["pass"]
