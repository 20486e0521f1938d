"""The command-line interface: JSON documents, schemas, exit codes."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from slevir.cli import main

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def _schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def _valid(doc, name):
    jsonschema.validate(doc, _schema(name))


@pytest.mark.parametrize("name", sorted(p.name.split(".")[0] for p in SCHEMAS.glob("*.schema.json")))
def test_schemas_are_valid_documents(name):
    jsonschema.Draft202012Validator.check_schema(_schema(name))


def test_check_commutators(capsys):
    code, doc, _ = _run(capsys, "check-commutators", "--elements", "2", "--range", "2", "--f-degree", "3")
    assert code == 0 and doc["pass"]
    _valid(doc, "check")


def test_build_module_kappa_rho(capsys):
    code, doc, _ = _run(capsys, "build-module", "--variant", "kappa-rho", "--rho", "kappa-6", "--levels", "4")
    assert code == 0
    _valid(doc, "module")
    assert doc["graded_dimensions"] == [1, 0, 1, 1, 2]


def test_find_singular_at_eight_thirds(capsys):
    code, doc, _ = _run(capsys, "find-singular", "--variant", "kappa-rho", "--rho", "kappa-6", "--level", "2", "--kappa", "8/3")
    assert code == 0
    _valid(doc, "singular")
    (sv,) = doc["singular_vectors"]
    assert sv["words"] == [[-2], [-1, -1]]
    assert sv["coefficients"] == ["1", "0"]
    assert sv["ratio"]["text"] == "(5/8)*(y-x)^(2)"


def test_verify_state(capsys):
    code, doc, _ = _run(capsys, "verify-state", "--variant", "kappa-rho", "--rho", "kappa-6", "--lmax", "2", "--degree", "4")
    assert code == 0 and doc["pass"]
    _valid(doc, "state")


def test_screening_check(capsys):
    code, doc, _ = _run(capsys, "screening-check", "--n", "3", "--l", "1")
    assert code == 0 and len(doc["results"]) == 3
    _valid(doc, "check")
    code, doc, _ = _run(capsys, "screening-check", "--charges", "1/2", "kappa/7")
    assert code == 0 and doc["results"][0]["zero"]


def test_ff_integrate_and_csv(capsys, tmp_path):
    csv = tmp_path / "row.csv"
    code, doc, _ = _run(capsys, "ff-integrate", "--points", "0,1.5", "--kappa", "6.5", "--pairs", "1-2", "--csv", str(csv))
    assert code == 0
    _valid(doc, "ff")
    assert doc["Z"] == pytest.approx(doc["beta_closed_form"], rel=1e-12)
    assert csv.read_text().splitlines()[0].startswith("config,walk")


def test_ff_integrate_failing_tolerance_exits_one(capsys):
    code, doc, err = _run(capsys, "ff-integrate", "--points", "0,1,2.5", "--kappa", "6.5", "--walk", "0,1,0,1", "--tolerance", "1e-300")
    assert code == 1 and not doc["pass"]
    report = json.loads(err.strip().splitlines()[-1])
    _valid(report, "failure")
    assert report["invariant"] == "null-field"


def test_configs(capsys):
    code, doc, _ = _run(capsys, "configs", "--n", "4", "--l", "2")
    assert code == 0
    _valid(doc, "configs")
    assert sorted(c["walk"] for c in doc["configs"]) == [[0, 1, 0, 1, 0], [0, 1, 2, 1, 0]]


def test_simulate_and_path_records(capsys, tmp_path):
    paths = tmp_path / "p.jsonl"
    argv = ["simulate", "--kappa", "2", "--paths", "20", "--records", "4", "--horizon", "0.2", "--paths-out", str(paths)]
    code, doc, _ = _run(capsys, *argv)
    assert code == 0
    _valid(doc, "sim")
    lines = paths.read_text().splitlines()
    assert len(lines) == 20
    for line in lines:
        _valid(json.loads(line), "path")
    code, again, _ = _run(capsys, *argv)
    assert again == doc


def test_simulate_capacity(capsys):
    code, doc, _ = _run(capsys, "simulate", "--kappa", "2", "--paths", "200", "--dt", "1", "--eta", "0.005", "--horizon", "1e5", "--capacity", "0.2,0.1")
    assert code == 0
    _valid(doc, "sim")
    assert doc["capacity"]["predicted"] == pytest.approx(1.0)


def test_drift_test_with_controls(capsys):
    base = ["drift-test", "--kappa", "2", "--paths", "1500", "--slices", "5", "--seed", "4"]
    code, doc, _ = _run(capsys, *base, "--module-level", "2")
    assert code == 0 and doc["pass"]
    _valid(doc, "drift")
    code, doc, _ = _run(capsys, *base, "--observable", "x", "--expect-fail")
    assert code == 0 and doc["expect_fail"]


def test_paper_suite_subset(capsys):
    code, doc, err = _run(capsys, "paper-suite", "--quick", "--only", "1,3")
    assert code == 0
    _valid(doc, "suite")
    assert [c["id"] for c in doc["checks"]] == [1, 3]
    assert err.count("[PASS]") == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["build-module", "--bogus"],
        ["build-module", "--lev", "3"],
        ["find-singular", "--level", "2", "--kappa", "-1"],
        ["configs", "--n", "3", "--l", "2"],
        ["ff-integrate", "--points", "0,1", "--kappa", "3", "--pairs", "1-2"],
        ["ff-integrate", "--points", "1,0", "--kappa", "6", "--pairs", "1-2"],
        ["nonsense"],
    ],
)
def test_errors_exit_two_with_failure_report(capsys, argv):
    code, doc, err = _run(capsys, *argv)
    assert code == 2 and doc is None
    report = json.loads(err.strip().splitlines()[-1])
    _valid(report, "failure")


def test_output_file(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, doc, _ = _run(capsys, "configs", "--n", "3", "--l", "1", "-o", str(out))
    assert code == 0 and doc is None
    assert json.loads(out.read_text())["count"] == 2


def test_installed_entry_point():
    r = subprocess.run([sys.executable, "-m", "slevir.cli", "configs", "--n", "2", "--l", "1"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["count"] == 1
