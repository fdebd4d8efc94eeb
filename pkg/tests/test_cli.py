import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from channel_lab.cli import (
    EXIT_CODE_CONDITION,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_VALIDATION,
    SpecParseError,
    comparable,
    dumps_report,
    load_spec,
    parse_matrix,
    run,
)

FIX = Path(__file__).parent / "fixtures"


def results(argv):
    code, report = run(argv)
    assert code == EXIT_OK
    # check what a consumer of the JSON report sees
    return json.loads(dumps_report(report))["results"][argv[0]]


def spec(name):
    return str(FIX / name)


# analyze


def test_analyze_pauli_example():
    r = results(["analyze", "--spec", spec("pauli_example.yaml")])
    np.testing.assert_allclose(r["symmetric_spectrum"], [0.68, 0.68, 0.68], atol=1e-12)
    np.testing.assert_allclose(sorted(r["omega_spectrum"]), [0.04, 0.68, 0.68, 0.68], atol=1e-12)
    assert r["average_purity"] == pytest.approx(0.68, abs=1e-12)
    assert r["omega0_plus"] == pytest.approx(0.68, abs=1e-12)


def test_analyze_replacement():
    r = results(["analyze", "--spec", spec("replacement.yaml")])
    assert r["average_purity"] == pytest.approx(0.79, abs=1e-12)
    assert r["average_fidelity"] == pytest.approx(0.85, abs=1e-12)
    assert r["channel"]["unital"] is False


def test_analyze_projective_d4():
    r = results(["analyze", "--spec", spec("projective_d4.yaml")])
    assert r["average_purity"] == pytest.approx(0.6, abs=1e-12)


def test_analyze_bounds_order():
    r = results(["analyze", "--spec", spec("replacement_excited.yaml")])
    b = r["bounds"]
    assert b["lower_global"] <= b["lower_subspace"] + 1e-12 <= b["upper"] + 2e-12
    assert r["subspace_dim"] == 1


def test_analyze_invariant_subspace():
    r = results(["analyze", "--spec", spec("pauli_half.yaml")])
    assert r["invariant_subspace"]["dim"] == 2


# optimize


def test_optimize_correlated_uniform():
    r = results(["optimize", "--spec", spec("correlated_uniform.yaml")])
    assert r["value"] == pytest.approx(0.25, abs=1e-6)
    assert r["oracle"]["run"] is False


def test_optimize_pauli_max():
    r = results(["optimize", "--spec", spec("pauli_half.yaml"), "--direction", "max", "--restarts", "8"])
    assert r["value"] == pytest.approx(1, abs=1e-9)
    state = np.array([complex(*z) for z in r["state"]])
    overlap = max(abs(np.vdot([1, 1], state)), abs(np.vdot([1, -1], state))) ** 2 / 2
    assert overlap == pytest.approx(1, abs=1e-6)
    assert r["oracle"]["run"] and r["oracle"]["agrees"]
    assert r["dfs_candidate"]


def test_optimize_identity():
    r = results(["optimize", "--spec", spec("identity_raw.yaml"), "--restarts", "4"])
    assert r["value"] == pytest.approx(1, abs=1e-12)
    assert r["converged"]


def test_optimize_fidelity():
    r = results(["optimize", "--spec", spec("replacement.yaml"), "--quantity", "fidelity", "--restarts", "8"])
    assert r["value"] == pytest.approx(0.7, abs=1e-9)
    assert r["oracle"]["agrees"]


# dfs


def test_dfs_bell_pass():
    r = results(["dfs", "--spec", spec("correlated_bell.yaml")])
    assert r["is_dfs"] and r["criterion"] == "eigenvalue-one"


def test_dfs_excited_fails():
    r = results(["dfs", "--spec", spec("replacement_excited.yaml")])
    assert not r["is_dfs"]
    assert r["sampled_min_purity"] == pytest.approx(0.5, abs=1e-12)


def test_dfs_dephasing_pass():
    assert results(["dfs", "--spec", spec("dephasing.yaml")])["is_dfs"]


def test_dfs_discovery():
    r = results(["dfs", "--spec", spec("pauli_half.yaml"), "--restarts", "8"])
    assert r["mode"] == "discovery"
    assert r["dfs_candidate"] and r["invariant_subspace"]["dim"] == 2


# qecc


def test_qecc_bitflip():
    r = results(["qecc", "--spec", spec("bitflip_code.yaml")])
    assert r["condition_holds"]
    assert r["trace_c_squared"] == pytest.approx(0.49 + 0.09 / 3, abs=1e-12)
    c = np.array([[complex(*z) for z in row] for row in r["c"]])
    assert np.max(np.abs(c - np.diag([0.7, 0.1, 0.1, 0.1]))) <= 1e-12


def test_qecc_violation_exit_code():
    code, report = run(["qecc", "--spec", spec("bitflip_badcode.yaml")])
    assert code == EXIT_CODE_CONDITION
    assert not report["results"]["qecc"]["condition_holds"]


def test_qecc_without_code_is_parse_error():
    assert run(["qecc", "--spec", spec("pauli_half.yaml")])[0] == EXIT_PARSE


# montecarlo


def test_montecarlo_depolarizing():
    r = results(["montecarlo", "--spec", spec("depolarizing.yaml"), "--samples", "2000"])
    assert r["estimate"] == pytest.approx(0.5, abs=1e-12)
    assert r["stderr"] <= 1e-12 and r["zscore"] == 0


def test_montecarlo_replacement_fidelity():
    r = results(["montecarlo", "--spec", spec("replacement.yaml"), "--quantity", "fidelity"])
    assert r["samples"] == 10_000
    assert r["analytic"] == pytest.approx(0.85, abs=1e-12)
    assert r["zscore"] <= 3


def test_montecarlo_identity_fidelity():
    r = results(["montecarlo", "--spec", spec("identity_raw.yaml"), "--quantity", "fidelity", "--samples", "500"])
    assert r["estimate"] == pytest.approx(1, abs=1e-12) and r["stderr"] <= 1e-12


@pytest.mark.parametrize("name", ["pauli_example.yaml", "replacement.yaml", "projective_d4.yaml"])
def test_analyze_numbers_match_montecarlo(name):
    a = results(["analyze", "--spec", spec(name)])
    for q in ("purity", "fidelity"):
        m = results(["montecarlo", "--spec", spec(name), "--quantity", q, "--samples", "10000"])
        assert m["analytic"] == pytest.approx(a[f"average_{q}"], abs=1e-15)
        assert m["zscore"] <= 3


# determinism and serialization


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--spec", spec("pauli_example.yaml")],
        ["optimize", "--spec", spec("correlated_uniform.yaml"), "--restarts", "6"],
        ["montecarlo", "--spec", spec("replacement.yaml"), "--samples", "3000"],
        ["dfs", "--spec", spec("replacement_excited.yaml")],
    ],
)
def test_reports_byte_identical(tmp_path, argv):
    texts = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        assert run(argv + ["--out", str(out)])[0] == EXIT_OK
        texts.append(out.read_text())
    strip = lambda s: "\n".join(l for l in s.splitlines() if '"generated_at"' not in l)
    assert strip(texts[0]) == strip(texts[1])
    assert comparable(texts[0]) == comparable(texts[1])


def test_seed_changes_montecarlo(tmp_path):
    a = results(["montecarlo", "--spec", spec("replacement.yaml"), "--samples", "500", "--seed", "1"])
    b = results(["montecarlo", "--spec", spec("replacement.yaml"), "--samples", "500", "--seed", "2"])
    assert a["estimate"] != b["estimate"]


def test_round_trip_bit_exact(tmp_path):
    _, report = run(["analyze", "--spec", spec("replacement.yaml")])
    text = dumps_report(report)
    again = dumps_report(json.loads(text))
    assert text == again
    value = report["results"]["analyze"]["average_purity"]
    assert json.loads(text)["results"]["analyze"]["average_purity"] == value


def test_report_metadata():
    _, report = run(["analyze", "--spec", spec("pauli_example.yaml")])
    assert report["seed"] == 7 and report["version"]
    assert report["input"]["named"]["family"] == "pauli"
    assert "generated_at" in report


# exit codes


@pytest.mark.parametrize(
    "argv,code",
    [
        (["analyze", "--spec", spec("pauli_example.yaml")], EXIT_OK),
        (["analyze", "--spec", spec("malformed.yaml")], EXIT_PARSE),
        (["analyze", "--spec", spec("not_trace_preserving.yaml")], EXIT_VALIDATION),
        (["analyze", "--spec", spec("numerical_huge.yaml"), "--tol", "1e12"], EXIT_NUMERICAL),
    ],
)
def test_exit_code_matrix(argv, code):
    assert run(argv)[0] == code


def test_parse_error_reports_location(capsys):
    run(["analyze", "--spec", spec("malformed.yaml")])
    assert "line" in capsys.readouterr().err


def test_validation_reports_deviation(capsys):
    run(["analyze", "--spec", spec("not_trace_preserving.yaml")])
    assert "1.900e-01" in capsys.readouterr().err


def test_missing_file_is_parse_error(tmp_path):
    assert run(["analyze", "--spec", str(tmp_path / "nope.yaml")])[0] == EXIT_PARSE


def test_dimension_mismatch_subspace(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("named: {family: pauli, params: {p: [1, 0, 0, 0]}}\nsubspace: [[1, 0, 0]]\n")
    assert run(["analyze", "--spec", str(p)])[0] == EXIT_VALIDATION


def test_both_named_and_raw(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("named: {family: pauli, params: {p: [1, 0, 0, 0]}}\nraw: {dim: 1, kraus: [[[1]]]}\n")
    with pytest.raises(SpecParseError):
        load_spec(p)


def test_parse_matrix_complex_pairs():
    m = parse_matrix([[[0, 1], 2], [3.5, [1e-3, -2]]], "m")
    np.testing.assert_array_equal(m, [[1j, 2], [3.5, 1e-3 - 2j]])


def test_parse_matrix_rejects_ragged():
    with pytest.raises(SpecParseError):
        parse_matrix([[1, 0], [0]], "m")


def test_console_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "channel_lab.cli", "analyze", "--spec", spec("pauli_half.yaml"), "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "average_purity" in proc.stdout
    assert json.loads(out.read_text())["command"] == "analyze"
