import json

import pytest

from ranking_forge.cli import run_cli
from ranking_forge.gains import REFERENCE_TABLE_K3, PriceTable


def test_solve_lp_small(capsys):
    assert run_cli(["solve-lp", "--k", "3"]) == 0
    out = capsys.readouterr().out
    assert "alpha=0.50347" in out


def test_solve_lp_export_still_solves(tmp_path, capsys):
    path = tmp_path / "k2.mps"
    assert run_cli(["solve-lp", "--k", "2", "--export", str(path)]) == 0
    out = capsys.readouterr().out
    assert path.exists()
    assert "alpha=0.50000" in out


def test_solve_lp_resource_limit():
    assert run_cli(["solve-lp", "--k", "50"]) == 3


def test_solve_lp_export_beyond_budget_uses_compact(tmp_path, capsys):
    path = tmp_path / "k45.mps"
    assert run_cli(["solve-lp", "--k", "45", "--export", str(path)]) == 0
    head = path.read_text().splitlines()[0]
    assert head == "NAME ranking_lp_k45_compact"
    assert "solve externally" in capsys.readouterr().out


def test_validate_f_pass_and_mismatch(tmp_path, capsys):
    path = tmp_path / "k3.json"
    path.write_text(REFERENCE_TABLE_K3.to_json())
    assert run_cli(["validate-f", "--file", str(path), "--expect", "0.503",
                    "--tol", "0.002"]) == 0
    assert run_cli(["validate-f", "--file", str(path), "--expect", "0.9"]) == 1


def test_validate_f_rejects_non_monotone(tmp_path):
    bad = PriceTable(2, [[0.4, 0.3], [0.5, 0.6]])
    path = tmp_path / "bad.json"
    path.write_text(bad.to_json())
    assert run_cli(["validate-f", "--file", str(path)]) == 1


def test_verify_lemmas_clean(tmp_path, capsys):
    report_path = tmp_path / "sweep.json"
    code = run_cli([
        "verify-lemmas", "--max-n", "3", "--k", "2", "--exhaustive",
        "--skip-random-eight", "--report", str(report_path),
    ])
    assert code == 0
    assert "0 violations" in capsys.readouterr().out
    payload = json.loads(report_path.read_text())
    assert payload["violations"] == []
    assert payload["claims_checked"]["insertion-claims"] > 0


def test_verify_lemmas_sampled_mode(capsys):
    # Without --exhaustive the sweep samples orders and skips the
    # enumeration-only checkers.
    assert run_cli(["verify-lemmas", "--max-n", "3", "--k", "2",
                    "--skip-random-eight"]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_simulate_exact_and_sampled(capsys):
    assert run_cli(["simulate", "--family", "path", "--n", "4", "--exact"]) == 0
    assert "ratio=0.87500" in capsys.readouterr().out
    assert run_cli(["simulate", "--family", "path", "--n", "4", "--k", "5",
                    "--trials", "2000", "--seed", "1"]) == 0
    first = capsys.readouterr().out
    run_cli(["simulate", "--family", "path", "--n", "4", "--k", "5",
             "--trials", "2000", "--seed", "1"])
    assert capsys.readouterr().out == first  # deterministic given the seed


def test_simulate_exact_resource_limit():
    assert run_cli(["simulate", "--family", "path", "--n", "10", "--exact"]) == 3


def test_reproduce_small(tmp_path, capsys):
    csv_path = tmp_path / "table.csv"
    assert run_cli(["reproduce", "--table1", "--k-max", "3",
                    "--csv", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert "k=  3 alpha=0.50347" in out
    assert csv_path.read_text().count("\n") == 4


def test_reproduce_resource_limit():
    assert run_cli(["reproduce", "--table1", "--k-max", "99"]) == 3


def test_usage_errors():
    assert run_cli(["no-such-command"]) == 2
    assert run_cli(["solve-lp"]) == 2
    assert run_cli([]) == 2
