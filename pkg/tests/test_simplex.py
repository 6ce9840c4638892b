from fractions import Fraction

import pytest

from ranking_forge.lpmodel import LinRow, LpModel, build_lp
from ranking_forge.simplex import (
    SolverOptions,
    brute_force_optimum,
    parse_solution_text,
    solution_from_values,
    solve,
    verify_solution,
)


def hand_model(var_names, lower, upper, rows, objective_var, k=1):
    return LpModel(
        k=k,
        form="handmade",
        var_names=var_names,
        lower=[Fraction(x) for x in lower],
        upper=[None if u is None else Fraction(u) for u in upper],
        rows=[
            LinRow(name, tuple((j, Fraction(c)) for j, c in coeffs), sense, Fraction(rhs))
            for name, coeffs, sense, rhs in rows
        ],
        objective_var=objective_var,
    )


def budget_model():
    # max z subject to z <= x + y, x + y <= 1, everything in [0, 1].
    return hand_model(
        ["z", "x", "y"],
        [0, 0, 0],
        [2, 1, 1],
        [
            ("cap", [(0, 1), (1, -1), (2, -1)], "L", 0),
            ("budget", [(1, 1), (2, 1)], "L", 1),
        ],
        objective_var=0,
    )


def test_simple_budget_lp():
    s = solve(budget_model())
    assert s.status == "optimal"
    assert s.values["z"] == pytest.approx(1.0)


def test_bound_flip_path():
    # Optimum forces x to its non-default upper bound 0.7.
    m = hand_model(
        ["z", "x"],
        [0, 0],
        [1, Fraction(7, 10)],
        [("cap", [(0, 1), (1, -1)], "L", 0)],
        objective_var=0,
    )
    s = solve(m)
    assert s.values["z"] == pytest.approx(0.7)


def test_equality_row():
    m = hand_model(
        ["z", "x", "y"],
        [0, 0, 0],
        [2, 1, 1],
        [
            ("split", [(1, 1), (2, 1)], "E", 1),
            ("cap", [(0, 1), (1, -1)], "L", 0),
        ],
        objective_var=0,
    )
    s = solve(m)
    assert s.status == "optimal"
    assert s.values["z"] == pytest.approx(1.0)
    assert s.values["x"] + s.values["y"] == pytest.approx(1.0)


def test_infeasible_detected():
    m = hand_model(
        ["z", "x", "y"],
        [0, 0, 0],
        [1, 1, 1],
        [("impossible", [(1, 1), (2, 1)], "E", 3)],
        objective_var=0,
    )
    assert solve(m).status == "infeasible"


def test_phase_one_recovers_feasibility():
    # Start basis is infeasible (equality with nonzero rhs) but the model is
    # feasible; phase one must clear it.
    m = hand_model(
        ["z", "x"],
        [0, 0],
        [1, 1],
        [
            ("pin", [(1, 1)], "E", Fraction(1, 2)),
            ("cap", [(0, 1), (1, -1)], "L", 0),
        ],
        objective_var=0,
    )
    s = solve(m)
    assert s.status == "optimal"
    assert s.values["z"] == pytest.approx(0.5)


def test_iteration_limit_status():
    s = solve(build_lp(3), SolverOptions(max_iterations=5))
    assert s.status == "limit"


def test_determinism():
    a = solve(build_lp(3))
    b = solve(build_lp(3))
    assert a.iterations == b.iterations
    assert a.alpha == b.alpha
    assert a.values == b.values


def test_bland_rule_reaches_same_optimum():
    a = solve(build_lp(2))
    b = solve(build_lp(2), SolverOptions(pivot_rule="bland"))
    assert b.status == "optimal"
    assert b.alpha == pytest.approx(a.alpha, abs=1e-9)


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(feasibility_tol=0)
    with pytest.raises(ValueError):
        SolverOptions(pivot_rule="steepest")


def test_verify_solution_passes_on_solver_output():
    m = build_lp(3)
    s = solve(m)
    report = verify_solution(m, s, tol=1e-8)
    assert report.ok
    assert report.max_row_violation <= 1e-8


def test_verify_solution_flags_monotonicity_breach():
    m = build_lp(1)
    values = {name: 0.0 for name in m.var_names}
    values.update({"f_1_1": 0.7, "f_2_1": 0.8, "f_1_2": 1.0, "f_2_2": 1.0})
    report = verify_solution(m, solution_from_values(m, values), tol=1e-8)
    assert not report.ok
    assert report.worst_row == "monB_1_1"  # f(2,1) > f(1,1)
    assert report.max_row_violation == pytest.approx(0.1, abs=1e-12)


def test_verify_solution_requires_complete_assignment():
    m = build_lp(1)
    with pytest.raises(ValueError, match="missing"):
        verify_solution(m, solution_from_values(m, {"f_1_1": 0.5}))


def test_parse_solution_text():
    text = "alpha = 0.5\nf_1_1=0.25  # comment\n\n# full line comment\n"
    assert parse_solution_text(text) == {"alpha": 0.5, "f_1_1": 0.25}
    with pytest.raises(ValueError):
        parse_solution_text("nonsense")


def test_external_solution_round_trip():
    # Dump a solved assignment as name=value text, read it back, verify.
    m = build_lp(3)
    s = solve(m)
    text = "\n".join(f"{n}={v!r}" for n, v in s.values.items())
    external = solution_from_values(m, parse_solution_text(text))
    report = verify_solution(m, external, tol=1e-8)
    assert report.ok
    assert external.alpha == pytest.approx(0.50347, abs=1e-4)


def test_brute_force_oracle_on_hand_model():
    m = budget_model()
    assert brute_force_optimum(m) == pytest.approx(solve(m).alpha, abs=1e-9)


def test_brute_force_oracle_on_smallest_lp():
    m = build_lp(1)
    assert brute_force_optimum(m) == pytest.approx(solve(m).alpha, abs=1e-6)


def test_brute_force_oracle_refuses_large_models():
    # At two buckets the model already has 25 structural variables, past the
    # vertex-enumeration oracle's reach; the scipy cross-check below covers
    # those sizes instead.
    with pytest.raises(ValueError, match="oracle limit"):
        brute_force_optimum(build_lp(2))


def test_scipy_linprog_cross_check():
    # Fully independent solver route over the same model data.
    from scipy.optimize import linprog

    for k in (1, 2, 3):
        m = build_lp(k)
        n = len(m.var_names)
        c = [0.0] * n
        c[m.objective_var] = -1.0  # scipy minimizes
        a_ub, b_ub, a_eq, b_eq = [], [], [], []
        for row in m.rows:
            dense = [0.0] * n
            for j, coef in row.coeffs:
                dense[j] = float(coef)
            if row.sense == "L":
                a_ub.append(dense)
                b_ub.append(float(row.rhs))
            else:
                a_eq.append(dense)
                b_eq.append(float(row.rhs))
        bounds = [
            (float(lo), None if up is None else float(up))
            for lo, up in zip(m.lower, m.upper)
        ]
        res = linprog(
            c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
            method="highs",
        )
        assert res.status == 0
        assert -res.fun == pytest.approx(solve(m).alpha, abs=1e-7)
