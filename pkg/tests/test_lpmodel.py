import json

import pytest

from ranking_forge.gains import (
    REFERENCE_TABLE_K3,
    REFERENCE_TABLE_K10,
    PriceTable,
)
from ranking_forge.lpmodel import (
    build_lp,
    compact_mps_chunks,
    evaluate_price_table,
    export_mps,
    mps_text,
    parse_mps,
    write_compact_mps,
)
from ranking_forge.simplex import solve


def test_build_rejects_zero_buckets():
    with pytest.raises(ValueError):
        build_lp(0)


def test_counts_match_quantifier_formulas_for_two_buckets():
    m = build_lp(2)
    counts = m.counts()
    # Price entries over the padded 3x3 domain.
    assert counts["vars_f"] == 9
    # One alpha per bucket plus the average.
    assert counts["vars_alpha"] == 3
    # Min-case tuples: (i, xv <= i, xus <= i) and the backup variants with
    # xb in xv+1..k+1.
    assert counts["vars_hs"] == 5
    assert counts["vars_hb"] == 8
    assert counts["variables"] == 25
    # Rows: 12 monotonicity, 2 arms per min tuple, and per bucket the three
    # families contribute 1 + 2 + 3 averaging rows, plus the tie row.
    mono = sum(1 for r in m.rows if r.name.startswith("mon"))
    arms = sum(1 for r in m.rows if r.name.startswith(("hs_", "hb_")))
    averaging = sum(1 for r in m.rows if r.name.startswith(("abot_", "as_", "ab_")))
    assert mono == 2 * 2 * 3
    assert arms == 2 * (5 + 8)
    assert averaging == 2 * (1 + 2 + 3)
    assert m.row_count == mono + arms + averaging + 1


def test_small_optima_match_published_values():
    assert solve(build_lp(1)).alpha == pytest.approx(0.5, abs=1e-6)
    assert solve(build_lp(2)).alpha == pytest.approx(0.5, abs=1e-6)
    assert solve(build_lp(3)).alpha == pytest.approx(0.50347, abs=1e-4)


def test_naive_and_substituted_forms_agree():
    for k in (1, 2, 3):
        a = solve(build_lp(k)).alpha
        b = solve(build_lp(k, form="naive")).alpha
        assert b == pytest.approx(a, abs=1e-9)


def test_compact_form_same_optimum_and_byte_stable():
    for k in (1, 2, 3):
        stream = "".join(compact_mps_chunks(k))
        model = parse_mps(stream, expect_form="compact")
        assert mps_text(model) == stream
        assert solve(model).alpha == pytest.approx(solve(build_lp(k)).alpha, abs=1e-9)


def test_export_parse_round_trip(tmp_path):
    for k in (1, 3):
        m = build_lp(k)
        path = tmp_path / f"model_{k}.mps"
        export_mps(m, path)
        m2 = parse_mps(str(path))
        assert m2.var_names == m.var_names
        assert [r.name for r in m2.rows] == [r.name for r in m.rows]
        for r1, r2 in zip(m.rows, m2.rows):
            assert r1.sense == r2.sense
            assert float(r1.rhs) == float(r2.rhs)
            assert [(j, float(c)) for j, c in r1.coeffs] == [
                (j, float(c)) for j, c in r2.coeffs
            ]
        assert [float(x) for x in m.lower] == [float(x) for x in m2.lower]
        assert [x if x is None else float(x) for x in m.upper] == [
            x if x is None else float(x) for x in m2.upper
        ]
        # Re-export is byte-identical.
        assert mps_text(m2) == path.read_text()


def test_write_compact_matches_chunks(tmp_path):
    path = tmp_path / "compact2.mps"
    stats = write_compact_mps(2, path)
    assert path.read_text() == "".join(compact_mps_chunks(2))
    assert stats["lines"] == path.read_text().count("\n")


def test_solved_table_is_monotone_and_coherent():
    s = solve(build_lp(3))
    s.f_table.require_monotonic()
    report = evaluate_price_table(s.f_table)
    assert report.alpha == pytest.approx(s.alpha, abs=1e-6)


def test_evaluate_reference_tables():
    assert evaluate_price_table(REFERENCE_TABLE_K3).alpha == pytest.approx(
        0.503, abs=2e-3
    )
    assert evaluate_price_table(REFERENCE_TABLE_K10).alpha == pytest.approx(
        0.53046, abs=5e-3
    )
    assert evaluate_price_table(PriceTable.constant(1, 0.5)).alpha == pytest.approx(
        0.5, abs=1e-12
    )


def test_evaluate_rejects_non_monotone_listing_pairs():
    bad = PriceTable(2, [[0.4, 0.3], [0.5, 0.6]])
    with pytest.raises(ValueError, match="monotone"):
        evaluate_price_table(bad)


def test_evaluate_binding_report_shape():
    report = evaluate_price_table(REFERENCE_TABLE_K3)
    assert len(report.alpha_i) == 3 and len(report.binding) == 3
    assert all(b["family"] in ("no_match", "single", "backup") for b in report.binding)
    payload = json.loads(report.to_json())
    assert payload["k"] == 3


def test_compact_export_solved_by_independent_solver():
    # Parse the streamed compact form at full desk scale and hand it to
    # scipy's HiGHS: the optimum must hit the published k=10 value.
    import numpy as np
    import scipy.sparse as sp
    from scipy.optimize import linprog

    m = parse_mps("".join(compact_mps_chunks(10)), expect_form="compact")
    n = len(m.var_names)
    c = np.zeros(n)
    c[m.objective_var] = -1.0
    blocks = {"L": ([], [], [], []), "E": ([], [], [], [])}
    for row in m.rows:
        data, ri, ci, rhs = blocks[row.sense]
        r = len(rhs)
        for j, coef in row.coeffs:
            data.append(float(coef))
            ri.append(r)
            ci.append(j)
        rhs.append(float(row.rhs))
    a_ub = sp.csr_matrix(
        (blocks["L"][0], (blocks["L"][1], blocks["L"][2])),
        shape=(len(blocks["L"][3]), n),
    )
    a_eq = sp.csr_matrix(
        (blocks["E"][0], (blocks["E"][1], blocks["E"][2])),
        shape=(len(blocks["E"][3]), n),
    )
    bounds = [
        (float(lo), None if up is None else float(up))
        for lo, up in zip(m.lower, m.upper)
    ]
    res = linprog(
        c, A_ub=a_ub, b_ub=blocks["L"][3], A_eq=a_eq, b_eq=blocks["E"][3],
        bounds=bounds, method="highs",
    )
    assert res.status == 0
    assert -res.fun == pytest.approx(0.53046, abs=1e-4)


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_mps("NAME x\nROWS\n Q bad\nENDATA\n")
    with pytest.raises(ValueError):
        parse_mps("NAME x\nROWS\n L r\nCOLUMNS\nRHS\nENDATA\n")  # no objective
