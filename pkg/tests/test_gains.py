import math

import pytest

from ranking_forge.gains import (
    REFERENCE_TABLE_K3,
    REFERENCE_TABLE_K10,
    ColoringError,
    H_value,
    PriceTable,
    audit_h_bounds,
    h_value,
    share_gains,
)
from ranking_forge.graphs import make_graph
from ranking_forge.oracles import BUYER, ITEM, ClassLabel
from ranking_forge.ranks import RankVector

C_BOT = ClassLabel.UNMATCHED
C_S = ClassLabel.MATCHED_NO_BACKUP
C_B = ClassLabel.MATCHED_WITH_BACKUP


def test_padding_convention():
    t = PriceTable(2, [[0.4, 0.6], [0.3, 0.5]])
    assert t.value(1, 3) == 1.0 and t.value(2, 3) == 1.0
    assert t.value(3, 1) == 0.0 and t.value(3, 3) == 0.0
    assert t.monotonicity_violations() == []


def test_reference_tables_are_monotone():
    REFERENCE_TABLE_K3.require_monotonic()
    REFERENCE_TABLE_K10.require_monotonic()
    assert REFERENCE_TABLE_K3.value(1, 1) == 0.469
    assert REFERENCE_TABLE_K10.value(1, 11) == 1.0
    assert REFERENCE_TABLE_K10.value(11, 11) == 0.0


def test_monotonicity_violation_listing():
    t = PriceTable(2, [[0.4, 0.3], [0.5, 0.6]])
    kinds = {v["kind"] for v in t.monotonicity_violations()}
    assert kinds == {"buyer-decreasing", "item-increasing"}
    with pytest.raises(ValueError, match="monotone"):
        t.require_monotonic()


def test_table_json_round_trip():
    t = PriceTable(3, [[0.1, 0.2, 0.3]] * 3)
    t2 = PriceTable.from_json(t.to_json())
    assert t2.rows() == t.rows()


def test_bad_table_shapes():
    with pytest.raises(ValueError):
        PriceTable(2, [[0.1, 0.2]])
    with pytest.raises(ValueError):
        PriceTable(2, [[0.1, 1.4], [0.0, 0.0]])


def test_share_gains_k2_reference_values(k2):
    vec = RankVector(3, {0: (1, 1), 1: (2, 1)})
    gains = share_gains(k2, vec, {0: BUYER, 1: ITEM}, REFERENCE_TABLE_K3)
    assert gains[1] == pytest.approx(0.563)
    assert gains[0] == pytest.approx(0.437)
    assert sum(gains.values()) == pytest.approx(1.0)


def test_share_gains_empty_matching():
    g = make_graph(3, [(0, 1)])
    vec = RankVector(2, {0: (1, 1), 1: (1, 2), 2: (2, 1)})
    gains = share_gains(g, vec, {0: BUYER, 1: ITEM, 2: BUYER}, REFERENCE_TABLE_K3,
                        matching=frozenset())
    assert set(gains.values()) == {0.0}


def test_share_gains_conserves_total(p4):
    vec = RankVector(3, {0: (1, 1), 1: (1, 2), 2: (2, 1), 3: (3, 1)})
    chi = {0: ITEM, 1: BUYER, 2: ITEM, 3: BUYER}
    gains = share_gains(p4, vec, chi, REFERENCE_TABLE_K3)
    assert sum(gains.values()) == pytest.approx(2.0)


def test_share_gains_rejects_monochromatic(k2):
    vec = RankVector(3, {0: (1, 1), 1: (2, 1)})
    with pytest.raises(ColoringError):
        share_gains(k2, vec, {0: BUYER, 1: BUYER}, REFERENCE_TABLE_K3)


def test_h_reference_values():
    t = REFERENCE_TABLE_K3
    assert h_value(C_BOT, t, 1, None, None, 1) == pytest.approx(0.469)
    # x_u < x_v with the new bucket at or past the match: 1 - f(1, 2).
    assert h_value(C_S, t, 1, 2, None, 3) == pytest.approx(0.437)
    # x_v <= x_us <= x_u: min{1 - f(2,3) + f(1,2), 1 - f(2,1)} = 0.531.
    assert h_value(C_B, t, 2, 1, 3, 2) == pytest.approx(0.531)
    assert H_value(C_BOT, t, 1) == pytest.approx((0.469 + 0.563 + 0.563) / 3)


def test_h_constant_table_average():
    t = PriceTable.constant(3, 0.44)
    for x_u in (1, 2, 3):
        assert H_value(C_BOT, t, x_u) == pytest.approx(0.44)


def test_h_case_boundaries_match_direct_enumeration():
    # Independent check of the case split: on a constant table every branch
    # evaluates to a closed form.
    t = PriceTable.constant(2, 0.5)
    for x_u in (1, 2):
        for x_v in (1, 2):
            for x_us in (1, 2):
                v = h_value(C_S, t, x_u, x_v, None, x_us)
                assert 0.0 <= v <= 2.0
                assert v == pytest.approx(0.5)


def test_h_validates_patterns_and_ranges():
    t = REFERENCE_TABLE_K3
    with pytest.raises(ValueError):
        h_value(C_BOT, t, 1, 2, None, 1)
    with pytest.raises(ValueError):
        h_value(C_S, t, 1, None, None, 1)
    with pytest.raises(ValueError):
        h_value(C_B, t, 1, 1, None, 1)
    with pytest.raises(ValueError):
        h_value(C_S, t, 1, 5, None, 1)


def test_h_backup_bucket_may_be_k_plus_one():
    t = REFERENCE_TABLE_K3
    v = h_value(C_B, t, 2, 1, 4, 2)
    assert v == pytest.approx(min(1 - t.value(2, 4) + t.value(1, 2), 1 - t.value(2, 1)))


def test_H_weakly_decreasing_in_backup_bucket():
    # Raising the backup bucket can only lower the bound (this is what makes
    # the worst-case window form with the bumped backup index sound).
    t = REFERENCE_TABLE_K3
    for x_u in (1, 2, 3):
        for x_v in (1, 2, 3):
            hb = [H_value(C_B, t, x_u, x_v, x_b) for x_b in range(x_v + 1, 5)]
            assert all(a >= b - 1e-12 for a, b in zip(hb, hb[1:]))


def test_H_not_monotone_in_match_bucket():
    # Direct evaluation refutes monotonicity in the match bucket: with equal
    # adjacent prices the middle insertion case pays the full unit.
    t = REFERENCE_TABLE_K3
    assert H_value(C_S, t, 1, 3) > H_value(C_S, t, 1, 2) + 0.1


def test_gain_monotonicity_inequalities():
    # Matched buyer's gain dominates the bound from any later item bucket,
    # and symmetrically for items: direct consequence of table monotonicity.
    t = REFERENCE_TABLE_K10
    for x_u in range(1, 11):
        for x_v in range(1, 11):
            for later in range(x_v, 12):
                assert 1 - t.value(x_u, x_v) >= 1 - t.value(x_u, later) - 1e-12
            for earlier in range(x_u, 12):
                assert t.value(x_u, x_v) >= t.value(earlier, x_v) - 1e-12


def test_audit_clean_on_pendant_path():
    g = make_graph(3, [(0, 1), (1, 2)], m_star=[(0, 1)])
    assert audit_h_bounds(g, 0, 1, PriceTable.constant(2, 0.5), 2) == []
    assert audit_h_bounds(g, 1, 0, PriceTable.constant(2, 0.5), 2) == []


def test_audit_detects_corrupted_table():
    g = make_graph(3, [(0, 1), (1, 2)], m_star=[(0, 1)])
    bad = PriceTable(2, [[0.1, 0.2], [0.9, 0.95]])
    violations = audit_h_bounds(g, 0, 1, bad, 2, check_table=False)
    assert violations
    assert all(v["h"] > v["realized"] for v in violations if "h" in v)
    with pytest.raises(ValueError):
        audit_h_bounds(g, 0, 1, bad, 2)


def test_audit_requires_designated_pair(p4):
    with pytest.raises(ValueError, match="designated"):
        audit_h_bounds(p4, 0, 2, PriceTable.constant(2, 0.5), 2)
