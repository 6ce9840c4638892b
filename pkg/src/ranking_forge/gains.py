"""Price tables, gain sharing over matched edges, and the pointwise
lower-bound functions on the combined gain of a designated-matching pair.

A matched edge carries one unit of gain, split by a monotone price table:
the item end receives ``f(buyer bucket, item bucket)`` and the buyer end the
remainder.  For a pair ``(u, u_star)`` of the designated matching, the
``h_*`` case tables bound ``gain(u) + gain(u_star)`` from below for every
realization, by class of ``u``'s profile; the ``H_*`` forms average them
over the insertion bucket of ``u_star``.
"""

from __future__ import annotations

import json
from math import factorial
from typing import Iterable, Optional

from .engine import matching_for_order
from .graphs import Edge, Graph, edge
from .oracles import (
    BUYER,
    ITEM,
    ClassLabel,
    compute_profile,
    two_coloring,
)
from .ranks import (
    RankVector,
    enumerate_rank_vectors,
    insertion_slots,
    move_vertex,
    sample_ranks,
)


class ColoringError(ValueError):
    """A matched edge is monochromatic under the supplied coloring."""


# An affine form: (integer constant, ((+-1 coefficient, (i, j)), ...)) over
# price-table entries.  A case evaluates to one form, or to the min of two.
AffForm = tuple[int, tuple[tuple[int, tuple[int, int]], ...]]


class PriceTable:
    """Monotone price function on ``{1..k+1}^2``.

    Entries decrease in the buyer index and increase in the item index.
    Tables supplied as k x k are padded with an all-ones item column and an
    all-zeros buyer row, which keeps both monotonicity constraints valid at
    the boundary.
    """

    __slots__ = ("k", "_rows")

    def __init__(self, k: int, rows: Iterable[Iterable[float]]):
        grid = [list(map(float, row)) for row in rows]
        if len(grid) == k:
            grid = _pad(grid)
        if len(grid) != k + 1 or any(len(row) != k + 1 for row in grid):
            raise ValueError(f"expected a {k}x{k} or {k + 1}x{k + 1} table")
        if any(not 0.0 <= x <= 1.0 for row in grid for x in row):
            raise ValueError("price values must lie in [0, 1]")
        self.k = k
        self._rows = tuple(tuple(row) for row in grid)

    def value(self, i: int, j: int) -> float:
        if not (1 <= i <= self.k + 1 and 1 <= j <= self.k + 1):
            raise ValueError(f"index ({i}, {j}) outside 1..{self.k + 1}")
        return self._rows[i - 1][j - 1]

    def rows(self) -> tuple[tuple[float, ...], ...]:
        return self._rows

    def monotonicity_violations(self) -> list[dict]:
        bad = []
        for i in range(1, self.k + 1):
            for j in range(1, self.k + 2):
                if self.value(i, j) < self.value(i + 1, j) - 1e-12:
                    bad.append({"kind": "buyer-decreasing", "at": (i, j)})
        for i in range(1, self.k + 2):
            for j in range(1, self.k + 1):
                if self.value(i, j) > self.value(i, j + 1) + 1e-12:
                    bad.append({"kind": "item-increasing", "at": (i, j)})
        return bad

    def require_monotonic(self) -> None:
        bad = self.monotonicity_violations()
        if bad:
            raise ValueError(f"price table is not monotone: {bad}")

    @classmethod
    def constant(cls, k: int, c: float) -> "PriceTable":
        return cls(k, [[c] * k for _ in range(k)])

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "values": [list(r) for r in self._rows]})

    @classmethod
    def from_json(cls, text: str) -> "PriceTable":
        payload = json.loads(text)
        return cls(payload["k"], payload["values"])


def _pad(grid: list[list[float]]) -> list[list[float]]:
    k = len(grid)
    padded = [row + [1.0] for row in grid]
    padded.append([0.0] * (k + 1))
    return padded


# ---------------------------------------------------------------------------
# Case tables.  Each returns one affine form (no min) or two (their min).


def h_forms(
    label: ClassLabel,
    x_u: int,
    x_v: Optional[int],
    x_b: Optional[int],
    x_ustar: int,
) -> tuple[AffForm, ...]:
    """Symbolic lower-bound forms for gain(u) + gain(u_star)."""
    if label is ClassLabel.UNMATCHED:
        if x_v is not None or x_b is not None:
            raise ValueError("unmatched profile cannot carry match or backup")
        return ((0, ((1, (x_u, x_ustar)),)),)
    if x_v is None:
        raise ValueError(f"{label.value} profile requires a match bucket")
    if label is ClassLabel.MATCHED_NO_BACKUP:
        if x_b is not None:
            raise ValueError("C_s profile cannot carry a backup bucket")
        if x_u < x_v:
            if x_ustar <= x_u:
                return ((0, ((1, (x_u, x_ustar)),)),)
            if x_ustar < x_v:
                return ((1, ((-1, (x_u, x_v)), (1, (x_u, x_ustar)))),)
            return ((1, ((-1, (x_u, x_v)),)),)
        if x_ustar < x_v:
            return (
                (0, ((1, (x_v, x_ustar)),)),
                (1, ((-1, (x_u, x_v)), (1, (x_u, x_ustar)))),
            )
        if x_ustar <= x_u:
            return (
                (0, ((1, (x_v, x_ustar)),)),
                (1, ((-1, (x_u, x_v)),)),
            )
        return ((1, ((-1, (x_u, x_v)),)),)
    if label is ClassLabel.MATCHED_WITH_BACKUP:
        if x_b is None:
            raise ValueError("C_b profile requires a backup bucket")
        if x_u < x_v:
            if x_ustar <= x_u:
                return ((1, ((-1, (x_u, x_b)), (1, (x_u, x_ustar)))),)
            if x_ustar < x_v:
                return ((1, ((-1, (x_u, x_v)), (1, (x_u, x_ustar)))),)
            return ((1, ((-1, (x_u, x_v)),)),)
        if x_ustar < x_v:
            return (
                (1, ((-1, (x_u, x_b)), (1, (x_v, x_ustar)))),
                (1, ((-1, (x_u, x_v)), (1, (x_u, x_ustar)))),
            )
        if x_ustar <= x_u:
            return (
                (1, ((-1, (x_u, x_b)), (1, (x_v, x_ustar)))),
                (1, ((-1, (x_u, x_v)),)),
            )
        return ((1, ((-1, (x_u, x_v)),)),)
    raise ValueError(f"unknown class label {label!r}")


def _check_bucket(name: str, value: Optional[int], k: int) -> None:
    if value is not None and not 1 <= value <= k + 1:
        raise ValueError(f"{name}={value} outside 1..{k + 1}")


def h_value(
    label: ClassLabel,
    table: PriceTable,
    x_u: int,
    x_v: Optional[int],
    x_b: Optional[int],
    x_ustar: int,
) -> float:
    """Pointwise lower bound on gain(u) + gain(u_star) for one realization."""
    for name, val in (("x_u", x_u), ("x_v", x_v), ("x_b", x_b), ("x_ustar", x_ustar)):
        _check_bucket(name, val, table.k)
    forms = h_forms(label, x_u, x_v, x_b, x_ustar)
    return min(
        const + sum(coef * table.value(i, j) for coef, (i, j) in terms)
        for const, terms in forms
    )


def H_value(
    label: ClassLabel,
    table: PriceTable,
    x_u: int,
    x_v: Optional[int] = None,
    x_b: Optional[int] = None,
) -> float:
    """Average of the pointwise bound over the new vertex's bucket 1..k."""
    k = table.k
    return (
        sum(h_value(label, table, x_u, x_v, x_b, xs) for xs in range(1, k + 1)) / k
    )


# ---------------------------------------------------------------------------
# Gain sharing.


def share_gains(
    g: Graph,
    order: RankVector,
    coloring: dict[int, str],
    table: PriceTable,
    matching: Optional[frozenset[Edge]] = None,
) -> dict[int, float]:
    """Split each matched edge's unit gain between its buyer and item ends.

    The total handed out equals the matching size; unmatched vertices get 0.
    """
    if not isinstance(order, RankVector):
        raise TypeError("gain sharing needs bucket values; pass a rank vector")
    if matching is None:
        matching = matching_for_order(g, order)
    gains = {v: 0.0 for v in g.vertices}
    for a, b in matching:
        if coloring[a] == coloring[b]:
            raise ColoringError(f"matched edge ({a}, {b}) is monochromatic")
        buyer, item = (a, b) if coloring[a] == BUYER else (b, a)
        price = table.value(order.bucket(buyer), order.bucket(item))
        gains[item] = price
        gains[buyer] = 1.0 - price
    return gains


# ---------------------------------------------------------------------------
# The audit: pointwise soundness of the h bounds against realized gains.


def audit_h_bounds(
    g: Graph,
    u: int,
    u_star: int,
    table: PriceTable,
    k: int,
    budget: int = 2_000_000,
    seed: int = 0,
    tol: float = 1e-9,
    check_table: bool = True,
) -> list[dict]:
    """Check ``h <= gain(u) + gain(u_star)`` on every realization.

    Enumerates rank vectors on the graph without ``u_star`` and every
    insertion slot for it (exhaustively when ``k^(n-1) * (n-1)!`` fits the
    budget, otherwise a seeded sample), always conditioning on ``u`` being a
    buyer.  Returns violation records; an empty list is a pass.

    ``check_table=False`` lets a deliberately non-monotone table through, to
    demonstrate that the audit actually catches bound violations.
    """
    if table.k != k:
        raise ValueError(f"table has k={table.k}, audit asked for k={k}")
    if check_table:
        table.require_monotonic()
    if g.m_star is None or edge(u, u_star) not in g.m_star:
        raise ValueError(f"({u}, {u_star}) is not a designated-matching pair")
    others = sorted(set(g.vertices) - {u_star})
    n1 = len(others)
    violations: list[dict] = []

    def vectors():
        if k**n1 * factorial(n1) <= budget:
            for vec, _weight in enumerate_rank_vectors(others, k, budget=budget):
                yield vec
        else:
            for i in range(max(budget // max(k * n1, 1), 1)):
                yield sample_ranks(others, k, seed + i)

    for vec in vectors():
        profile, label = compute_profile(g, vec, u)
        for slot in insertion_slots(vec):
            sigma = move_vertex(vec, u_star, slot)
            matching = matching_for_order(g, sigma)
            chi = two_coloring(g, matching, g.m_star, 0)
            if chi[u] != BUYER:
                chi = {v: (ITEM if c == BUYER else BUYER) for v, c in chi.items()}
            gains = share_gains(g, sigma, chi, table, matching=matching)
            total_u = gains[u] + gains[u_star]
            x_ustar = slot[0]
            if x_ustar > k:
                continue
            hv = h_value(label, table, profile.x_u, profile.x_v, profile.x_b, x_ustar)
            if hv > total_u + tol:
                violations.append(
                    {
                        "claim": f"h-bound-{label.value}",
                        "vector": {str(v): list(s) for v, s in vec.items()},
                        "slot": list(slot),
                        "profile": list(profile),
                        "h": hv,
                        "realized": total_u,
                    }
                )
            mass = sum(gains.values())
            if abs(mass - len(matching)) > 1e-9:
                violations.append(
                    {
                        "claim": "gain-conservation",
                        "vector": {str(v): list(s) for v, s in vec.items()},
                        "slot": list(slot),
                        "total_gain": mass,
                        "matching_size": len(matching),
                    }
                )
    return violations


# ---------------------------------------------------------------------------
# Reference price tables (3-decimal published values; the k x k forms are
# padded on load).

REFERENCE_TABLE_K3 = PriceTable(
    3,
    [
        [0.469, 0.563, 0.563],
        [0.469, 0.500, 0.500],
        [0.469, 0.500, 0.500],
    ],
)

REFERENCE_TABLE_K10 = PriceTable(
    10,
    [
        [0.423, 0.462, 0.500, 0.553, 0.585, 0.629, 0.632, 0.797, 0.843, 0.843, 1.000],
        [0.423, 0.462, 0.500, 0.538, 0.585, 0.629, 0.632, 0.632, 0.684, 0.684, 1.000],
        [0.423, 0.462, 0.500, 0.538, 0.585, 0.629, 0.632, 0.632, 0.632, 0.632, 1.000],
        [0.423, 0.462, 0.500, 0.538, 0.585, 0.599, 0.599, 0.599, 0.599, 0.599, 1.000],
        [0.423, 0.462, 0.500, 0.538, 0.570, 0.570, 0.570, 0.570, 0.570, 0.570, 1.000],
        [0.423, 0.462, 0.500, 0.538, 0.544, 0.544, 0.544, 0.544, 0.544, 0.544, 1.000],
        [0.423, 0.462, 0.500, 0.523, 0.523, 0.523, 0.523, 0.523, 0.523, 0.523, 1.000],
        [0.423, 0.462, 0.500, 0.501, 0.512, 0.512, 0.512, 0.512, 0.512, 0.512, 1.000],
        [0.423, 0.462, 0.500, 0.501, 0.505, 0.506, 0.510, 0.510, 0.510, 0.510, 1.000],
        [0.423, 0.462, 0.500, 0.501, 0.505, 0.505, 0.505, 0.505, 0.505, 0.505, 1.000],
        [0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000, 0.000],
    ],
)
