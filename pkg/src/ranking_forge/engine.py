"""The randomized-greedy RANKING matcher, runnable in three equivalent views.

* ``vertex_iterative``: process vertices in rank order; each one grabs its
  first available neighbor under the same order.
* ``greedy_probing``: probe ordered vertex pairs in ascending lexicographic
  rank order and commit every probe whose endpoints are both free.
* ``restricted_arrival``: vertices arrive in rank order and may only look at
  neighbors that already arrived.

All three produce the same matching for the same order; ``views_agree``
checks that on concrete instances.  Removing a vertex set S is realized by
marking it unavailable from the start (``frozen``), which keeps the probe
timeline aligned with the full run -- the device the structural checks rely
on.  Orders whose domain is a strict subset of the graph's vertices are
accepted; missing vertices are treated as frozen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .graphs import Edge, Graph, edge
from .ranks import RankVector, induced_permutation

Time = tuple[int, int]
OrderLike = Union[RankVector, Mapping[int, int], Sequence[int]]

VIEWS = ("vertex_iterative", "greedy_probing", "restricted_arrival")


@dataclass(frozen=True)
class ProbeEvent:
    time: Time
    edge: Edge
    accepted: bool


@dataclass(frozen=True)
class RankingTrace:
    matching: frozenset[Edge]
    probe_log: tuple[ProbeEvent, ...]
    view: str


@dataclass(frozen=True)
class PartialState:
    """Snapshot after all probes at times strictly before ``t``."""

    t: Time
    partial_matching: frozenset[Edge]
    available: frozenset[int]


def position_map(order: OrderLike) -> dict[int, int]:
    """Normalize an order (rank vector, map, or sequence) to vertex -> 1..n."""
    if isinstance(order, RankVector):
        return induced_permutation(order)
    if isinstance(order, Mapping):
        pos = {int(v): int(p) for v, p in order.items()}
        if sorted(pos.values()) != list(range(1, len(pos) + 1)):
            raise ValueError("order map is not a bijection onto 1..n")
        return pos
    seq = [int(v) for v in order]
    if len(set(seq)) != len(seq):
        raise ValueError("order sequence repeats a vertex")
    return {v: i + 1 for i, v in enumerate(seq)}


def _check_domain(g: Graph, pos: Mapping[int, int], frozen: frozenset[int]) -> None:
    for v in pos:
        if not 0 <= v < g.n:
            raise ValueError(f"order mentions vertex {v} outside the graph")
    if not frozen <= set(pos):
        raise ValueError(f"frozen vertices {sorted(frozen - set(pos))} not in order")


def greedy_probe_events(
    g: Graph, pos: Mapping[int, int], frozen: frozenset[int]
) -> list[ProbeEvent]:
    """First probes of every in-domain edge, in ascending lexicographic time."""
    domain = set(pos)
    timed = sorted(
        (
            ((min(pos[u], pos[v]), max(pos[u], pos[v])), (u, v))
            for (u, v) in g.edges
            if u in domain and v in domain
        ),
    )
    unavailable = set(frozen)
    events: list[ProbeEvent] = []
    for t, (u, v) in timed:
        ok = u not in unavailable and v not in unavailable
        if ok:
            unavailable.add(u)
            unavailable.add(v)
        events.append(ProbeEvent(t, edge(u, v), ok))
    return events


def _vertex_iterative(g, pos, frozen):
    domain = set(pos)
    by_rank = sorted(domain, key=pos.__getitem__)
    unavailable = set(frozen)
    log: list[ProbeEvent] = []
    matching: set[Edge] = set()
    for v in by_rank:
        if v in unavailable:
            continue  # every probe from a matched vertex is vacuous
        for u in sorted(
            (u for u in g.neighbors(v) if u in domain), key=pos.__getitem__
        ):
            ok = u not in unavailable
            log.append(ProbeEvent((pos[v], pos[u]), edge(u, v), ok))
            if ok:
                matching.add(edge(u, v))
                unavailable.add(u)
                unavailable.add(v)
                break
    return matching, log


def _greedy_probing(g, pos, frozen):
    events = greedy_probe_events(g, pos, frozen)
    return {e.edge for e in events if e.accepted}, events


def _restricted_arrival(g, pos, frozen):
    # Arrival i probes the pairs (i, 1), (i, 2), ..., (i, i-1) in order:
    # only neighbors that already arrived are visible.
    domain = set(pos)
    by_rank = {p: v for v, p in pos.items()}
    unavailable = set(frozen)
    log: list[ProbeEvent] = []
    matching: set[Edge] = set()
    for i in range(1, len(domain) + 1):
        v = by_rank[i]
        for j in range(1, i):
            u = by_rank[j]
            if not g.has_edge(u, v):
                continue
            ok = u not in unavailable and v not in unavailable
            log.append(ProbeEvent((i, j), edge(u, v), ok))
            if ok:
                matching.add(edge(u, v))
                unavailable.add(u)
                unavailable.add(v)
    return matching, log


_VIEW_IMPLS = {
    "vertex_iterative": _vertex_iterative,
    "greedy_probing": _greedy_probing,
    "restricted_arrival": _restricted_arrival,
}


def run_ranking(
    g: Graph,
    order: OrderLike,
    view: str = "vertex_iterative",
    frozen: frozenset[int] | set[int] = frozenset(),
) -> RankingTrace:
    """Run the greedy matcher on ``g`` under ``order``.

    ``frozen`` vertices stay unavailable from the start and are never
    matched; this realizes the run on the order with those vertices removed,
    without re-indexing anyone else.
    """
    if view not in _VIEW_IMPLS:
        raise ValueError(f"unknown view {view!r}; choose one of {VIEWS}")
    pos = position_map(order)
    frozen = frozenset(frozen)
    _check_domain(g, pos, frozen)
    matching, log = _VIEW_IMPLS[view](g, pos, frozen)
    return RankingTrace(frozenset(matching), tuple(log), view)


def matching_for_order(
    g: Graph,
    order: OrderLike,
    frozen: frozenset[int] | set[int] = frozenset(),
) -> frozenset[Edge]:
    """Just the matching, no trace overhead (vertex-iterative core)."""
    pos = position_map(order)
    frozen = frozenset(frozen)
    _check_domain(g, pos, frozen)
    matching, _ = _vertex_iterative(g, pos, frozen)
    return frozenset(matching)


def partial_state(
    g: Graph,
    order: OrderLike,
    t: Time,
    frozen: frozenset[int] | set[int] = frozenset(),
) -> PartialState:
    """Matching and availability after all probes at times < ``t``."""
    pos = position_map(order)
    frozen = frozenset(frozen)
    _check_domain(g, pos, frozen)
    matching: set[Edge] = set()
    covered: set[int] = set()
    for ev in greedy_probe_events(g, pos, frozen):
        if ev.time >= t:
            break
        if ev.accepted:
            matching.add(ev.edge)
            covered.update(ev.edge)
    available = frozenset(set(pos) - frozen - covered)
    return PartialState(t, frozenset(matching), available)


@dataclass(frozen=True)
class AgreeReport:
    agree: bool
    matchings: dict[str, frozenset[Edge]]

    @property
    def divergence(self) -> dict | None:
        if self.agree:
            return None
        return {view: sorted(m) for view, m in self.matchings.items()}


def views_agree(
    g: Graph,
    order: OrderLike,
    frozen: frozenset[int] | set[int] = frozenset(),
) -> AgreeReport:
    """Run all three views and report whether their matchings coincide."""
    matchings = {view: run_ranking(g, order, view, frozen).matching for view in VIEWS}
    agree = len(set(matchings.values())) == 1
    return AgreeReport(agree, matchings)


def trace_to_json(trace: RankingTrace) -> str:
    return json.dumps(
        {
            "view": trace.view,
            "matching": sorted([list(e) for e in trace.matching]),
            "probe_log": [
                {"time": list(ev.time), "edge": list(ev.edge), "accepted": ev.accepted}
                for ev in trace.probe_log
            ],
        }
    )
