"""Reproduction harness: Monte Carlo ratio estimation, recovery of the
published LP optima, and the exhaustive structural-property sweep.

The sweep runs every checker from the structural toolbox over a corpus of
small graphs (exhaustively over permutations and bucketed rank vectors) and
aggregates violations; a correct engine produces none.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial, sqrt
from typing import Iterable, Optional

import numpy as np

from . import simplex
from .engine import matching_for_order, views_agree
from .gains import REFERENCE_TABLE_K3, audit_h_bounds
from .graphs import (
    Graph,
    backup_counterexample_graph,
    designated_pairs,
    edge,
    generate_family,
    make_graph,
    matched_partner,
    maximum_matching,
    maximum_matching_size,
)
from .lpmodel import build_lp
from .oracles import (
    BUYER,
    ClaimViolation,
    alternating_path_sweep,
    check_insertion_claims,
    check_monotonicity,
    check_prefix_agreement,
    enumerate_equivalence_class,
    two_coloring,
)
from .ranks import RankVector, enumerate_rank_vectors, insertion_slots, remove_vertex

#: Published LP optima by bucket count (5 decimals), for regression checks.
KNOWN_OPTIMA = {
    1: 0.5, 2: 0.5, 3: 0.50347, 4: 0.51052, 5: 0.51625,
    6: 0.52068, 7: 0.52422, 8: 0.52674, 9: 0.52882, 10: 0.53046,
    11: 0.53202, 12: 0.53334, 13: 0.53443, 14: 0.53530, 15: 0.53608,
    16: 0.53687, 17: 0.53755, 18: 0.53812, 19: 0.53863, 20: 0.53910,
    25: 0.54098, 30: 0.54226, 35: 0.54318, 40: 0.54389, 45: 0.54444,
    50: 0.54489, 55: 0.54525, 60: 0.54556, 65: 0.54582, 70: 0.54604,
    75: 0.54624, 80: 0.54641, 85: 0.54656, 90: 0.54669, 95: 0.54681,
    100: 0.54690,
}


@dataclass
class RatioEstimate:
    mean: float
    trials: int
    half_width: float
    seed: int
    exact: bool = False


def monte_carlo_ratio(g: Graph, trials: int, k: int, seed: int) -> RatioEstimate:
    """Mean of |matching| / |maximum matching| over seeded bucketed draws.

    95% half-width by the normal approximation on the sample variance.
    """
    m_star = maximum_matching_size(g)
    if m_star == 0:
        raise ValueError("graph has no edges; the ratio is undefined")
    n = g.n
    adj = [list(g.neighbors(v)) for v in range(n)]
    rng = np.random.default_rng(seed)
    sizes = np.empty(trials)
    pos = [0] * n
    for trial in range(trials):
        buckets = rng.integers(0, k, n)
        ties = rng.random(n)
        order = np.lexsort((ties, buckets)).tolist()
        for idx, v in enumerate(order):
            pos[v] = idx
        matched = bytearray(n)
        size = 0
        for v in order:
            if matched[v]:
                continue
            best = -1
            best_pos = n
            for u in adj[v]:
                if not matched[u] and pos[u] < best_pos:
                    best_pos = pos[u]
                    best = u
            if best >= 0:
                matched[v] = 1
                matched[best] = 1
                size += 1
        sizes[trial] = size
    ratios = sizes / m_star
    mean = float(ratios.mean())
    hw = 0.0
    if trials > 1:
        hw = 1.96 * float(ratios.std(ddof=1)) / sqrt(trials)
    return RatioEstimate(mean, trials, hw, seed)


def exact_expected_ratio(g: Graph) -> Fraction:
    """E|matching| / |maximum matching| by enumerating all vertex orders."""
    m_star = maximum_matching_size(g)
    if m_star == 0:
        raise ValueError("graph has no edges; the ratio is undefined")
    total = 0
    count = 0
    for perm in permutations(range(g.n)):
        total += len(matching_for_order(g, perm))
        count += 1
    return Fraction(total, count * m_star)


# ---------------------------------------------------------------------------
# LP table reproduction.


@dataclass
class LpTableRow:
    k: int
    alpha: float
    elapsed: float
    iterations: int
    expected: Optional[float]

    @property
    def within_tolerance(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return abs(self.alpha - self.expected) <= 1e-4


def reproduce_lp_table(
    k_list: Iterable[int], options: Optional[simplex.SolverOptions] = None
) -> list[LpTableRow]:
    """Solve the factor-revealing LP for each k; failures are recorded as
    rows with NaN and the run continues."""
    rows = []
    for k in k_list:
        start = time.perf_counter()
        try:
            solution = simplex.solve(build_lp(k), options)
            alpha = solution.alpha if solution.status == "optimal" else float("nan")
            iters = solution.iterations
        except Exception:
            alpha, iters = float("nan"), 0
        rows.append(
            LpTableRow(
                k, alpha, time.perf_counter() - start, iters, KNOWN_OPTIMA.get(k)
            )
        )
    return rows


def lp_table_to_csv(rows: list[LpTableRow]) -> str:
    lines = ["k,alpha,expected,elapsed_s,iterations"]
    for r in rows:
        exp = "" if r.expected is None else f"{r.expected:.5f}"
        lines.append(f"{r.k},{r.alpha:.5f},{exp},{r.elapsed:.3f},{r.iterations}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Corpus.


@dataclass(frozen=True)
class CorpusGraph:
    name: str
    graph: Graph


def connected_graphs_upto(max_n: int) -> list[Graph]:
    """All connected graphs on 1..max_n vertices, one per isomorphism class,
    each carrying a designated maximum matching."""
    result = []
    for n in range(1, max_n + 1):
        pairs = list(combinations(range(n), 2))
        seen: set[tuple] = set()
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            if not _connected(n, edges):
                continue
            canon = _canonical_form(n, edges)
            if canon in seen:
                continue
            seen.add(canon)
            g = make_graph(n, edges)
            result.append(make_graph(n, edges, m_star=maximum_matching(g)))
    return result


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n == 1:
        return True
    adj = {v: set() for v in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _canonical_form(n: int, edges: list[tuple[int, int]]) -> tuple:
    best = None
    for perm in permutations(range(n)):
        mapped = tuple(sorted(edge(perm[u], perm[v]) for u, v in edges))
        if best is None or mapped < best:
            best = mapped
    return best


def default_corpus(seed: int = 2024, with_random_eight: bool = True) -> list[CorpusGraph]:
    """Connected graphs on <= 5 vertices plus P4, C6, K4, the backup
    counterexample, and twenty seeded planted-matching graphs on 8 vertices."""
    items = [
        CorpusGraph(f"conn{g.n}_{idx:02d}", g)
        for idx, g in enumerate(connected_graphs_upto(5))
    ]
    items.append(CorpusGraph("path4", generate_family("path", n=4)))
    items.append(CorpusGraph("cycle6", generate_family("cycle", n=6)))
    items.append(CorpusGraph("complete4", generate_family("complete", n=4)))
    items.append(CorpusGraph("backup_cex", backup_counterexample_graph()))
    if with_random_eight:
        for i in range(20):
            g = generate_family(
                "random_with_perfect_matching", n=8, density=0.3, seed=seed + i
            )
            items.append(CorpusGraph(f"planted8_{i:02d}", g))
    return items


# ---------------------------------------------------------------------------
# The sweep.


@dataclass
class SweepConfig:
    max_n: int = 5
    k: int = 3
    exhaustive: bool = True
    seed: int = 0
    jobs: int = 1
    with_random_eight: bool = True
    permutation_budget: int = 120  # sampled orders for graphs beyond max_n
    audit_max_n: int = 4  # run in-sweep h-bound audits up to this size
    corrupt_engine: bool = False  # mutation-test mode: must produce violations


@dataclass
class SweepReport:
    corpus: str
    instances_checked: int
    claims_checked: dict[str, int]
    violations: list[dict]
    wall_time: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        return json.dumps(asdict(self), default=str)


def lemma_sweep(config: SweepConfig | None = None) -> SweepReport:
    """Run every structural checker over the corpus and collect violations."""
    config = config or SweepConfig()
    start = time.perf_counter()
    corpus = default_corpus(
        seed=config.seed + 7000, with_random_eight=config.with_random_eight
    )
    work = sorted(corpus, key=lambda c: c.name)
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            partials = list(pool.map(_sweep_one, [(config, item) for item in work]))
    else:
        partials = [_sweep_one((config, item)) for item in work]
    claims: dict[str, int] = {}
    violations: list[dict] = []
    instances = 0
    for counts, viols, n_inst in partials:
        instances += n_inst
        violations.extend(viols)
        for key, val in counts.items():
            claims[key] = claims.get(key, 0) + val
    return SweepReport(
        corpus=f"{len(work)} graphs (max_n={config.max_n}, k={config.k})",
        instances_checked=instances,
        claims_checked=claims,
        violations=violations,
        wall_time=time.perf_counter() - start,
    )


def _corrupted_matching(g: Graph, order) -> frozenset:
    """Deliberately wrong greedy: picks the last available neighbor."""
    from .engine import position_map

    pos = position_map(order)
    matched: set[int] = set()
    out = set()
    for v in sorted(pos, key=pos.__getitem__):
        if v in matched:
            continue
        best = None
        for u in g.neighbors(v):
            if u in pos and u not in matched:
                if best is None or pos[u] > pos[best]:
                    best = u
        if best is not None:
            out.add(edge(v, best))
            matched.update((v, best))
    return frozenset(out)


def _sweep_one(args) -> tuple[dict[str, int], list[dict], int]:
    config, item = args
    g = item.graph
    counts: dict[str, int] = {}
    violations: list[dict] = []

    def bump(key, by=1):
        counts[key] = counts.get(key, 0) + by

    def record(claim, **detail):
        violations.append({"graph": item.name, "claim": claim, **detail})

    n = g.n
    exhaustive_perms = config.exhaustive and (
        n <= config.max_n + 1 or factorial(n) <= config.permutation_budget
    )
    if exhaustive_perms:
        orders = [list(p) for p in permutations(range(n))]
    else:
        rng = np.random.default_rng(config.seed + g.n * 1009 + len(g.edges))
        orders = [
            [int(x) for x in rng.permutation(n)]
            for _ in range(config.permutation_budget)
        ]

    # View equivalence (and the mutation-test arm when enabled).
    for order in orders:
        report = views_agree(g, order)
        bump("views-agree")
        if not report.agree:
            record("views-agree", order=order, divergence=report.divergence)
        if config.corrupt_engine:
            ref = report.matchings["greedy_probing"]
            if _corrupted_matching(g, order) != ref:
                record("views-agree-corrupted", order=order)

    # Alternating paths at every probe boundary, for every removed vertex.
    for order in orders:
        for u_star in range(n):
            try:
                bump("alt-path-checkpoints", alternating_path_sweep(g, order, u_star))
            except ClaimViolation as exc:
                record(exc.claim, payload=exc.payload)

    # Prefix-agreement fact.
    for order in orders:
        for v in range(n):
            report = check_prefix_agreement(g, order, v)
            bump("prefix-agreement", len(report.checks))
            for fail in report.failures:
                record(fail.claim, **fail.details)

    if n <= config.max_n + 1 and config.exhaustive:
        _sweep_insertion_claims(g, item.name, counts, violations)
        _sweep_coloring(g, item.name, orders, counts, violations)
    if n <= config.max_n and config.exhaustive:
        _sweep_rank_vector_checks(g, item.name, config.k, counts, violations)
    if (
        g.m_star is not None
        and n <= config.audit_max_n + 1
        and config.exhaustive
        and g.edges
    ):
        for pair in designated_pairs(g):
            viols = audit_h_bounds(g, pair.u, pair.u_star, REFERENCE_TABLE_K3, 3)
            bump("h-bound-audit")
            for v in viols:
                violations.append({"graph": item.name, **v})
    return counts, violations, len(orders)


def _sweep_insertion_claims(g, name, counts, violations):
    n = g.n
    for u_star in range(n):
        others = sorted(set(range(n)) - {u_star})
        for perm in permutations(others):
            vec = RankVector(1, {v: (1, i + 1) for i, v in enumerate(perm)})
            for target in insertion_slots(vec):
                for u in others:
                    report = check_insertion_claims(g, vec, u, u_star, target)
                    counts["insertion-claims"] = (
                        counts.get("insertion-claims", 0) + len(report.checks)
                    )
                    for fail in report.failures:
                        violations.append(
                            {"graph": name, "claim": fail.claim, **fail.details}
                        )


def _sweep_rank_vector_checks(g, name, k, counts, violations):
    n = g.n
    seen_classes: set = set()
    observed_matched_backup = 0
    for vec, _w in enumerate_rank_vectors(range(n), k):
        matching = matching_for_order(g, vec)
        for u in range(n):
            v = matched_partner(matching, u)
            if v is None:
                continue
            key = (u, v, remove_vertex(vec, v))
            if key in seen_classes:
                continue
            seen_classes.add(key)
            report = check_monotonicity(g, vec, u)
            counts["monotonicity"] = counts.get("monotonicity", 0) + len(report.checks)
            for fail in report.failures:
                violations.append({"graph": name, "claim": fail.claim, **fail.details})
            try:
                members, structure = enumerate_equivalence_class(g, vec, u)
                counts["equivalence-class"] = (
                    counts.get("equivalence-class", 0) + len(members)
                )
                if structure.backup is not None:
                    bm = matched_partner(matching, structure.backup)
                    if bm is not None:
                        observed_matched_backup += 1
            except ClaimViolation as exc:
                violations.append({"graph": name, "claim": exc.claim, **exc.payload})
    counts["backup-is-matched-observed"] = (
        counts.get("backup-is-matched-observed", 0) + observed_matched_backup
    )


def _sweep_coloring(g, name, orders, counts, violations):
    if g.m_star is None:
        return
    buyer_counts = {v: 0 for v in range(g.n)}
    total = 0
    for order in orders:
        matching = matching_for_order(g, order)
        for coin in (0, 1):
            try:
                chi = two_coloring(g, matching, g.m_star, coin)
            except RuntimeError as exc:
                violations.append({"graph": name, "claim": "two-coloring", "err": str(exc)})
                continue
            total += 1
            for v in range(g.n):
                buyer_counts[v] += chi[v] == BUYER
            for e in matching | g.m_star:
                if chi[e[0]] == chi[e[1]]:
                    violations.append(
                        {"graph": name, "claim": "two-coloring-proper", "edge": e}
                    )
    counts["two-coloring"] = counts.get("two-coloring", 0) + total
    for v, cnt in buyer_counts.items():
        if 2 * cnt != total:
            violations.append(
                {
                    "graph": name, "claim": "two-coloring-marginal",
                    "vertex": v, "buyer_count": cnt, "total": total,
                }
            )
