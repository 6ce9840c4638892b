"""Measured ratios versus the certified bound.

Monte Carlo estimates of E|matching| / |maximum matching| on planted
perfect-matching graphs never drop below the k=10 LP bound (0.53046) minus
sampling noise -- and tiny instances admit exact enumeration instead.
"""

from ranking_forge.experiments import (
    KNOWN_OPTIMA,
    exact_expected_ratio,
    monte_carlo_ratio,
)
from ranking_forge.graphs import backup_counterexample_graph, generate_family

p4 = generate_family("path", n=4)
print(f"P4 exact expected ratio: {exact_expected_ratio(p4)} = 0.875")
cex = backup_counterexample_graph()
print(f"counterexample graph exact ratio: {float(exact_expected_ratio(cex)):.5f}")

bound = KNOWN_OPTIMA[10]
print(f"\nLP bound at k=10: {bound:.5f}")
print("planted 8-vertex graphs, 50k trials each:")
for seed in range(5):
    g = generate_family("random_with_perfect_matching", n=8, density=0.3, seed=seed)
    est = monte_carlo_ratio(g, 50_000, k=10, seed=seed)
    margin = est.mean - (bound - 3 * est.half_width)
    print(
        f"  seed {seed}: ratio {est.mean:.5f} +- {est.half_width:.5f} "
        f"(margin over bound {margin:+.4f})"
    )
    assert margin >= 0
