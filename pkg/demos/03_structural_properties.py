"""Structural anatomy of one-vertex perturbations.

The five-vertex counterexample graph (u=0, u1=1, v=2, v1=3, w=4) is the
instance showing a matched vertex's *backup* -- who it would marry if its
match disappeared -- need not be an unmatched neighbor.  The demotion lemma
pins u's match in place while it stays ahead of the backup; past the backup,
the match jumps.
"""

from ranking_forge import (
    compute_backup,
    compute_profile,
    check_monotonicity,
    enumerate_equivalence_class,
    extract_alternating_path,
    run_ranking,
)
from ranking_forge.graphs import backup_counterexample_graph
from ranking_forge.ranks import RankVector

g = backup_counterexample_graph()
order = [0, 1, 2, 3, 4]
print("matching:", sorted(run_ranking(g, order).matching))
backup = compute_backup(g, order, 0)
print(f"backup of u=0 is {backup} (v1), itself matched to u1")

vec = RankVector(5, {i: (i + 1, 1) for i in range(5)})
profile, label = compute_profile(g, vec, 0)
print(f"profile of u: {tuple(profile)}  class: {label.value}")

print("\nAlternating path after deleting u1=1 (full run vs frozen run):")
path = extract_alternating_path(g, order, 1, (9, 9))
print(f"  vertices {path.vertices}, edge sources {path.sources}")

print("\nDemoting u's match v=2 slot by slot:")
report = check_monotonicity(g, vec, 0)
for check in report.checks:
    where = check.details.get("slot")
    if check.claim == "demote-below-backup":
        print(f"  v -> {where}: match preserved, backup still at bucket 4")
    else:
        partner = check.details.get("observed_partner")
        print(f"  v -> {where}: past the backup, u now matches {partner}")
assert report.ok

members, structure = enumerate_equivalence_class(g, vec, 0)
print(
    f"\nequivalence class of the vector: {len(members)} members, "
    f"slots {structure.member_slots[0]}..{structure.member_slots[-1]} "
    f"(strictly before the backup)"
)
