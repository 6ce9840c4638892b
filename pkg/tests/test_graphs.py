import pytest

from ranking_forge.graphs import (
    SizeLimitError,
    backup_counterexample_graph,
    generate_family,
    graph_from_json,
    graph_from_text,
    graph_to_json,
    graph_to_text,
    is_matching,
    make_graph,
    matching_size_bruteforce,
    maximum_matching,
    maximum_matching_size,
)


def test_make_graph_canonicalizes_and_collapses():
    g = make_graph(4, [(1, 0), (0, 1), (2, 3)])
    assert g.edges == frozenset({(0, 1), (2, 3)})
    assert g.neighbors(0) == (1,)


def test_make_graph_rejects_self_loop_naming_pair():
    with pytest.raises(ValueError, match=r"\(2, 2\)"):
        make_graph(3, [(0, 1), (2, 2)])


def test_make_graph_rejects_out_of_range_naming_pair():
    with pytest.raises(ValueError, match=r"\(1, 7\)"):
        make_graph(3, [(1, 7)])


def test_k2_and_p4_shapes(k2, p4):
    assert len(k2.edges) == 1
    assert sorted(p4.edges) == [(0, 1), (1, 2), (2, 3)]


def test_counterexample_graph_layout(cex):
    assert cex.n == 5
    assert cex.edges == frozenset({(0, 2), (0, 3), (0, 4), (1, 3)})
    assert maximum_matching_size(cex) == 2
    assert matching_size_bruteforce(cex) == 2


def test_matching_sizes_on_known_graphs(p4):
    assert maximum_matching_size(p4) == 2
    assert maximum_matching_size(generate_family("cycle", n=5)) == 2
    assert maximum_matching_size(generate_family("complete", n=4)) == 2
    assert maximum_matching_size(generate_family("complete_bipartite", n=6)) == 3


def test_maximum_matching_is_a_matching(p4, cex):
    for g in (p4, cex):
        m = maximum_matching(g)
        assert is_matching(g, m)
        assert len(m) == maximum_matching_size(g)


def test_exact_search_agrees_with_subset_enumeration():
    # Sparse graphs up to 8 vertices; the subset oracle is the independent
    # route.
    cases = [
        generate_family("path", n=8),
        generate_family("cycle", n=7),
        generate_family("complete_bipartite", n=6),
        generate_family("random_with_perfect_matching", n=8, density=0.15, seed=3),
        generate_family("random_with_perfect_matching", n=8, density=0.2, seed=11),
    ]
    for g in cases:
        assert maximum_matching_size(g) == matching_size_bruteforce(g)


def test_exact_search_agrees_on_every_small_connected_graph():
    from ranking_forge.experiments import connected_graphs_upto

    for g in connected_graphs_upto(5):
        assert maximum_matching_size(g) == matching_size_bruteforce(g)


def test_designated_pairs():
    from ranking_forge.graphs import designated_pairs

    g = generate_family("path", n=4)
    assert designated_pairs(g) == [(0, 1), (1, 0), (2, 3), (3, 2)]
    with pytest.raises(ValueError):
        designated_pairs(make_graph(2, [(0, 1)]))


def test_size_limit_error():
    g = generate_family("path", n=30)
    with pytest.raises(SizeLimitError):
        maximum_matching_size(g)
    assert maximum_matching_size(g, limit=30) == 15


def test_generate_family_determinism_and_planted_matching():
    a = generate_family("random_with_perfect_matching", n=8, density=0.3, seed=7)
    b = generate_family("random_with_perfect_matching", n=8, density=0.3, seed=7)
    assert a.edges == b.edges and a.m_star == b.m_star
    assert len(a.m_star) == 4
    assert maximum_matching_size(a) == 4  # planted matching is perfect


def test_generate_family_errors():
    with pytest.raises(ValueError):
        generate_family("random_with_perfect_matching", n=7, density=0.3, seed=1)
    with pytest.raises(ValueError, match="unknown family"):
        generate_family("mystery", n=4)


def test_m_star_validation():
    with pytest.raises(ValueError, match="matching"):
        make_graph(4, [(0, 1), (1, 2)], m_star=[(0, 1), (1, 2)])


def test_text_serialization_round_trip(cex):
    text = graph_to_text(cex)
    assert text.splitlines()[0] == "5 4"
    g2 = graph_from_text(text)
    assert g2.n == cex.n and g2.edges == cex.edges


def test_json_serialization_round_trip(cex):
    g2 = graph_from_json(graph_to_json(cex))
    assert g2.edges == cex.edges and g2.m_star == cex.m_star


def test_graphs_are_immutable(p4):
    with pytest.raises(Exception):
        p4.n = 7
