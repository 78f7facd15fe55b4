import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from spectower.graphs import (
    Graph,
    GraphFamily,
    GraphParseError,
    new_edges_at,
    parse_graph,
    prefix,
    render_graph,
)

ALL_FAMILIES = [
    GraphFamily(kind="path"),
    GraphFamily(kind="star"),
    GraphFamily(kind="complete"),
    GraphFamily(kind="empty"),
    GraphFamily(kind="binary_tree"),
    GraphFamily(kind="random", seed=7, edge_probability=0.5),
    GraphFamily(kind="random", seed=1, edge_probability=0.4),
    GraphFamily(
        kind="explicit",
        base=Graph(4, frozenset({(1, 3), (2, 4)})),
        tail="isolated",
    ),
    GraphFamily(
        kind="explicit",
        base=Graph(4, frozenset({(1, 3), (2, 4)})),
        tail="path-continue",
    ),
]


def test_path_prefix():
    assert prefix(GraphFamily(kind="path"), 3).edges == {(1, 2), (2, 3)}


def test_star_single_vertex():
    g = prefix(GraphFamily(kind="star"), 1)
    assert g.n_vertices == 1
    assert g.edges == frozenset()


def test_random_prefix_is_induced_restriction():
    fam = GraphFamily(kind="random", seed=7, edge_probability=0.5)
    g5 = prefix(fam, 5)
    g4 = prefix(fam, 4)
    assert g4 == g5.restrict(4)


@pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.label())
def test_prefix_consistency_exhaustive(family):
    previous = prefix(family, 1)
    for n in range(1, 65):
        nxt = prefix(family, n + 1)
        assert nxt.restrict(n) == previous
        previous = nxt


@pytest.mark.parametrize("family", ALL_FAMILIES, ids=lambda f: f.label())
def test_new_edges_disjoint_union(family):
    for n in range(2, 33):
        new = new_edges_at(family, n)
        assert all(j == n for _, j in new)
        assert len(new) == len(set(new))
        older = prefix(family, n - 1).edges
        assert older.isdisjoint(new)
        assert older | set(new) == prefix(family, n).edges


def test_new_edges_examples():
    assert new_edges_at(GraphFamily(kind="path"), 4) == [(3, 4)]
    assert new_edges_at(GraphFamily(kind="complete"), 3) == [(1, 3), (2, 3)]
    assert new_edges_at(GraphFamily(kind="empty"), 9) == []


def test_binary_tree_structure():
    g = prefix(GraphFamily(kind="binary_tree"), 7)
    assert g.edges == {(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)}


def test_explicit_tails():
    base = Graph(3, frozenset({(1, 2)}))
    isolated = GraphFamily(kind="explicit", base=base, tail="isolated")
    assert prefix(isolated, 6).edges == {(1, 2)}
    chained = GraphFamily(kind="explicit", base=base, tail="path-continue")
    assert prefix(chained, 6).edges == {(1, 2), (3, 4), (4, 5), (5, 6)}


def test_random_family_is_deterministic():
    a = prefix(GraphFamily(kind="random", seed=11, edge_probability=0.3), 20)
    b = prefix(GraphFamily(kind="random", seed=11, edge_probability=0.3), 20)
    assert a == b
    c = prefix(GraphFamily(kind="random", seed=12, edge_probability=0.3), 20)
    assert a != c


def test_parse_examples():
    assert parse_graph("3\n1 2\n2 3\n") == Graph(3, frozenset({(1, 2), (2, 3)}))
    assert parse_graph("1\n") == Graph(1, frozenset())


def test_parse_comments_and_order():
    g = parse_graph("# header\n4\n3 1  # reversed endpoints are fine\n\n2 4\n")
    assert g == Graph(4, frozenset({(1, 3), (2, 4)}))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("2\n2 2\n", "self-loop"),
        ("2\n1 3\n", "out of range"),
        ("2\nfoo bar\n", "not integers"),
        ("2\n1 2 3\n", "expected 'i j'"),
        ("", "vertex count missing"),
        ("0\n", "must be positive"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(GraphParseError) as err:
        parse_graph(text)
    assert fragment in str(err.value)


def test_parse_error_names_line():
    with pytest.raises(GraphParseError, match="line 3"):
        parse_graph("3\n1 2\n2 2\n")


@given(
    n=hst.integers(min_value=1, max_value=12),
    picks=hst.sets(hst.tuples(hst.integers(1, 12), hst.integers(1, 12))),
)
@settings(max_examples=60, deadline=None)
def test_render_parse_round_trip(n, picks):
    edges = frozenset(
        (min(i, j), max(i, j)) for i, j in picks if i != j and i <= n and j <= n
    )
    g = Graph(n, edges)
    assert parse_graph(render_graph(g)) == g


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(0, frozenset())
    with pytest.raises(ValueError):
        Graph(3, frozenset({(2, 2)}))
    with pytest.raises(ValueError):
        Graph(3, frozenset({(1, 4)}))
    with pytest.raises(ValueError):
        GraphFamily(kind="nonsense")
    with pytest.raises(ValueError):
        GraphFamily(kind="random", edge_probability=1.5)
    with pytest.raises(ValueError):
        GraphFamily(kind="explicit", base=None)
