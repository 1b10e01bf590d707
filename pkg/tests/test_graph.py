import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _util import complete, random_graph
from modmax.bench import builtin_graph
from modmax.graph import (
    GAMMA_ONE,
    Graph,
    GraphError,
    ModularityParams,
    ModularityValue,
    ParseError,
    ParseOptions,
    barabasi_albert,
    barabasi_albert_edge_count,
    erdos_renyi,
    format_edge_list,
    modularity,
    modularity_entry,
    modularity_numerator,
    modularity_scale,
    parse_edge_list,
    parse_partition,
    read_partition,
    write_partition,
)
from modmax.partition import canonicalize


# parsing


def test_parse_simplifies_and_counts():
    g = parse_edge_list("a b\nb c\na b\nc c")
    assert (g.n, g.m) == (3, 2)
    assert g.loops_dropped == 1
    assert g.duplicates_collapsed == 1
    assert g.labels == ("a", "b", "c")


def test_parse_empty_input_is_an_error():
    with pytest.raises(ParseError, match="empty"):
        parse_edge_list("")


def test_parse_reports_line_number():
    with pytest.raises(ParseError) as err:
        parse_edge_list("a b\n# note\nb c d\n")
    assert err.value.line == 3


def test_parse_extra_columns_can_be_ignored():
    g = parse_edge_list("a b 0.5\nb c 1.0\n", ParseOptions(ignore_extra_columns=True))
    assert g.m == 2


def test_parse_commas_comments_and_stream():
    g = parse_edge_list(io.StringIO("% header\n1,2\n2, 3\n\n# c\n3 1\n"))
    assert (g.n, g.m) == (3, 3)


def test_karate_counts():
    g = builtin_graph("karate")
    assert (g.n, g.m) == (34, 78)
    assert sum(g.degrees) == 2 * g.m


def test_bundled_corpus_counts():
    assert (builtin_graph("florentine_families").m, builtin_graph("lesmis").m) == (20, 254)
    usa = builtin_graph("contiguous_usa")
    assert (usa.n, usa.m) == (49, 107)


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=40))
def test_parse_format_round_trip(pairs):
    text = "".join(f"n{a} n{b}\n" for a, b in pairs)
    g = parse_edge_list(text)
    if all(a == b for a, b in pairs):
        # only self-loops: nodes survive, edges do not
        assert g.m == 0 and g.loops_dropped == len(pairs)
        return
    h = parse_edge_list(format_edge_list(g))
    label_edges = lambda x: {frozenset((x.labels[i], x.labels[j])) for i, j in x.edges}  # noqa: E731
    assert label_edges(g) == label_edges(h)
    assert sum(g.degrees) == 2 * g.m
    assert all(i < j for i, j in g.edges)


# generators


def test_er_forced_complete_graph():
    g = erdos_renyi(4, 6, seed=123)
    assert g.m == 6 and all(d == 3 for d in g.degrees)


def test_er_contract_and_determinism():
    g = erdos_renyi(40, 140, seed=7)
    assert g.m == 140 and len(set(g.edges)) == 140
    assert all(i != j for i, j in g.edges)
    assert erdos_renyi(40, 140, seed=7).edges == g.edges


def test_er_rejects_too_many_edges():
    with pytest.raises(GraphError):
        erdos_renyi(4, 7, seed=0)


def test_ba_small_and_closed_form():
    assert barabasi_albert(3, 1, seed=5).m == 2
    g = barabasi_albert(45, 3, seed=1)
    assert g.m == 129 == barabasi_albert_edge_count(45, 3)
    assert barabasi_albert(45, 3, seed=1).edges == g.edges


@pytest.mark.parametrize("n,attach", [(5, 0), (5, 5)])
def test_ba_rejects_bad_attach(n, attach):
    with pytest.raises(GraphError):
        barabasi_albert(n, attach, seed=0)


@settings(max_examples=30)
@given(st.integers(4, 40), st.data())
def test_ba_edge_count_formula(n, data):
    attach = data.draw(st.integers(1, n - 1))
    assert barabasi_albert(n, attach, seed=n).m == barabasi_albert_edge_count(n, attach)


# modularity


def test_k3_singletons_and_diagonal_entry():
    g = complete(3)
    assert modularity(g, [0, 1, 2]).as_fraction() == Fraction(-1, 3)
    assert modularity_entry(g, 0, 0) == -4
    assert modularity_scale(g) == 36


def test_entry_for_pendant_pair():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert modularity_entry(g, 0, 1) == 2 * g.m - 1


def test_entry_out_of_range():
    with pytest.raises(GraphError):
        modularity_entry(complete(3), 0, 3)


def test_partition_size_mismatch():
    with pytest.raises(GraphError):
        modularity(complete(3), [0, 0])


def test_empty_graph_is_degenerate_zero():
    g = Graph.from_edges(3, [])
    assert modularity(g, [0, 1, 2]).numerator == 0


def _direct_numerator(g, membership, params):
    # double loop over all ordered pairs, straight from the definition
    adj = {(i, j) for i, j in g.edges} | {(j, i) for i, j in g.edges}
    total = 0
    for i in range(g.n):
        for j in range(g.n):
            if membership[i] == membership[j]:
                a = 1 if (i, j) in adj else 0
                total += 2 * g.m * params.q * a - params.p * g.degrees[i] * g.degrees[j]
    return total


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(1, 5), st.integers(1, 5))
def test_numerator_matches_double_loop(seed, p, q):
    g = random_graph(seed, n_max=10)
    if g.m == 0:
        return
    params = ModularityParams(p, q)
    rng = random.Random(seed)
    memb = [rng.randrange(4) for _ in range(g.n)]
    assert modularity_numerator(g, memb, params) == _direct_numerator(g, memb, params)
    # relabelling communities leaves Q unchanged
    assert modularity(g, canonicalize(memb), params) == modularity(g, memb, params)


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_entries_symmetric_and_sum(seed):
    g = random_graph(seed, n_max=9)
    if g.m == 0:
        return
    params = ModularityParams(3, 2)
    total = 0
    for i in range(g.n):
        for j in range(g.n):
            assert modularity_entry(g, i, j, params) == modularity_entry(g, j, i, params)
            total += modularity_entry(g, i, j, params)
    assert total == (2 * g.m) ** 2 * params.q - params.p * (2 * g.m) ** 2


def test_params_parse():
    assert ModularityParams.parse("2/4") == ModularityParams(1, 2)
    assert ModularityParams.parse("0.75") == ModularityParams(3, 4)
    assert ModularityParams.parse("1") is not None and GAMMA_ONE.gamma == 1
    for bad in ("0", "-1/2", "x", "1/0"):
        with pytest.raises(GraphError):
            ModularityParams.parse(bad)


def test_modularity_value_exact_comparison():
    a, b = ModularityValue(1, 3), ModularityValue(2, 6)
    assert a == b and hash(a) == hash(b)
    assert ModularityValue(1, 4) < a
    assert (a + ModularityValue(1, 3)).as_fraction() == Fraction(2, 3)


# partition files


def test_partition_file_round_trip(tmp_path):
    g = parse_edge_list("x y\ny z\n")
    write_partition(g, [0, 0, 1], tmp_path / "p.tsv")
    assert read_partition(g, tmp_path / "p.tsv") == [0, 0, 1]


def test_partition_file_errors():
    g = parse_edge_list("x y\ny z\n")
    with pytest.raises(ParseError) as err:
        parse_partition(g, "x\t0\nw\t1\n")
    assert err.value.line == 2
    with pytest.raises(ParseError, match="missing"):
        parse_partition(g, "x\t0\n")
