import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _util import complete, random_graph, two_triangles
from modmax.exact import (
    Budget,
    FormulationError,
    InfeasibleError,
    Mode,
    OptimaSet,
    Status,
    brute_force_optimum,
    build_model,
    enumerate_all_optima,
    extract_partition,
    solve_exact,
    verify_certificate,
)
from modmax.graph import Graph, GraphError, ModularityParams, erdos_renyi, modularity_numerator
from modmax.partition import Partition, canonicalize

# P3 (0-1-2) at scale 4m^2 = 16, evaluated by hand over its five partitions:
# {012}: 0   {01}{2}: -2   {0}{12}: -2   {02}{1}: -8   {0}{1}{2}: -6
P3_Q_STAR = 0
P3_OPTIMA = [(0, 0, 0)]

STAR3 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


# model construction


def test_k3_full_counts():
    model = build_model(complete(3), mode=Mode.FULL)
    assert model.num_vars == 3
    assert model.constraint_count() == 3 == len(list(model.constraints()))


def test_two_triangle_full_count_by_enumeration():
    model = build_model(two_triangles(), mode=Mode.FULL)
    rows = set(model.constraints())
    # independent count: every triple, each of its three members as the apex k
    expected = {(min(a, b), max(a, b), k)
                for t in itertools.combinations(range(6), 3)
                for k in t for a, b in [tuple(v for v in t if v != k)]}
    assert rows == expected and model.constraint_count() == 60


def test_star_separators():
    model = build_model(STAR3, mode=Mode.REDUCED)
    for i, j in itertools.combinations([1, 2, 3], 2):
        assert model.separators[(i, j)] == (0,)
    assert all(model.separators.values())


def test_build_model_rejects_edgeless():
    with pytest.raises(GraphError):
        build_model(Graph.from_edges(3, []))


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.sampled_from(list(Mode)))
def test_objective_matches_modularity(seed, mode):
    g = random_graph(seed, n_max=9)
    if g.m == 0:
        return
    params = ModularityParams(seed % 3 + 1, seed % 2 + 1)
    model = build_model(g, params, mode)
    rng = random.Random(seed)
    memb = [rng.randrange(3) for _ in range(g.n)]
    x = model.x_of(memb)
    assert model.is_feasible(x)
    assert model.objective(x) == modularity_numerator(g, memb, params)


# extraction


def test_extract_trivial_vectors():
    model = build_model(two_triangles(), mode=Mode.FULL)
    assert extract_partition(model, [1] * model.num_vars).k == 6
    assert extract_partition(model, [0] * model.num_vars).k == 1
    x = model.x_of([0, 0, 0, 1, 1, 1])
    assert extract_partition(model, x).membership == (0, 0, 0, 1, 1, 1)


def test_extract_rejects_infeasible():
    model = build_model(complete(3), mode=Mode.FULL)
    with pytest.raises(InfeasibleError):
        extract_partition(model, [0, 0, 1])  # 0~1, 0~2 but 1 !~ 2


def test_extract_reports_formulation_error():
    model = build_model(complete(3), mode=Mode.FULL)
    broken = replace(model, constant=model.constant + 10**6)
    with pytest.raises(FormulationError):
        extract_partition(broken, [0, 0, 0])


@pytest.mark.parametrize("seed", range(40))
def test_reduced_extraction_is_sound(seed):
    g = random_graph(seed, n_max=6)
    if g.m == 0:
        return
    model = build_model(g, mode=Mode.REDUCED)
    rng = random.Random(seed)
    found = 0
    for _ in range(400):
        x = [rng.randrange(2) for _ in range(model.num_vars)]
        if not model.is_feasible(x):
            continue
        found += 1
        part = extract_partition(model, x)
        assert modularity_numerator(g, part.membership) >= model.objective(x)
    assert found > 0


# brute force and certified solves


def test_brute_force_small_cases():
    k3 = brute_force_optimum(complete(3))
    assert k3.q_star.numerator == 0 and [p.membership for p in k3.partitions] == [(0, 0, 0)]
    p3 = brute_force_optimum(path3())
    assert p3.q_star.numerator == P3_Q_STAR and p3.q_star.scale == 16
    assert [p.membership for p in p3.partitions] == P3_OPTIMA
    one = brute_force_optimum(Graph.from_edges(1, []))
    assert one.q_star.numerator == 0 and one.best.membership == (0,)


@pytest.mark.parametrize("mode", list(Mode))
@pytest.mark.parametrize("bound", ["lp", "combinatorial"])
def test_solve_known_optima(mode, bound):
    res = solve_exact(build_model(complete(3), mode=mode), bound=bound)
    assert res.certificate.status is Status.OPTIMAL and res.q_star.numerator == 0
    assert res.best.membership == (0, 0, 0)
    res = solve_exact(build_model(two_triangles(), mode=mode), bound=bound)
    assert res.q_star.as_fraction() == 0.5
    assert res.best.membership == (0, 0, 0, 1, 1, 1)
    k2 = enumerate_all_optima(build_model(Graph.from_edges(2, [(0, 1)]), mode=mode), bound=bound)
    assert k2.multiplicity == 1 and k2.best.membership == (0, 0)
    p3 = enumerate_all_optima(build_model(path3(), mode=mode), bound=bound)
    assert [p.membership for p in p3.partitions] == P3_OPTIMA


def test_isolated_nodes_are_expanded():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2)])
    res = enumerate_all_optima(build_model(g))
    truth = brute_force_optimum(g)
    assert set(res.partitions) == set(truth.partitions)
    # the triangle block plus two free nodes: Bell(3) = 5 placements
    assert res.multiplicity == 5


@pytest.mark.parametrize("seed", range(30))
def test_oracle_equivalence_sample(seed):
    g = random_graph(seed + 1000, n_max=7)
    if g.m == 0:
        return
    params = ModularityParams(1 + seed % 2, 1 + (seed // 2) % 2)
    truth = brute_force_optimum(g, params)
    for mode in Mode:
        res = enumerate_all_optima(build_model(g, params, mode))
        assert res.q_star == truth.q_star
        assert set(res.partitions) == set(truth.partitions)
        assert verify_certificate(g, params, res)


def test_certificate_trace_is_monotone():
    g = erdos_renyi(16, 40, seed=3)
    trace = []
    res = solve_exact(build_model(g), trace=trace)
    assert trace
    bounds = [b for _, b in trace]
    assert all(b1 >= b2 for b1, b2 in zip(bounds, bounds[1:]))
    assert all(b >= best for best, b in trace)
    assert res.certificate.bound == res.certificate.best


def test_budget_exhaustion_is_honest():
    g = erdos_renyi(40, 140, seed=7)
    res = solve_exact(build_model(g), Budget(node_limit=1))
    cert = res.certificate
    assert cert.status is Status.NODE_LIMIT
    assert cert.bound > cert.best and not cert.exhaustive
    assert verify_certificate(g, ModularityParams(), res)
    res = solve_exact(build_model(g), Budget(time_limit=1e-4))
    assert res.certificate.status is Status.TIME_LIMIT
    assert res.certificate.bound >= res.certificate.best


def test_determinism():
    g = erdos_renyi(14, 30, seed=5)
    a = enumerate_all_optima(build_model(g))
    b = enumerate_all_optima(build_model(g))
    assert a.partitions == b.partitions and a.q_star == b.q_star


def test_certificate_dict_round_trip():
    res = solve_exact(build_model(two_triangles()))
    cert = res.certificate
    assert type(cert).from_dict(cert.to_dict()) == cert


# verification


def test_verify_certificate_catches_problems():
    g = two_triangles()
    res = solve_exact(build_model(g))
    params = ModularityParams()
    assert verify_certificate(g, params, res).ok
    perturbed = OptimaSet(res.q_star, (Partition((0, 0, 1, 1, 1, 1)),), res.certificate)
    rep = verify_certificate(g, params, perturbed)
    assert not rep.ok and any("numerator mismatch" in f for f in rep.failures)
    bad = replace(res.certificate, status=Status.TIME_LIMIT, bound=res.certificate.best - 1,
                  exhaustive=False)
    rep = verify_certificate(g, params, OptimaSet(res.q_star, res.partitions, bad))
    assert not rep.ok and any("below best" in f for f in rep.failures)
    dup = OptimaSet(res.q_star, (res.best, canonicalize(res.best.membership)), res.certificate)
    assert not verify_certificate(g, params, dup).ok
