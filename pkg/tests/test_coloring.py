import itertools

import pytest

from kscube.coloring import (
    ColoringProblem,
    enumerate_ks,
    iter_ks,
    ks_colorable,
    max_subset_sum,
    pairwise_h_exclusion,
    violations,
)
from kscube.corpus import H_LABELS, LABELS, standard_rays
from kscube.errors import TooLarge, Uncolorable
from kscube.orthograph import OrthGraph, build_graph


def brute_force(p: ColoringProblem) -> list[tuple[int, ...]]:
    idx = {v: i for i, v in enumerate(p.vertices)}
    edges = [(idx[u], idx[v]) for u, v in p.graph.edges()]
    bases = [[idx[v] for v in b] for b in p.bases]
    out = []
    for values in itertools.product((0, 1), repeat=len(p.vertices)):
        if all(values[a] + values[b] <= 1 for a, b in edges) and all(sum(values[i] for i in b) == 1 for b in bases):
            out.append(values)
    return out


@pytest.fixture(scope="module")
def problem():
    return ColoringProblem.from_rays(standard_rays())


@pytest.fixture(scope="module")
def oracle(problem):
    return brute_force(problem)


def test_enumeration_matches_brute_force(problem, oracle):
    assert sorted(iter_ks(problem)) == sorted(oracle)
    assert len(oracle) == 24


def test_enumeration_is_lexicographic(problem):
    got = list(iter_ks(problem))
    assert got == sorted(got)


def test_enumeration_limit(problem):
    e = enumerate_ks(problem, limit=5)
    assert e.count == 24 and len(e.assignments) == 5
    assert not violations(problem, e.assignments[0].as_dict())


def test_h_sum_at_most_one(problem, oracle):
    h = [LABELS.index(x) for x in H_LABELS]
    assert max(sum(v[i] for i in h) for v in oracle) == 1
    best, witness = max_subset_sum(problem, H_LABELS)
    assert best == 1
    assert sum(witness[x] for x in H_LABELS) == 1


def test_pinned_pairs_unsat(problem, oracle):
    report = pairwise_h_exclusion(problem)
    assert len(report.cases) == 6 and report.at_most_one
    for case in report.cases:
        a, b = (LABELS.index(x) for x in case.pair)
        assert not any(v[a] == v[b] == 1 for v in oracle)
        forced = set(case.result.forced_ones())
        assert len(forced & {"z1", "z2", "z3"}) == 2
        assert case.result.conflict


def test_pinned_single_h_is_satisfiable(problem):
    for h in H_LABELS:
        res = ks_colorable(problem, {h: 1})
        assert not res.unsat and res.witness[h] == 1


def test_violations_names_broken_constraints(problem):
    values = {v: 0 for v in LABELS}
    msgs = violations(problem, values)
    assert len(msgs) == 4


def test_uncolorable_k4():
    # K4 with every triangle a basis: each basis needs a 1 but only one vertex may carry it.
    g = OrthGraph.from_edges(
        ["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("a", "c"), ("a", "d"), ("b", "d"), ("c", "d")]
    )
    p = ColoringProblem(g, (("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")))
    assert brute_force(p) == []
    assert ks_colorable(p).unsat
    with pytest.raises(Uncolorable):
        max_subset_sum(p, ["a"])


def test_too_large():
    g = OrthGraph.from_edges([f"v{i}" for i in range(31)], [])
    with pytest.raises(TooLarge):
        list(iter_ks(ColoringProblem(g, ())))


def test_search_agrees_with_enumeration_on_subgraphs(problem):
    rs = standard_rays()
    for drop in LABELS:
        sub = ColoringProblem.from_rays(rs.without(drop))
        assert ks_colorable(sub).unsat == (brute_force(sub) == [])


def test_basis_problem_from_graph():
    g = build_graph(standard_rays())
    assert len(ColoringProblem.from_graph(g, 3).bases) == 4
