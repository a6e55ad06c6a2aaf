import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kscube.corpus import LABELS, TRIPLES, standard_rays
from kscube.errors import DuplicateRay, KTooLarge
from kscube.hilbert import RaySet, canonicalize_ray
from kscube.orthograph import (
    OrthGraph,
    automorphisms,
    basis_cliques,
    build_graph,
    independent_pair_free,
    isomorphisms,
    labeled_isomorphism,
)


def oracle_edges():
    return {
        frozenset((u, v))
        for u, v in itertools.combinations(LABELS, 2)
        if sum(a * b for a, b in zip(TRIPLES[u], TRIPLES[v])) == 0
    }


def test_corpus_matches_triples():
    rs = standard_rays()
    assert rs.labels == LABELS
    for label, t in TRIPLES.items():
        assert rs[label] == canonicalize_ray(t, label=label)


def test_edges_match_dot_product_oracle():
    g = build_graph(standard_rays())
    assert {frozenset(e) for e in g.edges()} == oracle_edges()
    assert g.edge_count == 24


def test_float_realization_gives_same_graph():
    rs = standard_rays()
    floats = RaySet(tuple(canonicalize_ray([complex(c) for c in r.components], label=r.label) for r in rs))
    assert build_graph(floats).edges() == build_graph(rs).edges()


def test_triangles_match_oracle():
    g = build_graph(standard_rays())
    edges = oracle_edges()
    oracle = {
        frozenset(t) for t in itertools.combinations(LABELS, 3)
        if all(frozenset(p) in edges for p in itertools.combinations(t, 2))
    }
    found = {frozenset(b) for b in basis_cliques(g, 3)}
    assert found == oracle
    assert len(found) == 4


def test_duplicate_ray_rejected():
    rs = RaySet((canonicalize_ray([1, 1, 0], label="a"), canonicalize_ray([-2, -2, 0], label="b")))
    with pytest.raises(DuplicateRay):
        build_graph(rs)


def test_automorphisms_are_the_signed_permutations():
    g = build_graph(standard_rays())
    rs = standard_rays()
    induced = set()
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = np.zeros((3, 3), dtype=int)
            for i, j in enumerate(perm):
                m[i, j] = signs[i]
            image = {}
            for r in rs:
                target = canonicalize_ray([int(x) for x in m @ np.array(TRIPLES[r.label])])
                image[r.label] = next(s.label for s in rs if s == target.relabel(s.label))
            induced.add(tuple(sorted(image.items())))
    found = {tuple(sorted(a.items())) for a in automorphisms(g)}
    assert found == induced
    assert len(found) == 24


def test_automorphisms_closed_under_composition():
    auts = automorphisms(build_graph(standard_rays()))
    keys = {tuple(sorted(a.items())) for a in auts}
    for a, b in itertools.product(auts[:6], auts):
        comp = {v: a[b[v]] for v in b}
        assert tuple(sorted(comp.items())) in keys


@given(st.permutations(list(LABELS)))
@settings(max_examples=25, deadline=None)
def test_isomorphism_under_reordering(order):
    g = build_graph(standard_rays())
    h = g.reorder(order)
    iso = labeled_isomorphism(g, h)
    assert iso == {v: v for v in LABELS}


def test_isomorphism_under_relabeling():
    g = build_graph(standard_rays())
    rng = random.Random(5)
    names = [f"r{i}" for i in range(13)]
    rng.shuffle(names)
    rename = dict(zip(LABELS, names))
    h = OrthGraph.from_edges(sorted(names), [(rename[u], rename[v]) for u, v in g.edges()])
    iso = labeled_isomorphism(g, h)
    assert iso is not None
    assert all(h.adjacent(iso[u], iso[v]) for u, v in g.edges())


def test_no_isomorphism_after_edge_removal():
    g = build_graph(standard_rays())
    (u, v), *rest = g.edges()
    h = OrthGraph.from_edges(g.vertices, rest)
    assert next(isomorphisms(g, h), None) is None


def test_independent_pair_free_against_oracle():
    g = build_graph(standard_rays())
    deg4 = [v for v in LABELS if g.degree(v) == 4]
    assert len(deg4) == 9
    oracle = all(any(g.adjacent(a, b) for a, b in itertools.combinations(s, 2)) for s in itertools.combinations(deg4, 4))
    assert oracle
    assert independent_pair_free(g, deg4, 4)
    # An independent triple exists, so k = 4 is the smallest k that works.
    assert not independent_pair_free(g, deg4, 3)


def test_k_too_large():
    g = build_graph(standard_rays())
    with pytest.raises(KTooLarge):
        independent_pair_free(g, ["z1", "z2"], 3)


def test_degree_multiset():
    assert build_graph(standard_rays()).degree_multiset() == {4: 9, 3: 4}
