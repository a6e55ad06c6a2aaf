import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kscube.bounds import (
    HVModel,
    Inequality,
    SignAssignment,
    counting_table,
    counting_value,
    classical_bound,
    graph_inequality,
    hv_expectation,
    ks_bound,
    magic_cube_inequality,
    quantum_operator,
    subset_inequality,
    value_table,
    violation_report,
)
from kscube.coloring import ColoringProblem
from kscube.corpus import H_LABELS, LABELS, TRIPLES, standard_rays
from kscube.errors import GraphMismatch, InputError, NonCommutingPair, TooLarge, WeightMismatch
from kscube.hilbert import Operator, RaySet, canonicalize_ray, maximally_mixed, pure_state
from kscube.orthograph import OrthGraph, build_graph


ORACLE_EDGES = [
    (LABELS.index(u), LABELS.index(v))
    for u, v in itertools.combinations(LABELS, 2)
    if sum(a * b for a, b in zip(TRIPLES[u], TRIPLES[v])) == 0
]


def oracle_value(signs) -> Fraction:
    # sum a_v - (1/4) sum over ordered orthogonal pairs, from the triples directly
    return sum(signs) - Fraction(sum(signs[i] * signs[j] for i, j in ORACLE_EDGES), 2)


@pytest.fixture(scope="module")
def cube():
    return magic_cube_inequality(build_graph(standard_rays()))


@pytest.fixture(scope="module")
def all_values():
    out = {}
    for signs in itertools.product((1, -1), repeat=13):
        out[signs] = oracle_value(signs)
    return out


def test_bound_matches_brute_force(cube, all_values):
    res = classical_bound(cube)
    best = max(all_values.values())
    assert res.bound == best == 8
    oracle = sorted(s for s, v in all_values.items() if v == best)
    assert res.maximizer_count == len(oracle) == 28
    assert sorted(a.signs for a in res.maximizers) == oracle


def test_value_matches_oracle(cube, all_values):
    for signs in list(all_values)[::97]:
        assert cube.value(signs) == all_values[signs]
    assert cube.value([1] * 13) == 1
    assert cube.value([-1] * 13) == -25


def test_maximizers_in_mask_order(cube):
    res = classical_bound(cube)
    masks = [a.mask for a in res.maximizers]
    assert masks == sorted(masks)


def test_parallel_matches_serial(cube):
    serial = classical_bound(cube)
    for low_bits in (4, 9):
        par = classical_bound(cube, workers=3, low_bits=low_bits)
        assert par.bound == serial.bound
        assert par.maximizers == serial.maximizers
        assert par.maximizer_count == serial.maximizer_count


def test_maximizer_cap(cube):
    res = classical_bound(cube, max_maximizers=5)
    assert len(res.maximizers) == 5 and res.truncated and res.maximizer_count == 28


def test_value_table_matches_oracle(cube, all_values):
    den, table = value_table(cube)
    for mask in range(1 << 13):
        signs = SignAssignment.from_mask(LABELS, mask).signs
        assert Fraction(int(table[mask]), den) == all_values[signs]


def test_counting_formula(cube):
    g = build_graph(standard_rays())
    den, table = value_table(cube)
    assert (table == den * counting_table(g)).all()
    for mask in range(0, 1 << 13, 61):
        a = SignAssignment.from_mask(LABELS, mask)
        assert cube.value(a) == counting_value(g, a).value


def test_magic_cube_requires_the_graph():
    g = build_graph(standard_rays().without("h0"))
    with pytest.raises(GraphMismatch):
        magic_cube_inequality(g)


def test_trivial_all_plus():
    v = [f"v{i}" for i in range(13)]
    res = classical_bound(Inequality.build(v, {x: 1 for x in v}))
    assert res.bound == 13 and res.maximizer_count == 1
    assert res.maximizers[0].signs == (1,) * 13


def test_too_large():
    v = [f"v{i}" for i in range(31)]
    with pytest.raises(TooLarge):
        classical_bound(Inequality.build(v, {x: 1 for x in v}))


@st.composite
def small_inequalities(draw):
    n = draw(st.integers(1, 7))
    verts = [f"x{i}" for i in range(n)]
    coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    lin = {v: draw(coef) for v in verts}
    quad = {p: draw(coef) for p in itertools.combinations(verts, 2) if draw(st.booleans())}
    return Inequality.build(verts, lin, quad)


@given(small_inequalities(), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_random_inequalities_brute_force(ineq, low_bits):
    vals = {s: ineq.value(s) for s in itertools.product((1, -1), repeat=len(ineq.vertices))}
    best = max(vals.values())
    res = classical_bound(ineq, low_bits=low_bits)
    assert res.bound == best
    assert res.maximizer_count == sum(1 for v in vals.values() if v == best)
    assert all(ineq.value(a) == best for a in res.maximizers)


def test_float_coefficients():
    ineq = Inequality.build(["a", "b"], {"a": 0.5, "b": 0.25}, {("a", "b"): -1.0})
    # a = +1, b = -1: 0.5 - 0.25 + 2 * (-1) * (+1) * (-1)
    assert classical_bound(ineq).bound == pytest.approx(2.25)


def test_quadratic_weight_counts_both_orders():
    ineq = Inequality.build(["a", "b"], {}, {("a", "b"): Fraction(1, 2)})
    assert ineq.value({"a": 1, "b": 1}) == 1
    assert ineq.weight("b", "a") == Fraction(1, 2)


def test_duplicate_pair_rejected():
    with pytest.raises(InputError):
        Inequality.build(["a", "b"], {}, [("a", "b", 1), ("b", "a", 1)])


def test_quantum_operator_is_state_independent(cube):
    vr = violation_report(cube, standard_rays())
    assert vr.identity_multiple == Fraction(25, 3)
    assert vr.margin == Fraction(1, 3)
    assert vr.violated_by_all_states
    assert quantum_operator(cube, standard_rays()) == Operator.identity(3) * Fraction(25, 3)


def test_quantum_value_at_states(cube):
    for rho in (maximally_mixed(3), pure_state([1, 2, 3]), pure_state([0, 1, 0])):
        vr = violation_report(cube, standard_rays(), rho=rho, bound=8)
        assert vr.state_value == Fraction(25, 3)


def test_without_h0_not_identity():
    rs = standard_rays().without("h0")
    vr = violation_report(graph_inequality(build_graph(rs)), rs)
    assert not vr.proportional_to_identity
    assert vr.classical_bound == Fraction(15, 2)


def test_non_commuting_pair():
    rs = RaySet((canonicalize_ray([1, 0, 0], label="a"), canonicalize_ray([1, 1, 0], label="b")))
    ineq = Inequality.build(["a", "b"], {}, {("a", "b"): 1})
    with pytest.raises(NonCommutingPair) as info:
        quantum_operator(ineq, rs)
    assert set(info.value.pair) == {"a", "b"}


def test_ks_h_sum_bound():
    problem = ColoringProblem.from_rays(standard_rays())
    ineq = subset_inequality(LABELS, H_LABELS)
    best, witness = ks_bound(ineq, problem)
    assert best == 1 and ineq.value(witness.as_dict()) == 1
    vr = violation_report(ineq, standard_rays())
    assert vr.identity_multiple == Fraction(4, 3) and vr.margin == Fraction(1, 3)


def test_hv_expectation_is_convex_combination(cube):
    a = SignAssignment.from_minus(LABELS, ["z1", "y2-", "y3+", "h3"])
    b = SignAssignment(LABELS, (1,) * 13)
    model = HVModel((a, b), (Fraction(1, 4), Fraction(3, 4)))
    assert hv_expectation(model, cube) == Fraction(1, 4) * 8 + Fraction(3, 4) * 1


def test_hv_weights_validated():
    a = SignAssignment(LABELS, (1,) * 13)
    with pytest.raises(WeightMismatch):
        HVModel((a,), (Fraction(1, 2),))
    with pytest.raises(WeightMismatch):
        HVModel((a, a), (Fraction(1),))


def test_sign_assignment_mask_round_trip():
    for mask in (0, 1, 4097, 8191):
        assert SignAssignment.from_mask(LABELS, mask).mask == mask
    assert SignAssignment.from_mask(LABELS, 1 << 12).minus() == ("z1",)


def test_graph_inequality_on_small_graph():
    g = OrthGraph.from_edges(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    # sum a - (1/2) sum_edges a a; best is two +1 and one -1 -> 1 + 1/2
    assert classical_bound(graph_inequality(g)).bound == Fraction(3, 2)
