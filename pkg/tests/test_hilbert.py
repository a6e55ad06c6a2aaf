from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kscube.errors import DimensionMismatch, InputError, NotAState, NotHermitian, TooLarge, ZeroVector
from kscube.hilbert import (
    Operator,
    Ray,
    RaySet,
    canonicalize_ray,
    expectation,
    identity_multiple,
    inner_product,
    linear_combination,
    maximally_mixed,
    observable,
    projector,
    pure_state,
    validate_density,
)

small_ints = st.integers(-6, 6)
int_vectors = st.lists(small_ints, min_size=3, max_size=3).filter(any)
nonzero_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda f: f != 0)


def test_canonical_exact_form():
    r = canonicalize_ray([Fraction(-2, 3), Fraction(4, 3), 0])
    assert r.components == (1, -2, 0)
    assert all(isinstance(c, Fraction) for c in r.components)


def test_canonical_float_form():
    r = canonicalize_ray([0, 1j, 1j])
    v = r.vector()
    assert abs(np.linalg.norm(v) - 1) < 1e-15
    assert v[1].imag == 0 and v[1].real > 0


def test_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        canonicalize_ray([0, 0, 0])


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        canonicalize_ray([1, 0], dimension=3)
    with pytest.raises(TooLarge):
        canonicalize_ray([1] + [0] * 8)
    with pytest.raises(DimensionMismatch):
        RaySet((canonicalize_ray([1, 0], label="a"), canonicalize_ray([1, 0, 0], label="b")))


def test_duplicate_labels():
    with pytest.raises(InputError):
        RaySet((canonicalize_ray([1, 0, 0], label="a"), canonicalize_ray([0, 1, 0], label="a")))


@given(int_vectors, nonzero_fracs)
def test_scale_invariance_exact(v, c):
    assert canonicalize_ray(v) == canonicalize_ray([c * x for x in v])


@given(int_vectors, st.floats(0, 2 * np.pi), st.floats(0.1, 10))
def test_scale_invariance_float(v, theta, mag):
    a = canonicalize_ray([complex(x) for x in v]).vector()
    b = canonicalize_ray([mag * np.exp(1j * theta) * x for x in v]).vector()
    assert np.allclose(a, b, atol=1e-12)


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=3, max_size=3))
def test_float_canonicalization_idempotent(v):
    if max(abs(x) for x in v) < 1e-3:
        return
    r = canonicalize_ray(v)
    assert canonicalize_ray(r.components).components == r.components


@given(int_vectors)
def test_projector_idempotent_hermitian(v):
    p = projector(canonicalize_ray(v))
    assert p @ p == p
    assert p.dagger() == p
    assert p.trace() == 1


@given(int_vectors)
def test_observable_squares_to_identity(v):
    a = observable(canonicalize_ray(v))
    assert a @ a == Operator.identity(3)
    assert a.trace() == 1


def test_inner_product_conjugates_first_argument():
    a = Ray((1j, 0), "a")
    b = Ray((1, 0), "b")
    assert inner_product(a, b) == -1j


@given(int_vectors, int_vectors, nonzero_fracs, nonzero_fracs)
@settings(max_examples=50)
def test_expectation_linear(u, v, a, b):
    rho = pure_state([1, 2, 2])
    pu, pv = projector(canonicalize_ray(u)), projector(canonicalize_ray(v))
    lhs = expectation(pu * a + pv * b, rho)
    assert lhs == a * expectation(pu, rho) + b * expectation(pv, rho)


def test_expectation_rejects_non_hermitian():
    op = Operator.from_rows([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(NotHermitian):
        expectation(op, maximally_mixed(3))


def test_validate_density_reports_positivity_only():
    with pytest.raises(NotAState) as info:
        validate_density([[1, 0, 0], [0, 1, 0], [0, 0, -1]])
    assert info.value.violations == ["positivity"]


def test_validate_density_reports_trace():
    with pytest.raises(NotAState) as info:
        validate_density([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert info.value.violations == ["trace"]


def test_exact_psd_needs_all_principal_minors():
    # Leading minors are all zero, yet the middle diagonal entry is negative.
    with pytest.raises(NotAState) as info:
        validate_density([[0, 0, 0], [0, -1, 0], [0, 0, 2]])
    assert info.value.violations == ["positivity"]


def test_identity_multiple():
    assert identity_multiple(Operator.identity(3) * Fraction(4, 3)) == Fraction(4, 3)
    assert identity_multiple(projector(canonicalize_ray([1, 0, 0]))) is None


def test_maximally_mixed_is_exact():
    rho = maximally_mixed(3)
    assert rho.exact and rho.trace() == 1


@given(int_vectors, nonzero_fracs)
def test_integer_fast_path_matches_general_path(v, c):
    fast = canonicalize_ray(v)
    general = Ray(tuple(c * x for x in fast.components), "g")  # same line, non-integer entries
    assert projector(fast) == projector(general)
    assert observable(fast) == observable(general)


@given(st.lists(st.tuples(nonzero_fracs, int_vectors), min_size=1, max_size=5))
def test_linear_combination_matches_naive_sum(terms):
    ops = [(c, projector(canonicalize_ray(v))) for c, v in terms]
    naive = Operator.zero(3)
    for c, op in ops:
        naive = naive + op.scale(c)
    assert linear_combination(ops, 3) == naive


def test_linear_combination_mixed_scalars():
    p = projector(canonicalize_ray([1, 0, 0]))
    out = linear_combination([(Fraction(1, 2), p), (0.25, p)], 3)
    assert abs(out[0, 0] - 0.75) < 1e-15


@given(st.lists(st.lists(nonzero_fracs, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.lists(nonzero_fracs, min_size=3, max_size=3), min_size=3, max_size=3))
def test_exact_matmul_matches_schoolbook(a, b):
    got = Operator.from_rows(a) @ Operator.from_rows(b)
    want = [[sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert [list(r) for r in got.rows] == want
