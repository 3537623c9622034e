import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from defectcalc.errors import DimensionMismatch, InputError, Singular
from defectcalc.linalg import (
    DEFAULT_TOL,
    GramSchmidt,
    Tolerance,
    as_matrix,
    direct_sum,
    fro,
    identity,
    inverse,
    kron,
    nilpotent_jordan,
    rank_of_family,
)

from conftest import I, N

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def cmat(n):
    return arrays(np.float64, (2, n, n), elements=finite).map(lambda a: a[0] + 1j * a[1])


def test_default_tolerance_values():
    assert DEFAULT_TOL.abs_floor == 1e-12 and DEFAULT_TOL.rel == 1e-9
    assert DEFAULT_TOL.threshold(0.0) == 1e-12
    assert DEFAULT_TOL.threshold(1e6) == pytest.approx(1e-3)


def test_tolerance_rejects_negative():
    with pytest.raises(InputError):
        Tolerance(rel=-1)


def test_as_matrix_validation():
    with pytest.raises(DimensionMismatch):
        as_matrix(np.zeros((2, 3)))
    with pytest.raises(InputError):
        as_matrix([[np.nan]])
    frozen = as_matrix(I(2), frozen=True)
    assert not frozen.flags.writeable and frozen.dtype == np.complex128


def test_kron_identity_gives_block_diagonal():
    m = np.array([[1, 2j], [3, 4]])
    assert np.array_equal(kron(I(2), m), direct_sum(m, m))


def test_kron_of_nilpotents_has_single_corner_entry():
    k = kron(N(2), N(2))
    expected = np.zeros((4, 4))
    expected[0, 3] = 1
    assert np.array_equal(k, expected)


@given(cmat(2), cmat(2), cmat(2), cmat(2))
def test_kron_mixed_product(a, b, c, d):
    lhs = kron(a, b) @ kron(c, d)
    rhs = kron(a @ c, b @ d)
    assert fro(lhs - rhs) <= 1e-12 * max(1.0, fro(kron(a, b)) * fro(kron(c, d)))


def test_direct_sum_examples():
    assert np.array_equal(direct_sum([[1]], [[1]]), I(2))
    a = np.array([[1, 2], [3, 4j]])
    assert np.array_equal(direct_sum(a, I(2)) @ direct_sum(I(2), a), direct_sum(a, a))


@given(cmat(2), cmat(2))
def test_direct_sum_block_multiplication(a, b):
    lhs = direct_sum(a, I(2)) @ direct_sum(b, I(2))
    assert np.allclose(lhs, direct_sum(a @ b, I(2)), atol=1e-12)


def test_inverse_examples():
    assert np.array_equal(inverse(I(3)), I(3))
    assert np.allclose(inverse(I(2) + N(2)), I(2) - N(2), atol=0)
    with pytest.raises(Singular):
        inverse(N(2))


@given(cmat(3))
def test_inverse_is_two_sided(a):
    a = a + 4 * I(3)  # keep it away from singular
    try:
        x = inverse(a)
    except Singular:
        return
    scale = fro(a) * fro(x)
    assert fro(a @ x - I(3)) <= 1e-12 * scale
    assert fro(x @ a - I(3)) <= 1e-12 * scale


def test_inverse_does_not_mutate():
    a = I(2) + N(2)
    before = a.copy()
    inverse(a)
    assert np.array_equal(a, before)


def test_rank_examples():
    assert rank_of_family([I(2)]) == 1
    n3 = nilpotent_jordan(3)
    assert rank_of_family([identity(3), n3, n3 @ n3]) == 3
    assert rank_of_family([I(2), 2 * I(2)]) == 1
    with pytest.raises(DimensionMismatch):
        rank_of_family([I(2), I(3)])
    with pytest.raises(InputError):
        rank_of_family([])


@given(st.lists(cmat(2), min_size=1, max_size=5), st.randoms(use_true_random=False),
       st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_rank_invariances(vs, rnd, c):
    r = rank_of_family(vs)
    shuffled = list(vs)
    rnd.shuffle(shuffled)
    scaled = [c * v for v in vs]
    # a family of generic 2x2 matrices has rank min(len, 4) unless it is degenerate
    assert r <= min(len(vs), 4)
    assert rank_of_family(shuffled) == r or _near_degenerate(vs)
    assert rank_of_family(scaled) == r or _near_degenerate(vs)


def _near_degenerate(vs):
    s = np.linalg.svd(np.array([v.ravel() for v in vs]), compute_uv=False)
    return s[-1] <= 1e-6 * s[0] if s[0] > 0 else True


def test_gram_schmidt_least_squares():
    gs = GramSchmidt()
    basis = [np.array([1, 0, 0], complex), np.array([1, 1, 0], complex)]
    for b in basis:
        gs.append(*gs.project(b))
    res, h = gs.project(np.array([3, 2, 0], complex))
    assert np.linalg.norm(res) < 1e-15
    assert np.allclose(gs.solve(h), [1, 2])
