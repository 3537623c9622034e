import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from defectcalc.defect import DefectKind, strictness_order, tensor_strictness_order
from defectcalc.errors import InputError, OrderOutOfRange, UnknownSuite
from defectcalc.instances import (
    SUITES,
    SuiteReport,
    gen_block_tuples,
    gen_jordan_iso,
    gen_jordan_sym,
    gen_random_commuting,
    gen_tensor_factors,
    gen_tensor_lift,
    planted_pair,
    random_similarity,
    run_suite,
)
from defectcalc.linalg import Tolerance, fro
from defectcalc.tuples import TuplePair, cross_commutes, product_pair, sum_operator, validate_commuting

from conftest import I, N

ISO, SYM = DefectKind.ISOMETRIC, DefectKind.SYMMETRIC
seeds = st.integers(0, 2**31 - 1)


def test_jordan_iso_examples():
    p = gen_jordan_iso(2)
    assert np.array_equal(p.left[0], I(2) + N(2)) and np.array_equal(p.right[0], I(2))
    assert strictness_order(p, ISO).strict_order == 2
    assert strictness_order(gen_jordan_iso(3), ISO).strict_order == 3
    for bad in (1, 11):
        with pytest.raises(OrderOutOfRange):
            gen_jordan_iso(bad)


def test_jordan_sym_examples():
    p = gen_jordan_sym(2)
    rep = strictness_order(p, SYM)
    assert rep.strict_order == 2 and rep.probes[0][1] == 1.0
    assert strictness_order(gen_jordan_sym(4), SYM).strict_order == 4


@given(seeds, st.integers(2, 10))
def test_jordan_conjugates_keep_order(seed, m):
    assert strictness_order(gen_jordan_iso(m, seed), ISO).strict_order == m
    p = gen_jordan_sym(m, seed)
    assert strictness_order(p, SYM).strict_order == m
    assert abs(np.linalg.det(sum_operator(p.left)) - 1) < 1e-8  # unipotent


@given(seeds, st.integers(1, 12))
def test_similarity_condition_bound(seed, n):
    s = random_similarity(np.random.default_rng(seed), n)
    assert np.linalg.cond(s) <= 10


def test_block_tuples_canonical_instance():
    p1, p2 = gen_block_tuples(gen_jordan_iso(2), 2)
    assert strictness_order(p1, ISO).strict_order == 2
    assert strictness_order(p2, ISO).strict_order == 2
    assert strictness_order(product_pair(p1, p2), ISO).strict_order == 2
    with pytest.raises(InputError):
        gen_block_tuples(gen_jordan_iso(2), 1)


@given(seeds, st.integers(2, 4), st.integers(2, 4))
def test_block_tuples_symmetric_and_commuting(seed, m, d):
    p1, p2 = gen_block_tuples(gen_jordan_sym(m, seed), d)
    for t in (p1.left, p1.right, p2.left, p2.right):
        assert validate_commuting(t).ok
    assert cross_commutes(p1.left, p2.left).ok and cross_commutes(p1.right, p2.right).ok
    assert strictness_order(p1, SYM).strict_order == m
    assert strictness_order(product_pair(p1, p2), SYM).strict_order == m


def test_tensor_lift_examples():
    lifted = gen_tensor_lift(gen_jordan_iso(2), 2)
    assert lifted.n == 4 and strictness_order(lifted, ISO).strict_order == 2
    assert strictness_order(gen_tensor_lift(gen_jordan_iso(3), 3), ISO).strict_order == 3
    assert strictness_order(gen_tensor_lift(TuplePair.of([I(2)], [I(2)]), 2), ISO).strict_order == 1


@pytest.mark.parametrize("m", [2, 3])
def test_lifted_block_pairs_tensor_order(m):
    # lifting keeps each block pair strict m, yet their tensor pair is strict 2m - 1
    p1, p2 = gen_block_tuples(gen_jordan_iso(m), 2)
    l1, l2 = gen_tensor_lift(p1, 2), gen_tensor_lift(p2, 2)
    assert strictness_order(l1, ISO).strict_order == m
    assert strictness_order(l2, ISO).strict_order == m
    assert tensor_strictness_order(l1, l2, ISO).strict_order == 2 * m - 1


def test_tensor_factors_realize_tensor_pair():
    f1, f2 = gen_jordan_iso(2, 1), gen_jordan_iso(3, 2)
    q1, q2 = gen_tensor_factors(f1, f2)
    assert strictness_order(product_pair(q1, q2), ISO).strict_order == 4


def test_random_commuting_examples():
    t = gen_random_commuting(5, 2, 4, 3)
    assert validate_commuting(t).max_norm <= 1e-12 * max(1, max(fro(a) for a in t)) ** 2
    again = gen_random_commuting(5, 2, 4, 3)
    assert all(np.array_equal(a, b) for a, b in zip(t, again))
    with pytest.raises(InputError):
        gen_random_commuting(0, 1, 9, 1)
    with pytest.raises(InputError):
        gen_random_commuting(0, 1, 2, 4)


@given(seeds, st.sampled_from([ISO, SYM]), st.integers(1, 5), st.integers(1, 3))
def test_planted_pairs_have_planted_order(seed, kind, m, d):
    p = planted_pair(np.random.default_rng(seed), kind, m, d)
    assert strictness_order(p, kind).strict_order == m
    assert validate_commuting(p.left).ok and validate_commuting(p.right).ok


@given(seeds, st.sampled_from([ISO, SYM]), st.integers(1, 4), st.integers(1, 4))
def test_shared_base_factors_cross_commute(seed, kind, m1, m2):
    rng = np.random.default_rng(seed)
    n = m1 * m2
    p1 = planted_pair(rng, kind, m1, 2, n=n, step=m2)
    p2 = planted_pair(rng, kind, m2, 2, n=n, step=m1)
    assert cross_commutes(p1.left, p2.left).ok and cross_commutes(p1.right, p2.right).ok
    assert strictness_order(p1, kind).strict_order == m1
    assert strictness_order(p2, kind).strict_order == m2


def test_planted_pair_rejects_inconsistent_step():
    with pytest.raises(InputError):
        planted_pair(np.random.default_rng(0), ISO, 3, 1, n=4, step=1)


def test_run_suite_counterexample_single():
    rep = run_suite("counterexample", 1, 0)
    assert (rep.passes, rep.failures) == (1, [])


def test_run_suite_oracle():
    rep = run_suite("oracle", 100, 3)
    assert rep.passes == 100


def test_run_suite_products():
    rep = run_suite("products", 50, 9)
    assert rep.passes == 50, rep.failures


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_a_few_trials(name):
    rep = run_suite(name, 6, 1000)
    assert rep.passes + len(rep.failures) == rep.trials == 6
    assert rep.ok, rep.failures


def test_suite_determinism():
    a, b = run_suite("inverse_iso", 8, 42), run_suite("inverse_iso", 8, 42)
    assert (a.passes, a.failures) == (b.passes, b.failures)


def test_suite_records_failures_with_seed():
    # a relative tolerance of 0 cannot certify the rounded product defects
    rep = run_suite("two_of_three", 5, 7, Tolerance(abs_floor=0.0, rel=0.0))
    assert rep.passes == 0
    assert [f[0] for f in rep.failures] == [7, 8, 9, 10, 11]
    assert all("does not vanish" in desc and res > 0 for _, desc, res in rep.failures)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope", 1, 0)
    with pytest.raises(InputError):
        run_suite("oracle", 0, 0)


def test_suite_report_ok_property():
    assert SuiteReport("x", 2, 2).ok and not SuiteReport("x", 2, 1, [(0, "d", 1.0)]).ok
