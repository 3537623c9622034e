"""Certified test instances and the randomized property suites.

Instances are seeded from nilpotent Jordan blocks: a pair whose ``E(I)`` is
``I + M`` with M nilpotent of index m (all entries polynomials in one
Jordan block) is strict m-isometric, and a pair with
``sum A - sum B = M`` is strict m-symmetric.  Random similarities with
condition number at most 10 hide the structure.  Advertised orders are
always re-derived with :func:`~defectcalc.defect.strictness_order`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .decompose import decompose_iso, decompose_sym
from .defect import (
    DefectKind,
    defect_with_scale,
    forward_expansion_residual,
    iso_defect_with_scale,
    lemma_independence_rank,
    multi_index_defect_with_scale,
    nested_iso_defect,
    nested_sym_defect,
    strictness_order,
    tensor_defect_norm,
)
from .errors import InputError, OrderOutOfRange, UnknownSuite
from .linalg import DEFAULT_TOL, Tolerance, direct_sum, fro, identity, inverse, kron, nilpotent_jordan
from .tuples import OperatorTuple, TuplePair, product_pair, scale_pair

__all__ = [
    "SuiteReport",
    "GAUGES",
    "SUITES",
    "random_similarity",
    "conjugate_pair",
    "planted_pair",
    "gen_jordan_iso",
    "gen_jordan_sym",
    "gen_block_tuples",
    "gen_tensor_lift",
    "gen_tensor_factors",
    "gen_random_commuting",
    "run_suite",
]

ISO, SYM = DefectKind.ISOMETRIC, DefectKind.SYMMETRIC
GAUGES = (2.0, -0.5, 1 + 1j, 3 * np.exp(1j * np.pi / 4))
MAX_COND = 10.0
# non-vanishing assertions need this factor above the zero threshold
GUARD = 10.0


def random_similarity(rng: np.random.Generator, n: int, max_cond: float = MAX_COND) -> np.ndarray:
    """Random complex matrix with 2-norm condition number at most ``max_cond``."""
    while True:
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        p = identity(n) + 0.4 * g / math.sqrt(2 * n)
        if np.linalg.cond(p) <= max_cond:
            return p


def conjugate_pair(p: TuplePair, s: np.ndarray) -> TuplePair:
    """``(S A S^-1, S B S^-1)`` entrywise."""
    s_inv = inverse(s)
    return TuplePair(p.left.map(lambda a: s @ a @ s_inv), p.right.map(lambda b: s @ b @ s_inv))


def _poly(rng, base, degree, const=None):
    """Random polynomial in ``base``; coefficient k has modulus at most 2^-k."""
    n = base.shape[0]
    coef = rng.uniform(-1, 1, degree + 1) + 1j * rng.uniform(-1, 1, degree + 1)
    coef *= 0.5 ** np.arange(degree + 1) / math.sqrt(2)
    if const is not None:
        coef[0] = const
    out = np.zeros((n, n), dtype=np.complex128)
    power = identity(n)
    for c in coef:
        out += c * power
        power = power @ base
    return out


def _unit(rng):
    """Random complex number with modulus in [0.5, 1.5]."""
    return rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform())


def planted_pair(rng: np.random.Generator, kind, m: int, d: int = 1, n: Optional[int] = None,
                 step: int = 1) -> TuplePair:
    """A d-tuple pair of polynomials in the n x n Jordan block ``N`` of planted order m.

    The nilpotent part is ``M = N^step * u(N)`` with ``u(0) != 0``, whose
    index is ``ceil(n / step)``; callers pick ``n`` and ``step`` so this is m.
    Isometric: ``sum A_i B_i = I + M``.  Symmetric: ``sum A`` is unipotent
    and ``sum A - sum B = M``.
    """
    kind = DefectKind.parse(kind)
    n = m if n is None else n
    if -(-n // step) != m and m > 1:
        raise InputError(f"a step of {step} in dimension {n} does not give order {m}")
    N = nilpotent_jordan(n)
    deg = max(n - 1, 0)
    M = np.linalg.matrix_power(N, step) @ _poly(rng, N, deg, const=_unit(rng))
    I = identity(n)
    if kind is ISO:
        left = [_poly(rng, N, deg, const=_unit(rng))] + [_poly(rng, N, deg) for _ in range(d - 1)]
        rest = [_poly(rng, N, deg) for _ in range(d - 1)]
        target = I + M - sum((a @ b for a, b in zip(left[1:], rest)), np.zeros_like(I))
        right = [inverse(left[0]) @ target] + rest
    else:
        unipotent = I + N @ _poly(rng, N, deg)
        others = [_poly(rng, N, deg) for _ in range(d - 1)]
        left = [unipotent - sum(others, np.zeros_like(I))] + others
        rest = [_poly(rng, N, deg) for _ in range(d - 1)]
        right = [unipotent - M - sum(rest, np.zeros_like(I))] + rest
    return TuplePair.of(left, right)


def _jordan(m, seed, kind):
    if not 2 <= m <= 10:
        raise OrderOutOfRange(f"m must lie in [2, 10], got {m}")
    N, I = nilpotent_jordan(m), identity(m)
    p = TuplePair.of([I + N], [I])
    if seed is not None:
        p = conjugate_pair(p, random_similarity(np.random.default_rng(seed), m))
    return p


def gen_jordan_iso(m: int, conjugate_seed: Optional[int] = None) -> TuplePair:
    """``(I + N_m, I)``, optionally conjugated by a seeded similarity.  Strict m-isometric."""
    return _jordan(m, conjugate_seed, ISO)


def gen_jordan_sym(m: int, conjugate_seed: Optional[int] = None) -> TuplePair:
    """Same family as :func:`gen_jordan_iso`; the symmetric defects are ``N^k``.  Strict m-symmetric."""
    return _jordan(m, conjugate_seed, SYM)


def gen_block_tuples(base: TuplePair, d: int):
    """The direct-sum tuples built from a single-operator pair ``(A, B)``.

    ``A_1 = (A+I, ..., A+I)/sqrt(d)``, ``A_2 = (I+A, ...)/sqrt(d)`` and the
    same for B, where ``+`` is the direct sum.  Returns ``(A_1, B_1)`` and
    ``(A_2, B_2)``.
    """
    if base.d != 1:
        raise InputError("the base pair must consist of single operators")
    if d < 2:
        raise InputError("d must be at least 2")
    a, b = base.left[0], base.right[0]
    I = identity(base.n)
    s = 1 / math.sqrt(d)

    def tup(x):
        return OperatorTuple([s * x] * d)

    p1 = TuplePair(tup(direct_sum(a, I)), tup(direct_sum(b, I)))
    p2 = TuplePair(tup(direct_sum(I, a)), tup(direct_sum(I, b)))
    return p1, p2


def gen_tensor_lift(p: TuplePair, dim2: int) -> TuplePair:
    """Every entry of both tuples tensored with the dim2-dimensional identity."""
    I = identity(dim2)
    return TuplePair(p.left.map(lambda a: kron(a, I)), p.right.map(lambda b: kron(b, I)))


def gen_tensor_factors(p1: TuplePair, p2: TuplePair):
    """``(A_1 (x) I, B_1 (x) I)`` and ``(I (x) A_2, I (x) B_2)``.

    The two lifted pairs cross-commute and their product pair is the tensor
    pair of ``p1`` and ``p2``.
    """
    I1, I2 = identity(p1.n), identity(p2.n)
    q1 = TuplePair(p1.left.map(lambda a: kron(a, I2)), p1.right.map(lambda b: kron(b, I2)))
    q2 = TuplePair(p2.left.map(lambda a: kron(I1, a)), p2.right.map(lambda b: kron(I1, b)))
    return q1, q2


def gen_random_commuting(seed: int, d: int, n: int, max_degree: int) -> OperatorTuple:
    """d random polynomials (degree <= max_degree) in one seeded random matrix."""
    if d < 1 or n < 1 or n > 8 or not 1 <= max_degree <= 3:
        raise InputError("need d >= 1, 1 <= n <= 8 and 1 <= max_degree <= 3")
    rng = np.random.default_rng(seed)
    base = rng.uniform(0, 1, (n, n)) + 1j * rng.uniform(0, 1, (n, n))
    entries = []
    for _ in range(d):
        deg = int(rng.integers(0, max_degree + 1))
        coef = rng.uniform(0, 1, deg + 1) + 1j * rng.uniform(0, 1, deg + 1)
        out, power = np.zeros((n, n), dtype=np.complex128), identity(n)
        for c in coef:
            out += c * power
            power = power @ base
        entries.append(out)
    return OperatorTuple(entries)


# ---------------------------------------------------------------------------
# suites

@dataclass
class SuiteReport:
    suite_name: str
    trials: int
    passes: int = 0
    failures: list = field(default_factory=list)  # (seed, description, residual)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passes == self.trials


class _Fail(Exception):
    def __init__(self, description, residual=None):
        super().__init__(description)
        self.residual = residual


def _zero(norm, scale, tol, what):
    if norm > tol.threshold(scale):
        raise _Fail(f"{what} does not vanish", norm)
    return norm


def _nonzero(norm, scale, tol, what):
    if norm <= GUARD * tol.threshold(scale):
        raise _Fail(f"{what} is not clearly nonzero", norm)
    return norm


def _order(p, kind, tol, max_m=12):
    return strictness_order(p, kind, max_m, tol).strict_order


def _expect_order(p, kind, m, tol, what):
    got = _order(p, kind, tol)
    if got != m:
        raise _Fail(f"{what}: strict {kind.value} order {got}, expected {m}")


def _shared_base_pairs(rng, kind, d):
    """Two cross-commuting planted pairs: polynomials in one Jordan block of size m1*m2."""
    m1, m2 = (int(x) for x in rng.integers(1, 5, 2))
    n = m1 * m2
    p1 = planted_pair(rng, kind, m1, d, n=n, step=m2)
    p2 = planted_pair(rng, kind, m2, d, n=n, step=m1)
    s = random_similarity(rng, n)
    return conjugate_pair(p1, s), conjugate_pair(p2, s), m1, m2


def _independent_pairs(rng, kind, d, low=1):
    m1, m2 = (int(x) for x in rng.integers(low, 5, 2))
    p1 = conjugate_pair(planted_pair(rng, kind, m1, d), random_similarity(rng, m1))
    p2 = conjugate_pair(planted_pair(rng, kind, m2, d), random_similarity(rng, m2))
    return p1, p2, m1, m2


def _trial_products(kind):
    def trial(rng, i, tol):
        d = int(rng.integers(1, 4))
        p1, p2, m1, m2 = _shared_base_pairs(rng, kind, d)
        _expect_order(p1, kind, m1, tol, "first factor")
        _expect_order(p2, kind, m2, tol, "second factor")
        prod = product_pair(p1, p2, tol)
        mat, scale = defect_with_scale(prod, kind, m1 + m2 - 1)
        return _zero(fro(mat), scale, tol, f"product defect of order {m1 + m2 - 1}")
    return trial


def _trial_two_of_three(kind):
    def trial(rng, i, tol):
        d = int(rng.integers(1, 4))
        p1, p2, m1, m2 = _independent_pairs(rng, kind, d)
        m = m1 + m2 - 1
        # (i): the tensor pair has vanishing order-m defect
        _zero(*tensor_defect_norm(p1, p2, kind, m), tol, "tensor defect (i)")
        # (ii) => (iii) and (iii) => (ii)
        _zero(fro(defect_with_scale(p1, kind, m1)[0]), defect_with_scale(p1, kind, m1)[1], tol, "(ii)")
        mat, scale = defect_with_scale(p2, kind, m - m1 + 1)
        r = _zero(fro(mat), scale, tol, "(iii) derived from (i) and (ii)")
        mat, scale = defect_with_scale(p1, kind, m - m2 + 1)
        return max(r, _zero(fro(mat), scale, tol, "(ii) derived from (i) and (iii)"))
    return trial


def _nested(kind, p1, m1, p2, m2, tol):
    if kind is ISO:
        mat, scale = nested_iso_defect(p1, m1 - 1, p2, m2 - 1)
        return fro(mat), scale
    a, sa = nested_sym_defect(p1, m1 - 1, p2, m2 - 1, "inner_first")
    b, sb = nested_sym_defect(p1, m1 - 1, p2, m2 - 1, "outer_first")
    _zero(fro(a - b), max(sa, sb), tol, "difference of the two nested orderings")
    return fro(a), sa


def _trial_criterion(kind):
    def trial(rng, i, tol):
        shape = ("tensor_lift", "direct_sum_blocks", "shared_base")[i % 3]
        d = int(rng.integers(1, 4))
        if shape == "tensor_lift":
            f1, f2, m1, m2 = _independent_pairs(rng, kind, d)
            p1, p2 = gen_tensor_factors(f1, f2)
        elif shape == "direct_sum_blocks":
            m1 = m2 = int(rng.integers(2, 5))
            base = conjugate_pair(planted_pair(rng, kind, m1), random_similarity(rng, m1))
            p1, p2 = gen_block_tuples(base, max(d, 2))
        else:
            p1, p2, m1, m2 = _shared_base_pairs(rng, kind, d)
        _expect_order(p1, kind, m1, tol, "first factor")
        _expect_order(p2, kind, m2, tol, "second factor")
        m = m1 + m2 - 1
        prod_order = _order(product_pair(p1, p2, tol), kind, tol, max_m=m + 1)
        norm, scale = _nested(kind, p1, m1, p2, m2, tol)
        thr = tol.threshold(scale)
        if thr < norm <= GUARD * thr:
            raise _Fail(f"{shape}: nested defect inside the guard band", norm)
        if (prod_order == m) != (norm > thr):
            raise _Fail(f"{shape}: product order {prod_order} vs m = {m} but nested norm {norm:.3e}", norm)
        return norm
    return trial


def _trial_counterexample(kind):
    def trial(rng, i, tol):
        if i == 0:
            m, d = 2, 2
            N = nilpotent_jordan(2)
            base = TuplePair.of([identity(2) + N], [identity(2)])
        else:
            m, d = int(rng.integers(2, 5)), int(rng.integers(2, 4))
            base = conjugate_pair(planted_pair(rng, kind, m), random_similarity(rng, m))
        p1, p2 = gen_block_tuples(base, d)
        _expect_order(base, kind, m, tol, "base pair")
        _expect_order(p1, kind, m, tol, "first block pair")
        _expect_order(p2, kind, m, tol, "second block pair")
        prod = product_pair(p1, p2, tol)
        _expect_order(prod, kind, m, tol, "product pair")
        mat, scale = defect_with_scale(prod, kind, m)
        return _zero(fro(mat), scale, tol, "product defect")
    return trial


def _trial_tensor_lift(rng, i, tol):
    m, dim2 = int(rng.integers(2, 5)), int(rng.integers(1, 4))
    base = conjugate_pair(planted_pair(rng, ISO, m), random_similarity(rng, m))
    pairs = [base]
    if i % 2:
        pairs = list(gen_block_tuples(base, int(rng.integers(2, 4))))
    for p in pairs:
        lifted = gen_tensor_lift(p, dim2)
        for kind in (ISO, SYM):
            _expect_order(lifted, kind, _order(p, kind, tol), tol, f"lift by {dim2}")
    return 0.0


def _trial_lemma(rng, i, tol):
    m = int(rng.integers(2, 5))
    t = m - 1 + int(rng.integers(0, 3))
    p = gen_jordan_iso(m, int(rng.integers(2**31)))
    checks = [(ISO, dict(t=t, sign=1)), (ISO, dict(t=t, sign=-1)),
              (SYM, dict(family="left")), (SYM, dict(family="right"))]
    for kind, kw in checks:
        rank, expected = lemma_independence_rank(p, kind, tol=tol, **kw)
        if expected != m or rank != m:
            raise _Fail(f"{kind.value} family {kw}: rank {rank}, order {expected}, planted {m}")
    return 0.0


def _trial_inverse(kind):
    solve = decompose_iso if kind is ISO else decompose_sym

    def trial(rng, i, tol):
        c = GAUGES[i % len(GAUGES)]
        d = int(rng.integers(1, 4))
        f1, f2, m1, m2 = _independent_pairs(rng, kind, d)
        res = solve(scale_pair(f1, c), scale_pair(f2, 1 / c), tol)
        err = abs(res.c - c)
        if err > 1e-8 * abs(c):
            raise _Fail(f"recovered c = {res.c:.12g}, planted {c:.12g}", err)
        if (res.m1, res.m2) != (m1, m2):
            raise _Fail(f"recovered orders {(res.m1, res.m2)}, planted {(m1, m2)}")
        if res.tensor_order != m1 + m2 - 1:
            raise _Fail(f"tensor order {res.tensor_order} != {m1 + m2 - 1}")
        if not (res.strict1 and res.strict2):
            raise _Fail("factor certificate not strict")
        return max(res.residual1, res.residual2)
    return trial


def _trial_expansion(rng, i, tol):
    m = int(rng.integers(2, 5))
    n = m * int(rng.integers(1, 4))
    p = gen_jordan_iso(m, int(rng.integers(2**31)))
    res, scale = forward_expansion_residual(p, m, n, tol, return_scale=True)
    return _zero(res, scale, tol, f"expansion residual (m={m}, n={n})")


def _trial_oracle(rng, i, tol):
    d, n, m = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 5))
    seeds = rng.integers(2**31, size=2)
    deg = int(rng.integers(1, 4))
    p = TuplePair(gen_random_commuting(int(seeds[0]), d, n, deg), gen_random_commuting(int(seeds[1]), d, n, deg))
    a, sa = iso_defect_with_scale(p, m)
    b, sb = multi_index_defect_with_scale(p, m)
    return _zero(fro(a - b), max(sa, sb), tol, f"recursion vs enumeration (d={d}, n={n}, m={m})")


SUITES: dict[str, Callable] = {
    "products": _trial_products(ISO),
    "products_sym": _trial_products(SYM),
    "two_of_three": _trial_two_of_three(ISO),
    "two_of_three_sym": _trial_two_of_three(SYM),
    "strictness_criterion": _trial_criterion(ISO),
    "strictness_criterion_sym": _trial_criterion(SYM),
    "counterexample": _trial_counterexample(ISO),
    "counterexample_sym": _trial_counterexample(SYM),
    "tensor_lift": _trial_tensor_lift,
    "lemma_ranks": _trial_lemma,
    "inverse_iso": _trial_inverse(ISO),
    "inverse_sym": _trial_inverse(SYM),
    "expansion": _trial_expansion,
    "oracle": _trial_oracle,
}


def run_suite(name: str, trials: int, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> SuiteReport:
    """Run ``trials`` seeded instances of a named property check.

    Trial ``i`` draws everything from ``default_rng(seed + i)``.
    """
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    if trials < 1:
        raise InputError("trials must be positive")
    check = SUITES[name]
    report = SuiteReport(name, trials)
    start = time.perf_counter()
    for i in range(trials):
        trial_seed = seed + i
        try:
            check(np.random.default_rng(trial_seed), i, tol)
        except _Fail as exc:
            report.failures.append((trial_seed, str(exc), exc.residual))
        except Exception as exc:  # a raised library error is a failed trial, not a crash
            report.failures.append((trial_seed, f"{type(exc).__name__}: {exc}", None))
        else:
            report.passes += 1
    report.elapsed = time.perf_counter() - start
    return report
