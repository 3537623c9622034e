"""Recovering the gauge scalar and factor orders of a strict tensor pair.

Scaling the right tuple of ``(S, T)`` by ``1/c`` scales ``E`` by ``1/c``,
so ``D^k_{S, T/c}(I) = (-c)^{-k} (E - c)^k (I)``.  A factor that becomes
strict m_1-isometric after the scaling therefore has minimal polynomial
``(x - c)^{m_1}`` on the cyclic subspace of ``E`` generated by ``I``; the
solver finds that polynomial with a Krylov iteration and reads ``c`` off as
the mean of its roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .defect import (
    MAX_ORDER,
    DefectKind,
    apply_E,
    defect_with_scale,
    strictness_order,
    tensor_strictness_order,
)
from .errors import (
    CertificationFailed,
    DegreeBudgetExceeded,
    InputError,
    NotARepeatedRoot,
    NotInvertible,
    NotStrictTensor,
    OrderTooLarge,
    Singular,
    ToleranceAnomaly,
)
from .linalg import DEFAULT_TOL, GramSchmidt, Tolerance, fro, identity, inverse
from .tuples import TuplePair, scale_pair, sum_operator, tensor_pair

__all__ = [
    "MinPoly",
    "DecompositionResult",
    "krylov_min_poly",
    "extract_repeated_root",
    "repeated_root_poly",
    "decompose_iso",
    "decompose_sym",
    "MATERIALIZE_LIMIT",
]

# tensor pairs up to this dimension are also checked by forming the Kronecker products
MATERIALIZE_LIMIT = 64


@dataclass(frozen=True)
class MinPoly:
    coeffs: tuple  # ascending degree, monic
    degree: int
    residual: float

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1 or self.coeffs[-1] != 1:
            raise InputError("MinPoly must be monic with degree + 1 coefficients")


@dataclass(frozen=True)
class DecompositionResult:
    c: complex
    m1: int
    m2: int
    residual1: float
    residual2: float
    strict1: bool
    strict2: bool
    tensor_order: Optional[int] = None


def krylov_min_poly(p: TuplePair, max_deg: int = MAX_ORDER, tol: Tolerance = DEFAULT_TOL) -> MinPoly:
    """Minimal polynomial of ``E`` on the cyclic subspace generated by ``I``.

    Builds ``v_k = vec(E^k(I))`` and stops at the first ``k`` for which
    ``v_k`` lies in the span of its predecessors, up to ``tol.rel`` times the
    largest Krylov vector norm seen so far.
    """
    if max_deg < 1:
        raise InputError("max_deg must be positive")
    if max_deg > MAX_ORDER:
        raise OrderTooLarge(f"max_deg {max_deg} exceeds {MAX_ORDER}")
    gs = GramSchmidt()
    v = identity(p.n)
    largest = fro(v)
    gs.append(*gs.project(v))
    for k in range(1, max_deg + 1):
        v = apply_E(p, v)
        largest = max(largest, fro(v))
        res, h = gs.project(v)
        rnorm = float(np.linalg.norm(res))
        if rnorm <= tol.rel * largest:
            c = gs.solve(h)
            coeffs = tuple(complex(-x) for x in c) + (1,)
            return MinPoly(coeffs, k, rnorm)
        gs.append(res, h)
    raise DegreeBudgetExceeded(f"no linear dependency among the first {max_deg + 1} Krylov vectors")


def repeated_root_poly(c: complex, k: int) -> tuple:
    """Ascending coefficients of ``(x - c)^k``."""
    return tuple(comb(k, j) * (-c) ** (k - j) for j in range(k)) + (1,)


def extract_repeated_root(mp: MinPoly, tol: Tolerance = DEFAULT_TOL) -> complex:
    """The root ``c`` if ``mp == (x - c)^k`` within tolerance.

    ``c`` is taken as the mean of the roots, ``-coeffs[k-1] / k``, and every
    coefficient is then compared with ``C(k, j) (-c)^(k-j)`` relative to
    ``C(k, j) |c|^(k-j)``.
    """
    k = mp.degree
    if k < 1:
        raise InputError("degree must be positive")
    c = complex(-mp.coeffs[k - 1] / k)
    expected = repeated_root_poly(c, k)
    for j in range(k):
        gap = abs(mp.coeffs[j] - expected[j])
        if gap > tol.threshold(comb(k, j) * abs(c) ** (k - j)):
            raise NotARepeatedRoot(
                f"coefficient of x^{j} is {mp.coeffs[j]:.6g}, (x - {c:.6g})^{k} gives {expected[j]:.6g}")
    if abs(c) <= tol.abs_floor:
        raise NotARepeatedRoot("the repeated root is zero")
    return c


def _certify(p: TuplePair, kind: DefectKind, m: int, tol: Tolerance):
    """Residual of the order-m defect, whether it vanishes, and strictness at m - 1."""
    mat, scale = defect_with_scale(p, kind, m)
    residual = fro(mat)
    ok = residual <= tol.threshold(scale)
    if m == 1:
        strict = True
    else:
        prev, prev_scale = defect_with_scale(p, kind, m - 1)
        strict = fro(prev) > tol.threshold(prev_scale)
    return residual, ok, strict


def _tensor_order(p1: TuplePair, p2: TuplePair, kind: DefectKind, tol: Tolerance) -> int:
    rep = tensor_strictness_order(p1, p2, kind, MAX_ORDER, tol)
    if rep.strict_order is None:
        raise NotStrictTensor(f"tensor pair has no strict {kind.value} order <= {MAX_ORDER}")
    if p1.n * p2.n <= MATERIALIZE_LIMIT:
        direct = strictness_order(tensor_pair(p1, p2), kind, MAX_ORDER, tol).strict_order
        if direct != rep.strict_order:
            raise ToleranceAnomaly(
                f"factorized tensor order {rep.strict_order} disagrees with materialized order {direct}")
    return rep.strict_order


def _split(p1, p2, kind, m, c, m1, tol) -> DecompositionResult:
    m2 = m - m1 + 1
    if m2 < 1:
        raise CertificationFailed(f"first factor order {m1} exceeds tensor order {m}")
    q1, q2 = scale_pair(p1, 1 / c), scale_pair(p2, c)
    r1, ok1, s1 = _certify(q1, kind, m1, tol)
    r2, ok2, s2 = _certify(q2, kind, m2, tol)
    if not (ok1 and ok2):
        raise CertificationFailed(
            f"factor defects do not vanish: residual1={r1:.3e}, residual2={r2:.3e}", r1, r2)
    return DecompositionResult(c, m1, m2, r1, r2, s1, s2, m)


def decompose_iso(p1: TuplePair, p2: TuplePair, tol: Tolerance = DEFAULT_TOL) -> DecompositionResult:
    """Split a strict m-isometric tensor pair into ``(S1, T1/c)`` and ``(S2, c T2)``."""
    m = _tensor_order(p1, p2, DefectKind.ISOMETRIC, tol)
    mp = krylov_min_poly(p1, MAX_ORDER, tol)
    c = extract_repeated_root(mp, tol)
    return _split(p1, p2, DefectKind.ISOMETRIC, m, c, mp.degree, tol)


def _summed_inverse(t, tol):
    try:
        return inverse(sum_operator(t), tol)
    except Singular as exc:
        raise NotInvertible(f"summed left operator is singular ({exc})") from exc


def decompose_sym(p1: TuplePair, p2: TuplePair, tol: Tolerance = DEFAULT_TOL) -> DecompositionResult:
    """Symmetric counterpart of :func:`decompose_iso`.

    Needs the summed left operators to be invertible.  The symmetric defect
    of ``(S, T)`` equals ``(sum S)^k`` times the isometric defect of the
    single-operator pair ``((sum S)^-1, sum T)``, so the isometric pipeline
    runs on those auxiliary pairs and the result is certified on the
    original ones.
    """
    inv1, inv2 = _summed_inverse(p1.left, tol), _summed_inverse(p2.left, tol)
    m = _tensor_order(p1, p2, DefectKind.SYMMETRIC, tol)
    aux1 = TuplePair.of([inv1], [sum_operator(p1.right)])
    aux2 = TuplePair.of([inv2], [sum_operator(p2.right)])
    iso = decompose_iso(aux1, aux2, tol)
    if iso.tensor_order != m:
        raise ToleranceAnomaly(
            f"auxiliary isometric tensor order {iso.tensor_order} differs from symmetric order {m}")
    return _split(p1, p2, DefectKind.SYMMETRIC, m, iso.c, iso.m1, tol)
