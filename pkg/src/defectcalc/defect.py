"""Defect operators of tuple pairs.

For a pair ``(A, B)`` of commuting d-tuples, ``E(X) = sum_i A_i X B_i``.
The isometric defect of order m is ``(Id - E)^m`` applied to X, the
symmetric defect is ``(L_{sum A} - R_{sum B})^m`` applied to X.  Both are
evaluated as alternating binomial sums; every evaluator can also report the
largest Frobenius norm among its summands, which is what the zero test in
:class:`~defectcalc.linalg.Tolerance` is measured against.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Callable, Optional

import numpy as np

from .errors import (
    ArityMismatch,
    DimensionMismatch,
    EnumerationBudgetExceeded,
    InputError,
    OrderTooLarge,
    PreconditionFailed,
    ToleranceAnomaly,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, fro, identity, rank_of_family
from .tuples import TuplePair, sum_operator

__all__ = [
    "MAX_ORDER",
    "DefectKind",
    "DefectReport",
    "apply_E",
    "floor_power",
    "floor_powers",
    "iso_defect",
    "iso_defect_with_scale",
    "multi_index_defect",
    "multi_index_defect_with_scale",
    "sym_defect",
    "sym_defect_with_scale",
    "defect",
    "defect_with_scale",
    "strictness_order",
    "lemma_independence_rank",
    "forward_expansion_residual",
    "tensor_defect_norm",
    "tensor_strictness_order",
    "nested_iso_defect",
    "nested_sym_defect",
]

MAX_ORDER = 30
ENUMERATION_BUDGET = 10**7
# orders beyond the first vanishing one that strictness_order re-checks
MONOTONE_WINDOW = 2


class DefectKind(str, enum.Enum):
    ISOMETRIC = "iso"
    SYMMETRIC = "sym"

    @classmethod
    def parse(cls, value) -> "DefectKind":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        for kind in cls:
            if v in (kind.value, kind.name.lower()):
                return kind
        raise InputError(f"unknown defect kind {value!r}")


@dataclass
class DefectReport:
    """Defect norms per probed order plus the detected strict order."""

    kind: DefectKind
    probes: list[tuple[int, float]]
    strict_order: Optional[int]
    max_order_searched: int
    thresholds: list[float] = field(default_factory=list, repr=False)


def _check_order(m: int) -> None:
    if m < 0:
        raise InputError(f"order must be nonnegative, got {m}")
    if m > MAX_ORDER:
        raise OrderTooLarge(f"order {m} exceeds the cap {MAX_ORDER}")


def _start(p: TuplePair, X) -> np.ndarray:
    if X is None:
        return identity(p.n)
    X = as_matrix(X)
    if X.shape[0] != p.n:
        raise DimensionMismatch(f"X is {X.shape[0]}-dimensional, pair is {p.n}-dimensional")
    return X


def apply_E(p: TuplePair, X) -> np.ndarray:
    """One sandwich step ``sum_i A_i X B_i``."""
    X = _start(p, X)
    out = np.zeros_like(X)
    for a, b in zip(p.left, p.right):
        out += a @ X @ b
    return out


def floor_powers(p: TuplePair, X, n: int) -> list[np.ndarray]:
    """``[X, E(X), ..., E^n(X)]``."""
    out = [_start(p, X)]
    for _ in range(n):
        out.append(apply_E(p, out[-1]))
    return out


def floor_power(p: TuplePair, X, n: int) -> np.ndarray:
    if n < 0:
        raise InputError("power must be nonnegative")
    return floor_powers(p, X, n)[-1]


def _alternating(terms, m: int):
    """``sum_j (-1)^j C(m, j) terms[j]`` and the largest summand norm."""
    out = np.zeros_like(terms[0])
    scale = 0.0
    for j in range(m + 1):
        w = comb(m, j)
        scale = max(scale, w * fro(terms[j]))
        if j % 2:
            out -= w * terms[j]
        else:
            out += w * terms[j]
    return out, scale


def iso_defect_with_scale(p: TuplePair, m: int, X=None):
    _check_order(m)
    return _alternating(floor_powers(p, X, m), m)


def iso_defect(p: TuplePair, m: int, X=None) -> np.ndarray:
    """``sum_j (-1)^j C(m, j) E^j(X)``; X defaults to the identity."""
    return iso_defect_with_scale(p, m, X)[0]


def _compositions(total: int, parts: int):
    """All ``alpha`` in N^parts with ``|alpha| = total``."""
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, alpha = -1, []
        for c in cuts:
            alpha.append(c - prev - 1)
            prev = c
        alpha.append(total + parts - 2 - prev)
        yield tuple(alpha)


def multinomial(alpha) -> int:
    out = factorial(sum(alpha))
    for a in alpha:
        out //= factorial(a)
    return out


def multi_index_defect_with_scale(p: TuplePair, m: int):
    _check_order(m)
    d, n = p.d, p.n
    count = sum(comb(j + d - 1, d - 1) for j in range(m + 1))
    if count >= ENUMERATION_BUDGET:
        raise EnumerationBudgetExceeded(f"{count} multi-indices for d={d}, m={m}")
    lpow = [[identity(n)] for _ in range(d)]
    rpow = [[identity(n)] for _ in range(d)]
    for i in range(d):
        for _ in range(m):
            lpow[i].append(lpow[i][-1] @ p.left[i])
            rpow[i].append(rpow[i][-1] @ p.right[i])
    out = np.zeros((n, n), dtype=np.complex128)
    scale = 0.0
    for j in range(m + 1):
        level = np.zeros_like(out)
        for alpha in _compositions(j, d):
            la, rb = identity(n), identity(n)
            for i, a in enumerate(alpha):
                la = la @ lpow[i][a]
                rb = rb @ rpow[i][a]
            level += multinomial(alpha) * (la @ rb)
        w = comb(m, j)
        scale = max(scale, w * fro(level))
        out += (-1) ** j * w * level
    return out, scale


def multi_index_defect(p: TuplePair, m: int) -> np.ndarray:
    """Isometric defect at I by direct multi-index enumeration.

    ``sum_j (-1)^j C(m, j) sum_{|a|=j} j!/a! A^a B^a`` with
    ``A^a = A_1^{a_1} ... A_d^{a_d}``.  Independent of :func:`floor_power`;
    it agrees with :func:`iso_defect` only when both tuples commute.
    """
    return multi_index_defect_with_scale(p, m)[0]


def _powers(a: np.ndarray, k: int) -> list[np.ndarray]:
    out = [identity(a.shape[0])]
    for _ in range(k):
        out.append(out[-1] @ a)
    return out


def sym_defect_with_scale(p: TuplePair, m: int, X=None):
    _check_order(m)
    X = _start(p, X)
    sa, sb = _powers(sum_operator(p.left), m), _powers(sum_operator(p.right), m)
    return _alternating([sa[m - j] @ X @ sb[j] for j in range(m + 1)], m)


def sym_defect(p: TuplePair, m: int, X=None) -> np.ndarray:
    """``sum_j (-1)^j C(m, j) (sum A)^{m-j} X (sum B)^j``."""
    return sym_defect_with_scale(p, m, X)[0]


def defect_with_scale(p: TuplePair, kind, m: int, X=None):
    if DefectKind.parse(kind) is DefectKind.ISOMETRIC:
        return iso_defect_with_scale(p, m, X)
    return sym_defect_with_scale(p, m, X)


def defect(p: TuplePair, kind, m: int, X=None) -> np.ndarray:
    return defect_with_scale(p, kind, m, X)[0]


class _Prober:
    """Evaluates defects at I for increasing orders, caching the power tables."""

    def __init__(self, p: TuplePair, kind: DefectKind):
        self.p, self.kind = p, kind
        if kind is DefectKind.ISOMETRIC:
            self.fp = [identity(p.n)]
        else:
            self.sa = [identity(p.n)]
            self.sb = [identity(p.n)]
            self.ka, self.kb = sum_operator(p.left), sum_operator(p.right)

    def extend(self, k: int) -> None:
        if self.kind is DefectKind.ISOMETRIC:
            while len(self.fp) <= k:
                self.fp.append(apply_E(self.p, self.fp[-1]))
        else:
            while len(self.sa) <= k:
                self.sa.append(self.sa[-1] @ self.ka)
                self.sb.append(self.sb[-1] @ self.kb)

    def __call__(self, k: int):
        self.extend(k)
        if self.kind is DefectKind.ISOMETRIC:
            return _alternating(self.fp, k)
        return _alternating([self.sa[k - j] @ self.sb[j] for j in range(k + 1)], k)


def _order_search(probe: Callable[[int], tuple[float, float]], kind: DefectKind,
                  max_m: int, tol: Tolerance) -> DefectReport:
    if max_m < 1:
        raise InputError("max_m must be positive")
    _check_order(max_m)
    probes, thresholds = [], []
    for k in range(1, max_m + 1):
        norm, scale = probe(k)
        thr = tol.threshold(scale)
        probes.append((k, norm))
        thresholds.append(thr)
        if norm <= thr:
            for t in range(k + 1, min(max_m, k + MONOTONE_WINDOW) + 1):
                n_t, s_t = probe(t)
                if n_t > tol.threshold(s_t):
                    raise ToleranceAnomaly(
                        f"{kind.value} defect vanished at order {k} but has norm {n_t:.3e} at order {t}")
            return DefectReport(kind, probes, k, max_m, thresholds)
    return DefectReport(kind, probes, None, max_m, thresholds)


def strictness_order(p: TuplePair, kind=DefectKind.ISOMETRIC, max_m: int = MAX_ORDER,
                     tol: Tolerance = DEFAULT_TOL) -> DefectReport:
    """Least order k whose defect at I vanishes (the previous one does not).

    Probing stops at the first vanishing order; the next
    ``MONOTONE_WINDOW`` orders are re-checked and a reappearing defect
    raises :class:`ToleranceAnomaly`.
    """
    kind = DefectKind.parse(kind)
    prober = _Prober(p, kind)

    def probe(k):
        mat, scale = prober(k)
        return fro(mat), scale

    return _order_search(probe, kind, max_m, tol)


def lemma_independence_rank(p: TuplePair, kind=DefectKind.ISOMETRIC, t: Optional[int] = None,
                            tol: Tolerance = DEFAULT_TOL, sign: int = 1, family: str = "left"):
    """Rank of the independence families attached to a strict pair.

    Isometric: ``{E^(t + sign*r) D^r(I)}`` for ``r < m``.  Symmetric:
    ``{(sum A)^r d^r(I)}`` (``family="left"``) or ``{d^r(I) (sum B)^r}``
    (``family="right"``).  Returns ``(rank, m)``; for a strict m pair the
    rank is expected to be m.
    """
    kind = DefectKind.parse(kind)
    rep = strictness_order(p, kind, MAX_ORDER, tol)
    m = rep.strict_order
    if m is None:
        raise PreconditionFailed("pair has no strict order")
    if kind is DefectKind.ISOMETRIC:
        if sign not in (1, -1):
            raise InputError("sign must be +1 or -1")
        if t is None:
            t = m - 1
        if t < m - 1:
            raise PreconditionFailed(f"t = {t} < m - 1 = {m - 1}")
        fam = [floor_power(p, iso_defect(p, r), t + sign * r) for r in range(m)]
        return rank_of_family(fam, tol), m

    sa, sb = sum_operator(p.left), sum_operator(p.right)
    top, top_scale = sym_defect_with_scale(p, m - 1)
    lead = np.linalg.matrix_power(sa, m - 1)
    if fro(lead @ top) <= tol.threshold(fro(lead) * top_scale):
        raise PreconditionFailed("(sum A)^(m-1) d^(m-1)(I) vanishes")
    if family == "left":
        fam = [np.linalg.matrix_power(sa, r) @ sym_defect(p, r) for r in range(m)]
    elif family == "right":
        fam = [sym_defect(p, r) @ np.linalg.matrix_power(sb, r) for r in range(m)]
    else:
        raise InputError(f"family must be 'left' or 'right', got {family!r}")
    return rank_of_family(fam, tol), m


def forward_expansion_residual(p: TuplePair, m: int, n: int, tol: Tolerance = DEFAULT_TOL,
                               return_scale: bool = False):
    """``||E^n(I) - sum_{j<m} C(n, j) nabla^j(I)||_F`` with ``nabla = E - Id``.

    Valid for pairs with vanishing m-th isometric defect and ``n >= m``.
    With ``return_scale`` the largest summand norm is returned as well.
    """
    if m < 1:
        raise InputError("m must be positive")
    _check_order(m)
    if n < m or n > 2 * MAX_ORDER:
        raise PreconditionFailed(f"need m <= n <= {2 * MAX_ORDER}, got n = {n}")
    fp = floor_powers(p, None, n)
    top, top_scale = _alternating(fp, m)
    if fro(top) > tol.threshold(top_scale):
        raise PreconditionFailed(f"pair is not {m}-isometric")
    acc = np.zeros_like(fp[0])
    scale = fro(fp[n])
    for j in range(m):
        nabla_j = (-1) ** j * _alternating(fp, j)[0]
        term = comb(n, j) * nabla_j
        scale = max(scale, fro(term))
        acc += term
    res = fro(fp[n] - acc)
    return (res, scale) if return_scale else res


# ---------------------------------------------------------------------------
# tensor pairs in factorized form

def _kron_sum_norm(coeffs, xs, ys) -> float:
    """``||sum_j c_j xs[j] (x) ys[j]||_F`` without forming a Kronecker product.

    The Kronecker product is a permutation of ``vec(x) vec(y)^T``, so the
    norm equals ``||R_x diag(c) R_y^T||_F`` with ``R`` from thin QR of the
    stacked vectorizations.
    """
    vx = np.stack([x.ravel() for x in xs], axis=1)
    vy = np.stack([y.ravel() for y in ys], axis=1)
    rx = np.linalg.qr(vx, mode="r")
    ry = np.linalg.qr(vy, mode="r")
    return fro(rx @ np.diag(np.asarray(coeffs, dtype=np.complex128)) @ ry.T)


class _TensorProber:
    def __init__(self, p1: TuplePair, p2: TuplePair, kind: DefectKind):
        self.kind = kind
        self.a, self.b = _Prober(p1, kind), _Prober(p2, kind)

    def factors(self, k):
        self.a.extend(k)
        self.b.extend(k)
        if self.kind is DefectKind.ISOMETRIC:
            return self.a.fp[: k + 1], self.b.fp[: k + 1]
        xs = [self.a.sa[k - j] @ self.a.sb[j] for j in range(k + 1)]
        ys = [self.b.sa[k - j] @ self.b.sb[j] for j in range(k + 1)]
        return xs, ys

    def __call__(self, k):
        xs, ys = self.factors(k)
        coeffs = [(-1) ** j * comb(k, j) for j in range(k + 1)]
        scale = max(abs(c) * fro(x) * fro(y) for c, x, y in zip(coeffs, xs, ys))
        return _kron_sum_norm(coeffs, xs, ys), scale


def tensor_defect_norm(p1: TuplePair, p2: TuplePair, kind, k: int):
    """Norm and term scale of the order-k defect of the tensor pair at ``I (x) I``.

    Uses ``E_tensor^j(I (x) I) = E_1^j(I) (x) E_2^j(I)`` (isometric) and
    ``(sum S)^a (sum T)^b = (sum S_1)^a (sum T_1)^b (x) (sum S_2)^a (sum T_2)^b``
    (symmetric).
    """
    _check_order(k)
    return _TensorProber(p1, p2, DefectKind.parse(kind))(k)


def tensor_strictness_order(p1: TuplePair, p2: TuplePair, kind=DefectKind.ISOMETRIC,
                            max_m: int = MAX_ORDER, tol: Tolerance = DEFAULT_TOL) -> DefectReport:
    """:func:`strictness_order` of the tensor pair, computed factor-wise."""
    if p1.d != p2.d:
        raise ArityMismatch(f"{p1.d} != {p2.d}")
    kind = DefectKind.parse(kind)
    return _order_search(_TensorProber(p1, p2, kind), kind, max_m, tol)


# ---------------------------------------------------------------------------
# nested defects for the product strictness criterion

def nested_iso_defect(p1: TuplePair, a: int, p2: TuplePair, b: int):
    """``D_1^a(D_2^b(I))`` as a double alternating sum, with its term scale."""
    _check_order(a)
    _check_order(b)
    if p1.n != p2.n:
        raise DimensionMismatch(f"{p1.n} != {p2.n}")
    out = np.zeros((p1.n, p1.n), dtype=np.complex128)
    scale = 0.0
    for k, yk in enumerate(floor_powers(p2, None, b)):
        for j, z in enumerate(floor_powers(p1, yk, a)):
            w = (-1) ** (j + k) * comb(a, j) * comb(b, k)
            scale = max(scale, abs(w) * fro(z))
            out += w * z
    return out, scale


def nested_sym_defect(p1: TuplePair, a: int, p2: TuplePair, b: int, form: str = "inner_first"):
    """Symmetric product-strictness quantity, with its term scale.

    With ``sA_i``, ``sB_i`` the summed tuples, ``a = m_1 - 1`` and
    ``b = m_2 - 1``:

    * ``form="inner_first"``: ``sA_1^b d_2^b( d_1^a(I) sA_2^a )``
    * ``form="outer_first"``: ``d_1^a( sA_1^b d_2^b(I) ) sA_2^a``

    The two agree when the tuples commute across pairs.
    """
    _check_order(a)
    _check_order(b)
    if p1.n != p2.n:
        raise DimensionMismatch(f"{p1.n} != {p2.n}")
    sa1, sb1 = _powers(sum_operator(p1.left), a + b), _powers(sum_operator(p1.right), a)
    sa2, sb2 = _powers(sum_operator(p2.left), a + b), _powers(sum_operator(p2.right), b)
    out = np.zeros((p1.n, p1.n), dtype=np.complex128)
    scale = 0.0
    for j in range(a + 1):
        for k in range(b + 1):
            w = (-1) ** (j + k) * comb(a, j) * comb(b, k)
            if form == "inner_first":
                inner = sa1[a - j] @ sb1[j] @ sa2[a]
                z = sa1[b] @ sa2[b - k] @ inner @ sb2[k]
            elif form == "outer_first":
                inner = sa1[b] @ sa2[b - k] @ sb2[k]
                z = sa1[a - j] @ inner @ sb1[j] @ sa2[a]
            else:
                raise InputError(f"unknown form {form!r}")
            scale = max(scale, abs(w) * fro(z))
            out += w * z
    return out, scale
