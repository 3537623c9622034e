"""Commuting d-tuples of matrices and the constructions built from them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ArityMismatch, DimensionMismatch, InputError, NotCommuting, NotCrossCommuting, ZeroScalar
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, fro, kron

__all__ = [
    "OperatorTuple",
    "TuplePair",
    "CommutationReport",
    "validate_commuting",
    "cross_commutes",
    "tensor_tuple",
    "product_tuple",
    "sum_operator",
    "scale_pair",
    "hilbert_pair",
    "tensor_pair",
    "product_pair",
]


class OperatorTuple:
    """An ordered tuple ``(A_1, ..., A_d)`` of equal-size square matrices.

    Entries are stored read-only.  ``validated`` is set only by
    :meth:`checked`, which runs the commutator test once.
    """

    __slots__ = ("entries", "validated")

    def __init__(self, entries: Sequence, validated: bool = False):
        mats = tuple(as_matrix(e, frozen=True) for e in entries)
        if not mats:
            raise InputError("a tuple needs at least one entry")
        n = mats[0].shape[0]
        if any(m.shape[0] != n for m in mats):
            raise DimensionMismatch("tuple entries differ in dimension")
        self.entries = mats
        self.validated = validated

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return self.entries[0].shape[0]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __repr__(self):
        return f"OperatorTuple(d={self.d}, n={self.n}, validated={self.validated})"

    def scaled(self, c) -> "OperatorTuple":
        return OperatorTuple([c * a for a in self.entries], self.validated)

    def adjoint(self) -> "OperatorTuple":
        return OperatorTuple([a.conj().T for a in self.entries], self.validated)

    def map(self, f) -> "OperatorTuple":
        return OperatorTuple([f(a) for a in self.entries])

    def checked(self, tol: Tolerance = DEFAULT_TOL) -> "OperatorTuple":
        """Return a copy flagged as validated, or raise :class:`NotCommuting`."""
        if self.validated:
            return self
        rep = validate_commuting(self, tol)
        if not rep.ok:
            raise NotCommuting(f"commutator norm {rep.max_norm:.3e} at entries {rep.worst}")
        return OperatorTuple(self.entries, validated=True)


@dataclass(frozen=True)
class TuplePair:
    """The pair ``(A, B)`` every defect operator acts on."""

    left: OperatorTuple
    right: OperatorTuple

    def __post_init__(self):
        if self.left.d != self.right.d:
            raise ArityMismatch(f"left has {self.left.d} entries, right has {self.right.d}")
        if self.left.n != self.right.n:
            raise DimensionMismatch(f"left is {self.left.n}-dimensional, right is {self.right.n}")

    @classmethod
    def of(cls, left, right) -> "TuplePair":
        """Build from plain sequences of matrices (or single matrices)."""
        return cls(_as_tuple(left), _as_tuple(right))

    @property
    def d(self) -> int:
        return self.left.d

    @property
    def n(self) -> int:
        return self.left.n


def _as_tuple(x) -> OperatorTuple:
    if isinstance(x, OperatorTuple):
        return x
    if isinstance(x, np.ndarray) and x.ndim == 2:
        return OperatorTuple([x])
    return OperatorTuple(list(x))


class CommutationReport(NamedTuple):
    max_norm: float
    worst: tuple[int, int] | None
    threshold: float
    ok: bool


def _commutator_scan(xs, ys, pairs, tol) -> CommutationReport:
    best, worst, scale = 0.0, None, 0.0
    for i, j in pairs:
        xy, yx = xs[i] @ ys[j], ys[j] @ xs[i]
        c = fro(xy - yx)
        scale = max(scale, fro(xy), fro(yx))
        if worst is None or c > best:
            best, worst = c, (i, j)
    thr = tol.threshold(scale)
    return CommutationReport(best, worst, thr, best <= thr)


def validate_commuting(t: OperatorTuple, tol: Tolerance = DEFAULT_TOL) -> CommutationReport:
    """Largest ``||[A_i, A_j]||_F`` over ``i < j`` and the verdict."""
    pairs = [(i, j) for i in range(t.d) for j in range(i + 1, t.d)]
    return _commutator_scan(t.entries, t.entries, pairs, tol)


def cross_commutes(t1: OperatorTuple, t2: OperatorTuple, tol: Tolerance = DEFAULT_TOL) -> CommutationReport:
    """Largest ``||A_i B_j - B_j A_i||_F`` over all ``i, j``."""
    if t1.n != t2.n:
        raise DimensionMismatch(f"{t1.n} != {t2.n}")
    pairs = [(i, j) for i in range(t1.d) for j in range(t2.d)]
    return _commutator_scan(t1.entries, t2.entries, pairs, tol)


def tensor_tuple(t1: OperatorTuple, t2: OperatorTuple) -> OperatorTuple:
    """The d**2-tuple ``(A_1(x)B_1, ..., A_1(x)B_d, A_2(x)B_1, ...)``.

    Entry ``i * d + k`` (0-based) is ``A_i (x) B_k``.
    """
    if t1.d != t2.d:
        raise ArityMismatch(f"{t1.d} != {t2.d}")
    return OperatorTuple([kron(a, b) for a in t1 for b in t2])


def product_tuple(t1: OperatorTuple, t2: OperatorTuple, tol: Tolerance = DEFAULT_TOL) -> OperatorTuple:
    """The d**2-tuple of products ``A_{1i} A_{2k}``, same ordering as :func:`tensor_tuple`.

    The factors must cross-commute; this is checked.
    """
    if t1.d != t2.d:
        raise ArityMismatch(f"{t1.d} != {t2.d}")
    rep = cross_commutes(t1, t2, tol)
    if not rep.ok:
        raise NotCrossCommuting(f"cross commutator norm {rep.max_norm:.3e} at {rep.worst}")
    return OperatorTuple([a @ b for a in t1 for b in t2])


def sum_operator(t: OperatorTuple) -> np.ndarray:
    return sum(t.entries[1:], t.entries[0].copy())


def scale_pair(p: TuplePair, c) -> TuplePair:
    """``(A, c B)``; the left tuple is untouched."""
    if c == 0:
        raise ZeroScalar("gauge scalar must be nonzero")
    return TuplePair(p.left, p.right.scaled(c))


def hilbert_pair(t: OperatorTuple) -> TuplePair:
    """``(A*, A)``, which turns the pair defects into the Hilbert-space ones."""
    return TuplePair(t.adjoint(), t)


def tensor_pair(p1: TuplePair, p2: TuplePair) -> TuplePair:
    return TuplePair(tensor_tuple(p1.left, p2.left), tensor_tuple(p1.right, p2.right))


def product_pair(p1: TuplePair, p2: TuplePair, tol: Tolerance = DEFAULT_TOL) -> TuplePair:
    return TuplePair(product_tuple(p1.left, p2.left, tol), product_tuple(p1.right, p2.right, tol))
