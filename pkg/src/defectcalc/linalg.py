"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Functions here
never mutate their arguments; results that are handed to tuples are marked
read-only by :func:`as_matrix` with ``frozen=True``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InputError, Singular

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "identity",
    "nilpotent_jordan",
    "fro",
    "kron",
    "direct_sum",
    "inverse",
    "rank_of_family",
    "GramSchmidt",
]


@dataclass(frozen=True)
class Tolerance:
    """Zero test used throughout: ``M ~ 0`` iff ``||M||_F <= threshold(scale)``.

    ``scale`` is the largest Frobenius norm among the summands that produced
    ``M``, so cancellation in alternating sums is judged against the size of
    the terms, not of the (tiny) result.
    """

    abs_floor: float = 1e-12
    rel: float = 1e-9

    def __post_init__(self):
        if not (self.abs_floor >= 0 and self.rel >= 0):
            raise InputError("tolerances must be nonnegative")

    def threshold(self, scale: float = 0.0) -> float:
        return max(self.abs_floor, self.rel * float(scale))

    def is_zero(self, norm: float, scale: float = 0.0) -> bool:
        return norm <= self.threshold(scale)


DEFAULT_TOL = Tolerance()


def as_matrix(a, frozen: bool = False) -> np.ndarray:
    """Coerce ``a`` to a square finite complex matrix."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionMismatch(f"expected a nonempty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    if frozen:
        m.flags.writeable = False
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def nilpotent_jordan(n: int) -> np.ndarray:
    """The n x n nilpotent Jordan block (ones on the superdiagonal)."""
    return np.eye(n, k=1, dtype=np.complex128)


def fro(a) -> float:
    return float(np.linalg.norm(a))


def kron(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def direct_sum(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    na, nb = a.shape[0], b.shape[0]
    out = np.zeros((na + nb, na + nb), dtype=np.complex128)
    out[:na, :na] = a
    out[na:, na:] = b
    return out


def inverse(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting.

    Raises :class:`Singular` when a pivot falls below ``tol.threshold(||a||_F)``.
    """
    a = as_matrix(a)
    n = a.shape[0]
    pivot_floor = tol.threshold(fro(a))
    work = np.hstack([a.copy(), identity(n)])
    for col in range(n):
        p = col + int(np.argmax(np.abs(work[col:, col])))
        if abs(work[p, col]) <= pivot_floor:
            raise Singular(f"pivot {abs(work[p, col]):.3e} at column {col} below {pivot_floor:.3e}")
        if p != col:
            work[[col, p]] = work[[p, col]]
        work[col] /= work[col, col]
        others = np.arange(n) != col
        work[others] -= np.outer(work[others, col], work[col])
    return work[:, n:].copy()


class GramSchmidt:
    """Incremental modified Gram-Schmidt with one re-orthogonalization pass.

    Keeps the orthonormal basis ``Q`` and the upper triangular ``R`` of the
    accepted vectors so least-squares coefficients can be recovered.
    """

    def __init__(self):
        self.q: list[np.ndarray] = []
        self.r: list[np.ndarray] = []

    def __len__(self):
        return len(self.q)

    def project(self, v):
        """Return ``(residual, coeffs)`` with ``v = Q @ coeffs + residual``."""
        w = np.array(v, dtype=np.complex128).ravel()
        coeffs = np.zeros(len(self.q), dtype=np.complex128)
        for _ in range(2):
            for i, q in enumerate(self.q):
                h = np.vdot(q, w)
                coeffs[i] += h
                w = w - h * q
        return w, coeffs

    def append(self, residual, coeffs) -> None:
        nrm = np.linalg.norm(residual)
        self.q.append(residual / nrm)
        self.r.append(np.append(coeffs, nrm))

    def solve(self, coeffs) -> np.ndarray:
        """Solve ``R x = coeffs`` for the current basis (back substitution)."""
        k = len(self.r)
        R = np.zeros((k, k), dtype=np.complex128)
        for j, col in enumerate(self.r):
            R[: j + 1, j] = col
        x = np.zeros(k, dtype=np.complex128)
        for i in range(k - 1, -1, -1):
            x[i] = (coeffs[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
        return x


def rank_of_family(vs, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank of a family of same-size matrices, viewed as vectors.

    A member counts as dependent when its residual after projection on the
    previously accepted members is at most ``tol.rel`` times the largest
    member norm.
    """
    vs = [np.asarray(v, dtype=np.complex128) for v in vs]
    if not vs:
        raise InputError("empty family")
    shape = vs[0].shape
    if any(v.shape != shape for v in vs):
        raise DimensionMismatch("family members differ in shape")
    cutoff = tol.rel * max(fro(v) for v in vs)
    gs = GramSchmidt()
    for v in vs:
        res, coeffs = gs.project(v)
        if np.linalg.norm(res) > cutoff:
            gs.append(res, coeffs)
    return len(gs)
