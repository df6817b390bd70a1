"""Small symmetric-matrix arithmetic for psd factorization work.

All rigidity classifiers operate on 2x2 symmetric matrices; general k is
supported only where the trivial-motion machinery needs it (k <= 4 in
practice).  Entries may be floats or ``fractions.Fraction`` -- exact entries
survive every operation that does not require a square root, which is what the
exact sign-evaluation mode relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

# Global default tolerance for sign and rank decisions.
EPS_DEFAULT = 1e-9

SQRT2 = math.sqrt(2.0)


def _is_exact(x) -> bool:
    return isinstance(x, (Fraction, int))


@dataclass(frozen=True)
class SymMat:
    """A k x k real symmetric matrix, upper triangle stored row by row.

    ``entries`` holds (k11, k12, ..., k1k, k22, ..., kkk), i.e. row-major
    upper triangle.  Immutable; safe to share between threads.
    """

    k: int
    entries: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"dimension must be >= 1, got {self.k}")
        n = self.k * (self.k + 1) // 2
        if len(self.entries) != n:
            raise ValueError(
                f"expected {n} upper-triangle entries for k={self.k}, "
                f"got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows) -> "SymMat":
        """Build from a full square matrix (list of rows or ndarray)."""
        rows = [list(r) for r in rows]
        k = len(rows)
        for i in range(k):
            for j in range(i + 1, k):
                if not math.isclose(float(rows[i][j]), float(rows[j][i]),
                                    rel_tol=1e-12, abs_tol=1e-12):
                    raise ValueError("matrix is not symmetric")
        ents = tuple(rows[i][j] for i in range(k) for j in range(i, k))
        return cls(k, ents)

    @classmethod
    def from_upper(cls, k: int, upper) -> "SymMat":
        return cls(k, tuple(upper))

    def entry(self, i: int, j: int):
        """0-based entry access."""
        if i > j:
            i, j = j, i
        idx = i * self.k - i * (i - 1) // 2 + (j - i)
        return self.entries[idx]

    def to_array(self) -> np.ndarray:
        a = np.empty((self.k, self.k))
        for i in range(self.k):
            for j in range(i, self.k):
                a[i, j] = a[j, i] = float(self.entry(i, j))
        return a

    def is_exact(self) -> bool:
        return all(_is_exact(e) for e in self.entries)

    def max_abs(self) -> float:
        return max(abs(float(e)) for e in self.entries)

    def scale(self) -> float:
        """Scale used for tolerance decisions: max(1, largest entry)."""
        return max(1.0, self.max_abs())

    def __mul__(self, c):
        return SymMat(self.k, tuple(c * e for e in self.entries))

    __rmul__ = __mul__


def identity(k: int) -> SymMat:
    return SymMat.from_rows(np.eye(k))


def outer(v) -> SymMat:
    """The rank-one matrix v v^T."""
    v = list(v)
    k = len(v)
    return SymMat(k, tuple(v[i] * v[j] for i in range(k) for j in range(i, k)))


# Ordering of the half-vectorization: diagonal entries first, then the
# off-diagonal pairs (1,2),(1,3),...,(1,k),(2,3),...,(k-1,k) scaled by sqrt(2),
# so that dot(vec(X), vec(Y)) = trace(XY).

def sym_dim(k: int) -> int:
    return k * (k + 1) // 2


def vec_index(k: int, i: int, j: int) -> int:
    """Position of entry (i,j), 0-based, in the half-vectorization."""
    if i == j:
        return i
    if i > j:
        i, j = j, i
    # 1-based position m = i*k + j - C(i+1,2), shifted to 0-based
    i1, j1 = i + 1, j + 1
    return i1 * k + j1 - i1 * (i1 + 1) // 2 - 1


def vec_sym(X: SymMat) -> np.ndarray:
    """Half-vectorization (X11,...,Xkk, sqrt2*X12, ..., sqrt2*X(k-1)k)."""
    k = X.k
    v = np.empty(sym_dim(k))
    for i in range(k):
        v[i] = float(X.entry(i, i))
    for i in range(k):
        for j in range(i + 1, k):
            v[vec_index(k, i, j)] = SQRT2 * float(X.entry(i, j))
    return v


def unvec_sym(v, k: int) -> SymMat:
    """Inverse of :func:`vec_sym`."""
    v = np.asarray(v, dtype=float)
    if v.shape != (sym_dim(k),):
        raise ValueError(f"expected length {sym_dim(k)} for k={k}")
    rows = np.empty((k, k))
    for i in range(k):
        rows[i, i] = v[i]
    for i in range(k):
        for j in range(i + 1, k):
            rows[i, j] = rows[j, i] = v[vec_index(k, i, j)] / SQRT2
    return SymMat.from_rows(rows)


def inner(X: SymMat, Y: SymMat):
    """trace(XY); equals dot(vec(X), vec(Y)).  Exact on exact entries."""
    if X.k != Y.k:
        raise ValueError(f"dimension mismatch: {X.k} vs {Y.k}")
    k = X.k
    total = 0
    for i in range(k):
        for j in range(k):
            total += X.entry(i, j) * Y.entry(j, i)
    return total


def _det(rows):
    """Determinant by cofactor expansion; preserves exact arithmetic."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = 0
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det(minor)
        total += term if j % 2 == 0 else -term
    return total


def principal_minor(X: SymMat, I):
    """Determinant of the principal submatrix with 0-based indices I."""
    I = sorted(set(I))
    if not I:
        raise ValueError("index set must be nonempty")
    if I[0] < 0 or I[-1] >= X.k:
        raise ValueError(f"index set {I} out of range for k={X.k}")
    rows = [[X.entry(i, j) for j in I] for i in I]
    return _det(rows)


@dataclass(frozen=True)
class PsdStatus:
    rank: int
    psd: bool


def psd_status(X: SymMat, tol: float = EPS_DEFAULT) -> PsdStatus:
    """Psd test via principal minors and numeric rank at tolerance ``tol``."""
    if tol < 0:
        raise ValueError("tolerance must be >= 0")
    k = X.k
    s = X.scale()
    psd = True
    for m in range(1, k + 1):
        for I in combinations(range(k), m):
            if float(principal_minor(X, I)) < -tol * s ** m:
                psd = False
                break
        if not psd:
            break
    sv = np.linalg.svd(X.to_array(), compute_uv=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0] if len(sv) else 1.0)))
    return PsdStatus(rank=rank, psd=psd)


def is_rank_one(X: SymMat, tol: float = EPS_DEFAULT) -> bool:
    """Scale-aware rank-one test: det <= tol*trace^2 with positive trace."""
    tr = float(sum(X.entry(i, i) for i in range(X.k)))
    if tr <= tol:
        return False
    det = abs(float(principal_minor(X, range(X.k)))) if X.k == 2 else None
    if X.k == 2:
        return det <= tol * tr * tr
    return psd_status(X, tol).rank == 1


def rank_one_vector(X: SymMat, tol: float = EPS_DEFAULT) -> np.ndarray:
    """Recover a with a a^T = X for a psd rank-one X.

    Sign convention: first nonzero coordinate positive.
    """
    st = psd_status(X, tol)
    if not st.psd:
        raise ValueError("matrix is not psd")
    if st.rank != 1:
        raise ValueError(f"matrix has rank {st.rank}, expected 1")
    arr = X.to_array()
    i = int(np.argmax(np.diag(arr)))
    a = arr[:, i] / math.sqrt(arr[i, i])
    s = X.scale()
    for c in a:
        if abs(c) > tol * s:
            if c < 0:
                a = -a
            break
    if np.max(np.abs(np.outer(a, a) - arr)) > max(tol, tol * s * s):
        raise ValueError("matrix is not rank one within tolerance")
    return a


def rank_one_direction(X: SymMat):
    """A vector proportional to a with a a^T = X, in X's own arithmetic.

    Unlike :func:`rank_one_vector` this avoids square roots, so exact entries
    stay exact; only the direction (up to positive scaling) is meaningful.
    Sign convention: first nonzero coordinate positive.
    """
    k = X.k
    best, best_mag = None, 0.0
    for i in range(k):
        row = [X.entry(i, j) for j in range(k)]
        mag = max(abs(float(e)) for e in row)
        if mag > best_mag:
            best, best_mag = row, mag
    if best is None or best_mag == 0.0:
        raise ValueError("zero matrix has no rank-one direction")
    for c in best:
        if float(c) != 0.0:
            if float(c) < 0:
                best = [-e for e in best]
            break
    return tuple(best)


def det2(u, v):
    """2x2 determinant of the columns u, v."""
    return u[0] * v[1] - u[1] * v[0]


def dot2(u, v):
    return u[0] * v[0] + u[1] * v[1]
