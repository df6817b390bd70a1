"""Data model for size-k psd factorizations of a nonnegative matrix.

A factorization is a pair of factor lists (A side, B side) with
M_ij = trace(A^(i) B^(j)).  The module covers validation against M, the
GL(k) change-of-basis action, orthogonal-pair normalization, rank-one
profiling, a seeded random generator with a prescribed zero pattern, and
JSON (de)serialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .symcore import (
    EPS_DEFAULT,
    SymMat,
    det2,
    dot2,
    inner,
    is_rank_one,
    outer,
    principal_minor,
    psd_status,
    rank_one_direction,
    rank_one_vector,
)


@dataclass(frozen=True)
class PsdFactorization:
    """Factor lists plus (optionally) the target matrix M."""

    k: int
    A_factors: tuple
    B_factors: tuple
    M: tuple | None = None

    def __post_init__(self):
        if not self.A_factors or not self.B_factors:
            raise ValueError("factor lists must be nonempty")
        for X in list(self.A_factors) + list(self.B_factors):
            if X.k != self.k:
                raise ValueError("factor dimension mismatch")
        if self.M is not None:
            p, q = len(self.A_factors), len(self.B_factors)
            if len(self.M) != p or any(len(r) != q for r in self.M):
                raise ValueError("M has wrong shape")

    @property
    def p(self) -> int:
        return len(self.A_factors)

    @property
    def q(self) -> int:
        return len(self.B_factors)

    def with_M(self, M) -> "PsdFactorization":
        M = tuple(tuple(r) for r in M)
        return PsdFactorization(self.k, self.A_factors, self.B_factors, M)


def from_vectors(a_vectors, b_vectors) -> PsdFactorization:
    """All-rank-one factorization from lists of k-vectors."""
    A = tuple(outer(a) for a in a_vectors)
    B = tuple(outer(b) for b in b_vectors)
    F = PsdFactorization(A[0].k, A, B)
    return F.with_M(reconstruct(F))


def reconstruct(F: PsdFactorization):
    """Recompute M from the factors; raises if every factor vanishes."""
    if all(X.max_abs() == 0.0 for X in F.A_factors) or \
            all(X.max_abs() == 0.0 for X in F.B_factors):
        raise ValueError("all-zero factor list")
    return tuple(
        tuple(inner(A, B) for B in F.B_factors) for A in F.A_factors
    )


def reconstruct_array(F: PsdFactorization) -> np.ndarray:
    return np.array([[float(e) for e in row] for row in reconstruct(F)])


@dataclass(frozen=True)
class ValidationReport:
    psd_failures: tuple          # factor labels like "A1", "B3"
    max_product_error: float
    valid: bool


def validate(F: PsdFactorization, tol: float = EPS_DEFAULT) -> ValidationReport:
    """Check all factors psd and reconstruct(F) against the stored M."""
    failures = []
    for i, A in enumerate(F.A_factors, start=1):
        if not psd_status(A, tol).psd:
            failures.append(f"A{i}")
    for j, B in enumerate(F.B_factors, start=1):
        if not psd_status(B, tol).psd:
            failures.append(f"B{j}")
    err = 0.0
    if F.M is not None:
        R = reconstruct(F)
        for i in range(F.p):
            for j in range(F.q):
                err = max(err, abs(float(R[i][j]) - float(F.M[i][j])))
    scale = max([X.scale() for X in F.A_factors + F.B_factors])
    ok = not failures and err <= tol * scale * scale
    return ValidationReport(tuple(failures), err, ok)


def gl_act(F: PsdFactorization, S) -> PsdFactorization:
    """Change of basis A -> S^T A S, B -> S^{-1} B S^{-T}; M is unchanged."""
    S = np.asarray(S, dtype=float)
    if S.shape != (F.k, F.k):
        raise ValueError("S has wrong shape")
    det = np.linalg.det(S)
    if abs(det) <= EPS_DEFAULT:
        raise ValueError("S is singular")
    Sinv = np.linalg.inv(S)
    A = tuple(SymMat.from_rows(S.T @ X.to_array() @ S) for X in F.A_factors)
    B = tuple(SymMat.from_rows(Sinv @ X.to_array() @ Sinv.T)
              for X in F.B_factors)
    return PsdFactorization(F.k, A, B, F.M)


@dataclass(frozen=True)
class RankOneProfile:
    """Rank-one factors of a k=2 factorization, as vectors.

    Indices are 1-based.  ``a_indices[i]`` is the position in A_factors of the
    vector ``a_vectors[i]``.  ``orth_pairs`` are positions within the rank-one
    lists themselves (profile-local), as are ``degenerate_pairs`` entries
    ("A"/"B", i, j).  Exact integer or Fraction direction vectors are kept
    alongside when the source factors allow it; they agree with the float
    vectors up to positive scaling.
    """

    a_vectors: tuple
    b_vectors: tuple
    a_indices: tuple
    b_indices: tuple
    orth_pairs: tuple
    degenerate_pairs: tuple
    a_exact: tuple | None = None
    b_exact: tuple | None = None
    tol: float = EPS_DEFAULT

    @property
    def p_bar(self) -> int:
        return len(self.a_vectors)

    @property
    def q_bar(self) -> int:
        return len(self.b_vectors)


def rank_one_profile(F: PsdFactorization,
                     tol: float = EPS_DEFAULT) -> RankOneProfile:
    """Extract rank-one vectors, orthogonal pairs and degenerate pairs."""
    for i, X in enumerate(F.A_factors + F.B_factors):
        if not psd_status(X, tol).psd:
            raise ValueError("factorization contains a non-psd factor")

    def extract(factors):
        vecs, idxs, exact = [], [], []
        for i, X in enumerate(factors, start=1):
            if is_rank_one(X, tol):
                vecs.append(rank_one_vector(X, tol))
                idxs.append(i)
                exact.append(rank_one_direction(X) if X.is_exact() else None)
        return vecs, idxs, exact

    a_vecs, a_idx, a_ex = extract(F.A_factors)
    b_vecs, b_idx, b_ex = extract(F.B_factors)

    orth = []
    for i, a in enumerate(a_vecs, start=1):
        sa = max(1.0, float(np.max(np.abs(a))))
        for j, b in enumerate(b_vecs, start=1):
            sb = max(1.0, float(np.max(np.abs(b))))
            if abs(dot2(a, b)) <= tol * sa * sb:
                orth.append((i, j))

    degen = []
    for side, vecs in (("A", a_vecs), ("B", b_vecs)):
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                s = max(1.0, float(np.max(np.abs(vecs[i]))),
                        float(np.max(np.abs(vecs[j]))))
                if abs(det2(vecs[i], vecs[j])) <= tol * s * s:
                    degen.append((side, i + 1, j + 1))

    has_exact_a = all(e is not None for e in a_ex)
    has_exact_b = all(e is not None for e in b_ex)
    return RankOneProfile(
        a_vectors=tuple(tuple(v) for v in a_vecs),
        b_vectors=tuple(tuple(v) for v in b_vecs),
        a_indices=tuple(a_idx),
        b_indices=tuple(b_idx),
        orth_pairs=tuple(orth),
        degenerate_pairs=tuple(degen),
        a_exact=tuple(a_ex) if has_exact_a else None,
        b_exact=tuple(b_ex) if has_exact_b else None,
        tol=tol,
    )


def normalize_orthogonal_pair(F: PsdFactorization, i: int, j: int,
                              tol: float = EPS_DEFAULT):
    """Rotate so the i-th A-vector is (lambda,0) and j-th B-vector (0,mu).

    ``i`` and ``j`` are 1-based positions in the factor lists.  Returns the
    rotated factorization together with the orthogonal S used; applying
    :func:`gl_act` with S reproduces the output.
    """
    A = F.A_factors[i - 1]
    B = F.B_factors[j - 1]
    a = rank_one_vector(A, tol)
    b = rank_one_vector(B, tol)
    sa = max(1.0, float(np.max(np.abs(a))))
    sb = max(1.0, float(np.max(np.abs(b))))
    if abs(dot2(a, b)) > tol * sa * sb:
        raise ValueError(f"pair ({i},{j}) is not orthogonal")
    na = float(np.linalg.norm(a))
    # columns of S: a-direction, then the perpendicular; S^T a = (|a|, 0)
    u = a / na
    v = np.array([-u[1], u[0]])
    if dot2(v, b) < 0:
        v = -v
    S = np.column_stack([u, v])
    out = gl_act(F, S)
    return out, S


def generate_rank_one(p: int, q: int, zero_pattern, seed: int,
                      tol: float = EPS_DEFAULT) -> PsdFactorization:
    """Random all-rank-one factorization with M zero exactly on the pattern.

    ``zero_pattern`` holds 1-based (i,j) pairs.  Orthogonality is constructed,
    not sampled: for each prescribed zero, b_j is set perpendicular to a_i.
    Deterministic per seed; resamples on accidental degeneracy.
    """
    if p < 3 or q < 3:
        raise ValueError("p and q must both be >= 3 for a rank-3 target")
    zero_pattern = set(tuple(z) for z in zero_pattern)
    for (i, j) in zero_pattern:
        if not (1 <= i <= p and 1 <= j <= q):
            raise ValueError(f"zero pattern entry {(i, j)} out of range")
    cols = {}
    for (i, j) in zero_pattern:
        if j in cols and cols[j] != i:
            raise ValueError(
                "zero pattern needs two zeros in one column from different "
                "rows; not realizable with a single perpendicular direction"
            )
        cols[j] = i
    rng = np.random.default_rng(seed)
    for _ in range(100):
        theta = rng.uniform(0.0, math.pi, size=p)
        a = [np.array([math.cos(t), math.sin(t)]) * rng.uniform(0.5, 2.0)
             for t in theta]
        b = []
        for j in range(1, q + 1):
            if j in cols:
                ai = a[cols[j] - 1]
                d = np.array([-ai[1], ai[0]])
                d = d / np.linalg.norm(d)
            else:
                t = rng.uniform(0.0, math.pi)
                d = np.array([math.cos(t), math.sin(t)])
            b.append(d * rng.uniform(0.5, 2.0))
        F = from_vectors(a, b)
        prof = rank_one_profile(F, tol)
        if prof.degenerate_pairs:
            continue
        if set(prof.orth_pairs) != zero_pattern:
            continue
        if np.linalg.matrix_rank(reconstruct_array(F), tol=1e-8) != min(p, q, 3):
            continue
        return F
    raise ValueError("could not realize the requested zero pattern")


def append_rank_two_factors(F: PsdFactorization, extra_A, extra_B,
                            tol: float = EPS_DEFAULT) -> PsdFactorization:
    """Extend with positive definite factors; M is re-reconstructed."""
    for X in list(extra_A) + list(extra_B):
        st = psd_status(X, tol)
        if not st.psd or st.rank != X.k:
            raise ValueError("extra factors must be positive definite")
    out = PsdFactorization(
        F.k, F.A_factors + tuple(extra_A), F.B_factors + tuple(extra_B)
    )
    return out.with_M(reconstruct(out))


# JSON schema: {"k": 2, "A": [[a11, a12, a22], ...], "B": [...], "M": [[...]]}
# with symmetric matrices as upper-triangle triples in row order.  Scalars may
# be numbers or rational strings "num/den"; rational entries stay exact.

def _parse_scalar(x, path: str):
    if isinstance(x, bool):
        raise ValueError(f"{path}: expected a number")
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"{path}: bad rational literal {x!r}") from e
    raise ValueError(f"{path}: expected a number or 'num/den' string")


def _emit_scalar(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return float(f"{float(x):.17g}")


def factorization_from_dict(data: dict) -> PsdFactorization:
    if not isinstance(data, dict):
        raise ValueError("$: expected an object")
    k = data.get("k")
    if k != 2:
        raise ValueError("$.k: only k=2 is supported")
    n = k * (k + 1) // 2

    def parse_side(name):
        lst = data.get(name)
        if not isinstance(lst, list) or not lst:
            raise ValueError(f"$.{name}: expected a nonempty list")
        out = []
        for idx, tri in enumerate(lst):
            path = f"$.{name}[{idx}]"
            if not isinstance(tri, list) or len(tri) != n:
                raise ValueError(f"{path}: expected {n} upper-triangle entries")
            out.append(SymMat.from_upper(
                k, [_parse_scalar(e, f"{path}[{m}]") for m, e in enumerate(tri)]
            ))
        return tuple(out)

    A = parse_side("A")
    B = parse_side("B")
    M = None
    if data.get("M") is not None:
        rows = data["M"]
        if not isinstance(rows, list) or len(rows) != len(A):
            raise ValueError("$.M: expected one row per A-factor")
        M = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != len(B):
                raise ValueError(f"$.M[{i}]: expected one entry per B-factor")
            M.append(tuple(_parse_scalar(e, f"$.M[{i}][{j}]")
                           for j, e in enumerate(row)))
        M = tuple(M)
    return PsdFactorization(k, A, B, M)


def factorization_to_dict(F: PsdFactorization) -> dict:
    data = {
        "k": F.k,
        "A": [[_emit_scalar(e) for e in X.entries] for X in F.A_factors],
        "B": [[_emit_scalar(e) for e in X.entries] for X in F.B_factors],
    }
    if F.M is not None:
        data["M"] = [[_emit_scalar(e) for e in row] for row in F.M]
    return data
