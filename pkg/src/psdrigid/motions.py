"""Infinitesimal motions of size-2 psd factorizations.

A motion is encoded by a square matrix D of side binom(k+1,2) acting on
half-vectorized factors: vec(Adot) = vec(A) D (row form) and
vec(Bdot) = -D vec(B) (column form).  This pairing keeps every inner product
<A_i, B_j> constant to first order for any D, so the only content of the
motion conditions is nonnegativity of the principal minors of the deformed
factors, truncated at order s.

The module provides the trivial-motion bases, the linear (alpha) and
quadratic (beta) Taylor coefficients of rank-one factor determinants, the
cone systems built from alpha rows with their closed-form kernels, a strict
feasibility test for the cone, the exact order-s motion predicate, and
closed-form 2-infinitesimal motion solvers for each orthogonal-pair regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .factorization import (
    PsdFactorization,
    RankOneProfile,
    from_vectors,
    gl_act,
    rank_one_profile,
)
from .symcore import (
    EPS_DEFAULT,
    SQRT2,
    SymMat,
    outer,
    sym_dim,
    unvec_sym,
    vec_index,
    vec_sym,
)


@dataclass(frozen=True)
class MotionMatrix:
    """Wrapper around the square motion matrix D."""

    D: tuple  # rows as tuples, immutable

    @classmethod
    def from_array(cls, arr) -> "MotionMatrix":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("D must be square")
        return cls(tuple(tuple(float(x) for x in row) for row in arr))

    @classmethod
    def from_vec9(cls, v) -> "MotionMatrix":
        v = np.asarray(v, dtype=float)
        n = int(round(math.sqrt(v.size)))
        if n * n != v.size:
            raise ValueError("flattened motion has non-square length")
        return cls.from_array(v.reshape(n, n))

    @property
    def n(self) -> int:
        return len(self.D)

    def to_array(self) -> np.ndarray:
        return np.array(self.D, dtype=float)

    @property
    def vec9(self) -> np.ndarray:
        """Row-major flattening (D11, D12, D13, D21, ..., D33) for n=3."""
        return self.to_array().reshape(-1)


def scalar_motion(d: float = 1.0, n: int = 3) -> MotionMatrix:
    return MotionMatrix.from_array(d * np.eye(n))


def motion_derivative(X: SymMat, D: MotionMatrix, side: str) -> SymMat:
    """The factor derivative induced by D on one side."""
    v = vec_sym(X)
    if side == "A":
        return unvec_sym(v @ D.to_array(), X.k)
    if side == "B":
        return unvec_sym(-(D.to_array() @ v), X.k)
    raise ValueError("side must be 'A' or 'B'")


# --- trivial motions ---------------------------------------------------------

def trivial_basis_k2():
    """The four generators of the 1-trivial motions for k=2."""
    D1 = [[2, 0, 0], [0, 0, 0], [0, 0, 1]]
    D2 = [[0, 0, 0], [0, 2, 0], [0, 0, 1]]
    D3 = [[0, 0, 0], [0, 0, SQRT2], [SQRT2, 0, 0]]
    D4 = [[0, 0, SQRT2], [0, 0, 0], [0, SQRT2, 0]]
    return [MotionMatrix.from_array(D) for D in (D1, D2, D3, D4)]


def trivial_basis_general(k: int):
    """k^2 tangent generators of the GL(k) orbit, general dimension.

    k generators of diagonal type (one per index i) and k(k-1) of mixing type
    (one per ordered pair).  The diagonal-type generators sum to 2I.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    n = sym_dim(k)
    out = []
    for i in range(k):
        D = np.zeros((n, n))
        D[vec_index(k, i, i), vec_index(k, i, i)] = 2.0
        for j in range(k):
            if j != i:
                m = vec_index(k, i, j)
                D[m, m] = 1.0
        out.append(MotionMatrix.from_array(D))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            D = np.zeros((n, n))
            D[vec_index(k, i, j), vec_index(k, j, j)] = SQRT2
            D[vec_index(k, i, i), vec_index(k, i, j)] = SQRT2
            for l in range(k):
                if l != i and l != j:
                    D[vec_index(k, i, l), vec_index(k, j, l)] = 1.0
            out.append(MotionMatrix.from_array(D))
    return out


def trivial_span_matrix(s: int, n: int = 3) -> np.ndarray:
    """Flattened basis of the s-trivial motions, one per row."""
    if s == 1 and n == 3:
        return np.vstack([D.vec9 for D in trivial_basis_k2()])
    return np.eye(n).reshape(1, -1)


# --- alpha rows and beta quadratics ------------------------------------------

def alpha_row(v, side: str) -> np.ndarray:
    """Linear Taylor coefficient of det(vv^T + t Fdot) as a row over vec9(D).

    For side A the derivative is vec(vv^T) D, for side B it is -D vec(vv^T).
    """
    x, y = float(v[0]), float(v[1])
    if side == "A":
        return np.array([
            x * x * y * y,
            x ** 4,
            -SQRT2 * x ** 3 * y,
            y ** 4,
            x * x * y * y,
            -SQRT2 * x * y ** 3,
            SQRT2 * x * y ** 3,
            SQRT2 * x ** 3 * y,
            -2 * x * x * y * y,
        ])
    if side == "B":
        return np.array([
            -x * x * y * y,
            -y ** 4,
            -SQRT2 * x * y ** 3,
            -x ** 4,
            -x * x * y * y,
            -SQRT2 * x ** 3 * y,
            SQRT2 * x ** 3 * y,
            SQRT2 * x * y ** 3,
            2 * x * x * y * y,
        ])
    raise ValueError("side must be 'A' or 'B'")


# vec9 positions dropped in the one-orthogonal-pair frame (D12, D13, D32)
ONE_ORTH_DROPPED = (1, 2, 7)
ONE_ORTH_KEPT = tuple(m for m in range(9) if m not in ONE_ORTH_DROPPED)


def alpha_row_one_orth(v, side: str) -> np.ndarray:
    """Alpha row in the reduced 6-column frame with D12=D13=D32=0."""
    return alpha_row(v, side)[list(ONE_ORTH_KEPT)]


def embed_one_orth(d6) -> np.ndarray:
    """Lift a reduced 6-vector to a full vec9 with zeros in dropped slots."""
    d6 = np.asarray(d6, dtype=float)
    out = np.zeros(9)
    out[list(ONE_ORTH_KEPT)] = d6
    return out


def beta_quadratic(v, side: str, D: MotionMatrix) -> float:
    """Quadratic Taylor coefficient: the determinant of the derivative."""
    X = outer((float(v[0]), float(v[1])))
    Xdot = motion_derivative(X, D, side)
    a, b, c = (float(e) for e in Xdot.entries)  # (11, 12, 22)
    return a * c - b * b


# --- cone systems ------------------------------------------------------------

@dataclass(frozen=True)
class ConeSystem:
    C: np.ndarray
    row_labels: tuple     # ("A", i) / ("B", j), profile-local 1-based
    variant: str          # "full" | "one_orth"

    @property
    def p_rows(self) -> int:
        return sum(1 for s, _ in self.row_labels if s == "A")

    @property
    def q_rows(self) -> int:
        return sum(1 for s, _ in self.row_labels if s == "B")


def build_cone_system(profile: RankOneProfile, variant: str) -> ConeSystem:
    """Stack alpha rows, A side first then B side, in profile order.

    The one_orth variant expects a profile normalized so that the orthogonal
    pair sits at position (1,1) with a_1 on the first axis and b_1 on the
    second; the rows of those two factors are omitted.
    """
    if variant == "full":
        rows = [alpha_row(a, "A") for a in profile.a_vectors]
        rows += [alpha_row(b, "B") for b in profile.b_vectors]
        labels = [("A", i + 1) for i in range(profile.p_bar)]
        labels += [("B", j + 1) for j in range(profile.q_bar)]
        return ConeSystem(np.array(rows), tuple(labels), "full")
    if variant == "one_orth":
        if (1, 1) not in profile.orth_pairs:
            raise ValueError("one_orth frame requires the pair at (1,1)")
        a1, b1 = profile.a_vectors[0], profile.b_vectors[0]
        tol = profile.tol
        if abs(a1[1]) > tol * max(1.0, abs(a1[0])) or \
                abs(b1[0]) > tol * max(1.0, abs(b1[1])) or \
                a1[0] <= 0 or b1[1] <= 0:
            raise ValueError("profile not normalized to the one_orth frame")
        rows = [alpha_row_one_orth(a, "A") for a in profile.a_vectors[1:]]
        rows += [alpha_row_one_orth(b, "B") for b in profile.b_vectors[1:]]
        labels = [("A", i + 2) for i in range(profile.p_bar - 1)]
        labels += [("B", j + 2) for j in range(profile.q_bar - 1)]
        return ConeSystem(np.array(rows), tuple(labels), "one_orth")
    raise ValueError(f"unknown variant {variant!r}")


def right_kernel_structured(variant: str):
    """Universal right-kernel vectors of the cone system."""
    if variant == "full":
        return [
            np.array([2.0, 0, 0, 0, 0, 0, 0, 0, 1]),
            np.array([0, 0, 0, 0, 2.0, 0, 0, 0, 1]),
            np.array([0, 0, 1.0, 0, 0, 0, 0, 1, 0]),
            np.array([0, 0, 0, 0, 0, 1.0, 1, 0, 0]),
        ]
    if variant == "one_orth":
        return [
            np.array([2.0, 0, 0, 0, 0, 1]),
            np.array([0, 0, 2.0, 0, 0, 1]),
            np.array([0, 0, 0, 1.0, 1, 0]),
        ]
    raise ValueError(f"unknown variant {variant!r}")


def _kernel_products(a_vecs, b_vecs, skip, include_pair):
    """Signed product over all det/inner factors not involving one vector.

    ``skip`` is ("A", i) or ("B", j) naming the excluded vector (1-based);
    ``include_pair(i, j)`` filters the cross inner-product terms.
    """
    def d2(u, v):
        return u[0] * v[1] - u[1] * v[0]

    def dot(u, v):
        return u[0] * v[0] + u[1] * v[1]

    total = 1
    for i in range(len(a_vecs)):
        for j in range(i + 1, len(a_vecs)):
            if skip == ("A", i + 1) or skip == ("A", j + 1):
                continue
            total = total * d2(a_vecs[i], a_vecs[j])
    for i in range(len(b_vecs)):
        for j in range(i + 1, len(b_vecs)):
            if skip == ("B", i + 1) or skip == ("B", j + 1):
                continue
            total = total * d2(b_vecs[i], b_vecs[j])
    for i in range(len(a_vecs)):
        for j in range(len(b_vecs)):
            if not include_pair(i + 1, j + 1):
                continue
            if skip == ("A", i + 1) or skip == ("B", j + 1):
                continue
            total = total * dot(a_vecs[i], b_vecs[j])
    return total


def left_kernel_formula(profile: RankOneProfile, variant: str,
                        exact: bool = False) -> np.ndarray | list:
    """Closed-form left-kernel generator of the cone system.

    Applies in the six-rank-one-vector regime.  With ``exact`` the products
    are taken over the profile's exact direction vectors (directions only;
    the result spans the same ray).
    """
    if profile.p_bar + profile.q_bar != 6:
        raise ValueError("closed-form kernel needs six rank-one vectors")
    p = profile.p_bar
    if exact:
        if profile.a_exact is None or profile.b_exact is None:
            raise ValueError("profile has no exact direction vectors")
        a_vecs = list(profile.a_exact)
        b_vecs = list(profile.b_exact)
    else:
        a_vecs = [tuple(v) for v in profile.a_vectors]
        b_vecs = [tuple(v) for v in profile.b_vectors]

    if variant == "full":
        ks = list(range(1, 7))
        include = lambda i, j: True
    elif variant == "one_orth":
        if (1, 1) not in profile.orth_pairs:
            raise ValueError("one_orth frame requires the pair at (1,1)")
        # the formula is stated for unit axis vectors in the first slots
        one = a_vecs[0][0] / a_vecs[0][0]
        a_vecs[0] = (one, one - one)
        b_vecs[0] = (one - one, one)
        ks = [k for k in range(2, 7) if k != p + 1]
        include = lambda i, j: i + j > 2
    else:
        raise ValueError(f"unknown variant {variant!r}")

    out = []
    for k in ks:
        skip = ("A", k) if k <= p else ("B", k - p)
        sign = (-1) ** (k + (1 if k >= p + 1 else 0))
        out.append(sign * _kernel_products(a_vecs, b_vecs, skip, include))
    if exact:
        return out
    return np.array([float(x) for x in out])


def left_kernel_minors(system: ConeSystem) -> np.ndarray:
    """Left-kernel vector from maximal minors of independent columns.

    Returns the zero vector when the system is rank deficient.
    """
    C = system.C
    m = C.shape[0]
    if system.variant == "full":
        if m != 6:
            raise ValueError("minor-based kernel needs 6 rows")
        sub = C[:, [0, 1, 2, 3, 5]]
        p_bar = system.p_rows
        base_sign = (-1) ** p_bar
        out = np.empty(6)
        for i in range(6):
            minor = np.delete(sub, i, axis=0)
            out[i] = base_sign * ((-1) ** i) * np.linalg.det(minor)
    elif system.variant == "one_orth":
        if m != 4:
            raise ValueError("minor-based kernel needs 4 rows")
        sub = C[:, [0, 1, 4]]
        out = np.empty(4)
        for i in range(4):
            minor = np.delete(sub, i, axis=0)
            out[i] = ((-1) ** i) * np.linalg.det(minor)
    else:
        raise ValueError(f"unknown variant {system.variant!r}")
    scale = np.max(np.abs(out))
    full_scale = np.max(np.abs(C)) ** (C.shape[0] - 1)
    if scale <= 1e-12 * max(1.0, full_scale):
        return np.zeros(m)
    return out


def cone_full_dimensional(system: ConeSystem, tol: float = EPS_DEFAULT,
                          return_witness: bool = False):
    """Strict feasibility of C D > 0 decided by a bounded LP.

    Maximizes t subject to C D >= t on unit-normalized nonzero rows with
    t <= 1 and box bounds on D; full-dimensional iff the optimum is positive.
    With ``return_witness`` also returns D scaled so that C D >= 1 on the
    original rows (None when not full-dimensional).
    """
    C = np.asarray(system.C, dtype=float)
    norms = np.max(np.abs(C), axis=1) if C.size else np.array([])
    scale = max(1.0, float(np.max(norms))) if norms.size else 1.0
    keep = norms > tol * scale
    if not np.any(keep):
        # no active constraints: the cone is the whole space
        witness = np.zeros(C.shape[1]) if C.size else np.zeros(0)
        return (True, witness) if return_witness else True
    Cn = C[keep] / norms[keep, None]
    n = Cn.shape[1]
    # variables (D, t); linprog minimizes, so use -t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-Cn, np.ones((Cn.shape[0], 1))])
    b_ub = np.zeros(Cn.shape[0])
    bounds = [(-100.0, 100.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"feasibility LP failed: {res.message}")
    t = -res.fun
    full = t > max(tol, 1e-9)
    if not return_witness:
        return full
    if not full:
        return False, None
    D = res.x[:n]
    margins = C[keep] @ D
    witness = D / float(np.min(margins))
    return True, witness


# --- the exact order-s motion predicate --------------------------------------

def _minor_poly_coeffs(X: SymMat, Xdot: SymMat, I):
    """Coefficients (c0, c1[, c2]) of det([X + t Xdot]_I) for |I| <= 2."""
    I = sorted(I)
    if len(I) == 1:
        i = I[0]
        return [float(X.entry(i, i)), float(Xdot.entry(i, i))]
    i, j = I
    c0 = float(X.entry(i, i)) * float(X.entry(j, j)) - float(X.entry(i, j)) ** 2
    c1 = (float(X.entry(i, i)) * float(Xdot.entry(j, j))
          + float(Xdot.entry(i, i)) * float(X.entry(j, j))
          - 2 * float(X.entry(i, j)) * float(Xdot.entry(i, j)))
    c2 = (float(Xdot.entry(i, i)) * float(Xdot.entry(j, j))
          - float(Xdot.entry(i, j)) ** 2)
    return [c0, c1, c2]


def first_sign_nonnegative(coeffs, threshold: float) -> bool:
    """Whether c0 + c1 t + ... is >= 0 on some [0, eps).

    Decided by the lowest-order coefficient whose magnitude exceeds the
    threshold; an all-negligible polynomial counts as nonnegative.
    """
    for c in coeffs:
        if abs(c) > threshold:
            return c > 0
    return True


def is_s_inf_motion(F: PsdFactorization, D: MotionMatrix, s: int,
                    tol: float = EPS_DEFAULT) -> bool:
    """Order-s motion test: truncated minors nonnegative near t=0."""
    if F.k != 2:
        raise ValueError("motion predicate implemented for k=2")
    if s not in (1, 2):
        raise ValueError("s must be 1 or 2")
    d_scale = max(1.0, float(np.max(np.abs(D.to_array()))))
    for side, factors in (("A", F.A_factors), ("B", F.B_factors)):
        for X in factors:
            Xdot = motion_derivative(X, D, side)
            sc = max(1.0, X.scale() * d_scale)
            for I in ((0,), (1,), (0, 1)):
                coeffs = _minor_poly_coeffs(X, Xdot, I)[: s + 1]
                if not first_sign_nonnegative(coeffs, tol * sc ** len(I)):
                    return False
    return True


# --- conjugation under the GL(2) action --------------------------------------

def induced_vec_matrix(S) -> np.ndarray:
    """The 3x3 matrix with vec(S^T X S) = vec(X) @ induced_vec_matrix(S)."""
    S = np.asarray(S, dtype=float)
    k = S.shape[0]
    n = sym_dim(k)
    rows = []
    for m in range(n):
        e = np.zeros(n)
        e[m] = 1.0
        E = unvec_sym(e, k).to_array()
        rows.append(vec_sym(SymMat.from_rows(S.T @ E @ S)))
    return np.vstack(rows)


def conj_motion(D: MotionMatrix, S) -> MotionMatrix:
    """Transport a motion of F to the corresponding motion of gl_act(F, S)."""
    V = induced_vec_matrix(S)
    return MotionMatrix.from_array(np.linalg.inv(V) @ D.to_array() @ V)


# --- 2-infinitesimal motion solvers ------------------------------------------

@dataclass(frozen=True)
class MotionSpace:
    kind: str            # "trivial_only" | "affine_flex" | "cone_flex"
    basis: tuple         # MotionMatrix generators, scalar motion included
    witness: MotionMatrix | None = None   # a nontrivial motion when flexible


def _frame_to_x_axis(a) -> np.ndarray:
    """Invertible S with S^T a = (1, 0)."""
    a = np.asarray(a, dtype=float)
    n2 = float(a @ a)
    return np.column_stack([a / n2, np.array([-a[1], a[0]])])


def _orth_frame(a, b) -> np.ndarray:
    """Orthogonal S with S^T a on the positive first axis and S^T b on the
    positive second axis; requires a perpendicular to b."""
    a = np.asarray(a, dtype=float)
    u = a / np.linalg.norm(a)
    v = np.array([-u[1], u[0]])
    if float(v @ np.asarray(b, dtype=float)) < 0:
        v = -v
    return np.column_stack([u, v])


def _transform_vectors(profile_vecs, S, side: str):
    S = np.asarray(S, dtype=float)
    if side == "A":
        return [tuple(S.T @ np.asarray(v, dtype=float)) for v in profile_vecs]
    Sinv = np.linalg.inv(S)
    return [tuple(Sinv @ np.asarray(v, dtype=float)) for v in profile_vecs]


def _r_system_solve(a_rows, b_rows, tol: float):
    """Solve the stacked homogeneous system in (r1 - r2, r_mix).

    Rows (sqrt2*a1, a2) per remaining A-vector and (sqrt2*b2, -b1) per
    B-vector; returns a basis of the nullspace.
    """
    rows = [(SQRT2 * a[0], a[1]) for a in a_rows]
    rows += [(SQRT2 * b[1], -b[0]) for b in b_rows]
    G = np.array(rows, dtype=float)
    scale = max(1.0, float(np.max(np.abs(G))))
    _, sv, Vt = np.linalg.svd(G)
    null = [Vt[i] for i in range(2) if i >= len(sv) or sv[i] <= tol * scale * 10]
    return null


def solve_two_inf_no_orth(profile: RankOneProfile,
                          tol: float = EPS_DEFAULT) -> MotionSpace:
    """2-infinitesimal motion space when M is zero-free and the cone is flat.

    The caller must have established that every 1-infinitesimal motion is
    1-trivial; the solver then works inside the 1-trivial span.
    """
    S = _frame_to_x_axis(profile.a_vectors[0])
    a = _transform_vectors(profile.a_vectors, S, "A")
    b = _transform_vectors(profile.b_vectors, S, "B")
    if len(a) >= 3:
        d23 = a[1][0] * a[2][1] - a[1][1] * a[2][0]
        s = max(1.0, *(abs(x) for v in (a[1], a[2]) for x in v))
        if abs(d23) <= tol * s * s:
            raise ValueError("degenerate frame: dependent remaining A-vectors")
    null = _r_system_solve(a[1:], b, tol)
    if not null:
        return MotionSpace("trivial_only", (scalar_motion(),))
    basis = [scalar_motion()]
    witness = None
    for (dr, r4) in null:
        # r3 = 0 is forced by the first factor's quadratic term
        d9 = np.array([2 * dr, 0, 0, 0, 0, r4, r4, 0, dr])
        Dn = MotionMatrix.from_vec9(d9)
        Dm = conj_motion_back(Dn, S)
        basis.append(Dm)
        witness = Dm
    return MotionSpace("affine_flex", tuple(basis), witness)


def conj_motion_back(D: MotionMatrix, S) -> MotionMatrix:
    """Inverse transport: motion of gl_act(F, S) back to a motion of F."""
    V = induced_vec_matrix(S)
    return MotionMatrix.from_array(V @ D.to_array() @ np.linalg.inv(V))


def _normalized_profile(profile: RankOneProfile, pair, tol: float):
    """Reorder so the orthogonal pair leads and rotate it onto the axes.

    Returns (normalized profile, S, a-order, b-order); orders are 0-based
    permutations of the original profile positions.
    """
    i1, j1 = pair
    a_order = [i1 - 1] + [i for i in range(profile.p_bar) if i != i1 - 1]
    b_order = [j1 - 1] + [j for j in range(profile.q_bar) if j != j1 - 1]
    S = _orth_frame(profile.a_vectors[i1 - 1], profile.b_vectors[j1 - 1])
    a = _transform_vectors([profile.a_vectors[i] for i in a_order], S, "A")
    b = _transform_vectors([profile.b_vectors[j] for j in b_order], S, "B")
    # snap the frame vectors exactly onto the axes
    a[0] = (math.hypot(*a[0]), 0.0)
    b[0] = (0.0, math.hypot(*b[0]))
    inv_a = {old: new + 1 for new, old in enumerate(a_order)}
    inv_b = {old: new + 1 for new, old in enumerate(b_order)}
    orth = tuple(sorted((inv_a[i - 1], inv_b[j - 1])
                        for (i, j) in profile.orth_pairs))
    prof = RankOneProfile(
        a_vectors=tuple(a), b_vectors=tuple(b),
        a_indices=tuple(profile.a_indices[i] for i in a_order),
        b_indices=tuple(profile.b_indices[j] for j in b_order),
        orth_pairs=orth,
        degenerate_pairs=profile.degenerate_pairs,
        tol=tol,
    )
    return prof, S, a_order, b_order


def solve_two_inf_one_orth(profile: RankOneProfile,
                           tol: float = EPS_DEFAULT) -> MotionSpace:
    """2-infinitesimal motion space with exactly one orthogonal pair."""
    if len(profile.orth_pairs) != 1:
        raise ValueError("expected exactly one orthogonal pair")
    prof, S, _, _ = _normalized_profile(profile, profile.orth_pairs[0], tol)
    system = build_cone_system(prof, "one_orth")
    full, wit6 = cone_full_dimensional(system, tol, return_witness=True)
    if full:
        Dn = MotionMatrix.from_vec9(embed_one_orth(wit6))
        Dm = conj_motion_back(Dn, S)
        return MotionSpace("cone_flex", (scalar_motion(), Dm), Dm)
    null = _r_system_solve(prof.a_vectors[1:], prof.b_vectors[1:], tol)
    if not null:
        return MotionSpace("trivial_only", (scalar_motion(),))
    basis = [scalar_motion()]
    witness = None
    for (dr, r3) in null:
        d9 = np.array([2 * dr, 0, 0, 0, 0, r3, r3, 0, dr])
        Dm = conj_motion_back(MotionMatrix.from_vec9(d9), S)
        basis.append(Dm)
        witness = Dm
    return MotionSpace("affine_flex", tuple(basis), witness)


def _two_orth_family(a2, s1, s2, s3) -> np.ndarray:
    """The explicit flexible family in the normalized two-pair frame."""
    a21, a22 = a2
    r = a22 / a21
    return np.array([
        r * r * s1 - SQRT2 * r * s3 + s2,
        0.0,
        0.0,
        s1,
        s2,
        s3,
        s3 - SQRT2 * r * s1,
        0.0,
        s2 - r * s3 / SQRT2,
    ])


def solve_two_inf_two_orth(profile: RankOneProfile,
                           tol: float = EPS_DEFAULT) -> MotionSpace:
    """2-infinitesimal motion space with two or more orthogonal pairs."""
    pairs = list(profile.orth_pairs)
    if len(pairs) < 2:
        raise ValueError("expected at least two orthogonal pairs")
    if profile.p_bar >= 3 and profile.q_bar >= 3:
        return MotionSpace("trivial_only", (scalar_motion(),))
    # flexible: build the explicit family in a frame where one pair is on the
    # axes and the second pair's A-vector avoids the second axis
    for lead in pairs:
        prof, S, a_order, _ = _normalized_profile(profile, lead, tol)
        second = next(p for p in prof.orth_pairs if p != (1, 1))
        a2 = prof.a_vectors[second[0] - 1]
        if abs(a2[0]) <= tol * max(1.0, abs(a2[1])):
            continue
        s1 = 1.0 if prof.q_bar == 2 else -1.0
        gens = []
        for (u1, u2, u3) in ((s1, 0, 0), (0, 1, 0), (0, 0, 1)):
            d9 = _two_orth_family(a2, u1, u2, u3)
            gens.append(conj_motion_back(MotionMatrix.from_vec9(d9), S))
        witness = gens[0]
        return MotionSpace("cone_flex", (scalar_motion(), *gens), witness)
    # every lead puts the second pair's A-vector on the axis: the paired
    # vectors are mutually orthogonal, and the motion conditions force all
    # off-diagonal entries of D to vanish.  Unpaired rank-one vectors then
    # require sigma * (D11 + D22 - 2 D33) >= 0 with sigma = +1 on the A side
    # and -1 on the B side, so the diagonal family below remains flexible.
    prof, S, _, _ = _normalized_profile(profile, pairs[0], tol)
    sigma = -1.0 if prof.q_bar > 2 else 1.0
    gens = []
    for diag in ((sigma, 0, 0), (0, sigma, 0), (1, 1, 1)):
        gens.append(conj_motion_back(
            MotionMatrix.from_array(np.diag(diag)), S))
    return MotionSpace("cone_flex", (scalar_motion(), *gens), gens[0])


# --- the order-k trivial-motion witness --------------------------------------

def k_trivial_witness(k: int) -> PsdFactorization:
    """A factorization whose only order-k motions are scalar.

    binom(k+1,2) factors per side: elementary diagonal matrices first, then
    one pair of factors per off-diagonal position.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    A, B = [], []
    for i in range(k):
        rows = np.zeros((k, k))
        rows[i, i] = 1.0
        E = SymMat.from_rows(rows)
        A.append(E)
        B.append(E)
    for i in range(k):
        for j in range(i + 1, k):
            Ra = np.zeros((k, k))
            Ra[i, i] = Ra[j, j] = 1.0
            Ra[i, j] = Ra[j, i] = -1.0
            A.append(SymMat.from_rows(Ra))
            Rb = np.zeros((k, k))
            Rb[i, i] = Rb[j, j] = Rb[i, j] = Rb[j, i] = 1.0
            B.append(SymMat.from_rows(Rb))
    F = PsdFactorization(k, tuple(A), tuple(B))
    from .factorization import reconstruct
    return F.with_M(reconstruct(F))
