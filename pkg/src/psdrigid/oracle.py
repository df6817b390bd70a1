"""Brute-force cross-validation of the rigidity classifiers.

Everything here recomputes motion conditions from scratch: determinants of
deformed factors are expanded directly in t, first-order constraint rows are
obtained by evaluating those expansions on basis matrices, and implicit
equalities are detected with a support-maximizing LP.  The closed-form alpha
rows and kernel formulas are never consulted, so agreement between this
module and the classifiers is genuine evidence.

The sampler is a refuter: it searches for a nontrivial order-s motion and
reports the first hit.  It combines a deterministic subspace search (forced
equalities, then kernels of the negative-semidefinite second-order forms,
then an interior LP) with seeded random trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .factorization import PsdFactorization, RankOneProfile
from .symcore import EPS_DEFAULT, SymMat, vec_sym

_SQRT2 = math.sqrt(2.0)

# flattened 1-trivial generators (row-major), kept local on purpose
_TRIVIAL_1 = np.array([
    [2, 0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 2, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, _SQRT2, _SQRT2, 0, 0],
    [0, 0, _SQRT2, 0, 0, 0, 0, _SQRT2, 0],
], dtype=float)

_TRIVIAL_2 = np.eye(3).reshape(1, 9)


@dataclass(frozen=True)
class OracleVerdict:
    found_nontrivial: bool
    motion: np.ndarray | None    # 3x3 array when found
    trials_used: int
    seed: int


def _trivial_span(s: int) -> np.ndarray:
    return _TRIVIAL_1 if s == 1 else _TRIVIAL_2


def nontrivial_residual(D, s: int) -> float:
    """Distance of the unit-normalized motion from the s-trivial span."""
    d = np.asarray(D, dtype=float).reshape(-1)
    norm = np.linalg.norm(d)
    if norm == 0:
        return 0.0
    d = d / norm
    T = _trivial_span(s)
    Q, _ = np.linalg.qr(T.T)
    return float(np.linalg.norm(d - Q @ (Q.T @ d)))


def _derivative_entries(xv: np.ndarray, D: np.ndarray, side: str):
    """Upper-triangle entries (d11, d22, d12) of the induced derivative."""
    if side == "A":
        dv = xv @ D
    else:
        dv = -(D @ xv)
    return dv[0], dv[1], dv[2] / _SQRT2


def _minor_coeffs(X: SymMat, xv, D, side, I):
    """Direct expansion of det([X + t Xdot]_I) in powers of t."""
    d11, d22, d12 = _derivative_entries(xv, D, side)
    x11, x12, x22 = (float(e) for e in X.entries)
    if I == (0,):
        return [x11, d11]
    if I == (1,):
        return [x22, d22]
    c0 = x11 * x22 - x12 * x12
    c1 = x11 * d22 + d11 * x22 - 2 * x12 * d12
    c2 = d11 * d22 - d12 * d12
    return [c0, c1, c2]


def _iter_factors(F: PsdFactorization):
    for X in F.A_factors:
        yield "A", X, vec_sym(X)
    for X in F.B_factors:
        yield "B", X, vec_sym(X)


def is_motion(F: PsdFactorization, D, s: int, tol: float = EPS_DEFAULT) -> bool:
    """Order-s motion test by direct expansion and the lowest-order sign."""
    D = np.asarray(D, dtype=float)
    d_scale = max(1.0, float(np.max(np.abs(D))))
    for side, X, xv in _iter_factors(F):
        sc = max(1.0, X.scale() * d_scale)
        for I in ((0,), (1,), (0, 1)):
            coeffs = _minor_coeffs(X, xv, D, side, I)[: s + 1]
            thr = tol * sc ** len(I)
            decided = False
            for c in coeffs:
                if abs(c) > thr:
                    if c <= 0:
                        return False
                    decided = True
                    break
            if not decided:
                pass  # all coefficients negligible: nonnegative near 0
    return True


def _first_order_system(F: PsdFactorization, tol: float):
    """Rows of first-order constraints active at t=0.

    Returns (rows, beta_closures): each row is the linear functional of the
    flattened D giving the t-coefficient of a minor whose constant term
    vanishes; beta_closures[i] is the quadratic t^2-coefficient function for
    determinant rows, None for diagonal rows.
    """
    rows, betas = [], []
    basis = np.eye(3)
    for side, X, xv in _iter_factors(F):
        sc = max(1.0, X.scale())
        for I in ((0,), (1,), (0, 1)):
            c0 = _minor_coeffs(X, xv, np.zeros((3, 3)), side, I)[0]
            if abs(c0) > tol * sc ** len(I):
                continue
            row = np.empty(9)
            for m in range(9):
                E = np.zeros(9)
                E[m] = 1.0
                row[m] = _minor_coeffs(X, xv, E.reshape(3, 3), side, I)[1]
            rows.append(row)
            if len(I) == 2:
                def beta(D, xv=xv, side=side):
                    d11, d22, d12 = _derivative_entries(
                        xv, np.asarray(D, dtype=float).reshape(3, 3), side)
                    return d11 * d22 - d12 * d12
                betas.append(beta)
            else:
                betas.append(None)
    return np.array(rows).reshape(-1, 9), betas


def _forced_rows(G: np.ndarray, tol: float):
    """Implicit equality rows of {x : G x >= 0} via a support-maximizing LP."""
    m = G.shape[0]
    if m == 0:
        return np.zeros(0, dtype=bool)
    norms = np.max(np.abs(G), axis=1)
    scale = max(1.0, float(np.max(norms)))
    zero = norms <= tol * scale
    Gn = G.copy()
    Gn[~zero] = Gn[~zero] / norms[~zero, None]
    # variables (x, s); maximize sum(s) with Gn x - s >= 0, 0 <= s <= 1
    act = ~zero
    k = int(np.sum(act))
    if k == 0:
        return zero
    c = np.concatenate([np.zeros(9), -np.ones(k)])
    A_ub = np.hstack([-Gn[act], np.eye(k)])
    b_ub = np.zeros(k)
    bounds = [(-100.0, 100.0)] * 9 + [(0.0, 1.0)] * k
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"support LP failed: {res.message}")
    s_vals = res.x[9:]
    forced = zero.copy()
    forced[np.flatnonzero(act)] = s_vals <= 1e-7
    return forced


def _nullspace(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if rows.size == 0:
        return np.eye(9)
    _, sv, Vt = np.linalg.svd(rows)
    scale = sv[0] if sv.size else 1.0
    rank = int(np.sum(sv > tol * max(1.0, scale)))
    return Vt[rank:].T  # columns span the nullspace


def _motion_subspace(F: PsdFactorization, s: int, tol: float):
    """Subspace search for candidate motions.

    Returns (V, margin_rows): V's columns span the space where all forced
    first-order constraints vanish (and for s=2 the second-order forms of
    forced determinant rows vanish too); margin_rows are the remaining
    first-order rows, to be made positive inside V.
    """
    G, betas = _first_order_system(F, tol)
    forced = _forced_rows(G, tol)
    for _ in range(3):
        constraints = [G[forced]] if np.any(forced) else []
        if s == 2:
            V0 = _nullspace(np.vstack(constraints) if constraints else
                            np.zeros((0, 9)))
            for i in np.flatnonzero(forced):
                if betas[i] is None:
                    continue
                dim = V0.shape[1]
                if dim == 0:
                    break
                # Gram matrix of the (negated) second-order form on V0
                vals = [betas[i](V0[:, a]) for a in range(dim)]
                Q = np.empty((dim, dim))
                for a in range(dim):
                    for b in range(a, dim):
                        mixed = betas[i](V0[:, a] + V0[:, b])
                        Q[a, b] = Q[b, a] = -(mixed - vals[a] - vals[b]) / 2
                Q[np.arange(dim), np.arange(dim)] = [-v for v in vals]
                w, U = np.linalg.eigh(Q)
                top = max(1.0, float(np.max(np.abs(w))))
                keep = [U[:, a] for a in range(dim) if w[a] <= 1e-9 * top]
                if len(keep) < dim:
                    constraints.append(
                        (V0 @ (np.eye(dim) -
                               np.array(keep).T @ np.array(keep))).T
                        if keep else V0.T
                    )
        rows = np.vstack(constraints) if constraints else np.zeros((0, 9))
        V = _nullspace(rows)
        # recheck: remaining rows restricted to V may hide new equalities
        rest = np.flatnonzero(~forced)
        if rest.size and V.shape[1]:
            GV = G[rest] @ V
            sub_forced = _forced_rows_general(GV, tol)
            if np.any(sub_forced):
                forced[rest[sub_forced]] = True
                continue
        return V, G[~forced]
    return V, G[~forced]


def _forced_rows_general(G: np.ndarray, tol: float) -> np.ndarray:
    """Support-maximizing LP over an arbitrary number of variables."""
    m, n = G.shape
    if m == 0:
        return np.zeros(0, dtype=bool)
    norms = np.max(np.abs(G), axis=1)
    scale = max(1.0, float(np.max(norms)))
    zero = norms <= tol * scale
    act = ~zero
    k = int(np.sum(act))
    if k == 0:
        return zero
    Gn = G[act] / norms[act, None]
    c = np.concatenate([np.zeros(n), -np.ones(k)])
    A_ub = np.hstack([-Gn, np.eye(k)])
    b_ub = np.zeros(k)
    bounds = [(-100.0, 100.0)] * n + [(0.0, 1.0)] * k
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success:
        raise RuntimeError(f"support LP failed: {res.message}")
    forced = zero.copy()
    forced[np.flatnonzero(act)] = res.x[n:] <= 1e-7
    return forced


def _subspace_candidates(F: PsdFactorization, s: int, tol: float):
    """Deterministic candidate motions from the forced-equality subspace."""
    V, margin_rows = _motion_subspace(F, s, tol)
    dim = V.shape[1]
    if dim == 0:
        return []
    cands = []
    if margin_rows.size:
        GV = margin_rows @ V
        norms = np.max(np.abs(GV), axis=1)
        keep = norms > tol * max(1.0, float(np.max(norms)))
        if np.any(keep):
            GVn = GV[keep] / norms[keep, None]
            c = np.zeros(dim + 1)
            c[-1] = -1.0
            A_ub = np.hstack([-GVn, np.ones((GVn.shape[0], 1))])
            b_ub = np.zeros(GVn.shape[0])
            bounds = [(-100.0, 100.0)] * dim + [(None, 1.0)]
            res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds,
                          method="highs")
            if res.success and -res.fun > 1e-7:
                cands.append(V @ res.x[:dim])
    for a in range(dim):
        cands.append(V[:, a])
        cands.append(-V[:, a])
    return [c.reshape(3, 3) for c in cands]


def _batch_is_motion(F: PsdFactorization, D_batch: np.ndarray, s: int,
                     tol: float) -> np.ndarray:
    """Vectorized order-s motion test over a batch of 3x3 matrices."""
    N = D_batch.shape[0]
    ok = np.ones(N, dtype=bool)
    d_scale = np.maximum(1.0, np.max(np.abs(D_batch), axis=(1, 2)))
    for side, X, xv in _iter_factors(F):
        if not np.any(ok):
            break
        if side == "A":
            dv = np.einsum("j,njk->nk", xv, D_batch)
        else:
            dv = -np.einsum("njk,k->nj", D_batch, xv)
        d11, d22, d12 = dv[:, 0], dv[:, 1], dv[:, 2] / _SQRT2
        x11, x12, x22 = (float(e) for e in X.entries)
        sc = np.maximum(1.0, X.scale() * d_scale)
        minors = [
            ([np.full(N, x11), d11], 1),
            ([np.full(N, x22), d22], 1),
            ([np.full(N, x11 * x22 - x12 * x12),
              x11 * d22 + d11 * x22 - 2 * x12 * d12,
              d11 * d22 - d12 * d12], 2),
        ]
        for coeffs, order in minors:
            coeffs = coeffs[: s + 1]
            thr = tol * sc ** order
            decided = np.zeros(N, dtype=bool)
            good = np.ones(N, dtype=bool)
            for c in coeffs:
                fresh = ~decided & (np.abs(c) > thr)
                good[fresh & (c <= 0)] = False
                decided |= fresh
            ok &= good
    return ok


def sample_motion_oracle(F: PsdFactorization, s: int, trials: int,
                         seed: int, tol: float = EPS_DEFAULT) -> OracleVerdict:
    """Search for a nontrivial order-s motion; deterministic per seed."""
    if F.k != 2:
        raise ValueError("oracle implemented for k=2")
    used = 0
    for cand in _subspace_candidates(F, s, tol):
        used += 1
        if nontrivial_residual(cand, s) > 1e-6 and is_motion(F, cand, s, tol):
            return OracleVerdict(True, cand, used, seed)
    rng = np.random.default_rng(seed)
    batch = 500
    remaining = max(0, trials - used)
    while remaining > 0:
        n = min(batch, remaining)
        D_batch = rng.standard_normal((n, 3, 3))
        hits = _batch_is_motion(F, D_batch, s, tol)
        for idx in np.flatnonzero(hits):
            if nontrivial_residual(D_batch[idx], s) > 1e-6:
                return OracleVerdict(True, D_batch[idx], used + idx + 1, seed)
        used += n
        remaining -= n
    return OracleVerdict(False, None, used, seed)


def verify_trivial_only(F: PsdFactorization, s: int, trials: int,
                        seed: int, tol: float = EPS_DEFAULT) -> bool:
    """One-sided rigidity check: no nontrivial motion found in the budget."""
    if F.k == 2:
        return not sample_motion_oracle(F, s, trials, seed, tol).found_nontrivial
    return _verify_trivial_only_general(F, s, trials, seed, tol)


# --- general-k support for the order-k witness -------------------------------

def _poly_det(M_of_t, s: int) -> np.ndarray:
    """Coefficients (length s+1) of det of a matrix of degree-1 polynomials.

    ``M_of_t`` is an (n, n, 2) array of (constant, linear) coefficients;
    expansion is by interpolation at s+n sample points.
    """
    n = M_of_t.shape[0]
    deg = n
    ts = np.arange(deg + 1, dtype=float)
    vals = [np.linalg.det(M_of_t[:, :, 0] + t * M_of_t[:, :, 1]) for t in ts]
    coeffs = np.polynomial.polynomial.polyfit(ts, vals, deg)
    out = np.zeros(s + 1)
    out[: min(s + 1, deg + 1)] = coeffs[: s + 1]
    return out


def _is_motion_general(F: PsdFactorization, D: np.ndarray, s: int,
                       tol: float) -> bool:
    from itertools import combinations as _comb
    k = F.k
    n = D.shape[0]
    d_scale = max(1.0, float(np.max(np.abs(D))))

    def unflat(v):
        # inverse of the half-vectorization, local copy
        rows = np.empty((k, k))
        idx = k
        for i in range(k):
            rows[i, i] = v[i]
        pos = k
        for i in range(k):
            for j in range(i + 1, k):
                rows[i, j] = rows[j, i] = v[pos] / _SQRT2
                pos += 1
        return rows

    for side, factors in (("A", F.A_factors), ("B", F.B_factors)):
        for X in factors:
            xv = vec_sym(X)
            dv = xv @ D if side == "A" else -(D @ xv)
            X0 = X.to_array()
            X1 = unflat(dv)
            sc = max(1.0, X.scale() * d_scale)
            for m in range(1, k + 1):
                for I in _comb(range(k), m):
                    block = np.stack(
                        [X0[np.ix_(I, I)], X1[np.ix_(I, I)]], axis=-1)
                    coeffs = _poly_det(block, s)
                    thr = tol * sc ** m * 100
                    sign_ok = True
                    for c in coeffs:
                        if abs(c) > thr:
                            sign_ok = c > 0
                            break
                    if not sign_ok:
                        return False
    return True


def _verify_trivial_only_general(F: PsdFactorization, s: int, trials: int,
                                 seed: int, tol: float) -> bool:
    n = F.k * (F.k + 1) // 2
    rng = np.random.default_rng(seed)
    eye = np.eye(n)
    if not _is_motion_general(F, eye, s, tol):
        return False  # the scalar motion must always pass
    for _ in range(trials):
        D = rng.standard_normal((n, n))
        D = D - np.trace(D) / n * eye  # push away from the scalar line
        if _is_motion_general(F, D, s, tol):
            return False
    return True


def kernel_crosscheck(profile: RankOneProfile, variant: str,
                      tol: float = EPS_DEFAULT) -> float:
    """Max coordinate deviation of the two normalized left-kernel routes."""
    from .motions import build_cone_system, left_kernel_formula, \
        left_kernel_minors

    system = build_cone_system(profile, variant)
    v1 = np.asarray(left_kernel_formula(profile, variant), dtype=float)
    v2 = left_kernel_minors(system)
    if not np.any(v2):
        raise ValueError("cone system is rank deficient")

    def normalize(v):
        i = int(np.argmax(np.abs(v)))
        return v / v[i]

    return float(np.max(np.abs(normalize(v1) - normalize(v2))))
