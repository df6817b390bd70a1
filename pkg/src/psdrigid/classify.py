"""Rigidity and uniqueness classification of size-2 psd factorizations.

Dispatch is by the number of orthogonal pairs among the rank-one factors
(equivalently, zeros of M hit by rank-one rows and columns):

* zero pairs: s-infinitesimal rigidity for s in {1,2} is decided by a search
  for a 3+3 sub-collection whose closed-form cone left-kernel is strictly
  one-signed; for positive M all four rigidity notions coincide.
* one pair: 2-infinitesimal rigidity via the same search with the pair
  pinned to the leading slots; first-order rigidity is unattainable, and
  flexibility propagates to local and global rigidity, while the converse
  of that propagation is open.
* two or more pairs: rigid exactly when both sides retain at least three
  rank-one factors.

Sign conditions are evaluated as products of determinant and inner-product
factors, never as quotients.  Inputs with parallel rank-one vectors on one
side are refused; every classification theorem assumes their independence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .factorization import (
    PsdFactorization,
    RankOneProfile,
    rank_one_profile,
    reconstruct_array,
    validate,
)
from .motions import (
    MotionMatrix,
    MotionSpace,
    _kernel_products,
    build_cone_system,
    cone_full_dimensional,
    solve_two_inf_no_orth,
    solve_two_inf_one_orth,
    solve_two_inf_two_orth,
)
from .symcore import EPS_DEFAULT, psd_status


class PreconditionError(ValueError):
    """Raised when an input falls outside a theorem's hypotheses."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = tuple(violations) or (message,)


@dataclass(frozen=True)
class RigidityReport:
    one_inf_rigid: bool | str          # True / False / "not_applicable"
    two_inf_rigid: bool
    locally_rigid: bool | str          # True / False / "unknown"
    globally_rigid: bool | str
    zero_count: int
    preconditions_met: bool = True
    violations: tuple = ()
    witness_triple: tuple | None = None    # ((i1,i2,i3), (j1,j2,j3)) 1-based
    witness_motion: MotionMatrix | None = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        out = {
            "one_inf_rigid": self.one_inf_rigid,
            "two_inf_rigid": self.two_inf_rigid,
            "locally_rigid": self.locally_rigid,
            "globally_rigid": self.globally_rigid,
            "zero_count": self.zero_count,
            "preconditions_met": self.preconditions_met,
        }
        if self.violations:
            out["violations"] = list(self.violations)
        if self.witness_triple is not None:
            out["witness_triple"] = [list(t) for t in self.witness_triple]
        if self.witness_motion is not None:
            out["motion"] = [list(r) for r in self.witness_motion.D]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True)
class BoundaryReport:
    verdict: str        # interior_certificate | boundary_consistent | inconclusive
    evidence: str

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence}


def _profile_vectors(profile: RankOneProfile, exact: bool):
    if exact:
        if profile.a_exact is None or profile.b_exact is None:
            raise ValueError("exact mode requires exact factor entries")
        return list(profile.a_exact), list(profile.b_exact)
    return [tuple(v) for v in profile.a_vectors], \
        [tuple(v) for v in profile.b_vectors]


def _one_signed(values, tol: float) -> bool:
    """All entries strictly positive or all strictly negative."""
    floats = [float(v) for v in values]
    scale = max(1.0, max(abs(v) for v in floats))
    if any(abs(v) <= tol * scale * 1e-3 for v in floats):
        return False
    return all(v > 0 for v in floats) or all(v < 0 for v in floats)


def _sub_kernel_signs(a_sub, b_sub, one_orth: bool):
    """Left-kernel entries of the 3+3 sub-system as signed products.

    Entries are ordered A-side then B-side, skipping the leading pair in the
    one_orth case.  Sign patterns are invariant under any per-vector sign
    flips and under the GL(2) action, so raw profile vectors can be used.
    """
    p = len(a_sub)
    if one_orth:
        ks = [k for k in range(2, p + 4) if k != p + 1]
        include = lambda i, j: i + j > 2
    else:
        ks = list(range(1, p + 4))
        include = lambda i, j: True
    out = []
    for k in ks:
        skip = ("A", k) if k <= p else ("B", k - p)
        sign = (-1) ** (k + (1 if k >= p + 1 else 0))
        out.append(sign * _kernel_products(a_sub, b_sub, skip, include))
    return out


def triple_search(profile: RankOneProfile, regime: str,
                  tol: float = EPS_DEFAULT, exact: bool = False):
    """First (lexicographic) 3+3 sub-collection certifying rigidity.

    Returns ((i1,i2,i3),(j1,j2,j3)) of profile-local 1-based positions, or
    None.  In the one_orth regime the orthogonal pair occupies (i1, j1).
    """
    a_all, b_all = _profile_vectors(profile, exact)
    p, q = len(a_all), len(b_all)
    if regime == "no_orth":
        if p < 3 or q < 3:
            raise PreconditionError(
                "triple search needs three rank-one factors per side"
            )
        for ai in combinations(range(1, p + 1), 3):
            for bj in combinations(range(1, q + 1), 3):
                ker = _sub_kernel_signs(
                    [a_all[i - 1] for i in ai], [b_all[j - 1] for j in bj],
                    one_orth=False,
                )
                if _one_signed(ker, tol):
                    return ai, bj
        return None
    if regime == "one_orth":
        if len(profile.orth_pairs) != 1:
            raise PreconditionError("regime one_orth needs exactly one pair")
        i1, j1 = profile.orth_pairs[0]
        if p < 3 or q < 3:
            return None
        rest_a = [i for i in range(1, p + 1) if i != i1]
        rest_b = [j for j in range(1, q + 1) if j != j1]
        for ai in combinations(rest_a, 2):
            for bj in combinations(rest_b, 2):
                trip_a = (i1,) + ai
                trip_b = (j1,) + bj
                ker = _sub_kernel_signs(
                    [a_all[i - 1] for i in trip_a],
                    [b_all[j - 1] for j in trip_b],
                    one_orth=True,
                )
                if _one_signed(ker, tol):
                    return trip_a, trip_b
        return None
    raise ValueError(f"unknown regime {regime!r}")


def _check_common(profile: RankOneProfile, expected_pairs: str):
    """Shared precondition screening; returns a violation list."""
    violations = []
    for side, i, j in profile.degenerate_pairs:
        violations.append(
            f"parallel rank-one vectors {side}{i} and {side}{j}"
        )
    n = len(profile.orth_pairs)
    if expected_pairs == "none" and n != 0:
        violations.append(f"expected no orthogonal pairs, found {n}")
    if expected_pairs == "one" and n != 1:
        violations.append(f"expected one orthogonal pair, found {n}")
    if expected_pairs == "two_plus" and n < 2:
        violations.append(f"expected two or more orthogonal pairs, found {n}")
    return violations


def _refused(zero_count: int, violations) -> RigidityReport:
    return RigidityReport(
        one_inf_rigid="not_applicable",
        two_inf_rigid=False,
        locally_rigid="unknown",
        globally_rigid="unknown",
        zero_count=zero_count,
        preconditions_met=False,
        violations=tuple(violations),
    )


def classify_no_orth(F: PsdFactorization, tol: float = EPS_DEFAULT,
                     exact: bool = False) -> RigidityReport:
    """All four rigidity verdicts for a factorization of a positive matrix."""
    profile = rank_one_profile(F, tol)
    violations = _check_common(profile, "none")
    if violations:
        return _refused(len(profile.orth_pairs), violations)
    triple = None
    if profile.p_bar >= 3 and profile.q_bar >= 3:
        triple = triple_search(profile, "no_orth", tol, exact)
    if triple is not None:
        src = (tuple(profile.a_indices[i - 1] for i in triple[0]),
               tuple(profile.b_indices[j - 1] for j in triple[1]))
        return RigidityReport(
            one_inf_rigid=True, two_inf_rigid=True,
            locally_rigid=True, globally_rigid=True,
            zero_count=0, witness_triple=src,
        )
    system = build_cone_system(profile, "full")
    full, witness = cone_full_dimensional(system, tol, return_witness=True)
    if not full:
        # cannot happen under the preconditions: no certifying triple means
        # the cone is full-dimensional
        raise RuntimeError("cone not full-dimensional despite flexibility")
    if not np.any(witness):
        # no rank-one factors constrain the motion; any non-scalar D works
        witness = np.array([1.0, 0, 0, 0, 0, 0, 0, 0, 0])
    motion = MotionMatrix.from_vec9(witness)
    return RigidityReport(
        one_inf_rigid=False, two_inf_rigid=False,
        locally_rigid=False, globally_rigid=False,
        zero_count=0, witness_motion=motion,
    )


CONJECTURE_NOTE = (
    "2-infinitesimal rigidity is necessary for local and global rigidity "
    "with zero entries present; sufficiency is an open conjecture, so the "
    "local and global verdicts stay unknown"
)


def classify_one_orth(F: PsdFactorization, tol: float = EPS_DEFAULT,
                      exact: bool = False) -> RigidityReport:
    """2-infinitesimal verdict for exactly one zero entry of M."""
    profile = rank_one_profile(F, tol)
    violations = _check_common(profile, "one")
    if violations:
        return _refused(len(profile.orth_pairs), violations)
    triple = triple_search(profile, "one_orth", tol, exact)
    if triple is not None:
        src = (tuple(profile.a_indices[i - 1] for i in triple[0]),
               tuple(profile.b_indices[j - 1] for j in triple[1]))
        return RigidityReport(
            one_inf_rigid="not_applicable", two_inf_rigid=True,
            locally_rigid="unknown", globally_rigid="unknown",
            zero_count=1, witness_triple=src, notes=(CONJECTURE_NOTE,),
        )
    space = solve_two_inf_one_orth(profile, tol)
    return RigidityReport(
        one_inf_rigid="not_applicable", two_inf_rigid=False,
        locally_rigid=False, globally_rigid=False,
        zero_count=1, witness_motion=space.witness,
    )


def classify_two_orth(F: PsdFactorization, tol: float = EPS_DEFAULT,
                      exact: bool = False) -> RigidityReport:
    """2-infinitesimal verdict for two or more zero entries of M."""
    profile = rank_one_profile(F, tol)
    violations = _check_common(profile, "two_plus")
    if violations:
        return _refused(len(profile.orth_pairs), violations)
    rigid = profile.p_bar >= 3 and profile.q_bar >= 3
    if rigid:
        return RigidityReport(
            one_inf_rigid="not_applicable", two_inf_rigid=True,
            locally_rigid="unknown", globally_rigid="unknown",
            zero_count=len(profile.orth_pairs), notes=(CONJECTURE_NOTE,),
        )
    space = solve_two_inf_two_orth(profile, tol)
    return RigidityReport(
        one_inf_rigid="not_applicable", two_inf_rigid=False,
        locally_rigid="unknown", globally_rigid="unknown",
        zero_count=len(profile.orth_pairs), witness_motion=space.witness,
        notes=("flexible with zero entries; local and global verdicts are "
               "outside the proven implications",),
    )


def classify(F: PsdFactorization, tol: float = EPS_DEFAULT,
             exact: bool = False) -> RigidityReport:
    """Dispatch on the orthogonal-pair count."""
    profile = rank_one_profile(F, tol)
    n = len(profile.orth_pairs)
    if n == 0:
        return classify_no_orth(F, tol, exact)
    if n == 1:
        return classify_one_orth(F, tol, exact)
    return classify_two_orth(F, tol, exact)


def uniqueness(F: PsdFactorization, tol: float = EPS_DEFAULT,
               exact: bool = False) -> RigidityReport:
    """Uniqueness of the factorization up to the GL(2) action.

    Requires a valid factorization of a rank-3 matrix; the verdict is the
    globally_rigid field of the dispatched classification.
    """
    report = validate(F, tol)
    if report.psd_failures:
        raise PreconditionError(
            "factors not psd: " + ", ".join(report.psd_failures),
            [f"factor {f} is not psd" for f in report.psd_failures],
        )
    if F.M is not None and not report.valid:
        raise PreconditionError(
            f"factors do not reproduce M (max error {report.max_product_error:.3g})"
        )
    M = reconstruct_array(F)
    rank = np.linalg.matrix_rank(M, tol=max(tol, 1e-8) * max(1.0, M.max()))
    if rank != 3:
        raise PreconditionError(f"target matrix has rank {rank}, expected 3")
    out = classify(F, tol, exact)
    if not out.preconditions_met:
        raise PreconditionError(
            "degenerate rank-one vectors", out.violations
        )
    return out


def boundary_report(F: PsdFactorization, tol: float = EPS_DEFAULT) -> BoundaryReport:
    """One-sided boundary evidence for the target matrix.

    Interior is certified by an all-rank-2 factorization; three rank-one
    factors per side are consistent with (but do not prove) boundary
    membership, since that quantifies over all factorizations of M.
    """
    M = reconstruct_array(F)
    if np.any(np.abs(M) <= tol * max(1.0, float(np.max(np.abs(M))))):
        raise PreconditionError(
            "M has zero entries; it lies on the boundary for that reason"
        )
    ranks = [psd_status(X, tol).rank for X in F.A_factors + F.B_factors]
    if all(r == 2 for r in ranks):
        return BoundaryReport(
            "interior_certificate",
            "every factor has rank 2, so nearby matrices stay factorizable",
        )
    profile = rank_one_profile(F, tol)
    if profile.p_bar >= 3 and profile.q_bar >= 3:
        return BoundaryReport(
            "boundary_consistent",
            f"this factorization has {profile.p_bar}+{profile.q_bar} rank-one "
            "factors, meeting the necessary boundary condition",
        )
    return BoundaryReport(
        "inconclusive",
        "fewer than three rank-one factors on a side in this factorization; "
        "no certificate either way",
    )
