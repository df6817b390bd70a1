"""Shared request handlers: the CLI and the HTTP app both call these.

Handlers take plain dict payloads and return plain dict reports.  Domain
refusals surface as PreconditionError; malformed payloads as ValueError.
"""

from __future__ import annotations

import numpy as np

from ..classify import (
    PreconditionError,
    boundary_report,
    classify,
    uniqueness,
)
from ..factorization import (
    factorization_from_dict,
    factorization_to_dict,
    generate_rank_one,
    rank_one_profile,
    validate,
)
from ..motions import (
    build_cone_system,
    cone_full_dimensional,
    left_kernel_formula,
    left_kernel_minors,
    right_kernel_structured,
    scalar_motion,
    solve_two_inf_no_orth,
    solve_two_inf_one_orth,
    solve_two_inf_two_orth,
    trivial_basis_k2,
    MotionMatrix,
    _normalized_profile,
)
from ..oracle import sample_motion_oracle


def _parse(payload: dict):
    fz = payload.get("factorization")
    if fz is None:
        raise ValueError("$.factorization: missing")
    return factorization_from_dict(fz)


def _tol(payload: dict) -> float:
    tol = payload.get("tolerance", 1e-9)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise ValueError("$.tolerance: must be a positive number")
    return float(tol)


def _matrix(D: MotionMatrix) -> list:
    return [[float(x) for x in row] for row in D.D]


def handle_classify(payload: dict) -> dict:
    F = _parse(payload)
    tol = _tol(payload)
    report = classify(F, tol, exact=bool(payload.get("exact", False)))
    if not report.preconditions_met:
        raise PreconditionError(
            "input outside the classification hypotheses", report.violations)
    out = report.to_dict()
    out["tolerance"] = tol
    return out


def handle_uniqueness(payload: dict) -> dict:
    F = _parse(payload)
    tol = _tol(payload)
    report = uniqueness(F, tol, exact=bool(payload.get("exact", False)))
    out = report.to_dict()
    out["tolerance"] = tol
    return out


def handle_validate(payload: dict) -> dict:
    F = _parse(payload)
    tol = _tol(payload)
    report = validate(F, tol)
    return {
        "valid": report.valid,
        "psd_failures": list(report.psd_failures),
        "max_product_error": report.max_product_error,
        "tolerance": tol,
    }


def handle_boundary(payload: dict) -> dict:
    F = _parse(payload)
    return boundary_report(F, _tol(payload)).to_dict()


def handle_generate(payload: dict) -> dict:
    for key in ("p", "q", "seed"):
        if not isinstance(payload.get(key), int):
            raise ValueError(f"$.{key}: expected an integer")
    p, q, seed = payload["p"], payload["q"], payload["seed"]
    pattern = [tuple(z) for z in payload.get("zero_pattern", [])]
    count = payload.get("count", 1)
    if not isinstance(count, int) or count < 0:
        raise ValueError("$.count: expected a nonnegative integer")
    tol = _tol(payload)
    instances, manifest = [], []
    for n in range(count):
        try:
            F = generate_rank_one(p, q, pattern, seed + n, tol)
        except ValueError as e:
            raise PreconditionError(str(e))
        report = classify(F, tol)
        instances.append(factorization_to_dict(F))
        manifest.append({
            "file": f"instance_{n:04d}.json",
            "zero_count": report.zero_count,
            "verdicts": {
                "one_inf_rigid": report.one_inf_rigid,
                "two_inf_rigid": report.two_inf_rigid,
                "locally_rigid": report.locally_rigid,
                "globally_rigid": report.globally_rigid,
            },
        })
    return {"instances": instances, "manifest": manifest}


def handle_motions(payload: dict) -> dict:
    F = _parse(payload)
    tol = _tol(payload)
    profile = rank_one_profile(F, tol)
    if profile.degenerate_pairs:
        raise PreconditionError(
            "parallel rank-one vectors",
            [f"parallel rank-one vectors {s}{i} and {s}{j}"
             for (s, i, j) in profile.degenerate_pairs],
        )
    n_orth = len(profile.orth_pairs)
    regime = ("no_orth", "one_orth")[n_orth] if n_orth <= 1 else "two_orth"
    out = {
        "regime": regime,
        "trivial_basis": [_matrix(D) for D in trivial_basis_k2()],
        "orth_pairs": [list(p) for p in profile.orth_pairs],
    }
    system = None
    if regime == "no_orth":
        system = build_cone_system(profile, "full")
    elif regime == "one_orth":
        prof, _, _, _ = _normalized_profile(
            profile, profile.orth_pairs[0], tol)
        system = build_cone_system(prof, "one_orth")
    if system is not None:
        out["cone_matrix"] = [[float(x) for x in row] for row in system.C]
        out["row_labels"] = [list(l) for l in system.row_labels]
        out["right_kernel"] = [
            [float(x) for x in v] for v in right_kernel_structured(system.variant)
        ]
        rows_needed = 6 if system.variant == "full" else 4
        if system.C.shape[0] == rows_needed:
            kf = left_kernel_formula(profile, system.variant)
            km = left_kernel_minors(system)
            out["left_kernel_formula"] = [float(x) for x in kf]
            out["left_kernel_minors"] = [float(x) for x in km]
    if regime == "no_orth":
        full, wit = cone_full_dimensional(system, tol, return_witness=True)
        if full:
            if not np.any(wit):
                wit = np.array([1.0, 0, 0, 0, 0, 0, 0, 0, 0])
            D = MotionMatrix.from_vec9(wit)
            space_kind, basis, witness = "cone_flex", [scalar_motion(), D], D
        else:
            space = solve_two_inf_no_orth(profile, tol)
            space_kind, basis, witness = space.kind, space.basis, space.witness
    elif regime == "one_orth":
        space = solve_two_inf_one_orth(profile, tol)
        space_kind, basis, witness = space.kind, space.basis, space.witness
    else:
        space = solve_two_inf_two_orth(profile, tol)
        space_kind, basis, witness = space.kind, space.basis, space.witness
    out["motion_space_kind"] = space_kind
    out["motion_basis"] = [_matrix(D) for D in basis]
    if witness is not None:
        out["witness_motion"] = _matrix(witness)
    return out


def handle_oracle(payload: dict) -> dict:
    F = _parse(payload)
    tol = _tol(payload)
    s = payload.get("s", 2)
    if s not in (1, 2):
        raise ValueError("$.s: must be 1 or 2")
    trials = payload.get("trials", 10000)
    seed = payload.get("seed")
    if not isinstance(seed, int):
        raise ValueError("$.seed: expected an integer")
    if not isinstance(trials, int) or trials < 0:
        raise ValueError("$.trials: expected a nonnegative integer")
    verdict = sample_motion_oracle(F, s, trials, seed, tol)
    out = {
        "found_nontrivial": verdict.found_nontrivial,
        "trials_used": verdict.trials_used,
        "seed": verdict.seed,
    }
    if verdict.motion is not None:
        out["motion"] = [[float(x) for x in row] for row in verdict.motion]
    return out


HANDLERS = {
    "classify": handle_classify,
    "uniqueness": handle_uniqueness,
    "validate": handle_validate,
    "generate": handle_generate,
    "boundary": handle_boundary,
    "motions": handle_motions,
    "oracle": handle_oracle,
}
