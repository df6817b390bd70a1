"""End-to-end acceptance checks.

Each test covers one numbered criterion and prints a single PASS line on
success (visible with ``pytest -s`` or in captured output).  All randomness
is seeded; the whole suite is deterministic.
"""

import math
import time

import numpy as np
import pytest

from psdrigid.classify import classify, classify_no_orth, classify_one_orth, \
    classify_two_orth
from psdrigid.factorization import (
    append_rank_two_factors,
    from_vectors,
    generate_rank_one,
    gl_act,
    rank_one_profile,
)
from psdrigid.motions import (
    MotionMatrix,
    alpha_row,
    beta_quadratic,
    build_cone_system,
    cone_full_dimensional,
    is_s_inf_motion,
    k_trivial_witness,
    left_kernel_formula,
    left_kernel_minors,
    right_kernel_structured,
    scalar_motion,
    trivial_basis_general,
    trivial_basis_k2,
    _normalized_profile,
)
from psdrigid.oracle import sample_motion_oracle, verify_trivial_only
from psdrigid.symcore import SymMat, identity
from tests.helpers import (
    RIGID_A_VECTORS,
    RIGID_B_VECTORS,
    derangement_example,
    flexible_example,
    rigid_example,
)


def _ok(num, text):
    print(f"PASS criterion {num}: {text}")


def _margin(profile) -> float:
    """Smallest det / inner-product magnitude over the profile's vectors."""
    vals = []
    a, b = profile.a_vectors, profile.b_vectors
    for vs in (a, b):
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                vals.append(abs(vs[i][0] * vs[j][1] - vs[i][1] * vs[j][0]))
    for u in a:
        for v in b:
            d = abs(u[0] * v[0] + u[1] * v[1])
            if d > 1e-6:        # skip prescribed orthogonal pairs
                vals.append(d)
    return min(vals)


def _well_separated_profiles(pattern, count, margin=0.05):
    """Seeded generated profiles staying clear of degeneracy."""
    out, seed = [], 0
    while len(out) < count:
        F = generate_rank_one(3, 3, pattern, seed=seed)
        seed += 1
        prof = rank_one_profile(F)
        if _margin(prof) >= margin:
            out.append((F, prof))
    return out


def test_criterion_1_rigid_example():
    t0 = time.time()
    F = rigid_example()
    for tol in (1e-12, 1e-9, 1e-6):
        r = classify(F, tol=tol)
        assert (r.one_inf_rigid, r.two_inf_rigid, r.locally_rigid,
                r.globally_rigid) == (True, True, True, True)
        assert r.witness_triple == ((1, 2, 3), (1, 2, 3))
    r_exact = classify(F, exact=True)
    assert r_exact.globally_rigid is True
    elapsed = time.time() - t0
    assert elapsed < 1.0
    _ok(1, f"rigid example fully rigid across tolerances ({elapsed:.3f}s)")


def test_criterion_2_flexible_example():
    F = flexible_example()
    r = classify(F)
    assert (r.one_inf_rigid, r.two_inf_rigid, r.locally_rigid,
            r.globally_rigid) == (False, False, False, False)
    system = build_cone_system(rank_one_profile(F), "full")
    d = r.witness_motion.vec9
    assert np.min(system.C @ d) >= 1 - 1e-9
    _ok(2, "flexible example flexible in all senses with interior LP witness")


def test_criterion_3_derangement():
    r = classify(derangement_example())
    assert r.two_inf_rigid is True
    assert r.zero_count == 3
    _ok(3, "derangement factorization 2-infinitesimally rigid")


def test_criterion_4_kernel_oracle_equivalence():
    worst = 0.0
    for _, prof in _well_separated_profiles([], 100):
        kf = left_kernel_formula(prof, "full")
        km = left_kernel_minors(build_cone_system(prof, "full"))
        kf = kf / kf[np.argmax(np.abs(kf))]
        km = km / km[np.argmax(np.abs(km))]
        worst = max(worst, float(np.max(np.abs(kf - km))))
    for _, prof in _well_separated_profiles([(1, 1)], 100):
        norm, _, _, _ = _normalized_profile(prof, prof.orth_pairs[0], 1e-9)
        kf = left_kernel_formula(norm, "one_orth")
        km = left_kernel_minors(build_cone_system(norm, "one_orth"))
        kf = kf / kf[np.argmax(np.abs(kf))]
        km = km / km[np.argmax(np.abs(km))]
        worst = max(worst, float(np.max(np.abs(kf - km))))
    assert worst <= 1e-9
    _ok(4, f"formula vs minors kernels agree on 200 profiles (max {worst:.2e})")


def test_criterion_5_structured_kernels():
    for _, prof in _well_separated_profiles([], 20):
        system = build_cone_system(prof, "full")
        for v in right_kernel_structured("full"):
            assert np.max(np.abs(system.C @ v)) <= 1e-12 * max(
                1.0, float(np.max(np.abs(system.C))))
        assert np.linalg.matrix_rank(system.C, tol=1e-7) == 5
    for _, prof in _well_separated_profiles([(1, 1)], 20):
        norm, _, _, _ = _normalized_profile(prof, prof.orth_pairs[0], 1e-9)
        system = build_cone_system(norm, "one_orth")
        for w in right_kernel_structured("one_orth"):
            assert np.max(np.abs(system.C @ w)) <= 1e-12 * max(
                1.0, float(np.max(np.abs(system.C))))
        assert np.linalg.matrix_rank(system.C, tol=1e-7) == 3
    _ok(5, "structured kernels annihilated; rank(C)=5 and rank(C-bar)=3")


def test_criterion_6_trivial_motion_suites():
    stacked = np.vstack([D.vec9 for D in trivial_basis_k2()]
                        + [D.vec9 for D in trivial_basis_general(2)])
    assert np.linalg.matrix_rank(stacked, tol=1e-9) == 4

    rng = np.random.default_rng(6)
    for n in range(100):
        F = generate_rank_one(3, 3, [], seed=1000 + n)
        d = float(rng.uniform(-2, 2))
        for s in (1, 2):
            assert is_s_inf_motion(F, scalar_motion(d), s)

    assert verify_trivial_only(k_trivial_witness(2), 2, 1000, seed=6)
    assert verify_trivial_only(k_trivial_witness(3), 3, 1000, seed=6)
    _ok(6, "trivial bases agree; dI always passes; witnesses reject 1000 "
           "random non-scalar deformations at s=k")


def test_criterion_7_beta_nonpositive_on_alpha_zero():
    rng = np.random.default_rng(7)
    worst = -np.inf
    for _ in range(1000):
        v = rng.uniform(-2, 2, size=2)
        v = v / np.linalg.norm(v)
        side = "A" if rng.integers(2) else "B"
        row = alpha_row(v, side)
        d = rng.standard_normal(9)
        d = d - (row @ d) / (row @ row) * row
        d = d / np.linalg.norm(d)
        beta = beta_quadratic(v, side, MotionMatrix.from_vec9(d))
        worst = max(worst, beta)
    assert worst <= 1e-9
    _ok(7, f"beta <= 0 on the alpha=0 hyperplane, 1000 samples "
           f"(max {worst:.2e})")


def test_criterion_8_equivariance():
    rng = np.random.default_rng(8)
    bases_no_orth = [rigid_example(), flexible_example()]
    verdicts = [classify_no_orth(F).one_inf_rigid for F in bases_no_orth]
    count = 0
    while count < 100:
        S = rng.uniform(-1, 1, size=(2, 2))
        if abs(np.linalg.det(S)) < 0.3:
            continue
        count += 1
        for F, want in zip(bases_no_orth, verdicts):
            assert classify_no_orth(gl_act(F, S)).one_inf_rigid == want

    one_orth = generate_rank_one(3, 3, [(1, 1)], seed=5)
    one_flex = from_vectors([(1, 0), (1, 1)], [(0, 1), (1, 2), (2, 1)])
    two_rigid = derangement_example()
    two_flex = from_vectors([(1, 0), (1, 1), (2, 1)], [(0, 1), (1, -1)])
    wants = {
        id(one_orth): classify_one_orth(one_orth).two_inf_rigid,
        id(one_flex): classify_one_orth(one_flex).two_inf_rigid,
        id(two_rigid): classify_two_orth(two_rigid).two_inf_rigid,
        id(two_flex): classify_two_orth(two_flex).two_inf_rigid,
    }
    for _ in range(100):
        th = float(rng.uniform(0, 2 * math.pi))
        S = np.array([[math.cos(th), -math.sin(th)],
                      [math.sin(th), math.cos(th)]])
        for F, fn in ((one_orth, classify_one_orth),
                      (one_flex, classify_one_orth),
                      (two_rigid, classify_two_orth),
                      (two_flex, classify_two_orth)):
            assert fn(gl_act(F, S)).two_inf_rigid == wants[id(F)]
    _ok(8, "verdicts invariant under 100 GL(2) / orthogonal changes of basis")


def _two_orth_instance(p_bar, q_bar, seed):
    """Random profile with orthogonal pairs (1,1) and (2,2) of a given shape."""
    rng = np.random.default_rng(seed)
    while True:
        angles = rng.uniform(0, math.pi, size=p_bar)
        scales_a = rng.uniform(0.5, 2.0, size=p_bar)
        a = [(float(math.cos(t) * c), float(math.sin(t) * c))
             for t, c in zip(angles, scales_a)]
        b = []
        for j in range(q_bar):
            if j < 2:
                d = np.array([-a[j][1], a[j][0]])
                d = d / np.linalg.norm(d)
            else:
                t = rng.uniform(0, math.pi)
                d = np.array([math.cos(t), math.sin(t)])
            b.append(tuple(d * rng.uniform(0.5, 2.0)))
        F = from_vectors(a, b)
        prof = rank_one_profile(F)
        if prof.degenerate_pairs or set(prof.orth_pairs) != {(1, 1), (2, 2)}:
            continue
        return F


def test_criterion_9_two_orth_sweep():
    shapes = {(2, 2): False, (3, 2): False, (2, 3): False, (3, 3): True}
    for (p_bar, q_bar), want_rigid in shapes.items():
        for n in range(50):
            if (p_bar, q_bar) == (3, 3):
                F = generate_rank_one(3, 3, [(1, 1), (2, 2)], seed=n)
            else:
                F = _two_orth_instance(p_bar, q_bar, seed=n)
            r = classify_two_orth(F)
            assert r.two_inf_rigid is want_rigid, (p_bar, q_bar, n)
            for seed in (1, 2, 3, 4, 5):
                v = sample_motion_oracle(F, 2, 10000, seed=seed)
                assert v.found_nontrivial == (not want_rigid), \
                    (p_bar, q_bar, n, seed)
    _ok(9, "200 two-orth instances match the three-per-side rule, oracle "
           "confirms every verdict")


def _perturbed_rigid(seed):
    rng = np.random.default_rng(seed)
    a = [tuple(np.asarray(v) + rng.uniform(-0.05, 0.05, 2))
         for v in RIGID_A_VECTORS]
    b = [tuple(np.asarray(v) + rng.uniform(-0.05, 0.05, 2))
         for v in RIGID_B_VECTORS]
    return from_vectors(a, b)


def test_criterion_10_monotonicity():
    rng = np.random.default_rng(10)
    for n in range(50):
        F = _perturbed_rigid(seed=2000 + n)
        base = classify(F)
        assert base.globally_rigid is True, n
        # appending positive definite factors cannot create motions
        pd = SymMat.from_rows(np.eye(2) + 0.2 * np.array([[0, 1], [1, 0]]))
        G = append_rank_two_factors(F, [pd], [identity(2)])
        assert classify(G).globally_rigid is True, n
        # appending extra rank-one factors keeps the certifying triple
        while True:
            t = float(rng.uniform(0, math.pi))
            extra_a = (math.cos(t), math.sin(t))
            extra_b = (math.cos(t + 0.4), math.sin(t + 0.4))
            H = from_vectors(
                [v for v in rank_one_profile(F).a_vectors] + [extra_a],
                [v for v in rank_one_profile(F).b_vectors] + [extra_b])
            prof = rank_one_profile(H)
            if not prof.degenerate_pairs and not prof.orth_pairs:
                break
        assert classify(H).globally_rigid is True, n
    _ok(10, "50 rigid instances stay rigid under factor appending")


def test_criterion_11_classifier_vs_oracle():
    disagreements = 0
    for n in range(50):
        F = generate_rank_one(3, 3, [], seed=3000 + n)
        r = classify_no_orth(F)
        v1 = sample_motion_oracle(F, 1, 10000, seed=1)
        v2 = sample_motion_oracle(F, 2, 10000, seed=1)
        if r.one_inf_rigid != (not v1.found_nontrivial):
            disagreements += 1
        if r.two_inf_rigid != (not v2.found_nontrivial):
            disagreements += 1
    assert disagreements == 0
    _ok(11, "classifier and sampling oracle agree on 50 zero-free instances")
