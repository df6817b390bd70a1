import math

import numpy as np
import pytest

from psdrigid.factorization import (
    from_vectors,
    generate_rank_one,
    gl_act,
    rank_one_profile,
)
from psdrigid.motions import (
    MotionMatrix,
    alpha_row,
    alpha_row_one_orth,
    beta_quadratic,
    build_cone_system,
    cone_full_dimensional,
    conj_motion,
    conj_motion_back,
    embed_one_orth,
    first_sign_nonnegative,
    induced_vec_matrix,
    is_s_inf_motion,
    k_trivial_witness,
    left_kernel_formula,
    left_kernel_minors,
    motion_derivative,
    right_kernel_structured,
    scalar_motion,
    solve_two_inf_no_orth,
    solve_two_inf_one_orth,
    solve_two_inf_two_orth,
    trivial_basis_general,
    trivial_basis_k2,
    _normalized_profile,
)
from psdrigid.symcore import SymMat, outer, vec_sym


def numeric_det_derivative(v, side, D):
    """Finite-difference d/dt det(vv^T + t Xdot) at t=0."""
    X = outer(v)
    Xdot = motion_derivative(X, D, side)
    h = 1e-6

    def det(t):
        m = X.to_array() + t * Xdot.to_array()
        return m[0, 0] * m[1, 1] - m[0, 1] ** 2

    return (det(h) - det(-h)) / (2 * h)


def test_alpha_row_matches_numeric_derivative():
    rng = np.random.default_rng(0)
    for _ in range(25):
        v = rng.uniform(-2, 2, size=2)
        D9 = rng.standard_normal(9)
        D = MotionMatrix.from_vec9(D9)
        for side in ("A", "B"):
            got = float(alpha_row(v, side) @ D9)
            want = numeric_det_derivative(tuple(v), side, D)
            assert got == pytest.approx(want, abs=1e-4, rel=1e-4)


def test_beta_is_determinant_of_derivative():
    rng = np.random.default_rng(1)
    for _ in range(10):
        v = rng.uniform(-2, 2, size=2)
        D = MotionMatrix.from_vec9(rng.standard_normal(9))
        for side in ("A", "B"):
            Xdot = motion_derivative(outer(tuple(v)), D, side).to_array()
            assert beta_quadratic(v, side, D) == pytest.approx(
                np.linalg.det(Xdot), abs=1e-9)


def test_trivial_bases_agree_at_k2():
    stacked_k2 = np.vstack([D.vec9 for D in trivial_basis_k2()])
    stacked_gen = np.vstack([D.vec9 for D in trivial_basis_general(2)])
    both = np.vstack([stacked_k2, stacked_gen])
    assert np.linalg.matrix_rank(stacked_k2, tol=1e-9) == 4
    assert np.linalg.matrix_rank(both, tol=1e-9) == 4
    # the diagonal-type generators sum to 2I
    diag_sum = stacked_gen[0] + stacked_gen[1]
    assert np.allclose(diag_sum, 2 * np.eye(3).reshape(-1))


def test_trivial_motions_are_one_inf_motions():
    rng = np.random.default_rng(2)
    for _ in range(10):
        F = generate_rank_one(3, 3, [], seed=int(rng.integers(1 << 30)))
        for D in trivial_basis_k2():
            assert is_s_inf_motion(F, D, 1)
        assert is_s_inf_motion(F, scalar_motion(rng.uniform(-2, 2)), 2)


def test_first_sign_rule():
    assert first_sign_nonnegative([0.0, 0.0, 1e-3], 1e-9)
    assert not first_sign_nonnegative([0.0, -1e-3, 5.0], 1e-9)
    assert first_sign_nonnegative([1e-12, -1e-12, 1e-12], 1e-9)
    assert first_sign_nonnegative([], 1e-9)


def test_structured_right_kernels_annihilated():
    for seed in range(5):
        F = generate_rank_one(3, 3, [], seed=seed)
        system = build_cone_system(rank_one_profile(F), "full")
        for v in right_kernel_structured("full"):
            assert np.max(np.abs(system.C @ v)) <= 1e-12 * max(
                1.0, float(np.max(np.abs(system.C))))
        assert np.linalg.matrix_rank(system.C, tol=1e-7) == 5

    for seed in range(5):
        F = generate_rank_one(3, 3, [(1, 1)], seed=seed)
        prof = rank_one_profile(F)
        norm_prof, _, _, _ = _normalized_profile(prof, prof.orth_pairs[0], 1e-9)
        system = build_cone_system(norm_prof, "one_orth")
        for w in right_kernel_structured("one_orth"):
            assert np.max(np.abs(system.C @ w)) <= 1e-12 * max(
                1.0, float(np.max(np.abs(system.C))))
        assert np.linalg.matrix_rank(system.C, tol=1e-7) == 3


def test_left_kernel_formula_vs_minors():
    for seed in range(10):
        F = generate_rank_one(3, 3, [], seed=seed)
        prof = rank_one_profile(F)
        system = build_cone_system(prof, "full")
        kf = left_kernel_formula(prof, "full")
        km = left_kernel_minors(system)
        # both span the same ray; compare after normalization
        kf = kf / kf[np.argmax(np.abs(kf))]
        km = km / km[np.argmax(np.abs(km))]
        assert np.max(np.abs(kf - km)) <= 1e-9
        assert np.max(np.abs(kf @ system.C)) <= 1e-6 * np.max(np.abs(system.C))


def test_left_kernel_minors_flags_rank_deficiency():
    # repeated vectors on both sides drop rank(C) below 5, so no single
    # kernel generator exists and the minors route signals it with zeros
    prof = rank_one_profile(
        from_vectors([(1, 0), (1, 1), (1, 1)], [(1, 1), (2, 1), (2, 1)]))
    system = build_cone_system(prof, "full")
    assert not np.any(left_kernel_minors(system))
    # a single repeated vector keeps rank 5: both routes return the same ray
    prof1 = rank_one_profile(
        from_vectors([(1, 0), (1, 1), (1, 1)], [(1, 1), (2, 1), (1, 3)]))
    system1 = build_cone_system(prof1, "full")
    km = left_kernel_minors(system1)
    kf = left_kernel_formula(prof1, "full")
    assert np.allclose(km, 2 * kf, atol=1e-9)


def test_cone_full_dimensional_flexible_and_rigid():
    flex = from_vectors([(1, 2), (1, 3), (1, 4)], [(1, 5), (1, 6), (1, 7)])
    system = build_cone_system(rank_one_profile(flex), "full")
    full, witness = cone_full_dimensional(system, return_witness=True)
    assert full
    assert np.min(system.C @ witness) >= 1 - 1e-9

    from tests.helpers import rigid_example
    system_r = build_cone_system(rank_one_profile(rigid_example()), "full")
    assert cone_full_dimensional(system_r) is False


def test_conjugation_transports_motions():
    rng = np.random.default_rng(3)
    F = generate_rank_one(3, 3, [], seed=9)
    system = build_cone_system(rank_one_profile(F), "full")
    full, witness = cone_full_dimensional(system, return_witness=True)
    assert full
    D = MotionMatrix.from_vec9(witness)
    assert is_s_inf_motion(F, D, 1)
    for _ in range(5):
        S = rng.uniform(-1, 1, size=(2, 2))
        if abs(np.linalg.det(S)) < 0.3:
            continue
        G = gl_act(F, S)
        Dt = conj_motion(D, S)
        assert is_s_inf_motion(G, Dt, 1, tol=1e-7)
        back = conj_motion_back(Dt, S)
        assert np.allclose(back.to_array(), D.to_array(), atol=1e-8)


def test_induced_vec_matrix_identity_and_product():
    assert np.allclose(induced_vec_matrix(np.eye(2)), np.eye(3))
    rng = np.random.default_rng(4)
    S, T = rng.uniform(-1, 1, (2, 2)), rng.uniform(-1, 1, (2, 2))
    # vec(X) V(ST) = vec((ST)^T X (ST)) = vec(X) V(S) V(T)
    assert np.allclose(
        induced_vec_matrix(S @ T),
        induced_vec_matrix(S) @ induced_vec_matrix(T), atol=1e-12)


def test_embed_one_orth_layout():
    d = embed_one_orth([1, 2, 3, 4, 5, 6])
    assert list(d) == [1, 0, 0, 2, 3, 4, 5, 0, 6]
    v = (0.3, -1.2)
    assert np.allclose(alpha_row_one_orth(v, "A"),
                       alpha_row(v, "A")[[0, 3, 4, 5, 6, 8]])


def test_solve_two_inf_one_orth_branches():
    # flexible: only two rank-one vectors on the A side
    flex = from_vectors([(1, 0), (1, 1)], [(0, 1), (1, 2), (2, 1)])
    space = solve_two_inf_one_orth(rank_one_profile(flex))
    assert space.kind != "trivial_only" and space.witness is not None
    assert is_s_inf_motion(flex, space.witness, 2)


def test_solve_two_inf_two_orth_branches():
    rigid = from_vectors([(1, 0), (0, 1), (1, -1)], [(0, 1), (1, 0), (1, 1)])
    assert solve_two_inf_two_orth(rank_one_profile(rigid)).kind == "trivial_only"
    flex = from_vectors([(1, 0), (1, 1), (2, 1)], [(0, 1), (1, -1)])
    space = solve_two_inf_two_orth(rank_one_profile(flex))
    assert space.witness is not None
    assert is_s_inf_motion(flex, space.witness, 2)
    # mutually orthogonal special configuration
    special = from_vectors([(1, 0), (0, 1)], [(0, 1), (1, 0)])
    sp = solve_two_inf_two_orth(rank_one_profile(special))
    assert sp.witness is not None and is_s_inf_motion(special, sp.witness, 2)


def test_solver_witnesses_pass_the_predicate_rotated():
    # same instances after a generic rotation
    th = 0.7
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    flex = gl_act(from_vectors([(1, 0), (1, 1), (2, 1)], [(0, 1), (1, -1)]), R)
    space = solve_two_inf_two_orth(rank_one_profile(flex))
    assert is_s_inf_motion(flex, space.witness, 2)


def test_k_trivial_witness_shape_and_validity():
    for k in (2, 3):
        F = k_trivial_witness(k)
        n = k * (k + 1) // 2
        assert F.p == F.q == n
        from psdrigid.factorization import validate
        assert validate(F).valid


def test_is_s_inf_motion_input_checks():
    F = from_vectors([(1, 0), (1, 1), (2, 1)], [(1, 1), (2, 1), (1, 3)])
    with pytest.raises(ValueError):
        is_s_inf_motion(F, scalar_motion(), 3)
    with pytest.raises(ValueError):
        is_s_inf_motion(k_trivial_witness(3), scalar_motion(1.0, 6), 2)
