import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import ALPHA, GAMMA0, JX, JY, JZ, expm_series, matmul_loops, random_hermitian, random_unitary
from qcalab.coin import (
    CoinSet,
    build_boson_coin,
    build_fermion_coin,
    dirac_gammas,
    eig_unitary,
    max_abs,
    spin1_generators,
    unitary_from_hermitian,
    verify_coin_conditions,
)
from qcalab.errors import ConditionViolation, NotHermitian, NotUnitary


@pytest.fixture(scope="module")
def fermion():
    return build_fermion_coin()


@pytest.fixture(scope="module")
def boson():
    return build_boson_coin()


# -- fermionic family -------------------------------------------------------


def test_fermion_matrices_match_hand_typed(fermion):
    assert max_abs(fermion.Q - GAMMA0) == 0
    for a in range(3):
        assert max_abs(fermion.delta_p[a] - ALPHA[a]) == 0


def test_flip_operator_spectrum(fermion):
    assert np.allclose(np.sort(np.linalg.eigvalsh(fermion.Q)), [-1, -1, 1, 1])


def test_delta_p_anticommute(fermion):
    dx, dy, _ = fermion.delta_p
    assert max_abs(dx @ dy + dy @ dx) <= 1e-13


def test_all_anticommutators_vanish(fermion):
    ops = [fermion.Q, *fermion.delta_p]
    for a, b in itertools.combinations(ops, 2):
        assert max_abs(a @ b + b @ a) <= 1e-13
    for a in ops:
        assert max_abs(a @ a - np.eye(4)) == 0


def test_delta_pz_squares_to_identity_exactly(fermion):
    dz = fermion.delta_p[2]
    assert np.array_equal(dz @ dz, np.eye(4))


def test_fermion_projectors_are_complementary(fermion):
    for a in range(3):
        p = fermion.projectors(a)
        assert max_abs(p["+"] + p["-"] - np.eye(4)) <= 1e-15
        assert max_abs(p["+"] @ p["-"]) <= 1e-15


def test_fermion_equal_norm_constant_by_loops(fermion):
    px, py = fermion.proj_plus[0], fermion.proj_plus[1]
    lhs = matmul_loops(matmul_loops(px, py), px)
    assert max_abs(lhs - 0.5 * px) <= 1e-15


def test_fermion_report(fermion):
    rep = verify_coin_conditions(fermion)
    assert rep.passed
    assert rep.group_max("anticomm") <= 1e-13
    assert rep.constants["c"] == pytest.approx(0.5, abs=1e-13)


# -- bosonic family ---------------------------------------------------------


def test_spin1_generators_match_hand_typed():
    for j, ref in zip(spin1_generators(), (JX, JY, JZ)):
        assert max_abs(j - ref) == 0


def test_px_zero_is_first_axis_projector(boson):
    assert max_abs(boson.proj_zero[0] - np.diag([1, 0, 0])) == 0


def test_zero_projectors_pairwise_vanish(boson):
    for a, b in itertools.permutations(range(3), 2):
        assert np.array_equal(boson.proj_zero[a] @ boson.proj_zero[b], np.zeros((3, 3)))


def test_boson_equal_norm_constants_by_loops(boson):
    px, py0, py = boson.proj_plus[0], boson.proj_zero[1], boson.proj_plus[1]
    assert max_abs(matmul_loops(matmul_loops(px, py), px) - 0.25 * px) <= 1e-15
    assert max_abs(matmul_loops(matmul_loops(px, py0), px) - 0.5 * px) <= 1e-15


def test_boson_resolution_and_orthogonality(boson):
    for a in range(3):
        p = boson.projectors(a)
        fam = [p["+"], p["-"], p["0"]]
        assert max_abs(sum(fam) - np.eye(3)) <= 1e-15
        for x, y in itertools.permutations(fam, 2):
            assert max_abs(x @ y) <= 1e-15
        for x in fam:
            assert max_abs(x @ x - x) <= 1e-15


def test_boson_report(boson):
    rep = verify_coin_conditions(boson)
    assert rep.passed
    assert rep.constants["c"] == pytest.approx(0.25, abs=1e-13)
    assert rep.constants["c_prime"] == pytest.approx(0.5, abs=1e-13)


def test_global_sign_of_jy_is_still_a_valid_family():
    # -J_Y only swaps P+ and P- along Y
    jx, jy, jz = spin1_generators()
    assert verify_coin_conditions(CoinSet.boson(jx, -jy, jz)).passed


def test_corrupted_sign_in_jy_is_caught():
    jx, jy, jz = spin1_generators()
    bad = jy.copy()
    bad[0, 2] = -bad[0, 2]
    coin = CoinSet.boson(jx, bad, jz)
    rep = verify_coin_conditions(coin, strict=False)
    assert not rep.passed
    with pytest.raises(ConditionViolation) as info:
        verify_coin_conditions(coin)
    assert info.value.failed


def test_corrupted_flip_operator_fails_anticommutators():
    g0, g1, g2, g3 = dirac_gammas()
    q = g0.copy()
    q[3, 3] = 1.0
    rep = verify_coin_conditions(CoinSet.fermion(q, g0 @ g1, g0 @ g2, g0 @ g3), strict=False)
    assert any(name.startswith("anticomm") for name in rep.failed)


def test_coinset_arrays_are_read_only(fermion):
    with pytest.raises(ValueError):
        fermion.Q[0, 0] = 2


# -- exponentials and eigendecomposition ------------------------------------


def test_exponential_at_zero_time_is_identity():
    h = random_hermitian(4, np.random.default_rng(0))
    assert max_abs(unitary_from_hermitian(h, 0.0) - np.eye(4)) <= 1e-15


def test_exponential_of_flip_operator(fermion):
    theta = 0.37
    u = unitary_from_hermitian(fermion.Q, theta)
    assert max_abs(u - (np.cos(theta) * np.eye(4) + 1j * np.sin(theta) * fermion.Q)) <= 1e-15
    phases, _ = eig_unitary(u)
    assert np.allclose(phases, [-theta, -theta, theta, theta], atol=1e-14)


def test_exponential_matches_power_series():
    assert max_abs(unitary_from_hermitian(JZ, 0.3) - expm_series(JZ, 0.3)) <= 1e-13


def test_non_hermitian_generator_rejected():
    with pytest.raises(NotHermitian):
        unitary_from_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(-2.0, 2.0), d=st.sampled_from([2, 3, 4]))
def test_exponential_is_unitary_and_matches_series(seed, t, d):
    h = random_hermitian(d, np.random.default_rng(seed))
    u = unitary_from_hermitian(h, t)
    assert max_abs(u.conj().T @ u - np.eye(d)) <= 1e-12
    assert max_abs(u - expm_series(h, t, terms=60)) <= 1e-10


def test_eig_identity():
    phases, vecs = eig_unitary(np.eye(4))
    assert np.array_equal(phases, np.zeros(4))
    assert max_abs(vecs - np.eye(4)) <= 1e-15


def test_eig_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        eig_unitary(np.diag([1.0, 2.0]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.sampled_from([3, 4]))
def test_eig_reconstruction_random_unitary(seed, d):
    u = random_unitary(d, np.random.default_rng(seed))
    phases, v = eig_unitary(u)
    assert np.all(np.diff(phases) >= 0)
    assert np.all((phases > -np.pi) & (phases <= np.pi))
    assert max_abs(u @ v - v * np.exp(1j * phases)) <= 1e-11
    assert max_abs(v.conj().T @ v - np.eye(d)) <= 1e-11


def test_eig_degenerate_basis_is_deterministic(fermion):
    u = unitary_from_hermitian(fermion.Q, 0.2)
    a = eig_unitary(u)[1]
    b = eig_unitary(u.copy())[1]
    assert np.array_equal(a, b)
