import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import JX, JY, JZ
from qcalab.coin import build_boson_coin, build_fermion_coin, eig_unitary, max_abs
from qcalab.errors import BranchCut, ZeroMomentum
from qcalab.lattice import LatticeSpec, MomentumBlock, MomentumIndex, block_unitary, build_block, spectrum_scan
from qcalab.spectrum import (
    HANDEDNESS,
    compare_generator,
    dirac_dispersion_reference,
    dirac_phase_reference,
    dispersion_points,
    effective_mass,
    extract_generator,
    first_order_generator,
    photon_hamiltonian,
    polarization_vectors,
    reference_phases,
)

FERMION = build_fermion_coin()
BOSON = build_boson_coin()

vectors = st.tuples(*(st.floats(-10, 10, allow_nan=False),) * 3).map(np.array)


def _block_at(spec, coin, k):
    u = block_unitary(spec, coin, k)
    phases, vecs = eig_unitary(u)
    return MomentumBlock(MomentumIndex(0, 0, 0), np.asarray(k, dtype=float), u, phases, vecs)


# -- reference dispersion and mass ------------------------------------------


def test_rest_energy_is_mass_term():
    spec = LatticeSpec(8, theta=0.07)
    e = dirac_dispersion_reference(np.zeros(3), spec)
    m = effective_mass(spec)
    assert np.allclose(e, [-m * spec.c**2, m * spec.c**2], rtol=1e-15)
    assert dirac_phase_reference(np.zeros(3), spec) == pytest.approx(0.07, rel=1e-15)


def test_massless_energy():
    spec = LatticeSpec(8, dx=0.5, dt=0.25, theta=0.0, hbar=2.0)
    e = dirac_dispersion_reference(np.array([0.3, 0, 0]), spec)
    assert np.allclose(e, [-2.0 * 2.0 * 0.3, 2.0 * 2.0 * 0.3], rtol=1e-15)


def test_reference_matches_walk_along_axis():
    spec = LatticeSpec(64, theta=0.02)
    k = np.array([0.02, 0.0, 0.0])
    phases, _ = eig_unitary(block_unitary(spec, FERMION, k))
    e = dirac_phase_reference(k, spec)
    assert np.max(np.abs(np.abs(phases) - e)) / e <= 3e-4


def test_mass_formula():
    assert effective_mass(LatticeSpec(4)) == 0.0
    assert effective_mass(LatticeSpec(4, theta=0.1)) == pytest.approx(0.1, rel=1e-15)
    a = effective_mass(LatticeSpec(4, dx=1.0, dt=0.3, theta=0.2))
    b = effective_mass(LatticeSpec(4, dx=2.0, dt=0.3, theta=0.2))
    assert b == pytest.approx(a / 4, rel=1e-15)


def test_reference_phase_layout():
    spec = LatticeSpec(4, theta=0.1)
    assert reference_phases("fermion", [0, 0, 0], spec).tolist() == [-0.1, -0.1, 0.1, 0.1]
    assert np.allclose(reference_phases("boson", [0, 0.3, 0.4], LatticeSpec(4)), [-0.5, 0, 0.5], rtol=1e-15)


def test_axis_law_exact():
    spec = LatticeSpec(32, theta=0.3)
    for n in range(17):
        blk = build_block(spec, FERMION, (n, 0, 0))
        expected = math.cos(0.3) * math.cos(blk.k[0])
        assert np.max(np.abs(np.cos(blk.phases) - expected)) <= 1e-12


def test_absolute_phase_error_is_second_order():
    rng = np.random.default_rng(5)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    errs = []
    for s in (0.05, 0.025, 0.0125):
        spec = LatticeSpec(2, theta=s)
        phases, _ = eig_unitary(block_unitary(spec, FERMION, s * d))
        errs.append(np.max(np.abs(phases - reference_phases("fermion", s * d, spec))))
    assert min(math.log2(errs[i] / errs[i + 1]) for i in range(2)) >= 1.9


def test_pair_average_converges_at_second_order():
    # the splitting of each +-pair is first order; its mean is not
    rng = np.random.default_rng(6)
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    errs = []
    for s in (0.05, 0.025, 0.0125):
        spec = LatticeSpec(2, theta=s)
        phases, _ = eig_unitary(block_unitary(spec, FERMION, s * d))
        e = dirac_phase_reference(s * d, spec)
        errs.append(abs((phases[2] + phases[3]) / 2 - e) / e)
    assert min(math.log2(errs[i] / errs[i + 1]) for i in range(2)) >= 1.9


def test_dispersion_points_energy():
    spec = LatticeSpec(8, dt=0.5, hbar=2.0, theta=0.1)
    rows = spectrum_scan(spec, FERMION, [(0, 0, 0)])
    pts = dispersion_points(rows, spec)
    assert [p.energy for p in pts] == [r.phase * 4.0 for r in rows]


# -- generator --------------------------------------------------------------


def test_generator_at_rest():
    spec = LatticeSpec(4, theta=0.2)
    g = extract_generator(build_block(spec, FERMION, (0, 0, 0)))
    assert max_abs(g - 0.2 * FERMION.Q) <= 1e-15


def test_boson_generator_along_z():
    spec = LatticeSpec(16)
    blk = build_block(spec, BOSON, (0, 0, 3))
    assert max_abs(extract_generator(blk) - 3 * spec.dk * JZ) <= 1e-14


def test_generator_first_order_and_convergence():
    k = np.array([0.01, 0.02, 0.015])
    a = compare_generator(_block_at(LatticeSpec(2, theta=0.01), FERMION, k), FERMION, LatticeSpec(2, theta=0.01))
    b = compare_generator(
        _block_at(LatticeSpec(2, theta=0.005), FERMION, k / 2), FERMION, LatticeSpec(2, theta=0.005)
    )
    assert a.residual <= 1e-3
    assert a.residual / b.residual == pytest.approx(4.0, rel=0.05)


def test_first_order_generator_terms():
    spec = LatticeSpec(4, dx=0.5, theta=0.1)
    g = first_order_generator(FERMION, [1.0, 0, 0], spec)
    assert max_abs(g - (0.5 * FERMION.delta_p[0] + 0.1 * FERMION.Q)) == 0


def test_branch_cut_raises():
    spec = LatticeSpec(4)
    blk = build_block(spec, FERMION, (2, 0, 0))  # phases exactly +-pi
    with pytest.raises(BranchCut):
        extract_generator(blk)


# -- photon Hamiltonian -----------------------------------------------------


def test_photon_along_z():
    spec = LatticeSpec(4, dx=2.0, dt=0.5, hbar=3.0)
    ph = photon_hamiltonian([0, 0, 0.7], spec)
    c = spec.c
    assert np.allclose(ph.energies, [-c * 3.0 * 0.7, 0, c * 3.0 * 0.7], atol=1e-14)
    h = -c * 3.0 * 0.7 * JZ
    assert max_abs(ph.H - h) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(k=vectors)
def test_photon_spectrum_and_longitudinal_zero_mode(k):
    kn = np.linalg.norm(k)
    assume(kn > 1e-3)
    ph = photon_hamiltonian(k, LatticeSpec(2))
    assert max_abs(ph.energies - np.array([-kn, 0, kn])) <= 1e-12 * max(1, kn)
    assert abs(abs(np.vdot(ph.v_zero, k / kn)) - 1) <= 1e-10
    for e, v in zip(ph.energies, (ph.v_minus, ph.v_zero, ph.v_plus)):
        assert max_abs(ph.H @ v - e * v) <= 1e-11 * max(1, kn)


def test_photon_matches_boson_walk_along_axis():
    spec = LatticeSpec(64)
    blk = build_block(spec, BOSON, (0, 2, 0))
    ph = photon_hamiltonian(blk.k, spec)
    assert max_abs(np.sort(ph.energies) - spec.hbar / spec.dt * blk.phases) <= 1e-12


def test_photon_zero_momentum():
    with pytest.raises(ZeroMomentum):
        photon_hamiltonian([0, 0, 0], LatticeSpec(2))


def test_positive_mode_spans_polarizations():
    # v_+ lies in span{e1, e2} (its real and imaginary parts up to a phase)
    k = np.array([0.3, -0.5, 0.8])
    ph = photon_hamiltonian(k, LatticeSpec(2))
    p = polarization_vectors(k)
    basis = np.stack([p.e1, p.e2], axis=1)
    proj = basis @ basis.T
    assert max_abs(proj @ ph.v_plus - ph.v_plus) <= 1e-12


# -- polarization -----------------------------------------------------------


def test_polarization_along_z():
    p = polarization_vectors([0, 0, 2.0])
    assert np.allclose(p.e1, [1, 0, 0], atol=0) and np.allclose(p.e2, [0, 1, 0], atol=0)


def test_polarization_hand_case():
    p = polarization_vectors(np.array([3, 4, 0]) / 5)
    assert np.allclose(p.e1, [4 / 5, -3 / 5, 0], atol=1e-15)
    assert np.allclose(p.e2, [0, 0, -1], atol=1e-15)


def test_polarization_fallback_on_x_axis():
    p = polarization_vectors([0.4, 0, 0])
    assert np.array_equal(p.e1, [0, 1, 0]) and np.array_equal(p.e2, [0, 0, 1])
    q = polarization_vectors([-0.4, 0, 0])
    assert np.array_equal(q.e2, [0, 0, -1])


@settings(max_examples=100, deadline=None)
@given(k=vectors)
def test_polarization_orthonormal_transverse(k):
    kn = np.linalg.norm(k)
    assume(kn > 1e-6)
    p = polarization_vectors(k)
    kh = k / kn
    for v in (p.e1, p.e2):
        assert abs(np.linalg.norm(v) - 1) <= 1e-12
        assert abs(v @ kh) <= 1e-12
    assert abs(p.e1 @ p.e2) <= 1e-12
    assert np.cross(p.e1, p.e2) @ kh == pytest.approx(HANDEDNESS, abs=1e-12)


def test_polarization_zero_momentum():
    with pytest.raises(ZeroMomentum):
        polarization_vectors([0.0, 0.0, 0.0])
