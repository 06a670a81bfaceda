"""Named invariant checks aggregated over all modules.

Each check returns a :class:`Check` with its worst residual and the
tolerance it is judged against.  :func:`run_all` is what the ``invariants``
command reports.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np

from qcalab import fields, multiparticle as mp
from qcalab.coin import (
    CoinSet,
    build_boson_coin,
    build_fermion_coin,
    dirac_gammas,
    eig_unitary,
    max_abs,
    verify_coin_conditions,
)
from qcalab.lattice import (
    LatticeSpec,
    MomentumIndex,
    axis_path,
    build_block,
    momentum_components,
    block_unitary,
    momentum_indices,
    plane_wave,
    step_position_space,
)
from qcalab.spectrum import photon_hamiltonian, polarization_vectors, reference_phases


class Check(NamedTuple):
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def as_dict(self) -> dict:
        return {"name": self.name, "residual": float(self.residual), "tol": self.tol, "pass": self.passed}


def corrupted_fermion_coin() -> CoinSet:
    """Fermionic coin whose flip operator has one diagonal sign flipped."""
    g0, g1, g2, g3 = dirac_gammas()
    q = g0.copy()
    q[3, 3] = 1.0
    return CoinSet.fermion(q, g0 @ g1, g0 @ g2, g0 @ g3)


def check_fermion_coin(coin: CoinSet) -> list[Check]:
    rep = verify_coin_conditions(coin, strict=False)
    alg = max(rep.group_max("anticomm"), rep.group_max("square"), rep.group_max("hermitian"))
    eqn = max(rep.group_max("equal_norm"), abs(rep.constants["c"] - 0.5))
    return [Check("fermion_anticommutators", alg, 1e-13), Check("fermion_equal_norm", eqn, 1e-12)]


def check_boson_coin(coin: CoinSet) -> list[Check]:
    rep = verify_coin_conditions(coin, strict=False)
    proj = max(
        rep.group_max(p)
        for p in ("resolution", "idempotent", "orthogonal", "hermitian", "delta", "zero_pair")
    )
    eqn = max(
        rep.group_max("equal_norm"),
        abs(rep.constants["c"] - 0.25),
        abs(rep.constants["c_prime"] - 0.5),
    )
    return [Check("boson_projectors", proj, 1e-12), Check("boson_equal_norm", eqn, 1e-12)]


def check_blocks(spec: LatticeSpec, coin: CoinSet, name: str) -> list[Check]:
    unit, recon = 0.0, 0.0
    for idx in momentum_indices(spec):
        blk = build_block(spec, coin, idx)
        unit = max(unit, max_abs(blk.U.conj().T @ blk.U - np.eye(coin.dim)))
        v = blk.vectors
        recon = max(recon, max_abs(blk.U @ v - v * np.exp(1j * blk.phases)))
        recon = max(recon, max_abs(v.conj().T @ v - np.eye(coin.dim)))
    return [Check(f"{name}_block_unitarity", unit, 1e-12), Check(f"{name}_eig_reconstruction", recon, 1e-11)]


def check_representation(spec: LatticeSpec, coin: CoinSet, rng, count: int, name: str) -> Check:
    worst = 0.0
    r = list(spec.index_range)
    for _ in range(count):
        idx = MomentumIndex(*(int(v) for v in rng.choice(r, size=3)))
        c = rng.normal(size=coin.dim) + 1j * rng.normal(size=coin.dim)
        state = plane_wave(spec, coin, idx, c)
        out = step_position_space(spec, coin, state)
        blk = build_block(spec, coin, idx)
        expected = plane_wave(spec, coin, idx, blk.U @ (c / np.linalg.norm(c)))
        worst = max(worst, max_abs(out.amplitudes - expected.amplitudes))
        comps = momentum_components(out)
        mask = np.ones(comps.shape[:3], dtype=bool)
        mask[tuple(v % spec.N for v in idx)] = False
        worst = max(worst, max_abs(comps[mask]))
    return Check(f"{name}_representation_equivalence", worst, 1e-10)


def check_axis_law(spec: LatticeSpec, coin: CoinSet) -> Check:
    worst = 0.0
    for idx in axis_path(spec):
        blk = build_block(spec, coin, idx)
        expected = math.cos(spec.theta) * math.cos(blk.k[0] * spec.dx)
        worst = max(worst, float(np.max(np.abs(np.cos(blk.phases) - expected))))
    return Check("fermion_axis_law", worst, 1e-12)


def _abs_error_order(kind: str, coin: CoinSet, theta0: float, rng, directions: int = 5) -> float:
    """Measured order of the absolute phase error against the continuum law.

    Halves ``|k| dx`` and ``theta`` together.  The per-branch relative error
    is only first order for generic directions (the ordered product splits
    degenerate pairs at second order), so the absolute error is what
    converges quadratically.
    """
    scales = (0.05, 0.025, 0.0125)
    dirs = rng.normal(size=(directions, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    errs = []
    for s in scales:
        spec = LatticeSpec(2, theta=theta0 * s / scales[0])
        worst = 0.0
        for d in dirs:
            k = s * d
            phases, _ = eig_unitary(block_unitary(spec, coin, k))
            worst = max(worst, float(np.max(np.abs(phases - reference_phases(kind, k, spec)))))
        errs.append(worst)
    return min(math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1))


def check_convergence(fermion: CoinSet, boson: CoinSet, rng) -> list[Check]:
    order_f = _abs_error_order("fermion", fermion, 0.05, rng)
    order_b = _abs_error_order("boson", boson, 0.0, rng)
    # residual is the shortfall below order 1.9
    return [
        Check("fermion_dispersion_abs_order", max(0.0, 1.9 - order_f), 0.0),
        Check("boson_dispersion_abs_order", max(0.0, 1.9 - order_b), 0.0),
    ]


def check_photon(rng, count: int = 20) -> list[Check]:
    spec = LatticeSpec(2)
    eig, longi = 0.0, 0.0
    for _ in range(count):
        k = rng.normal(size=3)
        ph = photon_hamiltonian(k, spec)
        kn = np.linalg.norm(k)
        eig = max(eig, max_abs(ph.energies - np.array([-kn, 0.0, kn]) * spec.c * spec.hbar))
        longi = max(longi, abs(abs(np.vdot(ph.v_zero, k / kn)) - 1))
    return [Check("photon_spectrum", eig, 1e-12), Check("photon_zero_mode_longitudinal", longi, 1e-10)]


def check_polarization(rng, count: int = 100) -> Check:
    worst = 0.0
    for _ in range(count):
        k = rng.normal(size=3)
        p = polarization_vectors(k)
        kh = k / np.linalg.norm(k)
        worst = max(
            worst,
            abs(np.linalg.norm(p.e1) - 1),
            abs(np.linalg.norm(p.e2) - 1),
            abs(p.e1 @ p.e2),
            abs(p.e1 @ kh),
            abs(p.e2 @ kh),
        )
    return Check("polarization_orthonormal_transverse", worst, 1e-12)


def check_maxwell(spec: LatticeSpec, rng, count: int = 20, frequency_scale: float = 1.0) -> Check:
    worst = 0.0
    for _ in range(count):
        modes = fields.random_mode_amplitudes(spec, 20, rng)
        rep = fields.maxwell_residuals(modes, t=float(rng.uniform(0, 10)), frequency_scale=frequency_scale)
        snap = fields.field_snapshot(modes, t=0.0)
        worst = max(worst, rep.worst(), snap.imag_residue)
    return Check("maxwell_residuals", worst, 1e-11)


def check_ladders() -> list[Check]:
    basis = mp.ModeBasis(tuple(mp.Mode.of(0, 0, n, j) for n in range(2) for j in range(2)))
    car = _ladder_residual(basis, mp.FERMI, n_max=len(basis))
    ccr = _ladder_residual(basis, mp.BOSE, n_max=4)
    return [Check("fermion_car", car, 1e-12), Check("boson_ccr", ccr, 1e-12)]


def _ladder_residual(basis: mp.ModeBasis, statistics: str, n_max: int) -> float:
    sign = 1 if statistics == mp.FERMI else -1
    top = None if statistics == mp.FERMI else n_max - 2
    worst = 0.0
    cre, ann = mp.apply_creation, mp.apply_annihilation
    for s in mp.occupation_basis(basis, statistics, n_max, top):
        for m in basis:
            for mp_ in basis:
                lhs = ann(cre(s, mp_), m) + sign * cre(ann(s, m), mp_)
                expected = s if m == mp_ else s * 0
                worst = max(worst, lhs.distance(expected))
                for op in (cre, ann):
                    pair = op(op(s, m), mp_) + sign * op(op(s, mp_), m)
                    worst = max(worst, pair.norm)
    return worst


def check_physical_subspace(rng, count: int = 3) -> list[Check]:
    out = []
    for kind, coin, stats, theta in (
        ("fermion", build_fermion_coin(), mp.FERMI, 0.3),
        ("boson", build_boson_coin(), mp.BOSE, 0.0),
    ):
        spec = LatticeSpec(2, theta=theta)
        worst = 0.0
        for _ in range(count):
            s = mp.random_distinguishable(spec, coin, 2, rng)
            a = mp.project_physical(mp.evolve_distinguishable(s, spec, coin), stats)
            b = mp.evolve_distinguishable(mp.project_physical(s, stats), spec, coin)
            worst = max(worst, max_abs(a.amplitudes - b.amplitudes))
        out.append(Check(f"{kind}_physical_subspace", worst, 1e-10))
    return out


def check_isomorphism() -> list[Check]:
    out = []
    for kind, coin, stats, lists in (
        ("fermion", build_fermion_coin(), mp.FERMI, [[(0, 0, 0, 0)], [(0, 0, 1, 2), (1, 0, 0, 1)]]),
        ("boson", build_boson_coin(), mp.BOSE, [[(0, 1, 0, 1)], [(0, 1, 0, 2), (0, 1, 0, 2)]]),
    ):
        spec = LatticeSpec(2, theta=0.3 if kind == "fermion" else 0.0)
        worst = max(mp.fock_tensor_isomorphism_check(m, stats, spec, coin) for m in lists)
        out.append(Check(f"{kind}_fock_isomorphism", worst, 1e-12))
    return out


def run_all(spec: LatticeSpec, seed: int, corrupt_coin: bool = False) -> list[Check]:
    """Every check, in a fixed order, using ``seed`` for all randomness."""
    rng = np.random.default_rng(seed)
    fcoin = corrupted_fermion_coin() if corrupt_coin else build_fermion_coin()
    bcoin = build_boson_coin()
    small = LatticeSpec(min(spec.N, 8), spec.dx, spec.dt, spec.theta, spec.hbar, spec.eps0)
    bspec = LatticeSpec(small.N, small.dx, small.dt, 0.0, small.hbar, small.eps0)

    steps: list[Callable[[], list[Check] | Check]] = [
        lambda: check_fermion_coin(fcoin),
        lambda: check_boson_coin(bcoin),
        lambda: check_blocks(small, fcoin, "fermion"),
        lambda: check_blocks(bspec, bcoin, "boson"),
        lambda: check_representation(small, fcoin, rng, 5, "fermion"),
        lambda: check_representation(bspec, bcoin, rng, 5, "boson"),
        lambda: check_axis_law(spec, fcoin),
        lambda: check_convergence(fcoin, bcoin, rng),
        lambda: check_photon(rng),
        lambda: check_polarization(rng),
        lambda: check_maxwell(bspec, rng),
        check_ladders,
        lambda: check_physical_subspace(rng),
        check_isomorphism,
    ]
    results: list[Check] = []
    for step in steps:
        r = step()
        results.extend(r if isinstance(r, list) else [r])
    return results
