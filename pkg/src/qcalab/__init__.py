"""Quantum-walk cellular automata for free fermions and photons on a 3D lattice."""

from qcalab.coin import (
    CoinSet,
    ConditionReport,
    build_boson_coin,
    build_fermion_coin,
    eig_unitary,
    unitary_from_hermitian,
    verify_coin_conditions,
)
from qcalab.lattice import (
    LatticeSpec,
    MomentumBlock,
    MomentumIndex,
    SingleParticleState,
    build_block,
    momentum_of_index,
    plane_wave,
    spectrum_scan,
    step_position_space,
)

__version__ = "0.1.0"

__all__ = [
    "CoinSet",
    "ConditionReport",
    "LatticeSpec",
    "MomentumBlock",
    "MomentumIndex",
    "SingleParticleState",
    "build_block",
    "build_boson_coin",
    "build_fermion_coin",
    "eig_unitary",
    "momentum_of_index",
    "plane_wave",
    "spectrum_scan",
    "step_position_space",
    "unitary_from_hermitian",
    "verify_coin_conditions",
]
