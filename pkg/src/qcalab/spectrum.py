"""Long-wavelength analysis of the two walks.

Dirac reference dispersion and rest mass for the fermionic walk, generator
extraction ``U_k = exp(i G_k)``, the photon Hamiltonian ``-c hbar k.J`` and
the transverse polarization pair for the bosonic walk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from qcalab.coin import CoinSet, max_abs, spin1_generators
from qcalab.errors import BranchCut, ZeroMomentum
from qcalab.lattice import LatticeSpec, MomentumBlock, ScanRow

__all__ = [
    "HANDEDNESS",
    "DispersionPoint",
    "GeneratorComparison",
    "PhotonModes",
    "PolarizationPair",
    "compare_generator",
    "dirac_dispersion_reference",
    "dirac_phase_reference",
    "dispersion_points",
    "effective_mass",
    "extract_generator",
    "first_order_generator",
    "photon_hamiltonian",
    "polarization_vectors",
    "reference_phases",
]

BRANCH_CUT_TOL = 1e-9
POLARIZATION_EPS = 1e-8
# sign of (e1 x e2) . k_hat for every pair returned by polarization_vectors
HANDEDNESS = 1


def effective_mass(spec: LatticeSpec) -> float:
    """Rest mass ``hbar dt theta / dx**2``."""
    return spec.hbar * spec.dt * spec.theta / spec.dx**2


def dirac_dispersion_reference(k, spec: LatticeSpec) -> np.ndarray:
    """``(-E, +E)`` with ``E = sqrt(c^2 p^2 + m^2 c^4)`` and ``p = hbar k``."""
    p2 = spec.hbar**2 * float(np.dot(k, k))
    m = effective_mass(spec)
    e = np.sqrt(spec.c**2 * p2 + m**2 * spec.c**4)
    return np.array([-e, e])


def dirac_phase_reference(k, spec: LatticeSpec) -> float:
    """Positive reference phase ``E dt / hbar = sqrt(theta^2 + |k dx|^2)``."""
    return float(dirac_dispersion_reference(k, spec)[1] * spec.dt / spec.hbar)


def reference_phases(kind: str, k, spec: LatticeSpec) -> np.ndarray:
    """Continuum phases per branch, ascending: 4 for the fermion, 3 for the boson."""
    if kind == "fermion":
        e = dirac_phase_reference(k, spec)
        return np.array([-e, -e, e, e])
    w = float(np.linalg.norm(k)) * spec.c * spec.dt
    return np.array([-w, 0.0, w])


class DispersionPoint(NamedTuple):
    n: int
    o: int
    p: int
    kx: float
    ky: float
    kz: float
    branch: int
    phase: float
    energy: float


def dispersion_points(rows: Iterable[ScanRow], spec: LatticeSpec) -> list[DispersionPoint]:
    """Attach ``E = hbar phase / dt`` to scan rows."""
    scale = spec.hbar / spec.dt
    return [DispersionPoint(*r, r.phase * scale) for r in rows]


def extract_generator(block: MomentumBlock) -> np.ndarray:
    """Hermitian ``G_k = V diag(phase) V^dagger`` with ``U_k = exp(i G_k)``.

    Raises :class:`BranchCut` if an eigenphase lies within ``1e-9`` of pi.
    """
    if np.any(np.abs(np.abs(block.phases) - np.pi) < BRANCH_CUT_TOL):
        raise BranchCut(f"eigenphase at the branch cut for momentum {tuple(block.index)}")
    v = block.vectors
    g = (v * block.phases) @ v.conj().T
    return (g + g.conj().T) / 2


def first_order_generator(coin: CoinSet, k, spec: LatticeSpec) -> np.ndarray:
    """``theta Q + dx (kx dPX + ky dPY + kz dPZ)``."""
    g = sum(ki * spec.dx * d for ki, d in zip(k, coin.delta_p))
    if coin.Q is not None:
        g = g + spec.theta * coin.Q
    return np.asarray(g, dtype=complex)


class GeneratorComparison(NamedTuple):
    generator: np.ndarray
    first_order: np.ndarray
    residual: float
    scale: float
    constant: float


def compare_generator(block: MomentumBlock, coin: CoinSet, spec: LatticeSpec) -> GeneratorComparison:
    """Max-norm gap between ``G_k`` and its first-order expansion.

    ``constant`` is ``residual / scale**2`` with ``scale = |k| dx + |theta|``.
    """
    g = extract_generator(block)
    g1 = first_order_generator(coin, block.k, spec)
    res = max_abs(g - g1)
    scale = float(np.linalg.norm(block.k)) * spec.dx + abs(spec.theta)
    const = res / scale**2 if scale > 0 else 0.0
    return GeneratorComparison(g, g1, res, scale, const)


def _fix_phase(v: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """Rotate ``v`` so its first non-negligible component is real positive."""
    big = np.flatnonzero(np.abs(v) > rel_tol * np.max(np.abs(v)))[0]
    return v * (abs(v[big]) / v[big])


@dataclass(frozen=True, eq=False)
class PhotonModes:
    """``H = -c hbar k.J`` with eigenvalues ``(-c hbar |k|, 0, +c hbar |k|)``."""

    k: np.ndarray
    H: np.ndarray
    energies: np.ndarray
    v_minus: np.ndarray
    v_zero: np.ndarray
    v_plus: np.ndarray


def photon_hamiltonian(k, spec: LatticeSpec) -> PhotonModes:
    """Massless spin-1 Hamiltonian at wave vector ``k`` and its eigenvectors."""
    k = np.asarray(k, dtype=float)
    if not np.linalg.norm(k) > 0:
        raise ZeroMomentum("photon Hamiltonian needs a nonzero wave vector")
    j = spin1_generators()
    h = -spec.c * spec.hbar * sum(ki * ji for ki, ji in zip(k, j))
    w, v = np.linalg.eigh(h)
    vecs = [_fix_phase(v[:, i]) for i in range(3)]
    return PhotonModes(k=k, H=h, energies=w, v_minus=vecs[0], v_zero=vecs[1], v_plus=vecs[2])


@dataclass(frozen=True, eq=False)
class PolarizationPair:
    k: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


def polarization_vectors(k) -> PolarizationPair:
    """Real transverse pair ``(e1, e2)`` for wave vector ``k``.

    Generic ``k``::

        e1 = (k^2 - kx^2, -kx ky, -kx kz) / (|k| sqrt(k^2 - kx^2))
        e2 = (0, kz, -ky) / sqrt(k^2 - kx^2)

    When ``k`` lies (numerically) on the X axis this is singular and the
    fixed pair ``e1 = y``, ``e2 = +-z`` is used instead, projected to be
    exactly transverse, with the sign chosen so that ``(e1 x e2) . k_hat``
    equals :data:`HANDEDNESS` throughout.
    """
    k = np.asarray(k, dtype=float)
    knorm = float(np.linalg.norm(k))
    if not knorm > 0:
        raise ZeroMomentum("polarization vectors need a nonzero wave vector")
    kx, ky, kz = k
    perp2 = ky * ky + kz * kz
    if perp2 <= (POLARIZATION_EPS * knorm) ** 2:
        # y made transverse, then e2 = k_hat x e1; exactly (y, +-z) on the axis
        kh = k / knorm
        e1 = np.array([0.0, 1.0, 0.0]) - kh[1] * kh
        e1 /= np.linalg.norm(e1)
        e2 = HANDEDNESS * np.cross(kh, e1)
    else:
        perp = np.sqrt(perp2)
        e1 = np.array([perp2, -kx * ky, -kx * kz]) / (knorm * perp)
        e2 = np.array([0.0, kz, -ky]) / perp
    return PolarizationPair(k=k, e1=e1, e2=e2)
