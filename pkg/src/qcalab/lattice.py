"""Periodic cubic lattice with its momentum blocks and a position-space stepper.

The walk operator in momentum space is

    U_k = exp(i theta Q) exp(i kz dx dPZ) exp(i ky dx dPY) exp(i kx dx dPX)

so the X factor acts first.  The position-space stepper uses the same
order, which makes it an exact brute-force twin of :func:`build_block`
under the lattice Fourier transform.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from qcalab.coin import CoinSet, eig_unitary, max_abs, unitary_from_hermitian
from qcalab.errors import (
    DegenerateMatchAmbiguity,
    IndexOutOfRange,
    InvalidLattice,
    NotUnitary,
)

__all__ = [
    "LatticeSpec",
    "MomentumBlock",
    "MomentumIndex",
    "ScanRow",
    "SingleParticleState",
    "axis_path",
    "build_block",
    "build_blocks",
    "momentum_components",
    "momentum_indices",
    "momentum_of_index",
    "plane_wave",
    "spectrum_scan",
    "step_position_space",
    "walk_matrix",
]

MATCH_TOL = 1e-9


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice geometry together with the coin angle and physical constants.

    ``N`` sites per dimension (even), spacing ``dx``, time step ``dt``,
    coin angle ``theta``.  ``hbar`` and ``eps0`` default to natural units.
    """

    N: int
    dx: float = 1.0
    dt: float = 1.0
    theta: float = 0.0
    hbar: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise InvalidLattice(f"N must be an integer, got {self.N!r}")
        if self.N < 2 or self.N % 2:
            raise InvalidLattice(f"N must be even and >= 2, got {self.N}")
        for name in ("dx", "dt", "hbar", "eps0"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InvalidLattice(f"{name} must be a positive finite number, got {val!r}")
        if not math.isfinite(self.theta):
            raise InvalidLattice(f"theta must be finite, got {self.theta!r}")

    @property
    def c(self) -> float:
        return self.dx / self.dt

    @property
    def dk(self) -> float:
        return 2 * math.pi / (self.N * self.dx)

    @property
    def volume(self) -> float:
        return (self.N * self.dx) ** 3

    @property
    def index_range(self) -> range:
        return range(-self.N // 2 + 1, self.N // 2 + 1)


class MomentumIndex(NamedTuple):
    n: int
    o: int
    p: int


def _check_index(spec: LatticeSpec, idx) -> MomentumIndex:
    idx = MomentumIndex(*(int(v) for v in idx))
    lo, hi = -spec.N // 2 + 1, spec.N // 2
    if not all(lo <= v <= hi for v in idx):
        raise IndexOutOfRange(f"momentum index {tuple(idx)} outside [{lo}, {hi}] for N={spec.N}")
    return idx


def momentum_of_index(spec: LatticeSpec, idx) -> np.ndarray:
    """Wave vector ``(n, o, p) * 2 pi / (N dx)``."""
    idx = _check_index(spec, idx)
    return spec.dk * np.array(idx, dtype=float)


def momentum_indices(spec: LatticeSpec) -> list[MomentumIndex]:
    """All momentum indices of the lattice in lexicographic order."""
    r = spec.index_range
    return [MomentumIndex(n, o, p) for n in r for o in r for p in r]


def axis_path(spec: LatticeSpec, axis: int = 0, stop: int | None = None) -> list[MomentumIndex]:
    """Indices ``0..stop`` along one axis (``stop`` defaults to ``N/2``)."""
    stop = spec.N // 2 if stop is None else stop
    out = []
    for n in range(stop + 1):
        v = [0, 0, 0]
        v[axis] = n
        out.append(MomentumIndex(*v))
    return out


@dataclass(frozen=True, eq=False)
class MomentumBlock:
    index: MomentumIndex
    k: np.ndarray
    U: np.ndarray
    phases: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.U.shape[0]


def _check_kind(spec: LatticeSpec, coin: CoinSet) -> None:
    if coin.kind == "boson" and spec.theta != 0:
        raise InvalidLattice("the bosonic walk is massless: theta must be 0")


def block_unitary(spec: LatticeSpec, coin: CoinSet, k) -> np.ndarray:
    """``U_k`` at an arbitrary wave vector ``k`` (not restricted to the grid)."""
    _check_kind(spec, coin)
    u = np.eye(coin.dim, dtype=complex)
    for axis in range(3):
        if k[axis] != 0:
            u = unitary_from_hermitian(coin.delta_p[axis], k[axis] * spec.dx) @ u
    if coin.Q is not None and spec.theta != 0:
        u = unitary_from_hermitian(coin.Q, spec.theta) @ u
    return u


def build_block(spec: LatticeSpec, coin: CoinSet, idx) -> MomentumBlock:
    """Walk unitary restricted to one momentum, with its eigendecomposition."""
    idx = _check_index(spec, idx)
    k = momentum_of_index(spec, idx)
    u = block_unitary(spec, coin, k)
    phases, vectors = eig_unitary(u)
    for a in (k, u, phases, vectors):
        a.setflags(write=False)
    return MomentumBlock(index=idx, k=k, U=u, phases=phases, vectors=vectors)


def build_blocks(
    spec: LatticeSpec, coin: CoinSet, indices: Iterable, workers: int | None = None
) -> list[MomentumBlock]:
    """:func:`build_block` mapped over ``indices``, optionally on a thread pool."""
    indices = list(indices)
    if workers and workers > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda i: build_block(spec, coin, i), indices))
    return [build_block(spec, coin, i) for i in indices]


@dataclass(frozen=True, eq=False)
class SingleParticleState:
    """One walker: amplitudes with shape ``(N, N, N, D)`` (sites x coin)."""

    kind: str
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def N(self) -> int:
        return self.amplitudes.shape[0]


def plane_wave(spec: LatticeSpec, coin: CoinSet, idx, coin_vector) -> SingleParticleState:
    """``|k> (x) c`` with ``<x|k> = N^{-3/2} exp(-i k.x)``; ``c`` is normalised."""
    idx = _check_index(spec, idx)
    c = np.asarray(coin_vector, dtype=complex)
    c = c / np.linalg.norm(c)
    grids = np.meshgrid(*(np.arange(spec.N),) * 3, indexing="ij")
    phase = sum(n * g for n, g in zip(idx, grids)) * (2 * np.pi / spec.N)
    amp = np.exp(-1j * phase)[..., None] * c / spec.N**1.5
    return SingleParticleState(coin.kind, amp)


def momentum_components(state: SingleParticleState) -> np.ndarray:
    """``<k| (x) I`` applied to the state; entry ``[n % N, o % N, p % N, :]``."""
    n = state.N
    return np.fft.ifftn(state.amplitudes, axes=(0, 1, 2)) * n**1.5


def _apply_coin(m: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return psi @ m.T


def step_position_space(
    spec: LatticeSpec, coin: CoinSet, state: SingleParticleState
) -> SingleParticleState:
    """One walk step as coin-conditioned cyclic shifts, X axis first.

    ``S_a P+_a + [P0_a] + S_a^dagger P-_a`` for a = X, Y, Z, then
    ``exp(i theta Q)`` on every site.
    """
    _check_kind(spec, coin)
    psi = np.asarray(state.amplitudes, dtype=complex)
    if psi.shape != (spec.N,) * 3 + (coin.dim,):
        raise ValueError(f"state shape {psi.shape} does not match lattice N={spec.N}, D={coin.dim}")
    for axis in range(3):
        out = np.roll(_apply_coin(coin.proj_plus[axis], psi), 1, axis=axis)
        out += np.roll(_apply_coin(coin.proj_minus[axis], psi), -1, axis=axis)
        if coin.proj_zero is not None:
            out += _apply_coin(coin.proj_zero[axis], psi)
        psi = out
    if coin.Q is not None and spec.theta != 0:
        psi = _apply_coin(unitary_from_hermitian(coin.Q, spec.theta), psi)
    return SingleParticleState(state.kind, psi)


def walk_matrix(spec: LatticeSpec, coin: CoinSet) -> np.ndarray:
    """Dense ``U_QW`` on the ``N^3 D`` position-coin basis (C order).

    Built column by column from the stepper; desk-scale lattices only.
    """
    dim = spec.N**3 * coin.dim
    if dim > 4096:
        raise ValueError(f"walk matrix of dimension {dim} is beyond desk scale")
    cols = np.empty((dim, dim), dtype=complex)
    shape = (spec.N,) * 3 + (coin.dim,)
    for i in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[i] = 1.0
        out = step_position_space(spec, coin, SingleParticleState(coin.kind, e.reshape(shape)))
        cols[:, i] = out.amplitudes.ravel()
    return cols


class ScanRow(NamedTuple):
    n: int
    o: int
    p: int
    kx: float
    ky: float
    kz: float
    branch: int
    phase: float


def _match(prev: np.ndarray, cur: np.ndarray) -> tuple[np.ndarray, bool]:
    """Assignment ``perm`` with ``cur[:, perm[a]]`` continuing branch ``a``."""
    overlap = np.abs(prev.conj().T @ cur) ** 2
    rows, cols = linear_sum_assignment(-overlap)
    perm = cols[np.argsort(rows)]
    ambiguous = False
    for a in range(overlap.shape[0]):
        top = np.sort(overlap[a])[::-1]
        if len(top) > 1 and top[0] - top[1] < MATCH_TOL:
            ambiguous = True
            break
    return perm, ambiguous


def spectrum_scan(
    spec: LatticeSpec,
    coin: CoinSet,
    path: Sequence,
    workers: int | None = None,
) -> list[ScanRow]:
    """Eigenphases along a momentum path with branch tracking.

    Branches are labelled by phase order at the first point and then
    followed by maximal eigenvector overlap.  Where two candidate overlaps
    differ by less than ``1e-9`` a :class:`DegenerateMatchAmbiguity` warning
    is emitted and that point falls back to phase order.
    """
    if not path:
        raise ValueError("spectrum_scan needs a non-empty path")
    blocks = build_blocks(spec, coin, path, workers=workers)
    rows: list[ScanRow] = []
    prev = None
    for blk in blocks:
        perm = np.arange(blk.dim)
        if prev is not None:
            perm, ambiguous = _match(prev, blk.vectors)
            if ambiguous:
                warnings.warn(
                    f"ambiguous branch match at {tuple(blk.index)}; using phase order",
                    DegenerateMatchAmbiguity,
                    stacklevel=2,
                )
                perm = np.arange(blk.dim)
        prev = blk.vectors[:, perm]
        for branch, col in enumerate(perm):
            rows.append(
                ScanRow(*blk.index, *(float(v) for v in blk.k), branch, float(blk.phases[col]))
            )
    return rows


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> float:
    """Max-norm of ``U^dagger U - I``; raises :class:`NotUnitary` above ``tol``."""
    r = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    if r > tol:
        raise NotUnitary(f"unitarity residual {r:.3e} exceeds {tol:.0e}")
    return r

