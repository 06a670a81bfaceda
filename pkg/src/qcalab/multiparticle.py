"""Multiparticle sectors of the walk.

Two equivalent pictures are implemented side by side.

Tensor picture
    ``N_max`` distinguishable particle types, each living in the walk space
    extended by a vacuum vector ``|w>`` (stored as the last basis vector).
    The global step is ``U (x) ... (x) U`` with ``U = U_QW + |w><w|``.

Occupation picture
    Fock states over an ordered list of modes ``(momentum index, branch)``
    with fermionic or bosonic ladder operators, cut off at ``N_max``
    particles.

Branches are 0-based and refer to the columns of the momentum block's
eigenvector matrix, i.e. to eigenphases in ascending order.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from qcalab.coin import CoinSet, max_abs
from qcalab.errors import (
    DimensionOverflow,
    DuplicateFermionMode,
    MissingPhase,
    NotUnitary,
    TooManyParticles,
    UnknownMode,
)
from qcalab.lattice import (
    LatticeSpec,
    MomentumBlock,
    MomentumIndex,
    build_block,
    momentum_indices,
    plane_wave,
    walk_matrix,
)

__all__ = [
    "FERMI",
    "BOSE",
    "DistinguishableState",
    "LadderCombination",
    "Mode",
    "ModeBasis",
    "OccupationState",
    "apply_annihilation",
    "apply_creation",
    "build_basis_state",
    "evolve_distinguishable",
    "evolve_occupation",
    "fock_tensor_isomorphism_check",
    "mode_phases",
    "occupation_basis",
    "permutation_sign",
    "project_physical",
    "random_distinguishable",
    "rotate_ladder_basis",
    "to_distinguishable",
    "vacuum_state",
]

FERMI = "fermi"
BOSE = "bose"
MAX_TYPES = 3
MAX_TENSOR_DIM = 33**3


class Mode(NamedTuple):
    """Single-particle energy eigenmode; tuple order is the mode ordering."""

    index: MomentumIndex
    branch: int

    @classmethod
    def of(cls, n: int, o: int, p: int, branch: int) -> "Mode":
        return cls(MomentumIndex(n, o, p), branch)


def _as_mode(m) -> Mode:
    if isinstance(m, Mode):
        return m
    if len(m) == 2:
        return Mode(MomentumIndex(*m[0]), int(m[1]))
    n, o, p, j = m
    return Mode.of(int(n), int(o), int(p), int(j))


def _check_statistics(statistics: str) -> str:
    if statistics not in (FERMI, BOSE):
        raise ValueError(f"statistics must be {FERMI!r} or {BOSE!r}, got {statistics!r}")
    return statistics


@dataclass(frozen=True)
class ModeBasis:
    """Sorted, duplicate-free tuple of modes."""

    modes: tuple[Mode, ...]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        modes = tuple(sorted({_as_mode(m) for m in self.modes}))
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "_pos", {m: i for i, m in enumerate(modes)})

    @classmethod
    def from_lattice(cls, spec: LatticeSpec, coin: CoinSet) -> "ModeBasis":
        return cls(tuple(Mode(i, j) for i in momentum_indices(spec) for j in range(coin.dim)))

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def position(self, mode) -> int:
        try:
            return self._pos[_as_mode(mode)]
        except (KeyError, TypeError, ValueError):
            raise UnknownMode(f"mode {mode!r} is not in the basis") from None


# --------------------------------------------------------------------------
# occupation picture
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OccupationState:
    """Superposition of Fock basis states.

    ``terms`` maps an occupation key to its amplitude.  Fermionic keys are
    bitmasks (bit ``i`` is mode ``i`` of ``basis``); bosonic keys are tuples
    of occupation numbers.  Ladder operators return unnormalised results, so
    normalisation is not enforced here.
    """

    statistics: str
    basis: ModeBasis
    n_max: int
    terms: Mapping

    def __post_init__(self):
        _check_statistics(self.statistics)
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        terms = {}
        m = len(self.basis)
        for key, amp in dict(self.terms).items():
            occ = self._occ(key)
            if len(occ) != m or any(o < 0 for o in occ):
                raise ValueError(f"bad occupation key {key!r}")
            if self.statistics == FERMI and any(o > 1 for o in occ):
                raise ValueError(f"fermionic occupation above 1 in {key!r}")
            if sum(occ) > self.n_max:
                raise TooManyParticles(f"{sum(occ)} particles exceed n_max={self.n_max}")
            if amp != 0:
                terms[key] = complex(amp)
        object.__setattr__(self, "terms", terms)

    def _occ(self, key) -> tuple[int, ...]:
        if self.statistics == FERMI:
            if not isinstance(key, int) or key < 0 or key >> len(self.basis):
                raise ValueError(f"bad fermionic occupation key {key!r}")
            return tuple((key >> i) & 1 for i in range(len(self.basis)))
        return tuple(key)

    def occupations(self, key) -> tuple[int, ...]:
        """Occupation vector of a key, in basis order."""
        return self._occ(key)

    def key_for(self, occupations: Sequence[int]):
        """Inverse of :meth:`occupations`."""
        if self.statistics == FERMI:
            return sum(1 << i for i, o in enumerate(occupations) if o)
        return tuple(int(o) for o in occupations)

    def _new(self, terms) -> "OccupationState":
        return OccupationState(self.statistics, self.basis, self.n_max, terms)

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def inner(self, other: "OccupationState") -> complex:
        """``<self|other>``."""
        return sum(np.conj(a) * other.terms.get(k, 0) for k, a in self.terms.items())

    def __add__(self, other: "OccupationState") -> "OccupationState":
        terms = dict(self.terms)
        for k, a in other.terms.items():
            terms[k] = terms.get(k, 0) + a
        return self._new(terms)

    def __sub__(self, other: "OccupationState") -> "OccupationState":
        return self + (-1) * other

    def __mul__(self, scalar) -> "OccupationState":
        return self._new({k: scalar * a for k, a in self.terms.items()})

    __rmul__ = __mul__

    def distance(self, other: "OccupationState") -> float:
        """Max absolute amplitude difference."""
        diff = (self - other).terms
        return max((abs(a) for a in diff.values()), default=0.0)

    def to_dict(self) -> dict:
        terms = [
            {"occ": list(self._occ(k)), "re": a.real, "im": a.imag}
            for k, a in sorted(self.terms.items(), key=lambda kv: self._occ(kv[0]))
        ]
        return {
            "statistics": self.statistics,
            "n_max": self.n_max,
            "modes": [[*m.index, m.branch] for m in self.basis],
            "terms": terms,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping, basis: ModeBasis | None = None, n_max: int | None = None):
        """Inverse of :meth:`to_dict`.  ``basis``/``n_max`` fill in missing keys."""
        if "modes" in data:
            basis = ModeBasis(tuple(_as_mode(m) for m in data["modes"]))
        if basis is None:
            raise ValueError("mode basis missing from data and not given")
        statistics = _check_statistics(data["statistics"])
        proto = cls(statistics, basis, 0, {})
        terms = {}
        for t in data["terms"]:
            key = proto.key_for(t["occ"])
            terms[key] = terms.get(key, 0) + complex(t["re"], t["im"])
        if n_max is None:
            n_max = data.get("n_max")
        if n_max is None:
            n_max = max((sum(t["occ"]) for t in data["terms"]), default=0)
        return cls(statistics, basis, int(n_max), terms)

    @classmethod
    def from_json(cls, text: str, **kwargs) -> "OccupationState":
        return cls.from_dict(json.loads(text), **kwargs)


def vacuum_state(basis: ModeBasis, statistics: str, n_max: int) -> OccupationState:
    key = 0 if statistics == FERMI else (0,) * len(basis)
    return OccupationState(statistics, basis, n_max, {key: 1.0})


def occupation_basis(
    basis: ModeBasis, statistics: str, n_max: int, max_particles: int | None = None
) -> list[OccupationState]:
    """Every Fock basis state with at most ``max_particles`` (default ``n_max``)."""
    top = n_max if max_particles is None else min(max_particles, n_max)
    m = len(basis)
    out = []
    if statistics == FERMI:
        for mask in range(1 << m):
            if bin(mask).count("1") <= top:
                out.append(OccupationState(statistics, basis, n_max, {mask: 1.0}))
    else:
        for occ in itertools.product(range(top + 1), repeat=m):
            if sum(occ) <= top:
                out.append(OccupationState(statistics, basis, n_max, {occ: 1.0}))
    return out


def _ladder(state: OccupationState, mode, create: bool) -> OccupationState:
    i = state.basis.position(mode)
    out: dict = {}
    if state.statistics == FERMI:
        bit = 1 << i
        below = bit - 1
        for mask, amp in state.terms.items():
            occupied = bool(mask & bit)
            if occupied == create:
                continue
            if create and bin(mask).count("1") >= state.n_max:
                continue
            sign = -1 if bin(mask & below).count("1") % 2 else 1
            new = mask ^ bit
            out[new] = out.get(new, 0) + sign * amp
    else:
        for occ, amp in state.terms.items():
            m = occ[i]
            if create:
                if sum(occ) >= state.n_max:
                    continue
                factor = math.sqrt(m + 1)
                new = occ[:i] + (m + 1,) + occ[i + 1 :]
            else:
                if m == 0:
                    continue
                factor = math.sqrt(m)
                new = occ[:i] + (m - 1,) + occ[i + 1 :]
            out[new] = out.get(new, 0) + factor * amp
    return state._new(out)


def apply_creation(state: OccupationState, mode) -> OccupationState:
    """``a^dagger_mode |state>``.

    Fermionic sign is ``(-1)**(occupied modes before mode)``.  Creating into
    an occupied fermionic mode, or on a term that already holds ``n_max``
    particles, gives zero.
    """
    return _ladder(state, mode, create=True)


def apply_annihilation(state: OccupationState, mode) -> OccupationState:
    """``a_mode |state>`` with the same sign convention as creation."""
    return _ladder(state, mode, create=False)


def evolve_occupation(
    state: OccupationState, phases: Mapping, steps: int = 1
) -> OccupationState:
    """Multiply each Fock term by ``exp(i steps sum_m occ_m phase_m)``."""
    lookup = {_as_mode(m): float(v) for m, v in phases.items()}
    modes = state.basis.modes
    out = {}
    for key, amp in state.terms.items():
        total = 0.0
        for m, occ in zip(modes, state.occupations(key)):
            if occ:
                try:
                    total += occ * lookup[m]
                except KeyError:
                    raise MissingPhase(f"no phase given for occupied mode {m}") from None
        out[key] = amp * np.exp(1j * steps * total)
    return state._new(out)


@dataclass(frozen=True, eq=False)
class LadderCombination:
    """Formal linear combination ``sum_m coeff_m a_m`` (or of ``a^dagger_m``)."""

    coefficients: Mapping
    dagger: bool

    def apply(self, state: OccupationState) -> OccupationState:
        op = apply_creation if self.dagger else apply_annihilation
        out = state._new({})
        for mode, coeff in self.coefficients.items():
            if coeff != 0:
                out = out + coeff * op(state, mode)
        return out


def rotate_ladder_basis(
    v_k, modes: Sequence, dagger: bool = True
) -> list[LadderCombination]:
    """Momentum-representation ladder components at one momentum.

    ``modes[j]`` is the energy mode of branch ``j``.  Component ``i`` is
    ``sum_j V[i, j] a^dagger_j`` for ``dagger=True`` and
    ``sum_j conj(V[i, j]) a_j`` otherwise.
    """
    v = np.asarray(v_k, dtype=complex)
    r = max_abs(v.conj().T @ v - np.eye(v.shape[0]))
    if r > 1e-12:
        raise NotUnitary(f"V_k is not unitary (residual {r:.3e})")
    modes = [_as_mode(m) for m in modes]
    if len(modes) != v.shape[1]:
        raise ValueError("need one mode per column of V_k")
    w = v if dagger else v.conj()
    return [
        LadderCombination({m: w[i, j] for j, m in enumerate(modes)}, dagger)
        for i in range(v.shape[0])
    ]


# --------------------------------------------------------------------------
# tensor picture
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistinguishableState:
    """Dense amplitudes over ``(N^3 D + 1) ** n_max``; vacuum is the last index."""

    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if self.n_max < 1 or a.ndim != self.n_max:
            raise ValueError(f"amplitudes must have n_max={self.n_max} axes")
        if len(set(a.shape)) != 1:
            raise ValueError("every particle type needs the same dimension")
        _check_desk_scale(a.shape[0], self.n_max)
        object.__setattr__(self, "amplitudes", a)

    @property
    def site_dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "DistinguishableState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _check_desk_scale(site_dim: int, n_max: int) -> None:
    if n_max > MAX_TYPES or site_dim**n_max > MAX_TENSOR_DIM:
        raise DimensionOverflow(
            f"{n_max} types of dimension {site_dim} exceed the desk-scale cap "
            f"({MAX_TYPES} types, {MAX_TENSOR_DIM} amplitudes)"
        )


def _site_dim(spec: LatticeSpec, coin: CoinSet) -> int:
    return spec.N**3 * coin.dim + 1


@functools.lru_cache(maxsize=4096)
def _block(spec: LatticeSpec, coin: CoinSet, idx: MomentumIndex) -> MomentumBlock:
    return build_block(spec, coin, idx)


@functools.lru_cache(maxsize=8)
def _extended_walk(spec: LatticeSpec, coin: CoinSet) -> np.ndarray:
    w = walk_matrix(spec, coin)
    d = w.shape[0]
    u = np.zeros((d + 1, d + 1), dtype=complex)
    u[:d, :d] = w
    u[d, d] = 1.0
    u.setflags(write=False)
    return u


def _mode_vector(spec: LatticeSpec, coin: CoinSet, mode: Mode) -> np.ndarray:
    blk = _block(spec, coin, mode.index)
    if not 0 <= mode.branch < coin.dim:
        raise UnknownMode(f"branch {mode.branch} out of range for a {coin.dim}-dim coin")
    pw = plane_wave(spec, coin, mode.index, blk.vectors[:, mode.branch])
    return np.append(pw.amplitudes.ravel(), 0.0)


def mode_phases(spec: LatticeSpec, coin: CoinSet, modes: Iterable) -> dict[Mode, float]:
    """Eigenphase of each mode."""
    out = {}
    for m in modes:
        m = _as_mode(m)
        out[m] = float(_block(spec, coin, m.index).phases[m.branch])
    return out


def evolve_distinguishable(
    state: DistinguishableState, spec: LatticeSpec, coin: CoinSet, steps: int = 1
) -> DistinguishableState:
    """Apply ``U (x) ... (x) U`` with ``U = U_QW + |w><w|``."""
    u = _extended_walk(spec, coin)
    if u.shape[0] != state.site_dim:
        raise ValueError("state dimension does not match the lattice and coin")
    amp = state.amplitudes
    for _ in range(steps):
        for axis in range(state.n_max):
            amp = np.moveaxis(np.tensordot(u, amp, axes=(1, axis)), 0, axis)
    return DistinguishableState(state.n_max, amp)


def permutation_sign(perm: Sequence[int]) -> int:
    inv = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def project_physical(state: DistinguishableState, statistics: str) -> DistinguishableState:
    """Average over permutations of the particle-type factors.

    Vacuum factors are permuted along with the rest but carry no sign: for
    ``fermi`` each basis term picks up the parity of the permutation induced
    on its occupied factors.  This keeps ``|Omega>`` and every
    antisymmetrised n-particle sector while staying an orthogonal projector.
    """
    _check_statistics(statistics)
    n = state.n_max
    d = state.site_dim
    amp = state.amplitudes
    occ = [
        (np.arange(d) < d - 1).reshape((1,) * a + (d,) + (1,) * (n - a - 1)).astype(float)
        for a in range(n)
    ]
    out = np.zeros_like(amp)
    for perm in itertools.permutations(range(n)):
        weighted = amp
        if statistics == FERMI:
            inv = np.argsort(perm)  # input slot i lands in output slot inv[i]
            weight = 0.0
            for pattern in itertools.product((0, 1), repeat=n):
                images = [inv[i] for i in range(n) if pattern[i]]
                factor = float(permutation_sign(images))
                for a in range(n):
                    factor = factor * (occ[a] if pattern[a] else 1 - occ[a])
                weight = weight + factor
            weighted = amp * weight
        out = out + np.transpose(weighted, perm)
    return DistinguishableState(n, out / math.factorial(n))


def random_distinguishable(
    spec: LatticeSpec, coin: CoinSet, n_max: int, rng: np.random.Generator
) -> DistinguishableState:
    """Normalised Gaussian random state of ``n_max`` types."""
    d = _site_dim(spec, coin)
    _check_desk_scale(d, n_max)
    shape = (d,) * n_max
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return DistinguishableState(n_max, a / np.linalg.norm(a))


def build_basis_state(
    modes: Sequence,
    statistics: str,
    spec: LatticeSpec,
    coin: CoinSet,
    n_max: int | None = None,
) -> DistinguishableState:
    """Normalised (anti)symmetrised product of mode eigenstates and vacuum.

    Particle ``i`` of ``modes`` is placed in type slot ``i``, the remaining
    slots hold ``|w>``, and the product is passed through
    :func:`project_physical` so the result lies in the physical subspace
    even when fewer than ``n_max`` particles are present.  Swapping two
    entries of ``modes`` flips the sign for ``fermi``; repeated bosonic
    modes come out normalised (the ``sqrt(m!)`` factors).
    """
    _check_statistics(statistics)
    modes = [_as_mode(m) for m in modes]
    n = len(modes)
    n_max = max(n, 1) if n_max is None else n_max
    if n > n_max:
        raise TooManyParticles(f"{n} particles exceed n_max={n_max}")
    if statistics == FERMI and len(set(modes)) < n:
        raise DuplicateFermionMode("fermionic modes must be distinct")

    d = _site_dim(spec, coin)
    _check_desk_scale(d, n_max)
    vac = np.zeros(d, dtype=complex)
    vac[-1] = 1.0
    factors = [_mode_vector(spec, coin, m) for m in modes] + [vac] * (n_max - n)
    term = factors[0]
    for f in factors[1:]:
        term = np.multiply.outer(term, f)
    proj = project_physical(DistinguishableState(n_max, term), statistics)
    return DistinguishableState(n_max, proj.amplitudes / proj.norm)


def to_distinguishable(
    state: OccupationState, spec: LatticeSpec, coin: CoinSet
) -> DistinguishableState:
    """Expand a Fock superposition into the tensor picture.

    Each Fock basis state maps to :func:`build_basis_state` of its sorted
    mode list, which makes ``a^dagger_{m1} ... a^dagger_{mn} |Omega>``
    (with ``m1 < ... < mn``) correspond to the state built from
    ``[m1, ..., mn]``.
    """
    d = _site_dim(spec, coin)
    n_max = max(state.n_max, 1)
    _check_desk_scale(d, n_max)
    amp = np.zeros((d,) * n_max, dtype=complex)
    for key, a in state.terms.items():
        occ = state.occupations(key)
        modes = [m for m, c in zip(state.basis.modes, occ) for _ in range(c)]
        amp += a * build_basis_state(modes, state.statistics, spec, coin, n_max=n_max).amplitudes
    return DistinguishableState(n_max, amp)


def fock_tensor_isomorphism_check(
    modes: Sequence,
    statistics: str,
    spec: LatticeSpec,
    coin: CoinSet,
    n_max: int | None = None,
) -> float:
    """Deviation between the ladder-built and directly built tensor states.

    Builds ``a^dagger_{modes[0]} a^dagger_{modes[1]} ... |Omega>`` in the
    occupation picture, divides by ``sqrt(prod m!)``, expands it with
    :func:`to_distinguishable` and compares it with
    :func:`build_basis_state`.  Returns ``max(|<direct|ladder> - 1|,
    |<ladder|ladder> - 1|)``.
    """
    modes = [_as_mode(m) for m in modes]
    n_max = max(len(modes), 1) if n_max is None else n_max
    direct = build_basis_state(modes, statistics, spec, coin, n_max=n_max)
    basis = ModeBasis(tuple(modes)) if modes else ModeBasis((Mode.of(0, 0, 0, 0),))
    occ = vacuum_state(basis, statistics, n_max)
    for m in reversed(modes):
        occ = apply_creation(occ, m)
    counts: dict[Mode, int] = {}
    for m in modes:
        counts[m] = counts.get(m, 0) + 1
    occ = occ * (1 / math.sqrt(math.prod(math.factorial(c) for c in counts.values())))
    ladder = to_distinguishable(occ, spec, coin)
    return max(abs(direct.inner(ladder) - 1), abs(ladder.inner(ladder) - 1))
