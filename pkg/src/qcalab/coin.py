"""Coin-space operator algebras and the small dense kernels built on them.

Two coin families are provided:

* the 4-dimensional fermionic coin, with flip operator ``Q = g0`` and
  velocity operators ``dP_a = g0 g_a`` built from Dirac-representation
  gamma matrices;
* the 3-dimensional bosonic coin, with ``dP_a = J_a`` the spin-1 generators
  and three projectors ``P+``, ``P0``, ``P-`` per axis.

All matrices are ``complex128`` numpy arrays and are frozen (read-only)
once a :class:`CoinSet` is built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from qcalab.errors import ConditionViolation, NotHermitian, NotUnitary

__all__ = [
    "AXES",
    "CoinSet",
    "ConditionReport",
    "PAULI",
    "build_boson_coin",
    "build_fermion_coin",
    "dirac_gammas",
    "eig_unitary",
    "max_abs",
    "spin1_generators",
    "unitary_from_hermitian",
    "verify_coin_conditions",
]

AXES = ("X", "Y", "Z")

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
CONDITION_TOL = 1e-12
DEGENERACY_TOL = 1e-9

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def max_abs(m) -> float:
    """Max-norm (largest absolute entry) of an array."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def _frozen(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    a.setflags(write=False)
    return a


def dirac_gammas() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Gamma matrices g0..g3 in the Dirac representation.

    ``g0 = diag(1, 1, -1, -1)`` and ``g_a = [[0, s_a], [-s_a, 0]]``.
    """
    zero = np.zeros((2, 2), dtype=complex)
    eye = np.eye(2, dtype=complex)
    g0 = np.block([[eye, zero], [zero, -eye]])
    gs = tuple(np.block([[zero, s], [-s, zero]]) for s in PAULI)
    return (g0, *gs)


def spin1_generators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-1 generators in the Cartesian basis, ``(J_a)_{bc} = -i eps_{abc}``."""
    jx = np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex)
    jy = np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]], dtype=complex)
    jz = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex)
    return jx, jy, jz


@dataclass(frozen=True, eq=False)
class CoinSet:
    """Internal-space operator family for one walk kind.

    ``kind`` is ``"fermion"`` or ``"boson"``.  The fermionic set carries the
    flip operator ``Q`` and no zero projectors; the bosonic set carries
    ``proj_zero`` and ``Q is None`` (massless walk only).
    """

    kind: str
    dim: int
    delta_p: tuple[np.ndarray, np.ndarray, np.ndarray]
    proj_plus: tuple[np.ndarray, np.ndarray, np.ndarray]
    proj_minus: tuple[np.ndarray, np.ndarray, np.ndarray]
    Q: np.ndarray | None = None
    proj_zero: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    @classmethod
    def fermion(cls, q, dpx, dpy, dpz) -> "CoinSet":
        """Fermionic coin from a flip operator and three velocity operators.

        Projectors follow from ``P± = (I ± dP) / 2``.  No validation is done
        here; see :func:`verify_coin_conditions`.
        """
        dps = tuple(_frozen(d) for d in (dpx, dpy, dpz))
        dim = dps[0].shape[0]
        eye = np.eye(dim)
        return cls(
            kind="fermion",
            dim=dim,
            delta_p=dps,
            proj_plus=tuple(_frozen((eye + d) / 2) for d in dps),
            proj_minus=tuple(_frozen((eye - d) / 2) for d in dps),
            Q=_frozen(q),
        )

    @classmethod
    def boson(cls, jx, jy, jz) -> "CoinSet":
        """Bosonic coin from three generators ``J``.

        ``P± = (J² ± J) / 2`` and ``P0 = I - J²``.
        """
        js = tuple(_frozen(j) for j in (jx, jy, jz))
        dim = js[0].shape[0]
        eye = np.eye(dim)
        return cls(
            kind="boson",
            dim=dim,
            delta_p=js,
            proj_plus=tuple(_frozen((j @ j + j) / 2) for j in js),
            proj_minus=tuple(_frozen((j @ j - j) / 2) for j in js),
            proj_zero=tuple(_frozen(eye - j @ j) for j in js),
        )

    def projectors(self, axis: int) -> dict[str, np.ndarray]:
        """Projectors for one axis keyed by ``"+"``, ``"-"`` (and ``"0"``)."""
        out = {"+": self.proj_plus[axis], "-": self.proj_minus[axis]}
        if self.proj_zero is not None:
            out["0"] = self.proj_zero[axis]
        return out


def build_fermion_coin() -> CoinSet:
    """4-dimensional coin with ``Q = g0`` and ``dP_a = g0 g_a``."""
    g0, g1, g2, g3 = dirac_gammas()
    return CoinSet.fermion(g0, g0 @ g1, g0 @ g2, g0 @ g3)


def build_boson_coin() -> CoinSet:
    """3-dimensional coin with ``dP_a = J_a``."""
    return CoinSet.boson(*spin1_generators())


@dataclass
class ConditionReport:
    """Named max-norm residuals plus fitted equal-norm constants."""

    kind: str
    residuals: dict[str, float] = field(default_factory=dict)
    constants: dict[str, float] = field(default_factory=dict)
    tol: float = CONDITION_TOL

    @property
    def failed(self) -> list[str]:
        return [name for name, r in self.residuals.items() if not r <= self.tol]

    @property
    def passed(self) -> bool:
        return not self.failed

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def group_max(self, prefix: str) -> float:
        """Largest residual among checks whose name starts with ``prefix``."""
        vals = [r for name, r in self.residuals.items() if name.startswith(prefix)]
        return max(vals, default=0.0)


def _fit_scalar(pairs) -> tuple[float, list[float]]:
    """Least-squares ``c`` minimising sum ||M - c P||_F^2 over ``(M, P)`` pairs.

    Returns the fit and the max-norm residual of each pair.
    """
    num = sum(np.vdot(p, m).real for m, p in pairs)
    den = sum(np.vdot(p, p).real for _, p in pairs)
    c = num / den if den > 0 else 0.0
    return float(c), [max_abs(m - c * p) for m, p in pairs]


def _equal_norm_terms(coin: CoinSet):
    """Sandwich products grouped by the constant they should be proportional to."""
    same, zero = [], []
    for j, jp in itertools.permutations(range(3), 2):
        outer, inner = coin.projectors(j), coin.projectors(jp)
        for k in "+-":
            pk = outer[k]
            for s in "+-":
                same.append((f"{AXES[j]}{k}.{AXES[jp]}{s}", pk @ inner[s] @ pk, pk))
            if "0" in inner:
                zero.append((f"{AXES[j]}{k}.{AXES[jp]}0", pk @ inner["0"] @ pk, pk))
        if "0" in outer:
            p0 = outer["0"]
            for s in "+-":
                zero.append((f"{AXES[j]}0.{AXES[jp]}{s}", p0 @ inner[s] @ p0, p0))
    return same, zero


def verify_coin_conditions(
    coin: CoinSet, tol: float = CONDITION_TOL, strict: bool = True
) -> ConditionReport:
    """Check a coin family against its defining algebra.

    Fermion: the six pairwise anticommutators among ``{Q, dPX, dPY, dPZ}``
    and the four squares ``A² = I``.  Boson: per-axis projector identities,
    vanishing products of zero projectors, and ``dP² = I - P0``.  Both kinds
    also get the equal-norm sandwich conditions, with the proportionality
    constants ``c`` (and ``c_prime`` for the boson) fitted by least squares.

    With ``strict`` (the default) any residual above ``tol`` raises
    :class:`ConditionViolation`; otherwise the report is returned as is.
    """
    report = ConditionReport(kind=coin.kind, tol=tol)
    res = report.residuals
    eye = np.eye(coin.dim)

    for name, d in zip(AXES, coin.delta_p):
        res[f"hermitian[dP{name}]"] = max_abs(d - d.conj().T)

    if coin.kind == "fermion":
        ops = {"Q": coin.Q, **{f"dP{a}": d for a, d in zip(AXES, coin.delta_p)}}
        res["hermitian[Q]"] = max_abs(coin.Q - coin.Q.conj().T)
        for (na, a), (nb, b) in itertools.combinations(ops.items(), 2):
            res[f"anticomm[{na},{nb}]"] = max_abs(a @ b + b @ a)
        for na, a in ops.items():
            res[f"square[{na}]"] = max_abs(a @ a - eye)
    else:
        for j, name in enumerate(AXES):
            projs = coin.projectors(j)
            res[f"resolution[{name}]"] = max_abs(sum(projs.values()) - eye)
            for k, p in projs.items():
                res[f"idempotent[{name}{k}]"] = max_abs(p @ p - p)
                res[f"hermitian[{name}{k}]"] = max_abs(p - p.conj().T)
            for (ka, pa), (kb, pb) in itertools.combinations(projs.items(), 2):
                res[f"orthogonal[{name}{ka},{name}{kb}]"] = max_abs(pa @ pb)
            d = coin.delta_p[j]
            res[f"delta[{name}]"] = max_abs(d - (projs["+"] - projs["-"]))
            res[f"delta_square[{name}]"] = max_abs(d @ d - (eye - projs["0"]))
        for j, jp in itertools.permutations(range(3), 2):
            res[f"zero_pair[{AXES[j]},{AXES[jp]}]"] = max_abs(
                coin.proj_zero[j] @ coin.proj_zero[jp]
            )

    same, zero = _equal_norm_terms(coin)
    c, errs = _fit_scalar([(m, p) for _, m, p in same])
    report.constants["c"] = c
    for (label, _, _), err in zip(same, errs):
        res[f"equal_norm[{label}]"] = err
    res["positive[c]"] = 0.0 if c > 0 else abs(c) + 1.0
    if zero:
        cp, errs = _fit_scalar([(m, p) for _, m, p in zero])
        report.constants["c_prime"] = cp
        for (label, _, _), err in zip(zero, errs):
            res[f"equal_norm[{label}]"] = err
        res["positive[c_prime]"] = 0.0 if cp > 0 else abs(cp) + 1.0

    if strict and not report.passed:
        raise ConditionViolation(
            f"{coin.kind} coin violates {len(report.failed)} condition(s): "
            + ", ".join(report.failed[:5]),
            failed=report.failed,
        )
    return report


def _check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {h.shape}")
    r = max_abs(h - h.conj().T)
    if r > tol:
        raise NotHermitian(f"matrix is not Hermitian (residual {r:.3e})")


def unitary_from_hermitian(h, t: float = 1.0) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H`` via its eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    _check_hermitian(h)
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def _wrap_phase(phi: np.ndarray) -> np.ndarray:
    """Map angles into (-pi, pi]."""
    phi = np.angle(np.exp(1j * np.asarray(phi, dtype=float)))
    return np.where(phi <= -np.pi, phi + 2 * np.pi, phi)


def _canonical_cluster_basis(z: np.ndarray, rel_tol: float = 1e-8) -> np.ndarray:
    """Deterministic orthonormal basis of ``span(z)`` (``z`` has orthonormal columns).

    Canonical basis vectors are projected onto the subspace in index order
    and Gram-Schmidt orthonormalised; the first ``m`` that survive span it.
    The arithmetic is done in the coordinates of ``z`` so the outcome stays
    orthonormal to machine precision whatever the selection.
    """
    dim, m = z.shape
    coords = []
    for i in range(dim):
        c = z[i].conj().copy()  # coordinates of P e_i in the z basis
        for b in coords:
            c -= np.vdot(b, c) * b
        for b in coords:
            c -= np.vdot(b, c) * b
        nrm = np.linalg.norm(c)
        if nrm > rel_tol:
            coords.append(c / nrm)
            if len(coords) == m:
                break
    return z @ np.column_stack(coords)


def eig_unitary(u, degeneracy_tol: float = DEGENERACY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenphases in (-pi, pi] (ascending) and orthonormal eigenvectors of ``U``.

    The complex Schur form of a normal matrix is diagonal, so its unitary
    factor already gives an orthonormal eigenbasis.  Each cluster of phases
    closer than ``degeneracy_tol`` is then re-based canonically (see
    :func:`_canonical_cluster_basis`), which also fixes the phase of every
    non-degenerate eigenvector.
    """
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    r = max_abs(u.conj().T @ u - np.eye(dim))
    if r > UNITARY_TOL:
        raise NotUnitary(f"matrix is not unitary (residual {r:.3e})")
    t, z = scipy.linalg.schur(u, output="complex")
    phases = _wrap_phase(np.angle(np.diag(t)))
    order = np.argsort(phases, kind="stable")
    phases, z = phases[order], z[:, order]

    vectors = np.empty_like(z)
    start = 0
    for stop in range(1, dim + 1):
        if stop == dim or phases[stop] - phases[stop - 1] >= degeneracy_tol:
            vectors[:, start:stop] = _canonical_cluster_basis(z[:, start:stop])
            start = stop
    return phases, vectors
