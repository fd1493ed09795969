"""Channel representations and conversions.

Three forms are supported: Kraus sets, Schur (Hadamard) maps ``rho -> A * rho``
and Choi matrices. The Choi convention is ``J = (Lambda (x) id)(|Omega><Omega|)``
with the unnormalized ``|Omega> = sum_i |ii>``; Kraus operators are vectorized
row-major, so ``J = sum_k vec(K_k) vec(K_k)^dagger``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    allclose,
    as_matrix,
    herm_eig,
    is_psd,
    partial_trace,
    spectral_norm,
)
from .states import DensityMatrix, as_density


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Kraus set; ``tp=False`` marks a trace non-increasing map."""

    kraus: tuple
    tp: bool = True
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus)
        if not ops:
            raise ValueError("need at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise ValueError("Kraus operators must be square and share a dimension")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)
        gram = sum(k.conj().T @ k for k in ops)
        eye = np.eye(d)
        if self.tp:
            if not allclose(gram, eye, self.tol):
                raise ValueError("Kraus operators are not trace preserving")
        elif not is_psd(eye - gram, self.tol):
            raise ValueError("Kraus operators are not trace non-increasing")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self):
        return len(self.kraus)


@dataclass(frozen=True, eq=False)
class SchurMap:
    """``rho -> a * rho`` with ``a`` PSD and ``0 <= a_ii <= 1``."""

    a: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        a = as_matrix(self.a)
        if a.shape[0] != a.shape[1]:
            raise ValueError("Schur matrix must be square")
        if not is_psd(a, self.tol):
            raise ValueError("Schur matrix must be PSD")
        a = (a + a.conj().T) / 2
        diag = np.diag(a).real
        slack = self.tol.eq * max(1.0, a.shape[0])
        if np.any(diag < -slack) or np.any(diag > 1 + slack):
            raise ValueError("Schur matrix diagonal must lie in [0, 1]")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def deterministic(self) -> bool:
        return bool(np.allclose(np.diag(self.a).real, 1, atol=self.tol.eq * max(1.0, self.dim)))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    j: np.ndarray
    dim: int
    tp: bool = True


Channel = Union[KrausChannel, SchurMap]


def as_kraus(ch: Channel) -> KrausChannel:
    if isinstance(ch, KrausChannel):
        return ch
    if isinstance(ch, SchurMap):
        return schur_to_kraus(ch)
    raise TypeError(f"not a channel: {type(ch).__name__}")


def _tol(ch) -> Tolerance:
    return getattr(ch, "tol", DEFAULT_TOL)


def apply(ch: Channel, rho) -> tuple[np.ndarray, float]:
    """Apply a channel; returns the (possibly unnormalized) output and its trace."""
    m = as_density(rho).mat if not isinstance(rho, np.ndarray) else as_matrix(rho)
    if m.shape[0] != ch.dim:
        raise ValueError(f"dimension mismatch: channel {ch.dim}, state {m.shape[0]}")
    if isinstance(ch, SchurMap):
        out = ch.a * m
    else:
        out = sum(k @ m @ k.conj().T for k in ch.kraus)
    return out, float(np.trace(out).real)


def apply_normalized(ch: Channel, rho) -> tuple[DensityMatrix, float]:
    out, prob = apply(ch, rho)
    if prob <= 0:
        raise ValueError("channel annihilates the input")
    return DensityMatrix(out / prob, _tol(ch)), prob


def choi_of(ch: Channel) -> ChoiMatrix:
    if isinstance(ch, SchurMap):
        d = ch.dim
        idx = np.arange(d) * (d + 1)
        j = np.zeros((d * d, d * d), dtype=complex)
        j[np.ix_(idx, idx)] = ch.a
        return ChoiMatrix(j, d, ch.deterministic)
    vecs = np.array([k.reshape(-1) for k in ch.kraus])
    return ChoiMatrix(vecs.T @ vecs.conj(), ch.dim, ch.tp)


def kraus_from_choi(choi: ChoiMatrix, tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """Minimal canonical Kraus set from the spectral decomposition of ``J``."""
    if not is_psd(choi.j, tol):
        raise ValueError("Choi matrix is not PSD")
    w, v = herm_eig(choi.j, tol)
    keep = w > tol.psd * max(w[0], 0.0)
    d = choi.dim
    ops = [np.sqrt(lam) * v[:, k].reshape(d, d) for k, lam in enumerate(w) if keep[k]]
    if not ops:
        ops = [np.zeros((d, d))]
    return KrausChannel(tuple(ops), tp=choi.tp, tol=tol)


def canonical_kraus(ch: Channel, tol: Tolerance | None = None) -> KrausChannel:
    tol = tol or _tol(ch)
    return kraus_from_choi(choi_of(ch), tol)


def channels_equal(c1: Channel, c2: Channel, tol: Tolerance | None = None) -> bool:
    if c1.dim != c2.dim:
        raise ValueError("dimension mismatch")
    tol = tol or _tol(c1)
    return allclose(choi_of(c1).j, choi_of(c2).j, tol)


def kraus_equivalence_isometry(c1: KrausChannel, c2: KrausChannel, residual_tol: float = 1e-8):
    """Matrix ``V`` with ``L_i = sum_j V_ij K_j`` (``K`` from ``c1``, ``L`` from ``c2``).

    Solved by least squares over vectorized operators; ``None`` if the two
    Kraus sets describe different maps.
    """
    if c1.dim != c2.dim:
        raise ValueError("dimension mismatch")
    kmat = np.array([k.reshape(-1) for k in c1.kraus])
    lmat = np.array([k.reshape(-1) for k in c2.kraus])
    v = lmat @ np.linalg.pinv(kmat)
    residual = sum(spectral_norm((v @ kmat - lmat)[i].reshape(c1.dim, c1.dim)) for i in range(len(lmat)))
    if residual > residual_tol or not channels_equal(c1, c2):
        return None
    return v


def schur_to_kraus(s: SchurMap) -> KrausChannel:
    """Diagonal Kraus set ``sqrt(lambda_k) diag(v_k)`` from ``a = sum lambda_k v_k v_k^dagger``."""
    w, v = herm_eig(s.a, s.tol)
    top = max(w[0], 0.0)
    ops = [np.sqrt(lam) * np.diag(v[:, k]) for k, lam in enumerate(w) if lam > s.tol.psd * top]
    if not ops:
        ops = [np.zeros((s.dim, s.dim))]
    return KrausChannel(tuple(ops), tp=s.deterministic, tol=s.tol)


def schur_matrix(ch: Channel) -> np.ndarray:
    """``a_ij = <i| Lambda(|i><j|) |j>``; equals the Schur matrix for GI maps."""
    if isinstance(ch, SchurMap):
        return np.array(ch.a)
    return sum(np.outer(np.diag(k), np.diag(k).conj()) for k in ch.kraus)


def gio_to_schur(c: Channel) -> SchurMap:
    from .families import is_gio, is_sgio

    tol = _tol(c)
    if not (is_gio(c) or is_sgio(c)):
        raise ValueError("channel is not genuinely incoherent")
    return SchurMap(schur_matrix(c), tol)


def apply_to_subsystem(ch: Channel, rho_big, dims: tuple[int, int], which: int) -> np.ndarray:
    """Apply ``ch`` to subsystem ``which`` (1 or 2) of a bipartite state."""
    m = as_density(rho_big).mat if not isinstance(rho_big, np.ndarray) else as_matrix(rho_big)
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError("state does not match dims")
    if which not in (1, 2) or ch.dim != dims[which - 1]:
        raise ValueError("channel dimension does not match the chosen subsystem")
    ops = as_kraus(ch).kraus
    lift = (lambda k: np.kron(k, np.eye(d2))) if which == 1 else (lambda k: np.kron(np.eye(d1), k))
    return sum(lift(k) @ m @ lift(k).conj().T for k in ops)


def reduce_bipartite_gio(a_big: SchurMap, sigma) -> SchurMap:
    """Local GI map reproducing ``tr_2(A * (rho (x) sigma))`` on the first factor.

    ``a~_ij = sum_k sigma_kk a_{ik, jk}``.
    """
    sigma = as_density(sigma)
    d = sigma.dim
    if a_big.dim != d * d:
        raise ValueError("bipartite Schur matrix must act on d^2")
    if not a_big.deterministic:
        raise ValueError("bipartite Schur map must be deterministic")
    t = np.asarray(a_big.a).reshape(d, d, d, d)
    reduced = np.einsum("k,ikjk->ij", sigma.diag, t)
    return SchurMap(reduced, a_big.tol)


def compose(outer: Channel, inner: Channel) -> KrausChannel:
    """``outer o inner``: apply ``inner`` first."""
    a, b = as_kraus(outer), as_kraus(inner)
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    ops = tuple(x @ y for x in a.kraus for y in b.kraus)
    return KrausChannel(ops, tp=a.tp and b.tp, tol=a.tol)


def convex_mix(channels: Sequence[Channel], weights: Sequence[float]) -> KrausChannel:
    weights = np.asarray(weights, dtype=float)
    if len(channels) != len(weights) or len(channels) == 0:
        raise ValueError("need one weight per channel")
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12 * len(weights):
        raise ValueError("weights must be a probability vector")
    ks = [as_kraus(c) for c in channels]
    if len({k.dim for k in ks}) != 1:
        raise ValueError("dimension mismatch")
    ops = tuple(np.sqrt(p) * k for p, ch in zip(weights, ks) if p > 0 for k in ch.kraus)
    return KrausChannel(ops, tp=all(k.tp for k, p in zip(ks, weights) if p > 0), tol=ks[0].tol)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),))


def dephasing_channel(d: int) -> KrausChannel:
    ops = []
    for i in range(d):
        k = np.zeros((d, d))
        k[i, i] = 1
        ops.append(k)
    return KrausChannel(tuple(ops))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((as_matrix(u),))


def transfer_matrix(ch: Channel) -> np.ndarray:
    """Row-major superoperator: ``vec(Lambda(rho)) = L vec(rho)``."""
    ops = as_kraus(ch).kraus
    return sum(np.kron(k, k.conj()) for k in ops)


def random_schur(d: int, rank: int | None = None, seed=None, deterministic: bool = True) -> SchurMap:
    """Random PSD matrix with unit diagonal (or diagonal in ``[0, 1]``)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    a = g @ g.conj().T
    s = 1 / np.sqrt(np.diag(a).real)
    a = a * np.outer(s, s)
    if not deterministic:
        t = np.sqrt(rng.uniform(0, 1, size=d))
        a = a * np.outer(t, t)
    return SchurMap(a)


def random_channel(d: int, n_kraus: int = 2, seed=None) -> KrausChannel:
    """Kraus set cut from a Haar-ish random isometry ``C^d -> C^{n d}``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.normal(size=(n_kraus * d, d)) + 1j * rng.normal(size=(n_kraus * d, d))
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[i * d:(i + 1) * d] for i in range(n_kraus)))


def random_unitary(n: int, seed=None) -> np.ndarray:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rotate_kraus(ch: KrausChannel, v: np.ndarray) -> KrausChannel:
    """New Kraus set ``L_i = sum_j V_ij K_j`` (``V`` must be an isometry)."""
    v = np.asarray(v)
    ops = np.array(ch.kraus)
    rotated = np.einsum("ij,jab->iab", v, ops)
    return KrausChannel(tuple(rotated), tp=ch.tp, tol=ch.tol)


def partial_trace_output(choi: ChoiMatrix) -> np.ndarray:
    """Trace over the output factor; identity for trace-preserving maps."""
    return partial_trace(choi.j, (choi.dim, choi.dim), keep=2)
