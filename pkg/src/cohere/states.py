"""Quantum states in the fixed incoherent (computational) basis.

Basis labels are 0-based in code and in serialized files.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import DEFAULT_TOL, Tolerance, allclose, as_matrix, is_hermitian, is_psd, spectral_norm


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    mat: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        m = as_matrix(self.mat)
        if m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if not is_hermitian(m, self.tol):
            raise ValueError("density matrix must be Hermitian")
        m = (m + m.conj().T) / 2
        if not is_psd(m, self.tol):
            raise ValueError("density matrix must be PSD")
        if abs(np.trace(m).real - 1) > self.tol.eq * max(1.0, m.shape[0]):
            raise ValueError(f"density matrix must have unit trace, got {np.trace(m).real}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.mat).real.copy()

    def is_pure(self) -> bool:
        return abs(np.trace(self.mat @ self.mat).real - 1) <= 10 * self.tol.eq


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        psi = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if psi.size == 0 or not np.all(np.isfinite(psi)):
            raise ValueError("pure state needs finite amplitudes")
        if abs(np.vdot(psi, psi).real - 1) > self.tol.eq * max(1.0, psi.size):
            raise ValueError("pure state must be normalized")
        psi.setflags(write=False)
        object.__setattr__(self, "amplitudes", psi)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density(self) -> DensityMatrix:
        psi = self.amplitudes
        return DensityMatrix(np.outer(psi, psi.conj()), self.tol)


def pure(amplitudes, normalize: bool = False, tol: Tolerance = DEFAULT_TOL) -> PureState:
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if normalize:
        psi = psi / np.linalg.norm(psi)
    return PureState(psi, tol)


def as_density(x, tol: Tolerance = DEFAULT_TOL) -> DensityMatrix:
    """Accept a DensityMatrix, a PureState, or a raw matrix/vector."""
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, PureState):
        return x.density()
    arr = np.asarray(x, dtype=complex)
    if arr.ndim == 1:
        return PureState(arr, tol).density()
    return DensityMatrix(arr, tol)


def density_matrix(x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    return as_density(x, tol).mat


def is_incoherent(rho, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = as_matrix(rho.mat if isinstance(rho, DensityMatrix) else rho)
    off = m - np.diag(np.diag(m))
    return bool(np.max(np.abs(off), initial=0.0) <= tol.eq * max(spectral_norm(m), 1e-300))


def dephase(rho) -> DensityMatrix | np.ndarray:
    """Complete dephasing in the incoherent basis."""
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(np.diag(np.diag(rho.mat)), rho.tol)
    m = as_matrix(rho)
    return np.diag(np.diag(m))


def coherence_set(psi: PureState, tol: Tolerance = DEFAULT_TOL) -> frozenset[int]:
    """Indices with non-negligible amplitude (``|psi_i| > eq``)."""
    amps = np.abs(psi.amplitudes)
    return frozenset(int(i) for i in np.flatnonzero(amps > tol.eq))


def coherence_rank(psi: PureState, tol: Tolerance = DEFAULT_TOL) -> int:
    return len(coherence_set(psi, tol))


def majorizes(p, q, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``p`` majorizes ``q`` (descending partial sums dominate)."""
    p = np.asarray(p, dtype=float).reshape(-1)
    q = np.asarray(q, dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ValueError("length mismatch")
    if abs(p.sum() - 1) > tol.eq * p.size or abs(q.sum() - 1) > tol.eq * q.size:
        raise ValueError("majorization inputs must sum to one")
    cp = np.cumsum(np.sort(p)[::-1])
    cq = np.cumsum(np.sort(q)[::-1])
    return bool(np.all(cp >= cq - tol.eq))


def plus_state(d: int) -> PureState:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return PureState(np.full(d, 1 / np.sqrt(d), dtype=complex))


def basis_state(d: int, i: int) -> PureState:
    psi = np.zeros(d, dtype=complex)
    psi[i] = 1
    return PureState(psi)


def maximally_correlated(rho) -> DensityMatrix:
    """Embed ``rho`` as ``sum_ij rho_ij |ii><jj|`` on ``C^d (x) C^d``."""
    rho = as_density(rho)
    d = rho.dim
    idx = np.arange(d) * (d + 1)
    out = np.zeros((d * d, d * d), dtype=complex)
    out[np.ix_(idx, idx)] = rho.mat
    return DensityMatrix(out, rho.tol)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_density(d: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Induced-measure sample ``G G^dagger / Tr`` with ``G`` of size ``d x rank``."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}]")
    rng = _rng(seed)
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_pure(d: int, seed=None) -> PureState:
    rng = _rng(seed)
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(psi / np.linalg.norm(psi))


def same_state(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    return allclose(density_matrix(a, tol), density_matrix(b, tol), tol)
