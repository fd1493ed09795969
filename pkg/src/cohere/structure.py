"""Convex structure of genuinely incoherent maps.

A GI map with canonical diagonal Kraus vectors ``a_1..a_n`` is extremal iff
the ``n^2`` vectors ``conj(a_i) * a_j`` are linearly independent. Mixtures of
diagonal unitaries are found in closed form for qubits, by rank reduction
for qutrits, and by multistart least squares beyond that.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .channels import Channel, KrausChannel, SchurMap, canonical_kraus, convex_mix, schur_matrix
from .families import is_gio
from .numerics import DEFAULT_TOL, Tolerance, numerical_rank, spectral_norm


def _diag_vectors(c: Channel) -> np.ndarray:
    return np.array([np.diag(k) for k in canonical_kraus(c).kraus])


def is_extremal_gio(c: Channel, tol: Tolerance = DEFAULT_TOL) -> bool:
    if not is_gio(c):
        raise ValueError("extremality test needs a GI map")
    a = _diag_vectors(c)
    n = a.shape[0]
    if n * n > a.shape[1]:
        return False
    prods = np.array([a[i].conj() * a[j] for i in range(n) for j in range(n)])
    return numerical_rank(prods, tol) == n * n


def extremal_nonunitary_example(d: int = 4) -> KrausChannel:
    """Two-Kraus diagonal map ``K1 = diag(a)``, ``K2 = diag(b)`` that is extremal but not unitary.

    ``a_k = 1/k`` and ``b_k = i^k sqrt(1 - a_k^2)`` for ``k <= 4``; the
    remaining entries are ``a = 1``, ``b = 0``.
    """
    if d < 4:
        raise ValueError("the construction needs d >= 4")
    a = np.ones(d, dtype=complex)
    b = np.zeros(d, dtype=complex)
    for k in range(1, 5):
        a[k - 1] = 1 / k
        b[k - 1] = 1j**k * np.sqrt(1 - 1 / k**2)
    return KrausChannel((np.diag(a), np.diag(b)))


@dataclass(frozen=True, eq=False)
class MixedUnitaryDecomposition:
    weights: np.ndarray
    vectors: np.ndarray  # one unimodular phase vector per row

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        if w.ndim != 1 or v.shape[0] != w.size:
            raise ValueError("need one weight per phase vector")
        if np.any(w < -1e-12) or abs(w.sum() - 1) > 1e-9:
            raise ValueError("weights must form a probability vector")
        if np.max(np.abs(np.abs(v) - 1)) > 1e-9:
            raise ValueError("phase vectors must be unimodular")
        object.__setattr__(self, "weights", np.clip(w, 0, None))
        object.__setattr__(self, "vectors", v / np.abs(v))

    def __len__(self):
        return self.weights.size

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.weights, self.vectors, self.vectors.conj())

    def residual(self, a) -> float:
        return spectral_norm(self.reconstruct() - np.asarray(a))

    def as_channel(self) -> KrausChannel:
        units = [KrausChannel((np.diag(v),)) for v in self.vectors]
        return convex_mix(units, self.weights)


def _unit(v: np.ndarray) -> np.ndarray:
    out = np.ones_like(v, dtype=complex)
    nz = np.abs(v) > 0
    out[nz] = v[nz] / np.abs(v[nz])
    return out


def _qubit_closed_form(a: np.ndarray) -> MixedUnitaryDecomposition:
    off = a[0, 1]
    r = abs(off)
    phase = np.exp(-1j * np.angle(off)) if r > 0 else 1.0
    vecs = np.array([[1, phase], [1, -phase]])
    w = np.array([(1 + r) / 2, (1 - r) / 2])
    keep = w > 1e-15
    return MixedUnitaryDecomposition(w[keep], vecs[keep])


def _balanced_phases(n: np.ndarray) -> np.ndarray | None:
    """Unimodular ``v`` with ``n^dagger v = 0`` for ``n`` in ``C^3``, if the triangle closes."""
    m = np.abs(n)
    slack = 1e-12 * m.sum()
    if np.any(m > m.sum() - m + slack):
        return None
    order = np.argsort(-m)
    a, b, c = m[order]
    if b <= slack:
        return None
    if c <= slack:
        u_sorted = np.array([1, -1, 1], dtype=complex)
    else:
        cos_beta = np.clip((c * c - a * a - b * b) / (2 * a * b), -1, 1)
        w1 = b * np.exp(1j * np.arccos(cos_beta))
        w2 = -(a + w1)
        u_sorted = np.array([1, w1 / b, w2 / abs(w2)])
    u = np.empty(3, dtype=complex)
    u[order] = u_sorted
    return _unit(n) * u


def _peel(a: np.ndarray, v: np.ndarray, tol: Tolerance) -> tuple[float, np.ndarray]:
    """Largest ``t`` with ``a - t v v^dagger`` PSD, and the renormalized remainder."""
    t = 1 / float(np.real(v.conj() @ np.linalg.pinv(a, rcond=tol.psd, hermitian=True) @ v))
    t = min(max(t, 0.0), 1.0)
    rest = a - t * np.outer(v, v.conj())
    return t, (rest / (1 - t) if t < 1 - 1e-14 else rest)


def _qutrit_rank_reduction(a: np.ndarray, tol: Tolerance) -> MixedUnitaryDecomposition | None:
    weights, vecs = [], []
    mass = 1.0
    cur = a
    for _ in range(3):
        w, v = np.linalg.eigh(cur)
        rank = int(np.sum(w > 1e-10 * w.max()))
        if rank == 1:
            top = cur[:, 0] / np.sqrt(max(cur[0, 0].real, 1e-300))
            weights.append(mass)
            vecs.append(_unit(top))
            break
        if rank == 3:
            phase = np.ones(3, dtype=complex)
        else:
            phase = _balanced_phases(v[:, 0])
            if phase is None:
                return None
        t, cur = _peel(cur, phase, tol)
        weights.append(mass * t)
        vecs.append(phase)
        mass *= 1 - t
        if mass <= 1e-15:
            break
    else:
        return None
    w = np.array(weights)
    return MixedUnitaryDecomposition(w / w.sum(), np.array(vecs))


def _least_squares(a: np.ndarray, terms: int, restarts: int, rng: np.random.Generator, tol: Tolerance):
    d = a.shape[0]
    iu = np.triu_indices(d, 1)
    target = a[iu]

    def unpack(x):
        theta = x[: terms * (d - 1)].reshape(terms, d - 1)
        s = x[terms * (d - 1):]
        w = s**2 / np.sum(s**2)
        v = np.exp(1j * np.column_stack([np.zeros(terms), theta]))
        return w, v

    def resid(x):
        w, v = unpack(x)
        rec = np.einsum("k,ki,kj->ij", w, v, v.conj())[iu]
        diff = rec - target
        return np.concatenate([diff.real, diff.imag])

    best = None
    for _ in range(restarts):
        x0 = np.concatenate([rng.uniform(-np.pi, np.pi, terms * (d - 1)), rng.uniform(0.5, 1.5, terms)])
        sol = least_squares(resid, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=300)
        w, v = unpack(sol.x)
        dec = MixedUnitaryDecomposition(w, v)
        if best is None or dec.residual(a) < best.residual(a):
            best = dec
        if best.residual(a) < tol.opt:
            break
    return best


def mixed_unitary_decompose(
    a, max_terms: int = 9, restarts: int = 20, seed=0, tol: Tolerance = DEFAULT_TOL
) -> MixedUnitaryDecomposition | None:
    """Write a unit-diagonal PSD Schur matrix as ``sum_k p_k v_k v_k^dagger`` with unimodular ``v_k``.

    Returns ``None`` when no decomposition within ``max_terms`` is found;
    that is not a proof that none exists.
    """
    if isinstance(a, (KrausChannel, SchurMap)):
        if not is_gio(a):
            raise ValueError("mixed-unitary decomposition needs a GI map")
        a = schur_matrix(a)
    s = SchurMap(a, tol)
    if not s.deterministic:
        raise ValueError("Schur matrix must have unit diagonal")
    a = np.asarray(s.a)
    d = a.shape[0]
    if d == 1:
        return MixedUnitaryDecomposition(np.ones(1), np.ones((1, 1)))
    if numerical_rank(a, tol) == 1:
        dec = _qutrit_rank_reduction(a, tol) if d == 3 else MixedUnitaryDecomposition(np.ones(1), _unit(a[:, 0])[None])
    elif d == 2:
        dec = _qubit_closed_form(a)
    elif d == 3:
        dec = _qutrit_rank_reduction(a, tol)
    else:
        dec = None
    if dec is not None and len(dec) <= max_terms and dec.residual(a) < tol.opt:
        return dec
    rng = np.random.default_rng(seed)
    dec = _least_squares(a, max_terms, restarts, rng, tol)
    return dec if dec.residual(a) < tol.opt else None
