"""Dense complex linear algebra with an explicit tolerance policy.

Matrices are plain ``numpy`` complex arrays. Every numerical judgement in the
package (equality, positivity, numerical rank) goes through the helpers here
so that a single :class:`Tolerance` controls them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    """Tolerances shared by all numerical judgements.

    ``eq`` and ``psd`` are relative to the spectral norm of the operand,
    ``opt`` is the convergence threshold for iterative solvers.
    """

    eq: float = 1e-9
    psd: float = 1e-9
    opt: float = 1e-8
    max_iter: int = 10000

    def __post_init__(self):
        if min(self.eq, self.psd, self.opt) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def spectral_norm(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def allclose(x, y, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Relative equality: ``||x - y||_2 <= eq * max(1, ||x||_2)``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        return False
    if x.ndim < 2:
        x, y = x.reshape(-1, 1), y.reshape(-1, 1)
    return spectral_norm(x - y) <= tol.eq * max(1.0, spectral_norm(x))


def is_hermitian(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return allclose(m, m.conj().T, tol)


def _require_hermitian(m, tol: Tolerance) -> np.ndarray:
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian")
    return (m + m.conj().T) / 2


def schur_product(a, b) -> np.ndarray:
    """Entrywise (Hadamard) product."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def fix_phase(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Rotate a vector so its first non-negligible entry is real positive."""
    v = np.asarray(v, dtype=complex)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if scale == 0:
        return v
    idx = int(np.argmax(np.abs(v) > tol.eq * scale))
    return v * (abs(v[idx]) / v[idx])


def herm_eig(m, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues are returned in descending order; each eigenvector column is
    phase-fixed (first non-negligible component real positive) so that the
    output is reproducible.
    """
    m = _require_hermitian(m, tol)
    w, v = np.linalg.eigh(m)
    w, v = w[::-1], v[:, ::-1]
    v = np.column_stack([fix_phase(v[:, k], tol) for k in range(v.shape[1])]) if v.size else v
    return w, v


def is_psd(m, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue is >= -psd * ||m||_2."""
    m = _require_hermitian(m, tol)
    if m.size == 0:
        return True
    w = np.linalg.eigvalsh(m)
    return bool(w[0] >= -tol.psd * max(abs(w[0]), abs(w[-1])))


def _require_psd(m, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    w, v = herm_eig(m, tol)
    norm = max(abs(w[0]), abs(w[-1])) if w.size else 0.0
    if w.size and w[-1] < -tol.psd * norm:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w[-1]:.3e})")
    return np.clip(w, 0.0, None), v


def schatten_norm(m, p: float) -> float:
    """Schatten p-norm; ``p = np.inf`` gives the operator norm."""
    if p < 1:
        raise ValueError("Schatten norm requires p >= 1")
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.sum(s**p) ** (1.0 / p))


def _spectral_function(m, f, tol: Tolerance, support_only: bool = False) -> np.ndarray:
    w, v = _require_psd(m, tol)
    cutoff = tol.psd * (w[0] if w.size else 0.0)
    fw = np.zeros_like(w)
    keep = w > cutoff if support_only else np.ones_like(w, dtype=bool)
    fw[keep] = f(w[keep])
    return (v * fw) @ v.conj().T


_ROUNDING_FLOOR = 1e3 * np.finfo(float).eps


def matrix_sqrt(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """PSD square root; eigenvalues at rounding-noise level are treated as zero.

    The square root is not Lipschitz at 0, so noise of size ``eps`` would
    otherwise leak in as ``sqrt(eps)``.
    """
    w, v = _require_psd(m, tol)
    top = w[0] if w.size else 0.0
    fw = np.where(w > _ROUNDING_FLOOR * top, np.sqrt(np.clip(w, 0.0, None)), 0.0)
    return (v * fw) @ v.conj().T


def matrix_log2(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Base-2 logarithm restricted to the support of a PSD matrix."""
    return _spectral_function(m, np.log2, tol, support_only=True)


def von_neumann_entropy(rho, tol: Tolerance = DEFAULT_TOL) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    w, _ = _require_psd(rho, tol)
    w = w[w > tol.psd]
    return float(-np.sum(w * np.log2(w)))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace on ``C^d1 (x) C^d2`` in the ordered basis ``|i1 i2>``.

    ``keep`` is the label (1 or 2) of the surviving subsystem.
    """
    m = as_matrix(m)
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {m.shape} does not match dims {dims}")
    t = m.reshape(d1, d2, d1, d2)
    if keep == 1:
        return np.einsum("ikjk->ij", t)
    if keep == 2:
        return np.einsum("kikj->ij", t)
    raise ValueError("keep must be 1 or 2")


def numerical_rank(m, tol: Tolerance = DEFAULT_TOL) -> int:
    """Count singular values above ``psd * sigma_max``."""
    s = np.linalg.svd(as_matrix(m), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol.psd * s[0]))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = ind[u - css / ind > 0][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool


def minimize_on_simplex(fun, grad, x0, tol: Tolerance = DEFAULT_TOL, smooth: bool = True) -> SimplexResult:
    """Minimize a convex function over the probability simplex.

    Smooth objectives use projected gradient with Armijo backtracking;
    ``smooth=False`` switches to a projected subgradient method with
    diminishing steps that keeps the best iterate.
    """
    x = project_simplex(np.asarray(x0, dtype=float))
    fx = float(fun(x))
    if smooth:
        step = 1.0
        for it in range(1, tol.max_iter + 1):
            g = grad(x)
            while True:
                x_new = project_simplex(x - step * g)
                f_new = float(fun(x_new))
                if f_new <= fx + 0.5 * np.dot(g, x_new - x) or step < 1e-14:
                    break
                step *= 0.5
            moved = np.linalg.norm(x_new - x)
            decrease = fx - f_new
            x, fx = x_new, min(fx, f_new)
            step = min(step * 2.0, 1e3)
            if moved <= tol.opt * 1e-2 or (0 <= decrease <= tol.opt * 1e-4 * max(1.0, abs(fx)) and moved < tol.opt):
                return SimplexResult(x, fx, it, True)
        return SimplexResult(x, fx, tol.max_iter, False)

    best_x, best_f = x, fx
    stall = 0
    scale = 0.1
    for it in range(1, tol.max_iter + 1):
        g = grad(x)
        gnorm = np.linalg.norm(g)
        if gnorm == 0:
            return SimplexResult(x, fx, it, True)
        x = project_simplex(x - scale / np.sqrt(it) * g / gnorm)
        fx = float(fun(x))
        if fx < best_f - tol.opt * 1e-2:
            best_x, best_f, stall = x, fx, 0
        else:
            best_x, best_f = (x, fx) if fx < best_f else (best_x, best_f)
            stall += 1
        if stall >= 2000:
            return SimplexResult(best_x, best_f, it, True)
    return SimplexResult(best_x, best_f, tol.max_iter, False)
