"""Coherence quantifiers and a randomized monotonicity harness.

Entropies are in bits. All functions accept anything :func:`as_density` does.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channels import SchurMap, apply, random_schur, schur_to_kraus
from .numerics import (
    DEFAULT_TOL,
    Tolerance,
    matrix_sqrt,
    minimize_on_simplex,
    schatten_norm,
    von_neumann_entropy,
)
from .states import as_density, random_density


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class MeasureResult:
    measure: str
    value: float
    method: str = "ClosedForm"
    params: dict = field(default_factory=dict)
    converged: bool = True

    def to_json(self) -> dict:
        out = {"measure": self.measure, "value": self.value, "method": self.method, "converged": self.converged}
        out.update({k: v for k, v in self.params.items()})
        return out


def _populations(rho) -> np.ndarray:
    return np.clip(as_density(rho).diag, 0.0, None)


def _shannon(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _rel_entropy_minimized(rho, tol: Tolerance):
    rho = as_density(rho)
    pops = _populations(rho)
    s_rho = von_neumann_entropy(rho.mat, tol)
    live = pops > 0

    def fun(x):
        if np.any(x[live] <= 0):
            return np.inf
        return -s_rho - float(np.sum(pops[live] * np.log2(x[live])))

    def grad(x):
        g = np.zeros_like(x)
        g[live] = -pops[live] / (np.maximum(x[live], 1e-300) * np.log(2))
        return g

    # start away from the optimum so the minimizer does real work
    res = minimize_on_simplex(fun, grad, np.full(rho.dim, 1 / rho.dim), tol)
    return res


def rel_entropy_coherence(rho, method: str = "closed", tol: Tolerance = DEFAULT_TOL) -> float:
    """``S(Delta[rho]) - S(rho)``; ``method="minimize"`` optimizes over diagonal ``sigma`` instead."""
    rho = as_density(rho)
    if method == "closed":
        val = _shannon(_populations(rho)) - von_neumann_entropy(rho.mat, tol)
        return max(val, 0.0)
    if method == "minimize":
        res = _rel_entropy_minimized(rho, tol)
        if not res.converged:
            warnings.warn("relative entropy minimization hit max_iter", ConvergenceWarning, stacklevel=2)
        return max(res.fun, 0.0)
    raise ValueError(f"unknown method {method!r}")


def l1_coherence(rho) -> float:
    m = as_density(rho).mat
    return float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))


def _check_p(p: float) -> float:
    p = float(p)
    if p < 1:
        raise ValueError("Schatten index p must be >= 1")
    return p


def dephasing_distance(rho, p: float = 2.0) -> float:
    """Schatten-p distance between ``rho`` and its dephased version."""
    p = _check_p(p)
    m = as_density(rho).mat
    return schatten_norm(m - np.diag(np.diag(m)), p)


def _schatten_grad(m: np.ndarray, p: float, smoothing: float = 0.0) -> tuple[float, np.ndarray]:
    """Value and diagonal of the gradient of ``||m - diag(x)||_p`` w.r.t. ``x``."""
    w, v = np.linalg.eigh(m)
    if np.isinf(p):
        k = int(np.argmax(np.abs(w)))
        return float(abs(w[k])), -np.sign(w[k]) * np.abs(v[:, k]) ** 2
    if p == 1:
        mag = np.sqrt(w**2 + smoothing**2)
        dval = w / mag
        return float(mag.sum()), -np.einsum("ik,k,ik->i", v, dval, v.conj()).real
    a = np.abs(w)
    val = float(np.sum(a**p) ** (1 / p))
    if val == 0:
        return 0.0, np.zeros(m.shape[0])
    dval = np.sign(w) * a ** (p - 1) * val ** (1 - p)
    return val, -np.einsum("ik,k,ik->i", v, dval, v.conj()).real


def min_distance_measure(rho, p: float = 2.0, tol: Tolerance = DEFAULT_TOL) -> MeasureResult:
    """``min_sigma ||rho - sigma||_p`` over incoherent ``sigma``, with a convergence flag."""
    p = _check_p(p)
    rho = as_density(rho)
    m = rho.mat
    x0 = _populations(rho)

    def make(smoothing):
        def fun(x):
            return _schatten_grad(m - np.diag(x), p, smoothing)[0]

        def grad(x):
            return _schatten_grad(m - np.diag(x), p, smoothing)[1]

        return fun, grad

    if p == 1:
        # continuation on a smoothed trace norm, then subgradient polish on the true norm
        x, converged = x0, True
        for smoothing in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8):
            f, g = make(smoothing)
            res = minimize_on_simplex(f, g, x, tol)
            x, converged = res.x, res.converged
        f, g = make(0.0)
        polish = minimize_on_simplex(f, g, x, Tolerance(tol.eq, tol.psd, tol.opt, min(tol.max_iter, 500)), smooth=False)
        value = min(polish.fun, f(x))
        method_ok = converged
    elif np.isinf(p):
        f, g = make(0.0)
        res = minimize_on_simplex(f, g, x0, tol, smooth=False)
        value, method_ok = res.fun, res.converged
    else:
        f, g = make(0.0)
        res = minimize_on_simplex(f, g, x0, tol)
        value, method_ok = res.fun, res.converged
    return MeasureResult("mindist", float(value), "Minimized", {"p": p}, method_ok)


def min_distance_coherence(rho, p: float = 2.0, tol: Tolerance = DEFAULT_TOL) -> float:
    res = min_distance_measure(rho, p, tol)
    if not res.converged:
        warnings.warn(f"simplex minimization did not converge (p={p})", ConvergenceWarning, stacklevel=2)
    return res.value


def _hamiltonian(h, d: int) -> np.ndarray:
    h = np.arange(d, dtype=float) if h is None else np.asarray(h, dtype=float).reshape(-1)
    if h.size != d:
        raise ValueError("Hamiltonian diagonal has the wrong length")
    if np.unique(h).size != d:
        raise ValueError("Hamiltonian must be nondegenerate")
    return h


def wigner_yanase(rho, h=None, tol: Tolerance = DEFAULT_TOL) -> float:
    """Skew information ``-1/2 Tr([H, sqrt(rho)]^2)`` for diagonal ``H``."""
    rho = as_density(rho, tol)
    hh = np.diag(_hamiltonian(h, rho.dim))
    root = matrix_sqrt(rho.mat, tol)
    comm = hh @ root - root @ hh
    return max(float(-0.5 * np.trace(comm @ comm).real), 0.0)


MEASURES: dict[str, Callable] = {
    "cr": rel_entropy_coherence,
    "l1": l1_coherence,
    "dephase": dephasing_distance,
    "mindist": min_distance_coherence,
    "wy": wigner_yanase,
}


def evaluate(measure: str, rho, p: float = 2.0, h=None, tol: Tolerance = DEFAULT_TOL) -> MeasureResult:
    """Dispatch by measure id, as used by the command line."""
    if measure == "cr":
        return MeasureResult("cr", rel_entropy_coherence(rho, tol=tol))
    if measure == "l1":
        return MeasureResult("l1", l1_coherence(rho))
    if measure == "dephase":
        return MeasureResult("dephase", dephasing_distance(rho, p), params={"p": p})
    if measure == "mindist":
        return min_distance_measure(rho, p, tol)
    if measure == "wy":
        hv = _hamiltonian(h, as_density(rho).dim)
        return MeasureResult("wy", wigner_yanase(rho, hv, tol), params={"h": hv.tolist()})
    raise ValueError(f"unknown measure {measure!r}")


# --- monotonicity harness -----------------------------------------------------


@dataclass(frozen=True)
class HarnessReport:
    trials: int
    max_violation: float
    max_violation_average: float | None
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.threshold

    @property
    def passed_average(self) -> bool | None:
        if self.max_violation_average is None:
            return None
        return self.max_violation_average <= self.threshold


def default_sampler(d: int = 3):
    def sample(rng: np.random.Generator) -> SchurMap:
        return random_schur(d, rank=int(rng.integers(1, d + 1)), seed=rng)

    return sample


def monotonicity_harness(
    measure: Callable,
    sampler: Callable | None = None,
    trials: int = 500,
    d: int = 3,
    seed=0,
    selective: bool = False,
    threshold: float = 1e-9,
) -> HarnessReport:
    """Largest observed increase of ``measure`` under sampled GI maps.

    With ``selective=True`` the average over Kraus outcomes (diagonal
    decomposition of each Schur map) is tracked too.
    """
    rng = np.random.default_rng(seed)
    sampler = sampler or default_sampler(d)
    worst = 0.0
    worst_avg = 0.0 if selective else None
    for _ in range(trials):
        ch = sampler(rng)
        rho = random_density(ch.dim, rank=int(rng.integers(1, ch.dim + 1)), seed=rng)
        before = measure(rho)
        out, _ = apply(ch, rho)
        worst = max(worst, measure(out) - before)
        if selective:
            avg = 0.0
            for k in schur_to_kraus(ch).kraus:
                branch = k @ rho.mat @ k.conj().T
                prob = float(np.trace(branch).real)
                if prob > 1e-12:
                    avg += prob * measure(branch / prob)
            worst_avg = max(worst_avg, avg - before)
    return HarnessReport(trials, float(worst), None if worst_avg is None else float(worst_avg), threshold)
