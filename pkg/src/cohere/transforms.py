"""State conversion under genuinely and fully incoherent operations.

Every routine returns a :class:`TransformPlan`. A ``Feasible`` plan always
carries a channel, and the channel has been applied to the source and
checked against the target before the plan is returned.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    Channel,
    KrausChannel,
    SchurMap,
    apply,
    compose,
    dephasing_channel,
    identity_channel,
)
from .families import activation_fi_map, erasing_map, permutation_matrix, plus3_fi_map
from .numerics import DEFAULT_TOL, Tolerance, allclose, is_psd, numerical_rank, partial_trace, spectral_norm
from .states import (
    DensityMatrix,
    PureState,
    as_density,
    coherence_rank,
    coherence_set,
    majorizes,
    plus_state,
    pure,
)


class PlanVerdict(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNKNOWN = "Unknown"


@dataclass(frozen=True, eq=False)
class TransformPlan:
    verdict: PlanVerdict
    probability: float = 0.0
    channel: Channel | None = None
    certificate: str = ""
    family: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == PlanVerdict.FEASIBLE and self.channel is None:
            raise ValueError("a feasible plan needs a channel")
        if not 0 <= self.probability <= 1 + 1e-12:
            raise ValueError("probability must lie in [0, 1]")

    @property
    def feasible(self) -> bool:
        return self.verdict == PlanVerdict.FEASIBLE


class VerificationError(RuntimeError):
    """A constructed channel failed to reproduce its target."""


def _infeasible(family: str, why: str, **details) -> TransformPlan:
    return TransformPlan(PlanVerdict.INFEASIBLE, 0.0, None, why, family, details)


def _unknown(family: str, why: str, **details) -> TransformPlan:
    return TransformPlan(PlanVerdict.UNKNOWN, 0.0, None, why, family, details)


def _feasible(family, channel, source, target, prob, why, tol, **details) -> TransformPlan:
    out, p_out = apply(channel, as_density(source).mat)
    expected = prob * as_density(target).mat
    if not allclose(out, expected, Tolerance(10 * tol.eq, tol.psd, tol.opt, tol.max_iter)):
        raise VerificationError(
            f"{family}: constructed channel misses the target by {spectral_norm(out - expected):.3e}"
        )
    return TransformPlan(PlanVerdict.FEASIBLE, float(min(prob, 1.0)), channel, why, family, details)


def _as_pure(x) -> PureState:
    return x if isinstance(x, PureState) else pure(x)


def _slack(tol: Tolerance, d: int) -> float:
    return tol.eq * max(1, d)


# --- GIO ----------------------------------------------------------------------


def gio_pure_to_pure(psi, phi, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Feasible iff the amplitude moduli agree; the map is a diagonal unitary."""
    psi, phi = _as_pure(psi), _as_pure(phi)
    if psi.dim != phi.dim:
        raise ValueError("dimension mismatch")
    a, b = psi.amplitudes, phi.amplitudes
    gap = np.max(np.abs(np.abs(a) - np.abs(b)))
    if gap > _slack(tol, psi.dim):
        return _infeasible("gio", f"amplitude moduli differ (max gap {gap:.3e})")
    phases = np.ones(psi.dim, dtype=complex)
    live = np.abs(a) > tol.eq
    phases[live] = (b[live] / a[live]) / np.abs(b[live] / a[live])
    ch = KrausChannel((np.diag(phases),))
    return _feasible("gio", ch, psi, phi, 1.0, "diagonal unitary relabels phases", tol)


def _inverse_outer(psi: np.ndarray, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    live = np.abs(psi) > tol.eq
    inv = np.zeros_like(psi)
    inv[live] = 1 / psi[live]
    return np.outer(inv, inv.conj()), live


def _extend_schur(block: np.ndarray, live: np.ndarray) -> np.ndarray:
    """Embed a Schur matrix defined on ``live`` and use the identity elsewhere."""
    d = live.size
    a = np.eye(d, dtype=complex)
    idx = np.flatnonzero(live)
    a[np.ix_(idx, idx)] = block
    return a


def gio_pure_to_mixed(psi, rho, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Feasible iff ``|psi_i|^2 = rho_ii``; the Schur matrix is ``rho_ij / (psi_i psi_j^*)``."""
    psi, rho = _as_pure(psi), as_density(rho, tol)
    if psi.dim != rho.dim:
        raise ValueError("dimension mismatch")
    gap = np.max(np.abs(psi.populations - rho.diag))
    if gap > _slack(tol, psi.dim):
        return _infeasible("gio", f"populations differ (max gap {gap:.3e})")
    inv, live = _inverse_outer(psi.amplitudes, tol)
    idx = np.flatnonzero(live)
    block = (rho.mat * inv)[np.ix_(idx, idx)]
    ch = SchurMap(_extend_schur(block, live), tol)
    return _feasible("gio", ch, psi, rho, 1.0, "Schur map rho / (psi psi^dagger)", tol)


def _forced_cliques_psd(a: np.ndarray, forced: np.ndarray, tol: Tolerance) -> tuple[int, ...] | None:
    """Return a fully forced principal submatrix that is not PSD, if any."""
    m = a.shape[0]
    if m > 12:
        return None
    for size in range(2, m + 1):
        for sub in itertools.combinations(range(m), size):
            ix = np.ix_(sub, sub)
            if forced[ix].all() and not is_psd(a[ix], tol):
                return sub
    return None


def _dykstra_completion(a0: np.ndarray, forced: np.ndarray, tol: Tolerance, margin: float):
    """Alternating projections onto ``{X >= margin I}`` and the fixed-entry affine set."""
    x = a0.copy()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for it in range(1, tol.max_iter + 1):
        z = x + p
        w, v = np.linalg.eigh((z + z.conj().T) / 2)
        y = (v * np.maximum(w, margin)) @ v.conj().T
        p = z - y
        z = y + q
        x_new = z.copy()
        x_new[forced] = a0[forced]
        q = z - x_new
        x = (x_new + x_new.conj().T) / 2
        if np.linalg.norm(x - y) <= tol.opt:
            return x, it, True
    return x, tol.max_iter, False


def _merge_unit_entries(a0: np.ndarray, forced: np.ndarray, tol: Tolerance):
    """Collapse indices joined by forced entries of modulus one.

    In a unit-diagonal PSD matrix ``|a_ij| = 1`` means the Gram vectors agree
    up to the phase ``a_ij``, so such indices can be merged. Returns
    ``(reps, phase, a_red, forced_red)`` or a string naming a conflict.
    """
    m = a0.shape[0]
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    unit = forced & (np.abs(np.abs(a0) - 1) <= 10 * tol.eq)
    np.fill_diagonal(unit, False)
    for i, j in zip(*np.nonzero(unit)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    root = np.array([find(i) for i in range(m)])
    # phase[i] = <g_root, g_i>, reached by walking unit entries outward from the root
    phase = np.full(m, np.nan, dtype=complex)
    phase[root == np.arange(m)] = 1.0
    changed = True
    while changed:
        changed = False
        for i, j in zip(*np.nonzero(unit)):
            if not np.isnan(phase[i]) and np.isnan(phase[j]):
                phase[j] = phase[i] * a0[i, j] / abs(a0[i, j])
                changed = True
    reps = np.unique(root)
    pos = {int(r): k for k, r in enumerate(reps)}
    a_red = np.eye(reps.size, dtype=complex)
    f_red = np.eye(reps.size, dtype=bool)
    for i, j in zip(*np.nonzero(forced)):
        r, s = pos[int(root[i])], pos[int(root[j])]
        val = phase[i] * a0[i, j] * np.conj(phase[j])
        if r == s:
            if abs(val - 1) > 1e3 * tol.eq:
                return f"entries joining indices {int(i)}, {int(j)} are inconsistent"
            continue
        if f_red[r, s] and abs(a_red[r, s] - val) > 1e3 * tol.eq:
            return f"entries joining index classes of {int(i)}, {int(j)} are inconsistent"
        a_red[r, s], f_red[r, s] = val, True
    return root, phase, pos, a_red, f_red


def _complete(a0: np.ndarray, forced: np.ndarray, tol: Tolerance):
    """PSD completion with unit diagonal; returns ``(matrix, how)`` or ``(None, reason)``."""
    if forced.all():
        if not is_psd(a0, tol):
            return None, "forced Schur matrix is not PSD"
        return a0, "all entries forced"
    bad = _forced_cliques_psd(a0, forced, tol)
    if bad is not None:
        return None, f"forced principal submatrix on {list(bad)} is not PSD"
    for margin in (1e-7, 0.0):
        x, iters, ok = _dykstra_completion(a0, forced, tol, margin)
        if ok and is_psd(x, tol):
            return x, f"PSD completion after {iters} alternating projections"
    return None, "unknown"


def gio_mixed_to_mixed(rho, sigma, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Decide ``rho -> sigma`` under GIO by positive semidefinite completion.

    Entries with ``rho_ij != 0`` force ``a_ij = sigma_ij / rho_ij``; the rest
    are completed by Dykstra's alternating projections.
    """
    rho, sigma = as_density(rho, tol), as_density(sigma, tol)
    d = rho.dim
    if sigma.dim != d:
        raise ValueError("dimension mismatch")
    gap = np.max(np.abs(rho.diag - sigma.diag))
    if gap > _slack(tol, d):
        return _infeasible("gio", f"GI maps fix populations; max population gap {gap:.3e}")
    scale = max(spectral_norm(rho.mat), 1e-300)
    live = rho.diag > tol.eq
    idx = np.flatnonzero(live)
    r = rho.mat[np.ix_(idx, idx)]
    s = sigma.mat[np.ix_(idx, idx)]
    nz = np.abs(r) > tol.eq * scale
    leaked = np.abs(s[~nz]).max(initial=0.0)
    if leaked > tol.eq * max(1.0, spectral_norm(sigma.mat)):
        return _infeasible("gio", "target has coherence where the source has none")
    a0 = np.zeros_like(r)
    a0[nz] = s[nz] / r[nz]
    np.fill_diagonal(a0, 1.0)
    forced = nz.copy()
    np.fill_diagonal(forced, True)
    if forced.all():
        if not is_psd(a0, tol):
            return _infeasible("gio", "forced Schur matrix is not PSD")
        block, how = a0, "all entries forced"
    else:
        bad = _forced_cliques_psd(a0, forced, tol)
        if bad is not None:
            return _infeasible("gio", f"forced principal submatrix on {[int(idx[i]) for i in bad]} is not PSD")
        merged = _merge_unit_entries(a0, forced, tol)
        if isinstance(merged, str):
            return _infeasible("gio", merged)
        root, phase, pos, a_red, f_red = merged
        red, how = _complete(a_red, f_red, tol)
        if red is None:
            if how == "unknown":
                return _unknown("gio", "PSD completion did not converge within max_iter")
            return _infeasible("gio", how)
        k = np.array([pos[int(r)] for r in root])
        block = np.conj(phase)[:, None] * red[np.ix_(k, k)] * phase[None, :]
        if a_red.shape[0] < a0.shape[0]:
            how += f" (after merging {a0.shape[0] - a_red.shape[0]} phase-locked indices)"
    ch = SchurMap(_extend_schur(block, live), tol)
    return _feasible("gio", ch, rho, sigma, 1.0, how, tol)


def gio_mixed_to_pure(rho, phi, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Deterministic GIO never purifies a mixed state."""
    rho, phi = as_density(rho, tol), _as_pure(phi)
    w, v = np.linalg.eigh(rho.mat)
    rank = int(np.sum(w > tol.psd * w.max()))
    if rank == 1:
        return gio_pure_to_pure(v[:, -1], phi, tol)
    return _infeasible(
        "gio",
        f"source has rank {rank}; every eigenvector would have to reach the same pure target, "
        "which pins the Schur matrix to a diagonal unitary on the support, and unitaries keep the rank",
        rank=rank,
    )


# --- SGIO ---------------------------------------------------------------------


def sgio_optimal_probability(psi, phi, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Largest probability of ``psi -> phi`` under stochastic GI maps."""
    psi, phi = _as_pure(psi), _as_pure(phi)
    if psi.dim != phi.dim:
        raise ValueError("dimension mismatch")
    src, dst = coherence_set(psi, tol), coherence_set(phi, tol)
    if not dst <= src:
        return _infeasible("sgio", f"target support {sorted(dst)} is not inside source support {sorted(src)}")
    support = np.array(sorted(dst))
    ratio = psi.populations[support] / phi.populations[support]
    prob = float(ratio.min())
    inv, _ = _inverse_outer(psi.amplitudes, tol)
    mask = np.zeros(psi.dim, dtype=bool)
    mask[support] = True
    a = prob * np.outer(phi.amplitudes, phi.amplitudes.conj()) * inv
    a[~mask, :] = 0
    a[:, ~mask] = 0
    ch = SchurMap(a, tol)
    return _feasible("sgio", ch, psi, phi, prob, "optimal SGI map (rank-one Schur matrix)", tol)


def gio_mixed_to_pure_stochastic(rho, want=None, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Best basis projection turning ``rho`` into a pure coherent state.

    Every basis subset ``W`` with ``|W| >= 2`` is tried. With ``want`` given
    the projected state is further converted by the optimal SGI map.
    """
    rho = as_density(rho, tol)
    d = rho.dim
    want = None if want is None else _as_pure(want)
    best = None
    for size in range(2, d + 1):
        for sub in itertools.combinations(range(d), size):
            block = rho.mat[np.ix_(sub, sub)]
            weight = float(np.trace(block).real)
            if weight <= tol.eq or numerical_rank(block, Tolerance(psd=1e-8)) != 1:
                continue
            w, v = np.linalg.eigh(block)
            vec = np.zeros(d, dtype=complex)
            vec[list(sub)] = v[:, -1]
            state = pure(vec, normalize=True)
            if coherence_rank(state, tol) < 2:
                continue
            proj = np.zeros((d, d))
            proj[np.ix_(sub, sub)] = 1
            prob, a, target = weight, proj, state
            if want is not None:
                step = sgio_optimal_probability(state, want, tol)
                if not step.feasible:
                    continue
                prob, a, target = weight * step.probability, proj * step.channel.a, want
            if best is None or prob > best[0] + tol.eq:
                best = (prob, a, target, sub)
    if best is None:
        return _infeasible("sgio", "no basis projection of the source is a pure coherent state")
    prob, a, target, sub = best
    ch = SchurMap(a, tol)
    return _feasible("sgio", ch, rho, target, prob, f"projection onto basis subset {list(sub)}", tol, subset=list(sub), output_state=target)


# --- FIO ----------------------------------------------------------------------


def monomial_unitary(src, dst, tol: Tolerance = DEFAULT_TOL) -> np.ndarray | None:
    """Permutation-times-phase unitary with ``U src = dst``, or ``None`` if moduli differ."""
    a, b = np.asarray(src, dtype=complex), np.asarray(dst, dtype=complex)
    d = a.size
    oa, ob = np.argsort(-np.abs(a), kind="stable"), np.argsort(-np.abs(b), kind="stable")
    if np.max(np.abs(np.abs(a[oa]) - np.abs(b[ob]))) > _slack(tol, d):
        return None
    u = np.zeros((d, d), dtype=complex)
    for i, j in zip(oa, ob):
        ph = 1.0 if abs(a[i]) <= tol.eq else (b[j] / a[i]) / abs(b[j] / a[i])
        u[j, i] = ph
    return u


def _coarse_grainings(p: np.ndarray, targets: np.ndarray, slack: float):
    """Partitions of ``range(len(p))`` whose block sums equal ``targets`` (one per target)."""
    order = np.argsort(-p, kind="stable")
    remaining = targets.astype(float).copy()
    assign = [-1] * p.size

    def rec(k):
        if k == order.size:
            if np.all(np.abs(remaining) <= slack) and len(set(assign)) == targets.size:
                yield list(assign)
            return
        x = order[k]
        tried = set()
        for j in range(targets.size):
            key = round(remaining[j] / max(slack, 1e-300))
            if key in tried or remaining[j] < p[x] - slack:
                continue
            tried.add(key)
            remaining[j] -= p[x]
            assign[x] = j
            yield from rec(k + 1)
            remaining[j] += p[x]
            assign[x] = -1

    yield from rec(0)


def _householder_to_e1(u: np.ndarray) -> np.ndarray:
    """Unitary ``V`` with ``V u = e_1`` for a unit vector ``u``."""
    m = u.size
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(m, dtype=complex)]))
    q = q[:, :m]
    q[:, 0] = u
    return q.conj().T


def coarse_graining_map(psi: PureState, blocks: dict[int, list[int]], tol: Tolerance = DEFAULT_TOL) -> KrausChannel:
    """FI map collecting the amplitude of each block of columns into one output row.

    ``blocks`` maps an output row to the input columns it collects. Columns
    outside every block must carry zero amplitude; they are sent to unused rows.
    """
    d = psi.dim
    n = max(len(b) for b in blocks.values())
    ops = np.zeros((n, d, d), dtype=complex)
    used = set()
    for row, cols in blocks.items():
        amps = psi.amplitudes[cols]
        v = _householder_to_e1(amps / np.linalg.norm(amps))
        for c_idx, col in enumerate(cols):
            ops[: len(cols), row, col] = v[:, c_idx]
        used.update(cols)
    spare_rows = [r for r in range(d) if r not in blocks]
    for col in (c for c in range(d) if c not in used):
        ops[0, spare_rows.pop(0), col] = 1
    return KrausChannel(tuple(ops), tol=tol)


def _is_plus3_like(psi: PureState, tol: Tolerance) -> bool:
    return psi.dim == 3 and np.max(np.abs(psi.populations - 1 / 3)) <= _slack(tol, 3)


def fio_pure_to_pure(psi, phi, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Decide pure-state conversion under fully incoherent operations.

    Decided: rank increase (impossible), equal rank (monomial unitaries),
    rank one (erasure), and targets whose populations are block sums of the
    source populations (explicit coarse-graining map). For sources equivalent
    to the uniform qutrit every case is decided. Other rank-decreasing
    targets are left Unknown.
    """
    psi, phi = _as_pure(psi), _as_pure(phi)
    d = psi.dim
    if phi.dim != d:
        raise ValueError("dimension mismatch")
    r_src, r_dst = coherence_rank(psi, tol), coherence_rank(phi, tol)
    if r_dst > r_src:
        return _infeasible("fio", f"coherence rank would grow from {r_src} to {r_dst}")
    if r_dst == r_src:
        u = monomial_unitary(psi.amplitudes, phi.amplitudes, tol)
        if u is None:
            return _infeasible("fio", "equal coherence ranks but different sorted moduli")
        return _feasible("fio", KrausChannel((u,), tol=tol), psi, phi, 1.0, "incoherent monomial unitary", tol)
    if r_dst == 1:
        (t,) = coherence_set(phi, tol)
        return _feasible("fio", erasing_map(d, t), psi, phi, 1.0, f"erasure onto |{t}>", tol)
    if _is_plus3_like(psi, tol):
        target = np.sqrt([2 / 3, 1 / 3, 0])
        dst_sorted = np.sort(np.abs(phi.amplitudes))[::-1]
        if np.max(np.abs(dst_sorted - target)) > _slack(tol, 3):
            return _infeasible("fio", "uniform qutrit only reaches rank-two targets with moduli (sqrt(2/3), sqrt(1/3))")
        to_plus = KrausChannel((np.diag(np.abs(psi.amplitudes) / psi.amplitudes),), tol=tol)
        mid = plus3_fi_map().kraus[0] @ plus_state(3).amplitudes
        mid = mid / np.linalg.norm(mid)
        u = monomial_unitary(mid, phi.amplitudes, tol)
        ch = compose(KrausChannel((u,), tol=tol), compose(plus3_fi_map(), to_plus))
        return _feasible("fio", ch, psi, phi, 1.0, "uniform-qutrit two-Kraus map with incoherent unitaries", tol)
    src_idx = sorted(coherence_set(psi, tol))
    dst_idx = sorted(coherence_set(phi, tol))
    p = psi.populations[src_idx]
    q = phi.populations[dst_idx]
    for assign in _coarse_grainings(p, q, 10 * _slack(tol, d)):
        blocks = {dst_idx[j]: [src_idx[x] for x in range(len(src_idx)) if assign[x] == j] for j in range(len(dst_idx))}
        ch = coarse_graining_map(psi, blocks, tol)
        out = ch.kraus[0] @ psi.amplitudes
        fix = np.ones(d, dtype=complex)
        live = np.abs(out) > tol.eq
        fix[live] = (phi.amplitudes[live] / out[live]) / np.abs(phi.amplitudes[live] / out[live])
        ch = compose(KrausChannel((np.diag(fix),), tol=tol), ch)
        return _feasible(
            "fio", ch, psi, phi, 1.0, "coarse-graining of source populations",
            tol, blocks={int(k): v for k, v in blocks.items()},
        )
    return _unknown("fio", "target populations are not block sums of the source populations; no decision procedure")


@dataclass(frozen=True)
class SfioBound:
    value: float
    exact: bool
    permutation: tuple[int, ...]


def sfio_probability_lower_bound(psi, phi, tol: Tolerance = DEFAULT_TOL, max_dim: int = 8) -> SfioBound:
    """Best SGI probability after any basis permutation of the source.

    Exact when the coherence ranks agree, a lower bound otherwise.
    """
    psi, phi = _as_pure(psi), _as_pure(phi)
    d = psi.dim
    if d > max_dim:
        raise ValueError(f"permutation enumeration limited to d <= {max_dim}")
    best, best_perm = 0.0, tuple(range(d))
    for perm in itertools.permutations(range(d)):
        moved = pure(permutation_matrix(perm) @ psi.amplitudes)
        plan = sgio_optimal_probability(moved, phi, tol)
        if plan.probability > best + tol.eq:
            best, best_perm = plan.probability, perm
    exact = coherence_rank(psi, tol) == coherence_rank(phi, tol)
    return SfioBound(min(best, 1.0), exact, best_perm)


def fio_to_maximally_mixed(rho, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    rho = as_density(rho, tol)
    d = rho.dim
    target = DensityMatrix(np.eye(d) / d)
    gap = np.max(np.abs(rho.diag - 1 / d))
    if gap > _slack(tol, d):
        return _infeasible(
            "fio",
            "populations are not uniform: full-rank forms act as permuted GI maps and keep the "
            "population multiset, while rank-deficient forms leave an output row empty",
        )
    ch = identity_channel(d) if allclose(rho.mat, target.mat, tol) else dephasing_channel(d)
    return _feasible("fio", ch, rho, target, 1.0, "dephasing", tol)


def fio_qubit_conversion(psi, rho, tol: Tolerance = DEFAULT_TOL) -> TransformPlan:
    """Exact FIO decision for a qubit pure source and arbitrary qubit target.

    A qubit FI form is either a permutation (a permuted GI map) or sends both
    columns to one row (output is an incoherent pure state).
    """
    psi, rho = _as_pure(psi), as_density(rho, tol)
    if psi.dim != 2 or rho.dim != 2:
        raise ValueError("qubit inputs required")
    for t in range(2):
        e = np.zeros((2, 2))
        e[t, t] = 1
        if allclose(rho.mat, e, tol):
            return _feasible("fio", erasing_map(2, t), psi, rho, 1.0, f"erasure onto |{t}>", tol)
    for perm in ((0, 1), (1, 0)):
        p = permutation_matrix(perm)
        plan = gio_pure_to_mixed(pure(p @ psi.amplitudes), rho, tol)
        if plan.feasible:
            ch = compose(plan.channel, KrausChannel((p,), tol=tol))
            return _feasible("fio", ch, psi, rho, 1.0, "permutation followed by a GI map", tol)
    return _infeasible(
        "fio",
        "target populations are not a permutation of the source populations and the target is not an incoherent pure state",
    )


@dataclass(frozen=True)
class ActivationReport:
    two_copy_output: np.ndarray
    two_copy_ok: bool
    reduced_state: np.ndarray
    reduced_ok: bool
    single_copy: TransformPlan
    single_copy_ok: bool

    @property
    def passed(self) -> bool:
        return self.two_copy_ok and self.reduced_ok and self.single_copy_ok


ACTIVATION_TARGET = np.array([[0.75, 0.25], [0.25, 0.25]])


def activation_demo(tol: Tolerance = DEFAULT_TOL) -> ActivationReport:
    """Two copies of ``|+2>`` reach a state whose marginal one copy cannot."""
    plus2 = plus_state(2)
    two = np.kron(plus2.amplitudes, plus2.amplitudes)
    ch = activation_fi_map()
    out, _ = apply(ch, np.outer(two, two.conj()))
    w, v = np.linalg.eigh(out)
    vec = v[:, -1] * np.sqrt(max(w[-1], 0.0))
    vec = np.diag([np.exp(-1j * np.pi / 4), 1, 1, 1]) @ vec
    ref = np.array([np.sqrt(2), 1, 0, 1]) / 2
    # fix the global phase on an entry the phase correction leaves alone
    k = 1
    vec = vec * (abs(vec[k]) / vec[k]) if abs(vec[k]) > 0 else vec
    pure_out = numerical_rank(out, tol) == 1
    two_ok = bool(pure_out and np.max(np.abs(vec - ref)) <= tol.eq * 10)
    fixed = np.outer(vec, vec.conj())
    reduced = partial_trace(fixed, (2, 2), keep=1)
    reduced_ok = bool(np.max(np.abs(reduced - ACTIVATION_TARGET)) <= tol.eq * 10)
    single = fio_qubit_conversion(plus2, ACTIVATION_TARGET, tol)
    return ActivationReport(vec, two_ok, reduced, reduced_ok, single, single.verdict == PlanVerdict.INFEASIBLE)


def io_majorization_feasible(psi, phi, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Pure-state IO convertibility for equal coherence ranks: target populations majorize the source's."""
    psi, phi = _as_pure(psi), _as_pure(phi)
    if coherence_rank(psi, tol) != coherence_rank(phi, tol):
        raise ValueError("majorization criterion applies to equal coherence ranks")
    return majorizes(phi.populations, psi.populations, tol)
