"""Membership tests for the incoherent operation families and witness channels.

Decided families (GIO, SGIO, FIO, MIO, DIO, TIO) depend only on the map.
IO and SIO are existence questions over Kraus decompositions; they are
certified from the decomposition the caller supplies and refuted only
through implied lattice facts or an explicit obstruction.
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
    as_kraus,
    canonical_kraus,
    choi_of,
    transfer_matrix,
)
from .numerics import DEFAULT_TOL, Tolerance, allclose, spectral_norm
from .states import is_incoherent


class Verdict(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    WITNESS_YES = "WitnessYes"
    WITNESS_NO = "NoWitness"
    UNKNOWN = "Unknown"


FAMILIES = ("GIO", "SGIO", "FIO", "IO", "SIO", "PIO", "MIO", "DIO", "TIO")


def _tol(ch) -> Tolerance:
    return getattr(ch, "tol", DEFAULT_TOL)


def _basis_op(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1
    return e


# --- Kraus operator structure -------------------------------------------------


def nonzero_mask(k, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    k = np.asarray(k)
    return np.abs(k) > tol.eq * max(spectral_norm(k), 1e-300)


def is_incoherent_kraus_operator(k, tol: Tolerance = DEFAULT_TOL) -> bool:
    """At most one non-negligible entry per column."""
    return bool(np.all(nonzero_mask(k, tol).sum(axis=0) <= 1))


def _is_monomial_like(k, tol: Tolerance) -> bool:
    mask = nonzero_mask(k, tol)
    return bool(np.all(mask.sum(axis=0) <= 1) and np.all(mask.sum(axis=1) <= 1))


def is_io_witness(c: KrausChannel) -> bool:
    return all(is_incoherent_kraus_operator(k, c.tol) for k in c.kraus)


def is_sio_witness(c: KrausChannel) -> bool:
    """Every ``K_i`` and ``K_i^dagger`` incoherent."""
    return all(_is_monomial_like(k, c.tol) for k in c.kraus)


def support_form(c: KrausChannel) -> tuple[dict[int, int] | None, str]:
    """Column -> row assignment shared by all Kraus operators.

    Returns ``(None, reason)`` if some operator is not incoherent or two
    operators place a column's nonzero entry in different rows.
    """
    form: dict[int, int] = {}
    for n, k in enumerate(c.kraus):
        mask = nonzero_mask(k, c.tol)
        for col in range(k.shape[1]):
            rows = np.flatnonzero(mask[:, col])
            if rows.size > 1:
                return None, f"Kraus operator {n} has {rows.size} nonzeros in column {col}"
            if rows.size == 1:
                row = int(rows[0])
                if form.setdefault(col, row) != row:
                    return None, f"column {col} maps to rows {form[col]} and {row}"
    return form, "consistent form"


# --- decided families ---------------------------------------------------------


def _is_tp(ch: Channel) -> bool:
    if isinstance(ch, SchurMap):
        return ch.deterministic
    gram = sum(k.conj().T @ k for k in ch.kraus)
    return allclose(gram, np.eye(ch.dim), ch.tol)


def gio_violation(c: Channel) -> tuple[int, float] | None:
    """First basis index ``i`` with ``Lambda(|i><i|) != |i><i|``."""
    d = c.dim
    for i in range(d):
        e = _basis_op(d, i, i)
        out, _ = apply(c, e)
        if not allclose(out, e, _tol(c)):
            return i, spectral_norm(out - e)
    return None


def is_gio(c: Channel) -> bool:
    return _is_tp(c) and gio_violation(c) is None


def is_sgio(c: Channel) -> bool:
    """All Kraus operators diagonal; equivalently the Choi matrix lives on ``span{|ii>}``."""
    if isinstance(c, SchurMap):
        return True
    d = c.dim
    j = choi_of(c).j
    idx = np.arange(d) * (d + 1)
    inner = np.zeros_like(j)
    inner[np.ix_(idx, idx)] = j[np.ix_(idx, idx)]
    return allclose(j, inner, _tol(c))


def is_fio(c: Channel) -> bool:
    """FI iff the canonical Kraus set is incoherent and shares one form."""
    form, _ = support_form(canonical_kraus(c))
    return form is not None


def mio_violation(c: Channel) -> int | None:
    d = c.dim
    for i in range(d):
        out, _ = apply(c, _basis_op(d, i, i))
        if not is_incoherent(out, _tol(c)):
            return i
    return None


def is_mio(c: Channel) -> bool:
    return mio_violation(c) is None


def dio_violation(c: Channel) -> tuple[int, int] | None:
    """First basis pair breaking ``Lambda(|x><x|)`` incoherent / ``Delta(Lambda(|x><x'|)) = 0``."""
    tol = _tol(c)
    d = c.dim
    i = mio_violation(c)
    if i is not None:
        return i, i
    for x, y in itertools.permutations(range(d), 2):
        out, _ = apply(c, _basis_op(d, x, y))
        if np.max(np.abs(np.diag(out))) > tol.eq:
            return x, y
    return None


def is_dio(c: Channel) -> bool:
    return dio_violation(c) is None


def default_hamiltonian(d: int) -> np.ndarray:
    return np.arange(d, dtype=float)


def _check_hamiltonian(h, d: int) -> np.ndarray:
    h = np.asarray(h, dtype=float).reshape(-1)
    if h.size != d:
        raise ValueError("Hamiltonian diagonal has the wrong length")
    if np.unique(h).size != d:
        raise ValueError("Hamiltonian must be nondegenerate")
    return h


def tio_commutator(c: Channel, h=None) -> float:
    """Relative size of ``[L, D]`` with ``D`` generating ``rho -> e^{-itH} rho e^{itH}``."""
    d = c.dim
    h = _check_hamiltonian(default_hamiltonian(d) if h is None else h, d)
    lmat = transfer_matrix(c)
    gen = -1j * (h[:, None] - h[None, :]).reshape(-1)
    comm = lmat * gen[None, :] - gen[:, None] * lmat
    return spectral_norm(comm) / max(spectral_norm(lmat), 1e-300)


def is_tio(c: Channel, h=None) -> bool:
    return tio_commutator(c, h) <= _tol(c).eq


# --- obstructions and certificates --------------------------------------------


def sio_obstruction(c: Channel) -> str | None:
    """Proof that an FI map has no strictly incoherent decomposition, if one is found.

    Every decomposition of an FI map shares the canonical column -> row form,
    and the per-column coefficient vectors ``k_x`` (over Kraus index) are
    orthonormal within each row group. A strictly incoherent decomposition
    would need a single isometry giving the vectors of every group disjoint
    supports. If two vectors of one group both expand with all-nonzero
    coefficients over two vectors of another group, that is impossible.
    """
    can = canonical_kraus(c)
    form, _ = support_form(can)
    if form is None:
        return None
    tol = can.tol
    ops = np.array(can.kraus)
    vec = {x: ops[:, r, x] for x, r in form.items()}
    groups: dict[int, list[int]] = {}
    for x, r in sorted(form.items()):
        groups.setdefault(r, []).append(x)
    for r, s in itertools.permutations(groups, 2):
        for x1, x2 in itertools.combinations(groups[r], 2):
            basis = np.column_stack([vec[x1], vec[x2]])
            for y1, y2 in itertools.combinations(groups[s], 2):
                coeffs = []
                for y in (y1, y2):
                    cf = basis.conj().T @ vec[y]
                    if np.linalg.norm(basis @ cf - vec[y]) > 1e3 * tol.eq:
                        break
                    coeffs.append(cf)
                else:
                    if all(np.all(np.abs(cf) > 1e3 * tol.eq) for cf in coeffs):
                        return (
                            f"columns {y1},{y2} (row {s}) are full superpositions of the "
                            f"coefficient vectors of columns {x1},{x2} (row {r})"
                        )
    return None


@dataclass(frozen=True)
class PioCertificate:
    fires: bool
    reason: str
    combination: tuple[complex, complex] | None = None


def _equal_nonzero_moduli(entries: np.ndarray, tol: float) -> bool:
    m = np.abs(entries)
    scale = max(m.max(initial=0.0), 1e-300)
    nz = m[m > tol * scale]
    return nz.size > 0 and nz.max() - nz.min() <= tol * scale


def pio_two_kraus_certificate(a, b, tol: float = 1e-9) -> PioCertificate:
    """Necessary PIO condition for a GI map with two linearly independent diagonal Kraus operators.

    A GI map in PIO needs a nonzero ``L = alpha K1 + beta K2`` whose nonzero
    diagonal moduli all coincide. ``fires=True`` means no such combination
    exists, so the map is certified not to be in PIO.
    """
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if _equal_nonzero_moduli(a, tol):
        return PioCertificate(False, "K1 alone has equal nonzero moduli", (1, 0))
    if _equal_nonzero_moduli(b, tol):
        return PioCertificate(False, "K2 alone has equal nonzero moduli", (0, 1))
    scale = max(np.abs(a).max(), np.abs(b).max())
    # beta values that zero out one entry
    for i in np.flatnonzero(np.abs(b) > tol * scale):
        if abs(a[i]) <= tol * scale:
            continue
        beta = -a[i] / b[i]
        if _equal_nonzero_moduli(a + beta * b, 1e3 * tol):
            return PioCertificate(False, f"combination zeroing entry {i} works", (1, complex(beta)))
    # generic beta: every non-structural entry has the same modulus c > 0;
    # unknowns z = (Re beta, Im beta, |beta|^2, c) enter linearly.
    live = np.flatnonzero((np.abs(a) > tol * scale) | (np.abs(b) > tol * scale))
    ab = a[live].conj() * b[live]
    mat = np.column_stack([2 * ab.real, -2 * ab.imag, np.abs(b[live]) ** 2, -np.ones(live.size)])
    rhs = -np.abs(a[live]) ** 2
    z0, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    if np.linalg.norm(mat @ z0 - rhs) > 1e3 * tol * max(1.0, np.linalg.norm(rhs)):
        return PioCertificate(True, "linear system for a common modulus is inconsistent")
    _, sv, vt = np.linalg.svd(mat)
    null = vt[np.sum(sv > tol * sv[0]):].T
    if null.shape[1] == 0:
        x, y, q, c = z0
        if abs(q - (x * x + y * y)) <= 1e3 * tol * max(1.0, abs(q)) and q > tol and c > tol:
            return PioCertificate(False, "unique common-modulus solution is admissible", (1, complex(x, y)))
        return PioCertificate(True, f"unique solution has |beta|^2 = {q:.6g} but Re^2+Im^2 = {x*x + y*y:.6g}")
    if null.shape[1] == 1:
        n = null[:, 0]
        # q(t) - x(t)^2 - y(t)^2 = 0 is a quadratic in t
        qa = -(n[0] ** 2 + n[1] ** 2)
        qb = n[2] - 2 * (z0[0] * n[0] + z0[1] * n[1])
        qc = z0[2] - z0[0] ** 2 - z0[1] ** 2
        roots = np.roots([qa, qb, qc]) if abs(qa) > 1e-14 else (np.array([-qc / qb]) if abs(qb) > 1e-14 else np.array([]))
        for t in roots:
            if abs(t.imag) > 1e-9:
                continue
            x, y, q, c = z0 + t.real * n
            if q > tol and c > tol:
                return PioCertificate(False, "one-parameter family admits a solution", (1, complex(x, y)))
        return PioCertificate(True, "one-parameter family admits no admissible solution")
    return PioCertificate(False, "condition undetermined (under-constrained system)")


def pio_certificate(c: Channel) -> PioCertificate | None:
    """Apply the two-Kraus PIO test to a GI map of Kraus rank two, else ``None``."""
    if not is_gio(c):
        return None
    can = canonical_kraus(c)
    if len(can) != 2:
        return None
    ops = c.kraus if isinstance(c, KrausChannel) and len(c.kraus) == 2 else can.kraus
    a, b = (np.diag(k) for k in ops)
    return pio_two_kraus_certificate(a, b)


# --- report -------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    dim: int
    verdicts: dict[str, Verdict]
    evidence: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        v = self.verdicts
        yes = (Verdict.YES, Verdict.WITNESS_YES)
        if v.get("GIO") == Verdict.YES:
            for fam in ("SGIO", "TIO", "FIO"):
                if v.get(fam) != Verdict.YES:
                    raise ValueError(f"inconsistent report: GIO=Yes but {fam}={v.get(fam)}")
        if v.get("FIO") == Verdict.YES and v.get("DIO") != Verdict.YES:
            raise ValueError("inconsistent report: FIO=Yes but DIO is not Yes")
        if v.get("FIO") == Verdict.YES and v.get("IO") == Verdict.NO:
            raise ValueError("inconsistent report: FIO=Yes but IO=No")
        if v.get("SIO") in yes and v.get("DIO") == Verdict.NO:
            raise ValueError("inconsistent report: SIO certified but DIO=No")

    def __getitem__(self, family: str) -> Verdict:
        return self.verdicts[family]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "verdicts": {f: self.verdicts[f].value for f in FAMILIES},
            "evidence": {f: self.evidence[f] for f in FAMILIES if f in self.evidence},
        }


def _yn(flag: bool) -> Verdict:
    return Verdict.YES if flag else Verdict.NO


def classification_report(c: Channel, h=None) -> ClassificationReport:
    kc = as_kraus(c)
    d = kc.dim
    ev: dict[str, str] = {}
    out: dict[str, Verdict] = {}

    gv = gio_violation(kc)
    tp = _is_tp(kc)
    out["GIO"] = _yn(tp and gv is None)
    if not tp:
        ev["GIO"] = "map is not trace preserving"
    elif gv is not None:
        ev["GIO"] = f"basis state {gv[0]} is not fixed (deviation {gv[1]:.3e})"

    out["SGIO"] = _yn(is_sgio(kc))
    if out["SGIO"] == Verdict.NO:
        ev["SGIO"] = "Choi matrix has weight outside span{|ii>} (non-diagonal Kraus operators)"

    form, why = support_form(canonical_kraus(kc))
    out["FIO"] = _yn(form is not None)
    ev["FIO"] = f"canonical decomposition: {why}" + (f", form {dict(sorted(form.items()))}" if form else "")

    mv = mio_violation(kc)
    out["MIO"] = _yn(mv is None)
    if mv is not None:
        ev["MIO"] = f"Lambda(|{mv}><{mv}|) is coherent"

    dv = dio_violation(kc)
    out["DIO"] = _yn(dv is None)
    if dv is not None:
        ev["DIO"] = f"condition fails on basis pair {dv}"

    comm = tio_commutator(kc, h)
    out["TIO"] = _yn(comm <= kc.tol.eq)
    ev["TIO"] = f"relative commutator with translation generator {comm:.3e}"

    if is_io_witness(kc):
        out["IO"] = Verdict.WITNESS_YES
        ev["IO"] = "supplied Kraus operators are incoherent"
    elif out["MIO"] == Verdict.NO:
        out["IO"] = Verdict.NO
        ev["IO"] = "not MIO"
    else:
        out["IO"] = Verdict.WITNESS_NO
        ev["IO"] = "supplied decomposition is not incoherent; existence of another not decided"

    obstruction = sio_obstruction(kc) if out["FIO"] == Verdict.YES else None
    if is_sio_witness(kc):
        out["SIO"] = Verdict.WITNESS_YES
        ev["SIO"] = "supplied Kraus operators and their adjoints are incoherent"
    elif out["DIO"] == Verdict.NO or out["IO"] == Verdict.NO:
        out["SIO"] = Verdict.NO
        ev["SIO"] = "not DIO" if out["DIO"] == Verdict.NO else "not IO"
    elif obstruction is not None:
        out["SIO"] = Verdict.NO
        ev["SIO"] = obstruction
    else:
        out["SIO"] = Verdict.WITNESS_NO
        ev["SIO"] = "supplied decomposition has a row with several nonzeros; existence of another not decided"

    cert = pio_certificate(kc)
    can = canonical_kraus(kc)
    single_unitary = len(can) == 1 and _is_monomial_like(can.kraus[0], kc.tol) and tp
    if out["SIO"] == Verdict.NO:
        out["PIO"] = Verdict.NO
        ev["PIO"] = "PIO is contained in SIO"
    elif cert is not None and cert.fires:
        out["PIO"] = Verdict.NO
        ev["PIO"] = f"two-Kraus necessary condition fails: {cert.reason}"
    elif single_unitary:
        out["PIO"] = Verdict.YES
        ev["PIO"] = "incoherent unitary"
    elif out["GIO"] == Verdict.YES and d <= 3:
        out["PIO"] = Verdict.YES
        ev["PIO"] = "GI maps on d <= 3 are mixtures of diagonal unitaries"
    else:
        out["PIO"] = Verdict.UNKNOWN
        ev["PIO"] = "no general decision procedure" + (f" ({cert.reason})" if cert else "")

    return ClassificationReport(d, out, ev)


# --- witness constructors -----------------------------------------------------


def erasing_map(d: int = 2, target: int = 0) -> KrausChannel:
    """``rho -> |target><target|`` with Kraus operators ``|target><f_x|`` over the Fourier basis."""
    if not 0 <= target < d:
        raise ValueError("target out of range")
    omega = np.exp(2j * np.pi / d)
    ops = []
    for x in range(d):
        f = omega ** (x * np.arange(d)) / np.sqrt(d)
        k = np.zeros((d, d), dtype=complex)
        k[target] = f.conj()
        ops.append(k)
    if d == 2:
        ops = [np.real(k) for k in ops]
    return KrausChannel(tuple(ops))


def diagonal_unitary(phases) -> KrausChannel:
    phases = np.asarray(phases, dtype=float)
    return KrausChannel((np.diag(np.exp(1j * phases)),))


def permutation_matrix(perm) -> np.ndarray:
    """``P|x> = |perm[x]>``."""
    perm = list(perm)
    d = len(perm)
    if sorted(perm) != list(range(d)):
        raise ValueError("not a permutation")
    p = np.zeros((d, d))
    p[perm, np.arange(d)] = 1
    return p


def permutation_unitary(perm) -> KrausChannel:
    return KrausChannel((permutation_matrix(perm),))


SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def pauli_mix(p: float = 0.5) -> KrausChannel:
    """``p sx rho sx + (1-p) sz rho sz``."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    ops = [np.sqrt(p) * SIGMA_X, np.sqrt(1 - p) * SIGMA_Z]
    return KrausChannel(tuple(k for k in ops if np.any(k)))


def hadamard_demo_pair() -> tuple[KrausChannel, KrausChannel]:
    """``{|0><+|, |1><-|}`` and its Hadamard-rotated set ``{L+, L-}``."""
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    k0 = np.outer([1, 0], plus)
    k1 = np.outer([0, 1], minus)
    lp = (k0 + k1) / np.sqrt(2)
    lm = (k0 - k1) / np.sqrt(2)
    return KrausChannel((k0, k1)), KrausChannel((lp, lm))


def depolarizing(d: int = 2) -> KrausChannel:
    """Fully depolarizing map ``rho -> I/d`` via Weyl operators ``X^a Z^b / d``."""
    if d == 2:
        return KrausChannel(tuple(s / 2 for s in (np.eye(2), SIGMA_X, SIGMA_Y, SIGMA_Z)))
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) / d for a in range(d) for b in range(d)]
    return KrausChannel(tuple(ops))


def gio_not_pio_example(theta: float = np.pi / 6) -> KrausChannel:
    """``K1 = diag(1, 0, cos t, cos t)``, ``K2 = diag(0, 1, sin t, i sin t)``."""
    if not 0 < theta < np.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    c, s = np.cos(theta), np.sin(theta)
    return KrausChannel((np.diag([1, 0, c, c]).astype(complex), np.diag([0, 1, s, 1j * s])))


def fi_qutrit_example(
    a=(np.sqrt(3) / 2, 0.5), b=(1 / np.sqrt(2), 1 / np.sqrt(2)), c=(-0.5, np.sqrt(3) / 2)
) -> KrausChannel:
    """Two-Kraus qutrit FI map with ``K_i = [[a_i, 0, c_i], [0, b_i, 0], [0, 0, 0]]``.

    Requires ``a1 c1* + a2 c2* = 0`` and unit norms of ``a``, ``b``, ``c``.
    """
    a, b, c = (np.asarray(v, dtype=complex) for v in (a, b, c))
    for name, v in (("a", a), ("b", b), ("c", c)):
        if abs(np.vdot(v, v).real - 1) > 1e-12:
            raise ValueError(f"|{name}1|^2 + |{name}2|^2 must equal 1")
    if abs(np.vdot(c, a)) > 1e-12:
        raise ValueError("a1 c1* + a2 c2* must vanish")
    ops = []
    for i in range(2):
        k = np.zeros((3, 3), dtype=complex)
        k[0, 0], k[0, 2], k[1, 1] = a[i], c[i], b[i]
        ops.append(k)
    return KrausChannel(tuple(ops))


def plus3_fi_map() -> KrausChannel:
    """Two-Kraus FI map sending ``|+3>`` to ``sqrt(2/3) e^{i pi/4}|0> + sqrt(1/3)|1>``."""
    r = 1 / np.sqrt(2)
    k1 = np.array([[1j * r, 0, r], [0, r, 0], [0, 0, 0]])
    k2 = np.array([[r, 0, 1j * r], [0, r, 0], [0, 0, 0]])
    return KrausChannel((k1, k2))


def activation_fi_map() -> KrausChannel:
    """Four-dimensional extension of :func:`plus3_fi_map` acting on two qubits."""
    r = 1 / np.sqrt(2)
    k1 = np.zeros((4, 4), dtype=complex)
    k2 = np.zeros((4, 4), dtype=complex)
    k1[0, 0], k1[0, 2], k1[1, 1], k1[3, 3] = 1j * r, r, r, r
    k2[0, 0], k2[0, 2], k2[1, 1], k2[3, 3] = r, 1j * r, r, r
    return KrausChannel((k1, k2))


def fio_not_sio_example() -> KrausChannel:
    """FI map on ``C^4`` with no strictly incoherent decomposition.

    Columns 0, 1 feed row 0 and columns 2, 3 feed row 2; the coefficient
    vectors of the second pair are the Hadamard rotation of the first.
    """
    r = 1 / np.sqrt(2)
    k1 = np.zeros((4, 4))
    k2 = np.zeros((4, 4))
    k1[0, 0], k1[2, 2], k1[2, 3] = 1, r, r
    k2[0, 1], k2[2, 2], k2[2, 3] = 1, r, -r
    return KrausChannel((k1, k2))


def witness_channels() -> dict[str, KrausChannel]:
    return {
        "erasing": erasing_map(2, 0),
        "diagonal_unitary": diagonal_unitary([0.0, 0.7, 2.1]),
        "permutation": permutation_unitary([1, 0]),
        "pauli_mix": pauli_mix(0.5),
        "hadamard_kraus": hadamard_demo_pair()[0],
        "depolarizing": depolarizing(2),
        "gio_not_pio": gio_not_pio_example(),
        "fi_qutrit": fi_qutrit_example(),
    }
