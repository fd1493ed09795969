"""Scripted end-to-end checks used by ``cohere demo NAME`` and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import apply, channels_equal, kraus_equivalence_isometry, schur_matrix
from .families import (
    Verdict,
    classification_report,
    erasing_map,
    gio_not_pio_example,
    hadamard_demo_pair,
    is_gio,
    pauli_mix,
    pio_certificate,
    plus3_fi_map,
)
from .numerics import DEFAULT_TOL, Tolerance
from .states import plus_state, pure
from .structure import extremal_nonunitary_example, is_extremal_gio, mixed_unitary_decompose
from .transforms import PlanVerdict, activation_demo, fio_pure_to_pure, fio_to_maximally_mixed


@dataclass
class DemoResult:
    name: str
    checks: dict[str, bool] = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"demo": self.name, "passed": self.passed, "checks": dict(self.checks), "data": self.data}


def hadamard_kraus(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    k, l = hadamard_demo_pair()
    v = kraus_equivalence_isometry(k, l, residual_tol=1e-8)
    res = DemoResult("hadamard-kraus")
    res.checks["channels_equal"] = channels_equal(k, l, tol)
    res.checks["isometry_found"] = v is not None
    if v is not None:
        ops = np.array(k.kraus)
        rebuilt = np.einsum("ij,jab->iab", v, ops)
        resid = float(max(np.linalg.norm(rebuilt[i] - l.kraus[i]) for i in range(len(l))))
        res.checks["isometry_residual_below_1e-8"] = resid < 1e-8
        res.checks["isometry_unitary"] = bool(np.allclose(v.conj().T @ v, np.eye(2), atol=1e-10))
        res.data["isometry"] = v
        res.data["residual"] = resid
    out = l.kraus[0] @ np.array([1, 0])
    res.checks["L_plus_on_0"] = bool(np.max(np.abs(out - np.array([0.5, 0.5]))) <= 1e-9)
    res.checks["K_incoherent_L_not"] = (
        classification_report(k)["IO"] == Verdict.WITNESS_YES and classification_report(l)["IO"] != Verdict.WITNESS_YES
    )
    res.data["L_plus_on_0"] = out
    return res


def erasing(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    rep = classification_report(erasing_map(2, 0))
    want = {
        "FIO": Verdict.YES, "GIO": Verdict.NO, "DIO": Verdict.YES, "MIO": Verdict.YES,
        "IO": Verdict.WITNESS_YES, "SIO": Verdict.WITNESS_NO, "TIO": Verdict.YES,
    }
    res = DemoResult("erasing", data={"report": rep.to_json()})
    for fam, v in want.items():
        res.checks[f"{fam}={v.value}"] = rep[fam] == v
    return res


def pauli_mix_demo(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    rep = classification_report(pauli_mix(0.5))
    res = DemoResult("pauli-mix", data={"report": rep.to_json()})
    res.checks["FIO=No"] = rep["FIO"] == Verdict.NO
    res.checks["MIO=Yes"] = rep["MIO"] == Verdict.YES
    res.checks["SIO=WitnessYes"] = rep["SIO"] == Verdict.WITNESS_YES
    return res


def gio_not_pio(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    ch = gio_not_pio_example()
    rep = classification_report(ch)
    cert = pio_certificate(ch)
    boundary = pio_certificate(gio_not_pio_example(np.pi / 4))
    res = DemoResult("gio-not-pio")
    res.checks["GIO=Yes"] = rep["GIO"] == Verdict.YES
    res.checks["certificate_fires"] = bool(cert is not None and cert.fires)
    res.checks["PIO=No"] = rep["PIO"] == Verdict.NO
    res.data = {
        "theta": np.pi / 6,
        "certificate": cert.reason if cert else None,
        "theta_pi_over_4": {"fires": boundary.fires, "reason": boundary.reason, "combination": boundary.combination},
        "report": rep.to_json(),
    }
    return res


PLUS3_CLASSES = (
    np.array([1.0, 0.0, 0.0]),
    np.sqrt([2 / 3, 1 / 3, 0.0]),
    np.sqrt([1 / 3, 1 / 3, 1 / 3]),
)


def qutrit_grid(n_points: int = 1000, seed=0, steps: int = 42) -> list[np.ndarray]:
    """Simplex lattice of populations (with seeded phases) topped up by random states."""
    rng = np.random.default_rng(seed)
    pts = []
    for i in range(steps + 1):
        for j in range(steps + 1 - i):
            p = np.array([i, j, steps - i - j]) / steps
            pts.append(np.sqrt(p) * np.exp(1j * rng.uniform(0, 2 * np.pi, 3)))
    while len(pts) < n_points:
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        pts.append(v / np.linalg.norm(v))
    return pts[:n_points]


def plus3_expected(phi: np.ndarray, slack: float = 1e-9) -> bool:
    m = np.sort(np.abs(phi))[::-1]
    return any(np.max(np.abs(m - c)) <= slack for c in PLUS3_CLASSES)


def plus3_reachable(tol: Tolerance = DEFAULT_TOL, seed=0, n_points: int = 1000) -> DemoResult:
    plus3 = plus_state(3)
    ch = plus3_fi_map()
    out, _ = apply(ch, plus3.density().mat)
    psi_target = np.array([np.sqrt(2 / 3) * np.exp(1j * np.pi / 4), np.sqrt(1 / 3), 0])
    res = DemoResult("plus3-reachable")
    res.checks["explicit_map_output"] = bool(np.max(np.abs(out - np.outer(psi_target, psi_target.conj()))) <= 1e-9)
    res.checks["explicit_map_pure_branches"] = all(
        np.allclose(k @ plus3.amplitudes, psi_target / np.sqrt(2), atol=1e-12) for k in ch.kraus
    )
    counts = {v.value: 0 for v in PlanVerdict}
    mismatches = 0
    for phi in qutrit_grid(n_points, seed):
        plan = fio_pure_to_pure(plus3, pure(phi), tol)
        counts[plan.verdict.value] += 1
        if plan.feasible != plus3_expected(phi):
            mismatches += 1
    res.checks["grid_matches_classification"] = mismatches == 0
    res.checks["every_class_reached"] = all(fio_pure_to_pure(plus3, pure(c), tol).feasible for c in PLUS3_CLASSES)
    res.data = {"grid_points": n_points, "verdict_counts": counts, "mismatches": mismatches}
    return res


def activation(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    rep = activation_demo(tol)
    res = DemoResult("activation")
    res.checks["two_copy_output"] = rep.two_copy_ok
    res.checks["reduced_state"] = rep.reduced_ok
    res.checks["single_copy_infeasible"] = rep.single_copy_ok
    res.data = {
        "two_copy_output": rep.two_copy_output,
        "reduced_state": rep.reduced_state,
        "single_copy_certificate": rep.single_copy.certificate,
    }
    return res


def extremal_d4(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    ch = extremal_nonunitary_example(4)
    res = DemoResult("extremal-d4")
    res.checks["is_gio"] = is_gio(ch)
    res.checks["is_extremal"] = is_extremal_gio(ch, tol)
    res.checks["not_unitary"] = len(ch.kraus) == 2
    dec = mixed_unitary_decompose(schur_matrix(ch), seed=seed, tol=tol)
    res.checks["no_mixed_unitary_found"] = dec is None
    res.data = {"K1_diag": np.diag(ch.kraus[0]), "K2_diag": np.diag(ch.kraus[1])}
    return res


def uniform_target(tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    res = DemoResult("appendix-c")
    skewed = pure(np.sqrt([0.75, 0.25]))
    bad = fio_to_maximally_mixed(skewed, tol)
    res.checks["skewed_populations_infeasible"] = bad.verdict == PlanVerdict.INFEASIBLE
    res.checks["uniform_populations_feasible"] = all(fio_to_maximally_mixed(plus_state(d), tol).feasible for d in (2, 3, 4))
    res.checks["maximally_mixed_feasible"] = fio_to_maximally_mixed(np.eye(3) / 3, tol).feasible
    res.data = {"certificate": bad.certificate}
    return res


DEMOS = {
    "hadamard-kraus": hadamard_kraus,
    "erasing": erasing,
    "pauli-mix": pauli_mix_demo,
    "gio-not-pio": gio_not_pio,
    "plus3-reachable": plus3_reachable,
    "activation": activation,
    "extremal-d4": extremal_d4,
    "appendix-c": uniform_target,
}


def run_demo(name: str, tol: Tolerance = DEFAULT_TOL, seed=0) -> DemoResult:
    if name not in DEMOS:
        raise KeyError(name)
    return DEMOS[name](tol=tol, seed=seed)


__all__ = ["DEMOS", "DemoResult", "run_demo", "qutrit_grid", "plus3_expected"]
