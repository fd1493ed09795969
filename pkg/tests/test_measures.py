import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohere.channels import apply, random_schur
from cohere.measures import (
    MEASURES,
    dephasing_distance,
    evaluate,
    l1_coherence,
    min_distance_coherence,
    min_distance_measure,
    monotonicity_harness,
    rel_entropy_coherence,
    wigner_yanase,
)
from cohere.states import basis_state, dephase, plus_state, random_density

from conftest import dims, seeds

LOG2 = np.log2


def trace_distance_to_diagonals(rho, xs):
    """Trace norm of ``rho - diag(x)`` for every row of ``xs``, vectorized."""
    diff = rho[None, :, :] - np.einsum("ni,ij->nij", xs, np.eye(rho.shape[0]))
    return np.abs(np.linalg.eigvalsh(diff)).sum(axis=1)


def grid_oracle_p1(rho, coarse=0.01, fine=1e-3):
    n = int(round(1 / coarse))
    pts = np.array([(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]) / n
    vals = trace_distance_to_diagonals(rho, pts)
    best = pts[np.argmin(vals)]
    k = int(round(2 * coarse / fine))
    off = np.arange(-k, k + 1) * fine
    di, dj = np.meshgrid(off, off)
    local = np.column_stack([best[0] + di.ravel(), best[1] + dj.ravel()])
    local = np.column_stack([local, 1 - local.sum(axis=1)])
    local = local[np.all(local >= 0, axis=1)]
    return float(min(vals.min(), trace_distance_to_diagonals(rho, local).min()))


def random_diag_unitary(rng, d):
    return np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, d)))


class TestRelativeEntropy:
    def test_plus_two_is_one(self):
        assert rel_entropy_coherence(plus_state(2)) == pytest.approx(1, abs=1e-9)

    @pytest.mark.parametrize("d", [2, 3, 4, 5, 8])
    def test_plus_d(self, d):
        assert rel_entropy_coherence(plus_state(d)) == pytest.approx(LOG2(d), abs=1e-9)
        assert rel_entropy_coherence(plus_state(d), method="minimize") == pytest.approx(LOG2(d), abs=1e-6)

    def test_incoherent(self):
        assert rel_entropy_coherence(np.diag([0.3, 0.7])) == pytest.approx(0, abs=1e-12)

    @given(seeds, dims)
    def test_closed_form_matches_minimization(self, seed, d):
        rho = random_density(d, seed=seed)
        assert rel_entropy_coherence(rho, method="minimize") == pytest.approx(rel_entropy_coherence(rho), abs=1e-6)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            rel_entropy_coherence(plus_state(2), method="guess")


class TestL1:
    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_plus_d(self, d):
        assert l1_coherence(plus_state(d)) == pytest.approx(d - 1)

    def test_incoherent(self):
        assert l1_coherence(basis_state(3, 1)) == 0


class TestDephasingDistance:
    def test_plus_hs(self):
        assert dephasing_distance(plus_state(2), 2) == pytest.approx(1 / np.sqrt(2))

    @pytest.mark.parametrize("p", [1, 1.5, 2, np.inf])
    def test_incoherent(self, p):
        assert dephasing_distance(np.diag([0.2, 0.3, 0.5]), p) == pytest.approx(0, abs=1e-12)

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            dephasing_distance(plus_state(2), 0.5)


class TestMinDistance:
    @given(seeds, dims)
    def test_hs_equals_dephasing(self, seed, d):
        rho = random_density(d, seed=seed)
        assert min_distance_coherence(rho, 2) == pytest.approx(dephasing_distance(rho, 2), abs=1e-8)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_incoherent_zero(self, p):
        assert min_distance_coherence(np.diag([0.1, 0.6, 0.3]), p) < 1e-6

    def test_result_metadata(self):
        res = min_distance_measure(plus_state(2), 2)
        assert res.method == "Minimized" and res.converged and res.params["p"] == 2

    @given(seeds)
    def test_qubit_trace_norm_closest_is_dephased(self, seed):
        # for qubits the trace-norm closest diagonal state is always Delta[rho]
        rho = random_density(2, seed=seed)
        assert min_distance_coherence(rho, 1) == pytest.approx(dephasing_distance(rho, 1), abs=1e-6)

    @pytest.mark.slow
    def test_trace_norm_matches_grid_oracle(self):
        for seed in range(6):
            rho = random_density(3, seed=100 + seed)
            ours = min_distance_coherence(rho, 1)
            oracle = grid_oracle_p1(rho.mat)
            assert ours <= oracle + 1e-6
            assert oracle - ours < 5e-3

    def test_trace_norm_strictly_below_dephasing_on_qutrits(self):
        gaps = []
        for seed in range(10):
            rho = random_density(3, seed=seed)
            gaps.append(dephasing_distance(rho, 1) - min_distance_coherence(rho, 1))
        assert min(gaps) > -1e-6
        assert max(gaps) > 1e-3

    def test_frozen_trace_norm_value(self):
        # frozen from the grid oracle (coarse 0.01, local 1e-3)
        rho = random_density(3, seed=100)
        assert min_distance_coherence(rho, 1) == pytest.approx(grid_oracle_p1(rho.mat), abs=5e-3)


class TestWignerYanase:
    def test_plus_two(self):
        assert wigner_yanase(plus_state(2), [0, 1]) == pytest.approx(0.25, abs=1e-9)

    def test_diagonal_zero(self):
        assert wigner_yanase(np.diag([0.5, 0.25, 0.25])) == pytest.approx(0, abs=1e-12)

    def test_degenerate_h(self):
        with pytest.raises(ValueError):
            wigner_yanase(plus_state(2), [1, 1])

    @given(seeds, st.integers(2, 4))
    def test_convex(self, seed, d):
        r1, r2 = random_density(d, seed=seed), random_density(d, seed=seed + 7)
        mid = wigner_yanase((r1.mat + r2.mat) / 2)
        assert mid <= (wigner_yanase(r1) + wigner_yanase(r2)) / 2 + 1e-9


ALL = {
    "cr": rel_entropy_coherence,
    "l1": l1_coherence,
    "dephase": lambda r: dephasing_distance(r, 2),
    "dephase1": lambda r: dephasing_distance(r, 1),
    "mindist": lambda r: min_distance_coherence(r, 2),
    "wy": wigner_yanase,
}


class TestAxioms:
    @given(seeds, st.integers(2, 4))
    def test_faithful(self, seed, d):
        rho = random_density(d, seed=seed)
        diag = dephase(rho)
        for name, f in ALL.items():
            assert f(rho) > 1e-9, name
            assert abs(f(diag)) < 1e-8, name

    @given(seeds, st.integers(2, 4))
    def test_diagonal_unitary_invariance(self, seed, d):
        rng = np.random.default_rng(seed)
        rho = random_density(d, seed=rng).mat
        u = random_diag_unitary(rng, d)
        rot = u @ rho @ u.conj().T
        for name, f in ALL.items():
            assert f(rot) == pytest.approx(f(rho), abs=1e-8), name

    @given(seeds, st.integers(2, 4))
    def test_gi_monotone(self, seed, d):
        rng = np.random.default_rng(seed)
        rho = random_density(d, seed=rng)
        ch = random_schur(d, seed=rng)
        out, _ = apply(ch, rho)
        for name, f in ALL.items():
            assert f(out) <= f(rho) + 1e-9, name

    @given(seeds, st.integers(2, 3))
    def test_convexity(self, seed, d):
        rng = np.random.default_rng(seed)
        r1, r2 = random_density(d, seed=rng).mat, random_density(d, seed=rng).mat
        t = float(rng.uniform())
        mix = t * r1 + (1 - t) * r2
        for name in ("cr", "l1", "dephase", "dephase1", "wy"):
            f = ALL[name]
            assert f(mix) <= t * f(r1) + (1 - t) * f(r2) + 1e-9, name


class TestHarness:
    def test_rel_entropy_strong(self):
        rep = monotonicity_harness(rel_entropy_coherence, trials=500, selective=True)
        assert rep.passed and rep.passed_average

    def test_l1_strong(self):
        rep = monotonicity_harness(l1_coherence, trials=500, selective=True)
        assert rep.passed and rep.passed_average

    def test_wigner_yanase(self):
        assert monotonicity_harness(wigner_yanase, trials=500).passed

    def test_detects_violations(self):
        # negated measure must increase somewhere
        rep = monotonicity_harness(lambda r: -l1_coherence(r), trials=20)
        assert not rep.passed


class TestEvaluate:
    @pytest.mark.parametrize("name", sorted(MEASURES))
    def test_every_id(self, name):
        res = evaluate(name, plus_state(2))
        assert res.measure == name and res.value > 0
        assert set(res.to_json()) >= {"measure", "value", "method", "converged"}

    def test_unknown(self):
        with pytest.raises(ValueError):
            evaluate("nope", plus_state(2))

    def test_no_warning_when_converged(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            min_distance_coherence(plus_state(2), 2)
