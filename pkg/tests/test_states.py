import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohere.states import (
    DensityMatrix,
    PureState,
    basis_state,
    coherence_rank,
    coherence_set,
    dephase,
    is_incoherent,
    majorizes,
    maximally_correlated,
    plus_state,
    pure,
    random_density,
    random_pure,
)

from conftest import dims, seeds

probs = st.integers(2, 6).flatmap(
    lambda n: st.lists(st.floats(0, 1), min_size=n, max_size=n).filter(lambda v: sum(v) > 1e-3)
).map(lambda v: np.array(v) / sum(v))


class TestValidation:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.eye(2))

    def test_rejects_non_psd(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[1.5, 0], [0, -0.5]]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            DensityMatrix(np.array([[0.5, 0.5], [0, 0.5]]))

    def test_rejects_unnormalized_vector(self):
        with pytest.raises(ValueError):
            PureState(np.array([1, 1]))

    def test_immutable(self):
        rho = random_density(2, seed=0)
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 1


class TestIncoherence:
    def test_examples(self):
        assert is_incoherent(np.eye(2) / 2)
        assert not is_incoherent(plus_state(2).density())

    @given(seeds, dims)
    def test_dephase_is_incoherent_and_idempotent(self, seed, d):
        rho = random_density(d, seed=seed)
        once = dephase(rho)
        assert is_incoherent(once)
        assert np.allclose(once.diag, rho.diag)
        assert np.allclose(dephase(once).mat, once.mat)

    def test_dephase_plus(self):
        assert np.allclose(dephase(plus_state(2).density()).mat, np.eye(2) / 2)

    def test_dephase_diagonal_fixed(self):
        rho = DensityMatrix(np.diag([0.2, 0.8]))
        assert np.allclose(dephase(rho).mat, rho.mat)


class TestCoherenceRank:
    def test_examples(self):
        assert coherence_set(plus_state(3)) == {0, 1, 2}
        assert coherence_rank(basis_state(3, 0)) == 1
        psi = pure(np.sqrt([2 / 3, 1 / 3, 0]))
        assert coherence_set(psi) == {0, 1} and coherence_rank(psi) == 2

    @given(seeds, dims)
    def test_diagonal_unitary_keeps_set(self, seed, d):
        rng = np.random.default_rng(seed)
        amps = random_pure(d, seed=rng).amplitudes.copy()
        amps[rng.random(d) < 0.3] = 0
        if not np.any(amps):
            amps[0] = 1
        psi = pure(amps, normalize=True)
        rotated = pure(np.exp(1j * rng.uniform(0, 6, d)) * psi.amplitudes)
        assert coherence_set(rotated) == coherence_set(psi)


class TestMajorization:
    def test_examples(self):
        assert majorizes([1, 0, 0], [0.2, 0.3, 0.5])
        assert not majorizes(np.ones(3) / 3, [0.5, 0.25, 0.25])
        assert majorizes(random_pure(3, seed=5).populations, plus_state(3).populations)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            majorizes([1, 0], [1, 0, 0])

    @given(probs)
    def test_reflexive(self, p):
        assert majorizes(p, p)

    @given(seeds)
    def test_transitive(self, seed):
        rng = np.random.default_rng(seed)
        p, q, r = (rng.dirichlet(np.ones(4)) for _ in range(3))
        if majorizes(p, q) and majorizes(q, r):
            assert majorizes(p, r)


class TestConstructors:
    def test_plus(self):
        assert np.allclose(plus_state(2).amplitudes, [1 / np.sqrt(2)] * 2)
        assert np.allclose(plus_state(1).amplitudes, [1])
        assert all(coherence_rank(plus_state(d)) == d for d in range(1, 7))
        with pytest.raises(ValueError):
            plus_state(0)

    def test_maximally_correlated_plus(self):
        phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        assert np.allclose(maximally_correlated(plus_state(2)).mat, np.outer(phi, phi))

    def test_maximally_correlated_diagonal(self):
        rho = np.diag([0.1, 0.2, 0.7])
        big = maximally_correlated(rho).mat
        want = np.zeros(9)
        want[[0, 4, 8]] = [0.1, 0.2, 0.7]
        assert np.allclose(big, np.diag(want))
        assert np.trace(big).real == pytest.approx(1)

    @given(seeds, dims)
    def test_random_density(self, seed, d):
        low = random_density(d, rank=1, seed=seed)
        assert np.trace(low.mat @ low.mat).real == pytest.approx(1, abs=1e-9)
        full = random_density(d, seed=seed)
        assert np.trace(full.mat).real == pytest.approx(1)
        assert random_density(d, seed=seed).mat.tobytes() == full.mat.tobytes()

    def test_random_density_rank_range(self):
        with pytest.raises(ValueError):
            random_density(3, rank=4)
