import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohere.channels import channels_equal, compose, random_schur, schur_to_kraus
from cohere.families import diagonal_unitary, erasing_map, is_gio
from cohere.structure import (
    MixedUnitaryDecomposition,
    extremal_nonunitary_example,
    is_extremal_gio,
    mixed_unitary_decompose,
)

from conftest import seeds


class TestExtremality:
    def test_diagonal_unitary(self):
        assert is_extremal_gio(diagonal_unitary([0.1, 0.2, 0.3, 0.4]))

    @pytest.mark.parametrize("d", [4, 5, 6])
    def test_counterexample(self, d):
        ch = extremal_nonunitary_example(d)
        assert is_gio(ch) and is_extremal_gio(ch)
        assert len(ch) == 2

    def test_counterexample_entries(self):
        k1, k2 = extremal_nonunitary_example(4).kraus
        assert np.allclose(np.diag(k1), [1, 1 / 2, 1 / 3, 1 / 4])
        assert np.allclose(np.abs(np.diag(k1)) ** 2 + np.abs(np.diag(k2)) ** 2, 1)

    def test_counterexample_needs_d4(self):
        with pytest.raises(ValueError):
            extremal_nonunitary_example(3)

    @given(seeds)
    def test_qutrits_never_extremal(self, seed):
        rng = np.random.default_rng(seed)
        ch = random_schur(3, rank=int(rng.integers(2, 4)), seed=rng)
        assert not is_extremal_gio(ch)

    def test_rejects_non_gi(self):
        with pytest.raises(ValueError):
            is_extremal_gio(erasing_map())

    @given(seeds, st.integers(4, 6))
    def test_invariant_under_diagonal_unitaries(self, seed, d):
        rng = np.random.default_rng(seed)
        ch = extremal_nonunitary_example(d)
        u = diagonal_unitary(rng.uniform(0, 6, d))
        v = diagonal_unitary(rng.uniform(0, 6, d))
        assert is_extremal_gio(compose(u, compose(ch, v)))
        mixed = random_schur(d, rank=d, seed=rng)
        assert is_extremal_gio(compose(u, schur_to_kraus(mixed))) == is_extremal_gio(mixed)


class TestDecompositionType:
    def test_validation(self):
        with pytest.raises(ValueError):
            MixedUnitaryDecomposition(np.array([0.5, 0.6]), np.ones((2, 2)))
        with pytest.raises(ValueError):
            MixedUnitaryDecomposition(np.array([1.0]), np.array([[1, 0.5]]))
        with pytest.raises(ValueError):
            MixedUnitaryDecomposition(np.array([0.5, 0.5]), np.ones((1, 2)))


class TestDecompose:
    def test_qubit_closed_form(self):
        c = 1 / np.sqrt(3)
        dec = mixed_unitary_decompose(np.array([[1, c], [c, 1]]))
        order = np.argsort(-dec.weights)
        assert np.allclose(dec.weights[order], [(1 + c) / 2, (1 - c) / 2])
        assert np.allclose(dec.vectors[order], [[1, 1], [1, -1]])
        assert dec.residual([[1, c], [c, 1]]) < 1e-14

    def test_all_ones(self):
        dec = mixed_unitary_decompose(np.ones((3, 3)))
        assert len(dec) == 1 and np.allclose(dec.vectors[0], 1)

    def test_identity_qutrit(self):
        dec = mixed_unitary_decompose(np.eye(3))
        assert dec.residual(np.eye(3)) < 1e-9

    @given(seeds, st.integers(2, 3))
    def test_random_small_dims(self, seed, d):
        rng = np.random.default_rng(seed)
        s = random_schur(d, rank=int(rng.integers(1, d + 1)), seed=rng)
        dec = mixed_unitary_decompose(s)
        assert dec is not None and dec.residual(s.a) < 1e-8
        assert channels_equal(dec.as_channel(), s)

    def test_accepts_kraus_input(self):
        s = random_schur(3, seed=3)
        dec = mixed_unitary_decompose(schur_to_kraus(s))
        assert dec.residual(s.a) < 1e-8

    @pytest.mark.slow
    def test_extremal_counterexample_has_none(self):
        assert mixed_unitary_decompose(extremal_nonunitary_example(4)) is None

    def test_random_d4_usually_found(self):
        s = random_schur(4, rank=4, seed=11)
        dec = mixed_unitary_decompose(s, restarts=5)
        assert dec is not None and dec.residual(s.a) < 1e-8

    def test_input_checks(self):
        with pytest.raises(ValueError):
            mixed_unitary_decompose(np.diag([1, 0.5]))
        with pytest.raises(ValueError):
            mixed_unitary_decompose(erasing_map())

    def test_single_dimension(self):
        dec = mixed_unitary_decompose(np.ones((1, 1)))
        assert len(dec) == 1
