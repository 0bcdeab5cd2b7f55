import numpy as np
import pytest

from channelspectra.linalg import (
    MatFreeOperator,
    ResourceGuardError,
    entrywise_conj,
    hermitian_eigenvalues,
    hermiticity_defect,
    hutchinson_normalized_trace_power,
    kron,
    matfree_apply,
    normalized_trace,
    require_hermitian,
)
from channelspectra.seeding import Seed

from oracles import random_complex, random_hermitian


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        d = np.diag([1.0, -1.0])
        assert np.allclose(kron(d, d), np.diag([1.0, -1.0, -1.0, 1.0]))

    def test_mixed_product_law(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            a, b, c, d = (random_complex(rng, 2, 2) for _ in range(4))
            lhs = kron(a, b) @ kron(c, d)
            rhs = kron(a @ c, b @ d)
            assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))

    def test_index_convention(self):
        rng = np.random.default_rng(0)
        a = random_complex(rng, 2, 3)
        b = random_complex(rng, 3, 2)
        k = kron(a, b)
        for i in range(2):
            for j in range(3):
                for x in range(3):
                    for y in range(2):
                        assert abs(k[i * 3 + x, j * 2 + y] - a[i, j] * b[x, y]) < 1e-14

    def test_resource_guard(self):
        big = np.zeros((100, 100))
        with pytest.raises(ResourceGuardError):
            kron(big, big, max_dim=8192)

    def test_guard_env_override(self, monkeypatch):
        monkeypatch.setenv("SPECTRA_MAX_DENSE_DIM", "10")
        with pytest.raises(ResourceGuardError):
            kron(np.zeros((4, 4)), np.zeros((4, 4)))
        monkeypatch.setenv("SPECTRA_MAX_DENSE_DIM", "16")
        assert kron(np.zeros((4, 4)), np.zeros((4, 4))).shape == (16, 16)
        monkeypatch.setenv("SPECTRA_MAX_DENSE_DIM", "0")
        with pytest.raises(ValueError):
            kron(np.zeros((2, 2)), np.zeros((2, 2)))


class TestEntrywiseConj:
    def test_real_fixed(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(entrywise_conj(a), a)

    def test_involution(self):
        rng = np.random.default_rng(1)
        a = random_complex(rng, 3, 3)
        assert np.array_equal(entrywise_conj(entrywise_conj(a)), a)

    def test_hermitian_gives_transpose(self):
        rng = np.random.default_rng(2)
        h = random_hermitian(rng, 3)
        assert np.max(np.abs(entrywise_conj(h) - h.T)) <= 1e-12


class TestNormalizedTrace:
    def test_identity(self):
        assert normalized_trace(np.eye(7)) == 1.0

    def test_alternating_diagonal(self):
        assert normalized_trace(np.diag([1.0, -1.0] * 3)) == 0.0

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            normalized_trace(np.zeros((2, 3)))

    def test_multiplicative_on_kron(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            a = random_complex(rng, 3, 3)
            b = random_complex(rng, 4, 4)
            lhs = normalized_trace(kron(a, b))
            rhs = normalized_trace(a) * normalized_trace(b)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestHermitianEigenvalues:
    def test_diagonal_sorted(self):
        vals = hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(vals, [1.0, 2.0, 3.0])

    def test_pauli_x(self):
        vals = hermitian_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(vals, [-1.0, 1.0])

    def test_flip_minus_diag_multiplicities(self):
        from channelspectra.channel import flip_minus_diag

        n = 6
        vals = hermitian_eigenvalues(flip_minus_diag(n))
        rounded = np.round(vals).astype(int)
        assert np.max(np.abs(vals - rounded)) < 1e-12
        assert np.sum(rounded == 1) == n * (n - 1) // 2
        assert np.sum(rounded == -1) == n * (n - 1) // 2
        assert np.sum(rounded == 0) == n

    def test_rejects_non_hermitian(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError, match="not Hermitian"):
            hermitian_eigenvalues(bad)

    def test_trace_identities_random(self):
        rng = np.random.default_rng(4)
        for n in (5, 16, 40):
            h = random_hermitian(rng, n)
            vals = hermitian_eigenvalues(h)
            assert abs(np.sum(vals) - np.trace(h).real) <= 1e-8 * n
            tr2 = np.sum(np.abs(h) ** 2)
            assert abs(np.sum(vals**2) - tr2) <= 1e-8 * max(1.0, tr2)

    def test_defect_helper(self):
        assert hermiticity_defect(np.eye(3)) == 0.0
        bumped = np.eye(2) + np.array([[0, 1e-5], [0, 0]])
        with pytest.raises(ValueError):
            require_hermitian(bumped)


class TestMatFreeOperator:
    def test_identity_term(self):
        n = 3
        op = MatFreeOperator(n=n, terms=((1.0, np.eye(n, dtype=complex), np.eye(n, dtype=complex)),))
        v = np.arange(n * n, dtype=complex)
        assert np.allclose(matfree_apply(op, v), v)

    def test_channel_term_against_dense(self):
        rng = np.random.default_rng(5)
        n = 4
        w = random_hermitian(rng, n)
        op = MatFreeOperator(n=n, terms=((1.0, w, np.conj(w)),))
        x = random_complex(rng, n, n)
        got = matfree_apply(op, x.reshape(-1))
        assert np.allclose(got.reshape(n, n), w @ x @ w, atol=1e-12)
        dense = np.kron(w, np.conj(w))
        assert np.max(np.abs(got - dense @ x.reshape(-1))) <= 1e-10

    def test_shift_only(self):
        rng = np.random.default_rng(6)
        n = 2
        shift = random_hermitian(rng, n * n)
        op = MatFreeOperator(n=n, terms=(), shift=shift)
        v = random_complex(rng, n * n, 1).ravel()
        assert np.allclose(matfree_apply(op, v), shift @ v)

    def test_dimension_mismatch(self):
        op = MatFreeOperator(n=2, terms=((1.0, np.eye(2, dtype=complex), np.eye(2, dtype=complex)),))
        with pytest.raises(ValueError):
            matfree_apply(op, np.zeros(5, dtype=complex))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_agrees_with_dense_everywhere(self, n):
        rng = np.random.default_rng(100 + n)
        terms = tuple(
            (float(rng.normal()), random_complex(rng, n, n), random_complex(rng, n, n))
            for _ in range(3)
        )
        shift = random_hermitian(rng, n * n)
        op = MatFreeOperator(n=n, terms=terms, shift=shift)
        dense = op.to_dense()
        for _ in range(5):
            v = random_complex(rng, n * n, 1).ravel()
            got = matfree_apply(op, v)
            want = dense @ v
            assert np.max(np.abs(got - want)) <= 1e-10 * max(1.0, np.max(np.abs(want)))


class TestHutchinson:
    def _identity_op(self, n):
        return MatFreeOperator(
            n=n, terms=((1.0, np.eye(n, dtype=complex), np.eye(n, dtype=complex)),)
        )

    def test_identity_exact(self):
        op = self._identity_op(3)
        for p in (1, 2, 5):
            est, se = hutchinson_normalized_trace_power(op, p, probes=4, rng=Seed(1))
            assert est == 1.0
            assert se == 0.0

    def test_known_spectrum_shift(self):
        rng = np.random.default_rng(7)
        n = 4
        diag = np.diag(rng.normal(size=n * n)).astype(complex)
        op = MatFreeOperator(n=n, terms=(), shift=diag)
        exact = float(np.mean(np.diagonal(diag).real ** 2))
        est, se = hutchinson_normalized_trace_power(op, 2, probes=128, rng=Seed(2))
        assert abs(est - exact) <= 3.0 * max(se, 1e-12)

    def test_delta_like_fourth_moment(self):
        rng = np.random.default_rng(8)
        n = 8
        w1, w2 = random_hermitian(rng, n), random_hermitian(rng, n)
        scale = 1.0 / np.sqrt(2.0)
        op = MatFreeOperator(n=n, terms=((scale, w1, np.conj(w1)), (scale, w2, np.conj(w2))))
        dense = op.to_dense()
        vals = np.linalg.eigvalsh(dense)
        exact = float(np.mean(vals**4))
        est, se = hutchinson_normalized_trace_power(op, 4, probes=256, rng=Seed(3))
        assert abs(est - exact) <= 3.0 * se

    def test_second_moment_converges(self):
        rng = np.random.default_rng(9)
        n = 4
        shift = random_hermitian(rng, n * n)
        op = MatFreeOperator(n=n, terms=(), shift=shift)
        exact = float(np.sum(np.abs(shift) ** 2)) / (n * n)
        est, se = hutchinson_normalized_trace_power(op, 2, probes=256, rng=Seed(4))
        assert abs(est - exact) <= 4.0 * se

    def test_invalid_arguments(self):
        op = self._identity_op(2)
        with pytest.raises(ValueError):
            hutchinson_normalized_trace_power(op, 0, probes=4, rng=Seed(0))
        with pytest.raises(ValueError):
            hutchinson_normalized_trace_power(op, 2, probes=0, rng=Seed(0))
