"""Tests for the pure-state / density-matrix core."""

import numpy as np
import pytest

from ddiqkd.qstate import (
    DensityMatrix,
    PureState,
    haar_amplitudes,
    partial_trace,
    random_unitary,
    reduce_density,
    tensor,
    trace_distance,
)

SQ2 = 1.0 / np.sqrt(2.0)


def ket(*amps, labels=("pol",)):
    return PureState(np.array(amps, dtype=complex), labels)


H = ket(1, 0)
V = ket(0, 1)
PLUS = ket(SQ2, SQ2)
INP1 = ket(1, 0, labels=("path",))


class TestPureState:
    def test_basis_product(self):
        out = tensor(H, INP1)
        assert out.labels == ("pol", "path")
        np.testing.assert_allclose(out.amps, [1, 0, 0, 0])

    def test_superposition_product(self):
        out = tensor(PLUS, INP1)
        np.testing.assert_allclose(out.amps, [SQ2, 0, SQ2, 0], atol=1e-15)

    def test_norm_multiplicative(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a = PureState(haar_amplitudes(2, rng), ("pol",))
            b = PureState(haar_amplitudes(2, rng), ("path",))
            assert np.linalg.norm(tensor(a, b).amps) == pytest.approx(1.0, abs=1e-12)

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError, match="normalized"):
            ket(1, 1)

    def test_dimension_overflow(self):
        four = tensor(tensor(H, INP1), ket(1, 0, labels=("x",)))
        five = ket(1, 0, labels=("y",))
        with pytest.raises(ValueError, match="16"):
            tensor(tensor(four, ket(1, 0, labels=("z",))), five)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            tensor(H, V)


class TestDensityMatrix:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.5j], [0.5j, 0.5]]))
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2))
        with pytest.raises(ValueError, match="negative eigenvalue"):
            DensityMatrix(np.array([[1.5, 0], [0, -0.5]]))

    def test_pure_projector(self):
        rho = PLUS.density()
        np.testing.assert_allclose(rho.mat, 0.5 * np.ones((2, 2)), atol=1e-15)


def _partial_trace_oracle(rho4: np.ndarray, keep: str) -> np.ndarray:
    """Explicit index summation; pol is the slow factor, path the fast one."""
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            if keep == "pol":
                out[i, j] = sum(rho4[2 * i + k, 2 * j + k] for k in range(2))
            else:
                out[i, j] = sum(rho4[2 * k + i, 2 * k + j] for k in range(2))
    return out


class TestPartialTrace:
    def test_maximally_entangled_gives_identity(self):
        phi_plus = PureState(np.array([SQ2, 0, 0, SQ2]), ("pol", "path"))
        reduced = partial_trace(phi_plus.density(), "pol")
        np.testing.assert_allclose(reduced.mat, np.eye(2) / 2, atol=1e-14)

    def test_product_state_recovers_factor(self):
        rng = np.random.default_rng(5)
        a = PureState(haar_amplitudes(2, rng), ("pol",))
        b = PureState(haar_amplitudes(2, rng), ("path",))
        reduced = partial_trace(tensor(a, b).density(), "pol")
        np.testing.assert_allclose(reduced.mat, a.density().mat, atol=1e-13)

    def test_matches_index_summation_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            state = PureState(haar_amplitudes(4, rng), ("pol", "path"))
            rho = state.density()
            for keep in ("pol", "path"):
                np.testing.assert_allclose(
                    partial_trace(rho, keep).mat,
                    _partial_trace_oracle(rho.mat, keep),
                    atol=1e-13,
                )

    def test_unknown_factor_name(self):
        rho = tensor(H, INP1).density()
        with pytest.raises(ValueError, match="unknown factor"):
            partial_trace(rho, "momentum")

    def test_linear_and_trace_preserving(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            s1 = PureState(haar_amplitudes(4, rng), ("pol", "path")).density()
            s2 = PureState(haar_amplitudes(4, rng), ("pol", "path")).density()
            w = rng.random()
            mixed = DensityMatrix(w * s1.mat + (1 - w) * s2.mat, ("pol", "path"))
            lhs = partial_trace(mixed, "path").mat
            rhs = w * partial_trace(s1, "path").mat + (1 - w) * partial_trace(s2, "path").mat
            np.testing.assert_allclose(lhs, rhs, atol=1e-13)
            assert np.trace(lhs).real == pytest.approx(1.0, abs=1e-12)

    def test_reduce_density_rejects_bad_shape(self):
        with pytest.raises(ValueError, match="shape"):
            reduce_density(np.eye(3), (2, 2), (0,))


class TestTraceDistance:
    def test_identical_states(self):
        rho = PLUS.density()
        assert trace_distance(rho, rho) == 0.0

    def test_orthogonal_pure_states(self):
        assert trace_distance(H.density(), V.density()) == pytest.approx(1.0, abs=1e-14)

    def test_mixed_vs_pure_half(self):
        # eigenvalues of I/2 - |H><H| are -1/2 and +1/2, so the distance is 0.5
        mixed = DensityMatrix(np.eye(2) / 2)
        assert trace_distance(mixed, H.density()) == pytest.approx(0.5, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            trace_distance(H.density(), tensor(H, INP1).density())

    def test_triangle_inequality(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            a, b, c = (
                PureState(haar_amplitudes(4, rng), ("pol", "path")).density()
                for _ in range(3)
            )
            assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10


class TestRandomHelpers:
    def test_haar_amplitudes_normalized(self):
        rng = np.random.default_rng(41)
        for dim in (2, 4):
            v = haar_amplitudes(dim, rng)
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_random_unitary_is_unitary(self):
        rng = np.random.default_rng(43)
        u = random_unitary(4, rng)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
