"""Tests for state preparation, the path-encoding network, and the
virtual-protocol identities."""

import numpy as np
import pytest

from ddiqkd.encoding import (
    ALICE_SETTINGS,
    Basis,
    Bb84Setting,
    PathSetting,
    VirtualSource,
    agreement_detectors,
    apply_lon,
    bb84_state,
    bell_basis_matrix,
    hybrid_bell_expand,
    lon_isometry,
    rho_alice,
    rho_bob,
)
from ddiqkd.qstate import DensityMatrix, PureState, haar_amplitudes, random_unitary, trace_distance

SQ2 = 1.0 / np.sqrt(2.0)
PATHS = (PathSetting.A, PathSetting.C, PathSetting.B0, PathSetting.BPI)


def haar_qubit(rng):
    return PureState(haar_amplitudes(2, rng), ("pol",))


class TestBb84States:
    def test_rectilinear_zero_is_horizontal(self):
        np.testing.assert_allclose(bb84_state(Bb84Setting(Basis.RECTILINEAR, 0)).amps, [1, 0])

    def test_diagonal_zero_is_plus45(self):
        np.testing.assert_allclose(
            bb84_state(Bb84Setting(Basis.DIAGONAL, 0)).amps, [SQ2, SQ2]
        )

    def test_mutually_unbiased(self):
        h = bb84_state(Bb84Setting(Basis.RECTILINEAR, 0))
        plus = bb84_state(Bb84Setting(Basis.DIAGONAL, 0))
        assert abs(h.overlap(plus)) ** 2 == pytest.approx(0.5, abs=1e-14)

    def test_bad_bit_rejected(self):
        with pytest.raises(ValueError):
            Bb84Setting(Basis.RECTILINEAR, 2)


class TestLonIsometry:
    def test_path_a_keeps_port1(self):
        out = apply_lon(PathSetting.A, bb84_state(Bb84Setting(Basis.RECTILINEAR, 0)))
        np.testing.assert_allclose(out.amps, [1, 0, 0, 0])

    def test_path_c_moves_to_port2(self):
        out = apply_lon(PathSetting.C, bb84_state(Bb84Setting(Basis.RECTILINEAR, 1)))
        np.testing.assert_allclose(out.amps, [0, 0, 0, 1])

    def test_path_b0_superposes_ports(self):
        out = apply_lon(PathSetting.B0, bb84_state(Bb84Setting(Basis.RECTILINEAR, 0)))
        np.testing.assert_allclose(out.amps, [SQ2, SQ2, 0, 0], atol=1e-15)

    def test_norm_preserved_for_random_inputs(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            qubit = haar_qubit(rng)
            for path in PATHS:
                assert np.linalg.norm(apply_lon(path, qubit).amps) == pytest.approx(
                    1.0, abs=1e-12
                )

    def test_isometry_matrices(self):
        for path in PATHS:
            m = lon_isometry(path)
            np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-14)

    def test_unnormalized_input_rejected(self):
        bad = PureState(np.array([1.0, 0.0]), ("pol",))
        object.__setattr__(bad, "amps", np.array([2.0, 0.0], dtype=complex))
        with pytest.raises(ValueError, match="normalized"):
            apply_lon(PathSetting.A, bad)


class TestBellExpansion:
    def test_basis_is_orthonormal(self):
        bell = bell_basis_matrix()
        np.testing.assert_allclose(bell @ bell.conj().T, np.eye(4), atol=1e-14)

    def test_h_inp1(self):
        state = PureState(np.array([1, 0, 0, 0], dtype=complex), ("pol", "path"))
        np.testing.assert_allclose(hybrid_bell_expand(state), [SQ2, SQ2, 0, 0], atol=1e-15)

    def test_plus45_through_b0(self):
        # (|H>+|V>)(|1>+|2>)/2 expands to (phi+ + psi+)/sqrt(2) by hand
        state = apply_lon(PathSetting.B0, bb84_state(Bb84Setting(Basis.DIAGONAL, 0)))
        np.testing.assert_allclose(hybrid_bell_expand(state), [SQ2, 0, SQ2, 0], atol=1e-15)

    def test_plus45_through_bpi(self):
        # (|H>+|V>)(|1>-|2>)/2 expands to (phi- - psi-)/sqrt(2) by hand
        state = apply_lon(PathSetting.BPI, bb84_state(Bb84Setting(Basis.DIAGONAL, 0)))
        np.testing.assert_allclose(hybrid_bell_expand(state), [0, SQ2, 0, -SQ2], atol=1e-15)

    def test_coefficients_are_normalized(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            state = PureState(haar_amplitudes(4, rng), ("pol", "path"))
            coeffs = hybrid_bell_expand(state)
            assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(1.0, abs=1e-12)


class TestReceiverState:
    def test_equals_sender_state_for_h_input(self):
        source = VirtualSource()
        sigma = bb84_state(Bb84Setting(Basis.RECTILINEAR, 0))
        assert trace_distance(rho_bob(sigma, source), rho_alice(source)) < 1e-12

    def test_identical_for_h_and_v(self):
        source = VirtualSource()
        r_h = rho_bob(bb84_state(Bb84Setting(Basis.RECTILINEAR, 0)), source)
        r_v = rho_bob(bb84_state(Bb84Setting(Basis.RECTILINEAR, 1)), source)
        assert trace_distance(r_h, r_v) < 1e-12

    def test_input_independent_over_haar_samples(self):
        source = VirtualSource()
        target = rho_alice(source)
        rng = np.random.default_rng(13)
        worst = 0.0
        for _ in range(300):
            worst = max(worst, trace_distance(rho_bob(haar_qubit(rng), source), target))
        assert worst < 1e-12

    def test_rank_two(self):
        eigs = rho_alice(VirtualSource()).eigenvalues()
        assert np.sum(eigs > 1e-12) == 2

    def test_mixed_input(self):
        source = VirtualSource()
        mixed = DensityMatrix(np.array([[0.7, 0.1], [0.1, 0.3]], dtype=complex))
        assert trace_distance(rho_bob(mixed, source), rho_alice(source)) < 1e-12

    def test_nonuniform_probabilities(self):
        source = VirtualSource((0.4, 0.3, 0.2, 0.1))
        rng = np.random.default_rng(19)
        target = rho_alice(source)
        for _ in range(50):
            assert trace_distance(rho_bob(haar_qubit(rng), source), target) < 1e-12

    def test_basis_independence_of_spectrum(self):
        source = VirtualSource()
        rng = np.random.default_rng(29)
        ref = rho_bob(haar_qubit(rng), source).eigenvalues()
        for _ in range(50):
            rotated = rho_bob(haar_qubit(rng), source, register_basis=random_unitary(4, rng))
            assert np.max(np.abs(rotated.eigenvalues() - ref)) < 1e-12

    def test_corruption_hook_breaks_identity(self):
        source = VirtualSource()
        sigma = bb84_state(Bb84Setting(Basis.DIAGONAL, 0))
        broken = rho_bob(sigma, source, _corrupt_path_c_sign=True)
        assert trace_distance(broken, rho_alice(source)) > 1e-3

    def test_bad_probabilities_rejected(self):
        with pytest.raises(ValueError):
            VirtualSource((0.5, 0.5, 0.5, -0.5))
        with pytest.raises(ValueError):
            VirtualSource((0.5, 0.4, 0.05, 0.04))


class TestFlipStructure:
    def test_matched_pairs_fill_expected_detector_pair(self):
        # Same-bit pairs sit on the no-flip detectors, different-bit pairs on
        # the flip detectors, exactly as the flip table demands.
        for alice in ALICE_SETTINGS:
            for path in PATHS:
                if alice.basis is not path.basis:
                    continue
                dist = np.abs(hybrid_bell_expand(apply_lon(path, bb84_state(alice)))) ** 2
                pair = agreement_detectors(alice, path)
                on_pair = sum(dist[i - 1] for i in pair)
                assert on_pair == pytest.approx(1.0, abs=1e-12)
                np.testing.assert_allclose(sorted(dist), [0, 0, 0.5, 0.5], atol=1e-12)

    def test_agreement_requires_matched_bases(self):
        with pytest.raises(ValueError, match="matched"):
            agreement_detectors(Bb84Setting(Basis.RECTILINEAR, 0), PathSetting.B0)
