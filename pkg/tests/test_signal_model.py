"""Tests for snapshot generation, covariance estimation and smoothing."""

import math

import numpy as np
import pytest

from sourcecount.linalg import hermitian_eig, is_hermitian, exchange_conjugate
from sourcecount.signal_model import (
    Scenario,
    fbss_covariance,
    generate_snapshots,
    generate_sources,
    sample_covariance,
    steering_vector,
)


def scenario(m=10, n=20, k=3, doas=None, snr_db=5.0, coherent_map=None):
    if doas is None:
        doas = tuple(0.2 + 0.5 * i for i in range(k))
    return Scenario(m, n, k, tuple(doas), snr_db, coherent_map)


class TestSteeringVector:
    def test_broadside_is_all_ones(self):
        assert np.allclose(steering_vector(0.0, 8), np.ones(8))

    def test_endfire_two_elements(self):
        v = steering_vector(math.pi / 2, 2)
        assert np.allclose(v, [1.0, -1.0])

    def test_matches_scalar_evaluation(self):
        theta, m = math.pi / 6, 3
        v = steering_vector(theta, m)
        expected = [np.exp(1j * math.pi * i * math.sin(theta)) for i in range(m)]
        assert np.allclose(v, expected, atol=1e-15)
        assert np.allclose(np.abs(v), 1.0)


class TestScenarioValidation:
    def test_rejects_too_many_sources(self):
        with pytest.raises(ValueError):
            scenario(m=4, k=4, doas=(0.1, 0.2, 0.3, 0.4))

    def test_rejects_duplicate_doas(self):
        with pytest.raises(ValueError):
            scenario(k=2, doas=(0.5, 0.5))

    def test_rejects_copy_of_a_coherent_source(self):
        with pytest.raises(ValueError):
            scenario(k=3, coherent_map={1: 0, 2: 1})

    def test_noise_variance(self):
        assert scenario(snr_db=0.0).noise_variance == 1.0
        assert scenario(snr_db=10.0).noise_variance == pytest.approx(0.1)
        assert scenario(snr_db=math.inf).noise_variance == 0.0


class TestGenerateSources:
    def test_empty_for_zero_sources(self):
        s = generate_sources(scenario(k=0, doas=()), np.random.default_rng(0))
        assert s.shape == (0, 20)

    def test_coherent_rows_identical(self):
        sc = scenario(k=2, coherent_map={1: 0})
        s = generate_sources(sc, np.random.default_rng(0))
        assert np.array_equal(s[0], s[1])

    def test_unit_power_and_independence(self):
        # Monte-Carlo oracle: empirical source covariance approaches I at
        # large snapshot count.
        sc = scenario(k=3, n=10000)
        s = generate_sources(sc, np.random.default_rng(123))
        emp = (s @ s.conj().T) / sc.num_snapshots
        assert np.linalg.norm(emp - np.eye(3)) <= 0.05


class TestGenerateSnapshots:
    def test_noise_free_single_source_is_rank_one(self):
        sc = scenario(k=1, doas=(0.7,), snr_db=math.inf)
        batch = generate_snapshots(sc, np.random.default_rng(0))
        a = steering_vector(0.7, sc.num_antennas)
        # every snapshot column must be proportional to the steering vector
        coeff = batch.data[0, :] / a[0]
        assert np.allclose(batch.data, np.outer(a, coeff), atol=1e-12)

    def test_pure_noise_power(self):
        sc = scenario(k=0, doas=(), n=10000, snr_db=0.0)
        batch = generate_snapshots(sc, np.random.default_rng(5))
        power = np.mean(np.abs(batch.data) ** 2)
        assert abs(power - 1.0) <= 0.05

    def test_shape(self):
        batch = generate_snapshots(scenario(m=10, n=20, k=3), np.random.default_rng(1))
        assert batch.data.shape == (10, 20)

    def test_seeded_determinism(self):
        sc = scenario()
        b1 = generate_snapshots(sc, np.random.default_rng(99))
        b2 = generate_snapshots(sc, np.random.default_rng(99))
        assert np.array_equal(b1.data, b2.data)


class TestSampleCovariance:
    def test_single_snapshot_outer_product(self):
        r_vec = np.array([[1 + 1j], [2 - 1j]])
        r = sample_covariance(r_vec)
        assert np.allclose(r, r_vec @ r_vec.conj().T)

    def test_noise_free_rank_one_limit(self):
        sc = scenario(k=1, doas=(0.4,), n=5000, snr_db=math.inf)
        r = sample_covariance(generate_snapshots(sc, np.random.default_rng(2)))
        w = hermitian_eig(r).eigenvalues
        assert w[0] == pytest.approx(sc.num_antennas, rel=0.1)
        assert np.all(w[1:] <= 1e-9 * w[0])

    def test_zero_snapshots_give_zero_matrix(self):
        r = sample_covariance(np.zeros((4, 7), dtype=complex))
        assert np.array_equal(r, np.zeros((4, 4)))

    def test_hermitian_and_psd(self):
        for seed in range(5):
            batch = generate_snapshots(scenario(), np.random.default_rng(seed))
            r = sample_covariance(batch)
            assert is_hermitian(r)
            assert np.all(hermitian_eig(r).eigenvalues >= 0.0)

    def test_trace_tracks_signal_plus_noise_power(self):
        sc = scenario(k=1, doas=(0.9,), n=10000, snr_db=0.0)
        r = sample_covariance(generate_snapshots(sc, np.random.default_rng(4)))
        level = np.trace(r).real / sc.num_antennas
        assert level == pytest.approx(2.0, rel=0.05)  # unit source + unit noise

    def test_statistical_rank_equals_source_count(self):
        # noise-free, well-separated sources: exactly K eigenvalues above
        # 1e-3 of the top one
        for k, seed in ((1, 0), (2, 1), (4, 2)):
            doas = tuple(-1.0 + 2.0 * i / k for i in range(k))
            sc = scenario(k=k, doas=doas, n=10000, snr_db=math.inf)
            r = sample_covariance(generate_snapshots(sc, np.random.default_rng(seed)))
            w = hermitian_eig(r).eigenvalues
            assert int(np.sum(w > 1e-3 * w[0])) == k

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample_covariance(np.zeros((4, 0), dtype=complex))


class TestFbssCovariance:
    def test_full_subarray_collapses_to_single_term(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal((6, 30)) + 1j * rng.standard_normal((6, 30))
        r = sample_covariance(x)
        out = fbss_covariance(r, 6)
        assert np.allclose(out, 0.5 * (r + exchange_conjugate(r)))

    def test_identity_invariant(self):
        for m0 in (1, 3, 5):
            out = fbss_covariance(np.eye(5, dtype=complex), m0)
            assert np.allclose(out, np.eye(m0))

    def test_decorrelates_coherent_pair(self):
        sc = Scenario(10, 200, 2, (0.3, 1.1), math.inf, {1: 0})
        r = sample_covariance(generate_snapshots(sc, np.random.default_rng(7)))
        w_full = hermitian_eig(r).eigenvalues
        assert int(np.sum(w_full > 1e-6 * w_full[0])) == 1  # rank-deficient
        w_smooth = hermitian_eig(fbss_covariance(r, 5)).eigenvalues
        assert w_smooth[1] > 1e-6 * w_smooth[0]  # rank restored

    def test_preserves_psd(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            x = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
            r = sample_covariance(x)
            w = hermitian_eig(fbss_covariance(r, 4)).eigenvalues
            assert np.all(w >= -1e-9 * np.trace(r).real)

    def test_output_is_hermitian(self):
        batch = generate_snapshots(scenario(), np.random.default_rng(3))
        out = fbss_covariance(sample_covariance(batch), 5)
        assert is_hermitian(out)

    def test_subarray_size_bounds(self):
        r = np.eye(4, dtype=complex)
        with pytest.raises(ValueError):
            fbss_covariance(r, 0)
        with pytest.raises(ValueError):
            fbss_covariance(r, 5)
