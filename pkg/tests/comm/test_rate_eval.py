import math
import unittest

import jax
import jax.numpy as jnp

from isac_drt.comm.rate_eval import (
    CommChannel,
    gaussian_rate,
    mean_covariance,
    mixture_rate,
    rate_records,
    water_filling,
)
from isac_drt.isac_drt import stream_key
from isac_drt.radar.detection import DetectionCurve, sensing_optimal_distribution
from isac_drt.radar.scenario import RadarScenario
from isac_drt.tradeoff.mixture import Atom, DesignWeight, MixedStrategy


def covariance_mix(covariances, weights):
    atoms = tuple(
        Atom(w, float(jnp.real(jnp.trace(R))), (DesignWeight(k, 1.0),), R)
        for k, (R, w) in enumerate(zip(covariances, weights))
    )
    return MixedStrategy(atoms, sum(a.weight * a.xi for a in atoms))


class TestGaussianRate(unittest.TestCase):
    def test_zero_covariance(self) -> None:
        channel = CommChannel(jnp.ones((2, 2)))
        self.assertEqual(gaussian_rate(channel, jnp.zeros((2, 2))), 0.0)

    def test_scalar_channel(self) -> None:
        channel = CommChannel(jnp.eye(1))
        self.assertAlmostEqual(gaussian_rate(channel, 3.0 * jnp.eye(1)), 2.0)

    def test_rank_one(self) -> None:
        h_c = jax.random.normal(stream_key(1, "h_c"), (2, 3), dtype=jnp.complex128)
        channel = CommChannel(h_c, noise_psd_c=0.5)
        u = jnp.array([1.0, 1j, 1.0]) / math.sqrt(3.0)
        R = 2.0 * jnp.outer(u, jnp.conj(u))
        gain = float(jnp.linalg.norm(h_c @ u) ** 2)
        self.assertAlmostEqual(
            gaussian_rate(channel, R), math.log2(1.0 + 2.0 * gain / 0.5), places=10
        )

    def test_invalid_channel(self) -> None:
        with self.assertRaises(ValueError):
            CommChannel(jnp.eye(2), noise_psd_c=0.0)
        with self.assertRaises(ValueError):
            CommChannel(jnp.array([[jnp.nan]]))


class TestMixtureRate(unittest.TestCase):
    def test_single_atom(self) -> None:
        channel = CommChannel(jnp.array([[1.0, 0.5]]))
        R = jnp.diag(jnp.array([1.0, 2.0]))
        mix = covariance_mix([R], [1.0])
        self.assertAlmostEqual(mixture_rate(channel, mix), gaussian_rate(channel, R))

    def test_atom_entropy(self) -> None:
        channel = CommChannel(jnp.eye(1))
        mix = covariance_mix([jnp.eye(1), jnp.eye(1)], [0.5, 0.5])
        plain = mixture_rate(channel, mix)
        bonus = mixture_rate(channel, mix, include_atom_entropy=True, snapshots=10)
        self.assertAlmostEqual(bonus - plain, 0.1)
        with self.assertRaises(ValueError):
            mixture_rate(channel, mix, snapshots=0)

    def test_rate_loss_of_sensing_optimal_strategy(self) -> None:
        h_s = jnp.array([[1.0, 0.3], [0.2, 0.5]])
        channel = CommChannel(jnp.array([[0.4, 1.0], [1.0, -0.2]]))
        scenario = RadarScenario.from_channel(h_s, pfa=1e-5)
        budget = 0.5 * DetectionCurve.from_scenario(scenario).p_t
        mix = sensing_optimal_distribution(scenario.with_budget(budget))
        self.assertEqual(mix.n_atoms, 2)
        heuristic = mixture_rate(channel, mix)
        capacity = gaussian_rate(channel, water_filling(channel, budget))
        self.assertLess(heuristic, capacity)
        self.assertLessEqual(
            heuristic, gaussian_rate(channel, mean_covariance(mix)) + 1e-12
        )

    def test_rate_loss_at_unit_budget(self) -> None:
        for seed in range(3):
            k_sense, k_comm = jax.random.split(stream_key(seed, "rate_unit"))
            h_s = jax.random.normal(k_sense, (4, 4), dtype=jnp.complex128)
            h_c = jax.random.normal(k_comm, (2, 4), dtype=jnp.complex128)
            scenario = RadarScenario.from_channel(h_s, pfa=1e-5)
            channel = CommChannel(h_c, 1.0)
            mix = sensing_optimal_distribution(scenario.with_budget(1.0))
            capacity = gaussian_rate(channel, water_filling(channel, 1.0))
            self.assertLess(mixture_rate(channel, mix), capacity)

    def test_rate_records(self) -> None:
        channel = CommChannel(jnp.eye(1))
        mix = covariance_mix([jnp.zeros((1, 1)), 4.0 * jnp.eye(1)], [0.5, 0.5])
        rows = rate_records(channel, mix, snapshots=1)
        self.assertEqual(
            [r["strategy"] for r in rows],
            [
                "sensing_optimal",
                "sensing_optimal_atom_entropy",
                "mean_covariance",
                "water_filling",
            ],
        )
        self.assertTrue(all(r["heuristic"] for r in rows))
        rates = {r["strategy"]: r["rate_bits"] for r in rows}
        self.assertAlmostEqual(rates["sensing_optimal"], 0.5 * math.log2(5.0))
        self.assertAlmostEqual(rates["mean_covariance"], math.log2(3.0))
        self.assertAlmostEqual(rates["water_filling"], math.log2(3.0))


class TestWaterFilling(unittest.TestCase):
    def test_single_mode(self) -> None:
        channel = CommChannel(jnp.array([[1.0, 0.0]]))
        R = water_filling(channel, 2.0)
        self.assertTrue(jnp.allclose(R, jnp.diag(jnp.array([2.0, 0.0])), atol=1e-12))

    def test_equal_modes(self) -> None:
        R = water_filling(CommChannel(jnp.eye(2)), 2.0)
        self.assertTrue(jnp.allclose(R, jnp.eye(2), atol=1e-12))

    def test_strong_mode_first(self) -> None:
        channel = CommChannel(jnp.diag(jnp.array([2.0, 1.0])))
        # gains 4 and 1: the weak mode opens once 1/1 - 1/4 of power is spent
        small = water_filling(channel, 0.5)
        expected = jnp.diag(jnp.array([0.5, 0.0]))
        self.assertTrue(jnp.allclose(small, expected, atol=1e-12))
        large = water_filling(channel, 1.75)
        expected = jnp.diag(jnp.array([1.25, 0.5]))
        self.assertTrue(jnp.allclose(large, expected, atol=1e-12))

    def test_degenerate_inputs(self) -> None:
        silent = water_filling(CommChannel(jnp.eye(2)), 0.0)
        self.assertTrue(jnp.allclose(silent, jnp.zeros((2, 2))))
        R = water_filling(CommChannel(jnp.zeros((1, 2))), 1.0)
        self.assertTrue(jnp.allclose(R, 0.5 * jnp.eye(2)))
        with self.assertRaises(ValueError):
            water_filling(CommChannel(jnp.eye(2)), -1.0)

    def test_capacity_beats_other_covariances(self) -> None:
        h_c = jax.random.normal(stream_key(2, "h_c"), (2, 4), dtype=jnp.complex128)
        channel = CommChannel(h_c)
        capacity = gaussian_rate(channel, water_filling(channel, 1.0))
        a = jax.random.normal(stream_key(2, "cov"), (20, 4, 4), dtype=jnp.complex128)
        for k in range(20):
            R = a[k] @ jnp.conj(a[k]).T
            R = R / jnp.real(jnp.trace(R))
            self.assertLessEqual(gaussian_rate(channel, R), capacity + 1e-12)
