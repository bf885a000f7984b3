"""
Monte Carlo simulation of the MIMO radar signal model and the CFAR detector.

Under H1 a block of T snapshots reads Y = a H_s X + W, where a is circularly
symmetric complex Gaussian with E|a|^2 = mean_square_amp (Rayleigh amplitude,
uniform phase) and W has i.i.d. CN(0, N0) entries. Under H0 the target term is
absent. The detector compares Z = |sum_i y(i)^H H_s x(i)|^2 with the CFAR
threshold.

Trial i of a hypothesis uses the key fold_in(stream_base_key(seed, stream), i),
so reports only depend on the seed and the number of trials.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import jax
import jax.numpy as jnp
from scipy import stats

from isac_drt._math.ops import check_psd, dagger
from isac_drt.constants import (
    CI_LEVEL,
    KS_CRITICAL_1PCT,
    PSD_TOL,
    WILSON_HIT_THRESHOLD,
)
from isac_drt.isac_drt import Config, stream_base_key, stream_key
from isac_drt.radar.covariance import illumination
from isac_drt.radar.detection import pd_closed_form, threshold_for_pfa
from isac_drt.radar.exceptions import RankDeficientSnapshotsError
from isac_drt.radar.scenario import RadarScenario
from isac_drt.tradeoff.mixture import MixedStrategy

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


class HypothesisType(Enum):
    """
    Target absent (H0) or present (H1)
    """

    H0 = ("h0", 0)
    H1 = ("h1", 1)

    @property
    def stream(self) -> str:
        return self.value[0]


def synthesize_waveform(
    covariance: jax.Array, snapshots: int, key: jax.Array
) -> jax.Array:
    """
    Waveform block X (M x T) whose sample covariance X X^H / T equals R.

    With R = V diag(l) V^H restricted to its rank r, X = sqrt(T) V diag(l)^(1/2)
    Q^H, where Q is a T x r matrix with orthonormal columns obtained from the QR
    decomposition of a complex Gaussian matrix.

    Parameters
    ----------
    covariance: jax.Array
        Hermitian positive semidefinite covariance R
    snapshots: int
        Block length T
    key: jax.Array
        Random key for Q

    Returns
    -------
    jax.Array
        Waveform block

    Raises
    ------
    RankDeficientSnapshotsError
        If T is smaller than the rank of R
    """
    R = check_psd(covariance)
    M = R.shape[0]
    values, vectors = jnp.linalg.eigh(R)
    cutoff = PSD_TOL * max(1.0, float(jnp.max(jnp.abs(values))))
    keep = [i for i in range(M) if float(values[i]) > cutoff]
    rank = len(keep)
    if rank == 0:
        return jnp.zeros((M, snapshots), dtype=jnp.complex128)
    if snapshots < rank:
        raise RankDeficientSnapshotsError(
            f"{snapshots} snapshots cannot realize a covariance of rank {rank}"
        )
    idx = jnp.array(keep)
    gaussian = jax.random.normal(key, (snapshots, rank), dtype=jnp.complex128)
    q, r = jnp.linalg.qr(gaussian)
    # fix the column phases so Q is Haar distributed
    phases = jnp.diag(r) / jnp.abs(jnp.diag(r))
    q = q * phases
    roots = jnp.sqrt(values[idx])
    return math.sqrt(snapshots) * (vectors[:, idx] * roots) @ dagger(q)


@dataclass(frozen=True)
class SimConfig:
    """
    Monte Carlo setup for one transmit covariance

    Attributes
    ----------
    scenario: RadarScenario
        Detection problem
    covariance: jax.Array
        Transmit covariance R, realized exactly by the waveform
    trials: int
        Number of trials
    master_seed: int
        Seed of all random streams
    batch_size: Optional[int]
        Trials per vectorized batch, defaults to Config().mc_batch_size
    """

    scenario: RadarScenario
    covariance: jax.Array
    trials: int
    master_seed: int
    batch_size: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "covariance", check_psd(self.covariance))
        if self.trials < 1:
            raise ValueError("At least one trial is required")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("Batch size has to be positive")

    @property
    def illumination(self) -> float:
        return illumination(self.scenario, self.covariance)

    @property
    def rho(self) -> float:
        return self.scenario.snr_scale * self.illumination

    @property
    def threshold(self) -> float:
        return threshold_for_pfa(self.scenario, self.covariance)

    def waveform(self) -> jax.Array:
        key = stream_key(self.master_seed, "waveform")
        return synthesize_waveform(self.covariance, self.scenario.snapshots, key)

    def echo(self) -> jax.Array:
        """
        Noise free echo H_s X of a unit amplitude target
        """
        return self.scenario.sensing_channel @ self.waveform()

    def expected_z_mean(self, hypothesis: HypothesisType) -> float:
        T = self.scenario.snapshots
        noise_term = T * self.scenario.noise_psd * self.illumination
        if hypothesis is HypothesisType.H0:
            return noise_term
        return self.scenario.mean_square_amp * (T * self.illumination) ** 2 + noise_term


@dataclass(frozen=True)
class McReport:
    """
    Outcome of a Monte Carlo estimate

    Attributes
    ----------
    hypothesis: str
        "h0", "h1" or "mixture"
    seed: int
        Master seed
    trials: int
        Number of trials
    hits: int
        Number of detections
    empirical_prob: float
        hits / trials
    ci_low: float
        Lower end of the confidence interval
    ci_high: float
        Upper end of the confidence interval
    target_prob: float
        Closed form probability
    z_mean_h0: Optional[float]
        Sample mean of the statistic under H0
    z_mean_h1: Optional[float]
        Sample mean of the statistic under H1
    z_std_error: Optional[float]
        Standard error of the sample mean
    expected_z_mean: Optional[float]
        Closed form mean of the statistic
    """

    hypothesis: str
    seed: int
    trials: int
    hits: int
    empirical_prob: float
    ci_low: float
    ci_high: float
    target_prob: float
    z_mean_h0: Optional[float] = None
    z_mean_h1: Optional[float] = None
    z_std_error: Optional[float] = None
    expected_z_mean: Optional[float] = field(default=None)

    @property
    def ci_half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    @property
    def binomial_sigma(self) -> float:
        p = self.target_prob
        return math.sqrt(p * (1.0 - p) / self.trials)

    def within_sigmas(self, n_sigma: float = 3.0) -> bool:
        deviation = abs(self.empirical_prob - self.target_prob)
        return deviation <= n_sigma * self.binomial_sigma

    def record(self) -> Dict[str, object]:
        return {
            "hypothesis": self.hypothesis,
            "seed": self.seed,
            "trials": self.trials,
            "hits": self.hits,
            "empirical": self.empirical_prob,
            "target": self.target_prob,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "ci_half_width": self.ci_half_width,
            "z_mean_h0": self.z_mean_h0,
            "z_mean_h1": self.z_mean_h1,
            "z_std_error": self.z_std_error,
            "expected_z_mean": self.expected_z_mean,
        }


def confidence_interval(
    hits: int, trials: int, level: float = CI_LEVEL
) -> Tuple[float, float]:
    """
    Normal approximation interval of a binomial proportion, the Wilson score
    interval when there are fewer than 30 hits
    """
    z = float(stats.norm.ppf(0.5 + 0.5 * level))
    p = hits / trials
    if hits < WILSON_HIT_THRESHOLD:
        denom = 1.0 + z**2 / trials
        center = (p + z**2 / (2 * trials)) / denom
        half = z / denom * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    else:
        center = p
        half = z * math.sqrt(p * (1 - p) / trials)
    return max(0.0, center - half), min(1.0, center + half)


@jax.jit
def _batch_statistics(
    keys: jax.Array,
    echo: jax.Array,
    amp_std: jax.Array,
    noise_std: jax.Array,
) -> jax.Array:
    def trial(key: jax.Array) -> jax.Array:
        k_amp, k_noise = jax.random.split(key)
        a = amp_std * jax.random.normal(k_amp, (), dtype=jnp.complex128)
        w = noise_std * jax.random.normal(k_noise, echo.shape, dtype=jnp.complex128)
        y = a * echo + w
        return jnp.abs(jnp.sum(jnp.conj(y) * echo)) ** 2

    return jax.vmap(trial)(keys)


def _trial_keys(base: jax.Array, start: int, stop: int) -> jax.Array:
    return jax.vmap(lambda i: jax.random.fold_in(base, i))(jnp.arange(start, stop))


def _batches(trials: int, batch_size: Optional[int]) -> List[Tuple[int, int]]:
    size = batch_size if batch_size is not None else Config().mc_batch_size
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def _statistics(
    scenario: RadarScenario,
    echo: jax.Array,
    hypothesis: HypothesisType,
    base: jax.Array,
    start: int,
    stop: int,
) -> jax.Array:
    amp = (
        math.sqrt(scenario.mean_square_amp)
        if hypothesis is HypothesisType.H1
        else 0.0
    )
    return _batch_statistics(
        _trial_keys(base, start, stop),
        echo,
        jnp.asarray(amp),
        jnp.asarray(math.sqrt(scenario.noise_psd)),
    )


def run_statistic(
    config: SimConfig, hypothesis: HypothesisType, trial: int = 0
) -> float:
    """
    Test statistic Z of a single trial

    Parameters
    ----------
    config: SimConfig
        Simulation setup, its master seed selects the random streams
    hypothesis: HypothesisType
        Whether the target is present
    trial: int
        Trial index within the hypothesis stream

    Returns
    -------
    float
        Z = |sum_i y(i)^H H_s x(i)|^2
    """
    base = stream_base_key(config.master_seed, hypothesis.stream)
    z = _statistics(
        config.scenario, config.echo(), hypothesis, base, trial, trial + 1
    )
    return float(z[0])


def _estimate(config: SimConfig, hypothesis: HypothesisType) -> McReport:
    threshold = config.threshold
    base = stream_base_key(config.master_seed, hypothesis.stream)
    echo = config.echo()
    hits = 0
    z_sum = 0.0
    z_sq_sum = 0.0
    for start, stop in _batches(config.trials, config.batch_size):
        z = _statistics(config.scenario, echo, hypothesis, base, start, stop)
        hits += int(jnp.sum(z > threshold))
        z_sum += float(jnp.sum(z))
        z_sq_sum += float(jnp.sum(z**2))
        logger.debug("Trials %s-%s of %s: %s hits", start, stop, hypothesis, hits)

    n = config.trials
    z_mean = z_sum / n
    variance = max(0.0, z_sq_sum / n - z_mean**2) * n / max(1, n - 1)
    if hypothesis is HypothesisType.H0:
        target = config.scenario.pfa
    else:
        target = pd_closed_form(config.rho, config.scenario.pfa)
    ci_low, ci_high = confidence_interval(hits, n)
    report = McReport(
        hypothesis=hypothesis.stream,
        seed=config.master_seed,
        trials=n,
        hits=hits,
        empirical_prob=hits / n,
        ci_low=ci_low,
        ci_high=ci_high,
        target_prob=target,
        z_mean_h0=z_mean if hypothesis is HypothesisType.H0 else None,
        z_mean_h1=z_mean if hypothesis is HypothesisType.H1 else None,
        z_std_error=math.sqrt(variance / n),
        expected_z_mean=config.expected_z_mean(hypothesis),
    )
    logger.info(
        "Monte Carlo %s: %s/%s hits, empirical %s, closed form %s",
        hypothesis.stream,
        hits,
        n,
        report.empirical_prob,
        target,
    )
    return report


def estimate_pd(config: SimConfig) -> McReport:
    """
    Empirical detection probability under H1 against pfa ** (1 / (1 + rho))

    Raises
    ------
    TargetUnobservableError
        If the covariance does not illuminate the target
    """
    return _estimate(config, HypothesisType.H1)


def estimate_pfa(config: SimConfig) -> McReport:
    """
    Empirical false alarm probability under H0 against the CFAR design value
    """
    return _estimate(config, HypothesisType.H0)


def estimate_mixture_pd(
    scenario: RadarScenario,
    mix: MixedStrategy,
    trials: int,
    seed: int,
    batch_size: Optional[int] = None,
) -> McReport:
    """
    Empirical detection probability of a randomized covariance strategy.

    Every trial first draws an atom according to the mixture weights and then
    runs the detector with the covariance and CFAR threshold of that atom. A
    silent atom cannot illuminate the target; its detector declares a target
    with probability pfa.

    Parameters
    ----------
    scenario: RadarScenario
        Detection problem
    mix: MixedStrategy
        Distribution over covariance atoms
    trials: int
        Number of trials
    seed: int
        Master seed
    batch_size: Optional[int]
        Trials per vectorized batch

    Returns
    -------
    McReport
        Report against the mixture average of the closed form
    """
    if trials < 1:
        raise ValueError("At least one trial is required")
    if any(atom.covariance is None for atom in mix.atoms):
        raise ValueError("Mixture atoms have to carry covariances")

    weights = jnp.array([atom.weight for atom in mix.atoms], dtype=jnp.float64)
    weights = weights / jnp.sum(weights)
    configs = [
        SimConfig(scenario, atom.covariance, trials, seed, batch_size)
        for atom in mix.atoms
    ]
    silent = [c.illumination <= 0.0 for c in configs]
    echoes = [None if s else c.echo() for s, c in zip(silent, configs)]
    thresholds = [None if s else c.threshold for s, c in zip(silent, configs)]
    target = sum(
        float(w) * pd_closed_form(c.rho, scenario.pfa)
        for w, c in zip(weights.tolist(), configs)
    )

    choice_base = stream_base_key(seed, "mixture-atom")
    trial_base = stream_base_key(seed, "mixture")
    hits = 0
    for start, stop in _batches(trials, batch_size):
        keys = _trial_keys(choice_base, start, stop)
        atom_index = jax.vmap(
            lambda k: jax.random.choice(k, weights.shape[0], p=weights)
        )(keys)
        detected = jnp.zeros(stop - start, dtype=bool)
        for k, (echo, threshold) in enumerate(zip(echoes, thresholds)):
            if echo is None or threshold is None:
                coins = jax.vmap(jax.random.uniform)(
                    _trial_keys(trial_base, start, stop)
                )
                hit = coins < scenario.pfa
            else:
                z = _statistics(
                    scenario, echo, HypothesisType.H1, trial_base, start, stop
                )
                hit = z > threshold
            detected = detected | ((atom_index == k) & hit)
        hits += int(jnp.sum(detected))

    ci_low, ci_high = confidence_interval(hits, trials)
    report = McReport(
        hypothesis="mixture",
        seed=seed,
        trials=trials,
        hits=hits,
        empirical_prob=hits / trials,
        ci_low=ci_low,
        ci_high=ci_high,
        target_prob=target,
    )
    logger.info(
        "Monte Carlo mixture: %s/%s hits, empirical %s, closed form %s",
        hits,
        trials,
        report.empirical_prob,
        target,
    )
    return report


def exponentiality_check(
    config: SimConfig,
    hypothesis: HypothesisType,
    samples: int,
    seed: Optional[int] = None,
) -> Tuple[float, float, float]:
    """
    Kolmogorov-Smirnov distance between Z / mean(Z) and the unit exponential

    Parameters
    ----------
    config: SimConfig
        Simulation setup
    hypothesis: HypothesisType
        Hypothesis to sample
    samples: int
        Number of statistics
    seed: Optional[int]
        Seed overriding the master seed of the config

    Returns
    -------
    Tuple[float, float, float]
        KS statistic, p-value and the critical value at the 1 % level
    """
    if samples < 2:
        raise ValueError("At least two samples are required")
    base = stream_base_key(
        config.master_seed if seed is None else seed, f"ks-{hypothesis.stream}"
    )
    echo = config.echo()
    z = jnp.concatenate(
        [
            _statistics(config.scenario, echo, hypothesis, base, start, stop)
            for start, stop in _batches(samples, config.batch_size)
        ]
    )
    normalized = (z / jnp.mean(z)).tolist()
    result = stats.kstest(normalized, "expon")
    critical = KS_CRITICAL_1PCT / math.sqrt(samples)
    logger.info(
        "Exponentiality of Z under %s: KS %s (critical %s)",
        hypothesis.stream,
        result.statistic,
        critical,
    )
    return float(result.statistic), float(result.pvalue), critical
