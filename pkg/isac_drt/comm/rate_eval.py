"""
Gaussian codebook rates of transmit covariances and covariance mixtures.

These rates illustrate the communication loss of the sensing-optimal strategy;
they are heuristic values, not the capacity of the randomized input law.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

import jax
import jax.numpy as jnp
from scipy.stats import entropy

from isac_drt._math.ops import MatrixLike, as_matrix, check_psd, dagger
from isac_drt.tradeoff.mixture import MixedStrategy

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


@dataclass(frozen=True)
class CommChannel:
    """
    Communication channel H_c (N_c x M) with noise power spectral density
    """

    h_c: jax.Array
    noise_psd_c: float = 1.0

    def __post_init__(self) -> None:
        h_c = as_matrix(self.h_c)
        if not bool(jnp.all(jnp.isfinite(h_c))):
            raise ValueError("Channel entries have to be finite")
        if not self.noise_psd_c > 0:
            raise ValueError("Noise power spectral density has to be positive")
        object.__setattr__(self, "h_c", h_c)

    @property
    def n_antennas(self) -> int:
        return int(self.h_c.shape[1])


def gaussian_rate(channel: CommChannel, covariance: MatrixLike) -> float:
    """
    log2 det(I + H_c R H_c^H / N) in bits per channel use

    Parameters
    ----------
    channel: CommChannel
        Communication channel
    covariance: MatrixLike
        Hermitian positive semidefinite transmit covariance

    Returns
    -------
    float
        Rate of a Gaussian codebook with covariance R
    """
    R = check_psd(covariance)
    received = channel.h_c @ R @ dagger(channel.h_c) / channel.noise_psd_c
    received = 0.5 * (received + dagger(received))
    eigenvalues = jnp.clip(jnp.linalg.eigvalsh(received), 0.0, None)
    return float(jnp.sum(jnp.log2(1.0 + eigenvalues)))


def atom_covariances(mix: MixedStrategy) -> List[jax.Array]:
    covariances = [a.covariance for a in mix.atoms if a.covariance is not None]
    if len(covariances) != mix.n_atoms:
        raise ValueError("Mixture atoms have to carry covariances")
    return [as_matrix(c) for c in covariances]


def mean_covariance(mix: MixedStrategy) -> jax.Array:
    covariances = atom_covariances(mix)
    total = jnp.zeros_like(covariances[0])
    for atom, covariance in zip(mix.atoms, covariances):
        total = total + atom.weight * covariance
    return total


def mixture_rate(
    channel: CommChannel,
    mix: MixedStrategy,
    include_atom_entropy: bool = False,
    snapshots: int = 1,
) -> float:
    """
    Weighted Gaussian codebook rate of a covariance mixture.

    With `include_atom_entropy` the entropy of the atom index divided by the
    block length is added, an optimistic value for the information carried
    by the choice of the atom.

    Parameters
    ----------
    channel: CommChannel
        Communication channel
    mix: MixedStrategy
        Distribution over covariance atoms
    include_atom_entropy: bool
        Add the atom index entropy per channel use
    snapshots: int
        Block length T over which one atom is used

    Returns
    -------
    float
        Heuristic rate in bits per channel use
    """
    if snapshots < 1:
        raise ValueError("Block length has to be positive")
    rate = sum(
        atom.weight * gaussian_rate(channel, covariance)
        for atom, covariance in zip(mix.atoms, atom_covariances(mix))
    )
    if include_atom_entropy:
        weights = [atom.weight for atom in mix.atoms]
        rate += float(entropy(weights, base=2)) / snapshots
    return rate


def water_filling(channel: CommChannel, power: float) -> jax.Array:
    """
    Capacity achieving covariance for the total power P.

    The eigenmodes of H_c^H H_c / N with gains g_k get the powers
    max(0, mu - 1 / g_k), with the water level mu chosen so that they add up to
    P. Channels without any gain receive an equal split.

    Parameters
    ----------
    channel: CommChannel
        Communication channel
    power: float
        Total transmit power

    Returns
    -------
    jax.Array
        Covariance with trace P
    """
    if power < 0:
        raise ValueError("Power has to be nonnegative")
    M = channel.n_antennas
    if power == 0:
        return jnp.zeros((M, M), dtype=jnp.complex128)
    gram = dagger(channel.h_c) @ channel.h_c / channel.noise_psd_c
    gains, modes = jnp.linalg.eigh(0.5 * (gram + dagger(gram)))
    gains_list = gains.tolist()
    scale = max(abs(g) for g in gains_list)
    if scale == 0.0:
        logger.info("Channel without gain, splitting the power equally")
        return jnp.eye(M, dtype=jnp.complex128) * (power / M)

    order = sorted(
        (k for k in range(M) if gains_list[k] > 1e-12 * scale),
        key=lambda k: gains_list[k],
        reverse=True,
    )
    active = len(order)
    while active > 0:
        inverse = [1.0 / gains_list[k] for k in order[:active]]
        level = (power + sum(inverse)) / active
        if level > inverse[-1]:
            break
        active -= 1
    powers = [0.0] * M
    for k in order[:active]:
        powers[k] = level - 1.0 / gains_list[k]
    logger.info("Water level %s over %s active modes", level, active)
    allocation = jnp.asarray(powers, dtype=jnp.float64)
    return (modes * allocation) @ dagger(modes)


def rate_records(
    channel: CommChannel, mix: MixedStrategy, snapshots: int = 1
) -> List[Dict[str, object]]:
    """
    Rows (budget, strategy, rate_bits, heuristic) comparing the mixture with
    its mean covariance and the water-filling baseline at the same mean power
    """
    budget = mix.budget
    mean_power = float(jnp.real(jnp.trace(mean_covariance(mix))))
    rows = [
        ("sensing_optimal", mixture_rate(channel, mix)),
        (
            "sensing_optimal_atom_entropy",
            mixture_rate(channel, mix, include_atom_entropy=True, snapshots=snapshots),
        ),
        ("mean_covariance", gaussian_rate(channel, mean_covariance(mix))),
        ("water_filling", gaussian_rate(channel, water_filling(channel, mean_power))),
    ]
    return [
        {"budget": budget, "strategy": s, "rate_bits": r, "heuristic": True}
        for s, r in rows
    ]
