import logging
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import jax
import jax.numpy as jnp

from isac_drt._math.ops import (
    MatrixLike,
    as_matrix,
    check_psd,
    dagger,
    hermitian_sqrt,
)

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


@dataclass(frozen=True)
class RadarScenario:
    """
    MIMO target detection problem

    Attributes
    ----------
    gram: jax.Array
        Hermitian positive semidefinite M x M matrix H_s^H H_s
    mean_square_amp: float
        Mean square target amplitude, zero gives a target free alternative
    snapshots: int
        Number of snapshots T in a coherent block
    noise_psd: float
        Noise power spectral density N0
    pfa: float
        False alarm probability in (0, 1)
    power_budget: float
        Average transmit power P
    channel: Optional[jax.Array]
        Sensing channel H_s (N x M), the Hermitian square root of the Gram
        matrix is used when omitted
    allocation: Optional[Tuple[float, ...]]
        Power fractions over the principal eigenspace when it is degenerate
    """

    gram: jax.Array
    mean_square_amp: float = 1.0
    snapshots: int = 1
    noise_psd: float = 1.0
    pfa: float = 1e-5
    power_budget: float = 0.0
    channel: Optional[jax.Array] = None
    allocation: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "gram", check_psd(self.gram))
        if self.channel is not None:
            channel = as_matrix(self.channel)
            if channel.shape[1] != self.gram.shape[0]:
                raise ValueError(
                    f"Channel of shape {channel.shape} does not match "
                    f"{self.gram.shape[0]} transmit antennas"
                )
            object.__setattr__(self, "channel", channel)
        if not self.mean_square_amp >= 0:
            raise ValueError("Mean square amplitude has to be nonnegative")
        if int(self.snapshots) != self.snapshots or self.snapshots < 1:
            raise ValueError("Number of snapshots has to be a positive integer")
        if not self.noise_psd > 0:
            raise ValueError("Noise power spectral density has to be positive")
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("False alarm probability has to lie in (0, 1)")
        if not self.power_budget >= 0:
            raise ValueError("Power budget has to be nonnegative")
        if self.allocation is not None:
            fractions = tuple(float(a) for a in self.allocation)
            if any(a < 0 for a in fractions) or sum(fractions) <= 0:
                raise ValueError("Allocation fractions have to be nonnegative")
            total = sum(fractions)
            object.__setattr__(
                self, "allocation", tuple(a / total for a in fractions)
            )

    @classmethod
    def from_channel(cls, channel: MatrixLike, **kwargs: object) -> "RadarScenario":
        """
        Builds the scenario from the sensing channel H_s, the Gram matrix is
        H_s^H H_s
        """
        h_s = as_matrix(channel)
        return cls(gram=dagger(h_s) @ h_s, channel=h_s, **kwargs)  # type: ignore

    @property
    def n_antennas(self) -> int:
        return int(self.gram.shape[0])

    @property
    def snr_scale(self) -> float:
        """
        Factor mean_square_amp * T / N0 mapping Tr(gram R) to the SNR
        """
        return self.mean_square_amp * self.snapshots / self.noise_psd

    @property
    def sensing_channel(self) -> jax.Array:
        if self.channel is not None:
            return self.channel
        return hermitian_sqrt(self.gram)

    def with_budget(self, power_budget: float) -> "RadarScenario":
        return replace(self, power_budget=power_budget)


def scalar_scenario(
    alpha: float, pfa: float, power_budget: float = 0.0
) -> RadarScenario:
    """
    Single antenna scenario whose detection curve has the slope parameter alpha
    """
    return RadarScenario(
        gram=jnp.array([[alpha]], dtype=jnp.complex128),
        pfa=pfa,
        power_budget=power_budget,
    )
