import logging
from dataclasses import dataclass
from typing import Tuple

import jax
import jax.numpy as jnp

from isac_drt._math.ops import (
    MatrixLike,
    check_hermitian,
    check_psd,
    dagger,
    jacobi_eigh,
    trace_product,
)
from isac_drt.constants import MULTIPLICITY_TOL
from isac_drt.radar.scenario import RadarScenario

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


def principal_eigen(gram: MatrixLike) -> Tuple[float, jax.Array, int]:
    """
    Largest eigenvalue of a Hermitian matrix and an orthonormal basis of its
    eigenspace, computed with cyclic Jacobi rotations.

    Parameters
    ----------
    gram: MatrixLike
        Hermitian matrix

    Returns
    -------
    Tuple[float, jax.Array, int]
        lambda_max, basis with the eigenvectors as columns, multiplicity
    """
    values, vectors = jacobi_eigh(check_hermitian(gram))
    lambda_max = float(values[-1])
    tol = MULTIPLICITY_TOL * abs(lambda_max)
    multiplicity = int(jnp.sum(values >= lambda_max - tol))
    basis = vectors[:, ::-1][:, :multiplicity]
    logger.info(
        "Principal eigenvalue %s with multiplicity %s", lambda_max, multiplicity
    )
    return lambda_max, basis, multiplicity


@dataclass(frozen=True)
class OptimalCovariance:
    """
    Covariance maximizing the illumination Tr(gram R) for a given trace

    Attributes
    ----------
    lambda_max: float
        Largest eigenvalue of the Gram matrix
    basis: jax.Array
        Orthonormal basis U_max of the principal eigenspace
    multiplicity: int
        Dimension of the principal eigenspace
    power: float
        Trace of the covariance
    allocation: Tuple[float, ...]
        Fractions of the power put on the basis vectors
    """

    lambda_max: float
    basis: jax.Array
    multiplicity: int
    power: float
    allocation: Tuple[float, ...]

    @property
    def matrix(self) -> jax.Array:
        powers = self.power * jnp.asarray(self.allocation, dtype=jnp.float64)
        return (self.basis * powers) @ dagger(self.basis)


def optimal_covariance(scenario: RadarScenario, power: float) -> OptimalCovariance:
    """
    Builds P U_max diag(allocation) U_max^H. Without an allocation the full
    power goes on the first basis vector; any allocation gives the same SNR.
    """
    if power < 0:
        raise ValueError("Power has to be nonnegative")
    lambda_max, basis, multiplicity = principal_eigen(scenario.gram)
    if scenario.allocation is None:
        allocation = (1.0,) + (0.0,) * (multiplicity - 1)
    elif len(scenario.allocation) != multiplicity:
        raise ValueError(
            f"Allocation has {len(scenario.allocation)} entries, the principal "
            f"eigenspace has dimension {multiplicity}"
        )
    else:
        allocation = scenario.allocation
    return OptimalCovariance(lambda_max, basis, multiplicity, power, allocation)


def illumination(scenario: RadarScenario, covariance: MatrixLike) -> float:
    """
    Tr(gram R) = Tr(H_s R H_s^H) of a positive semidefinite covariance
    """
    R = check_psd(covariance)
    return max(0.0, trace_product(scenario.gram, R))


def snr_of(scenario: RadarScenario, covariance: MatrixLike) -> float:
    """
    Signal to noise ratio rho of the transmit covariance

    Parameters
    ----------
    scenario: RadarScenario
        Detection problem
    covariance: MatrixLike
        Hermitian positive semidefinite covariance R

    Returns
    -------
    float
        (mean_square_amp T / N0) Tr(gram R)
    """
    return scenario.snr_scale * illumination(scenario, covariance)
