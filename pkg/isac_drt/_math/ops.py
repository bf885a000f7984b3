import logging
import math
from typing import Sequence, Tuple, Union

import jax
import jax.numpy as jnp
import numpy as np

from isac_drt._math.exceptions import (
    NonHermitianMatrixError,
    NotPositiveSemidefiniteError,
)
from isac_drt.constants import (
    HERMITIAN_TOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
    PSD_TOL,
)

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()

MatrixLike = Union[jax.Array, np.ndarray, Sequence[Sequence[complex]]]


def as_matrix(matrix: MatrixLike) -> jax.Array:
    """
    Converts the input into a two dimensional complex128 array

    Parameters
    ----------
    matrix: MatrixLike
        Nested sequence or array

    Returns
    -------
    jax.Array
        Complex matrix
    """
    arr = jnp.asarray(matrix, dtype=jnp.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValueError("Expected a two dimensional matrix")
    return arr


def dagger(matrix: jax.Array) -> jax.Array:
    return jnp.conj(matrix).T


def hermitian_residual(matrix: jax.Array) -> float:
    """
    Relative distance of the matrix from its Hermitian part
    """
    norm = float(jnp.linalg.norm(matrix))
    return float(jnp.linalg.norm(matrix - dagger(matrix))) / max(1.0, norm)


def check_hermitian(matrix: MatrixLike, tol: float = HERMITIAN_TOL) -> jax.Array:
    """
    Validates that the matrix is square and Hermitian and returns its exact
    Hermitian part.

    Raises
    ------
    NonHermitianMatrixError
        If the matrix is not square or its anti-Hermitian part exceeds tol
    """
    arr = as_matrix(matrix)
    if arr.shape[0] != arr.shape[1]:
        raise NonHermitianMatrixError(f"Matrix of shape {arr.shape} is not square")
    residual = hermitian_residual(arr)
    if residual > tol:
        raise NonHermitianMatrixError(
            f"Matrix is not Hermitian (relative residual {residual:.3e})"
        )
    return 0.5 * (arr + dagger(arr))


def check_psd(matrix: MatrixLike, tol: float = PSD_TOL) -> jax.Array:
    """
    Validates that the matrix is Hermitian positive semidefinite, i.e. that every
    eigenvalue is at least -tol * trace.

    Returns
    -------
    jax.Array
        Hermitian part of the matrix
    """
    arr = check_hermitian(matrix)
    eigenvalues = jnp.linalg.eigvalsh(arr)
    trace = float(jnp.real(jnp.trace(arr)))
    smallest = float(eigenvalues[0])
    if smallest < -tol * abs(trace):
        raise NotPositiveSemidefiniteError(
            f"Matrix has negative eigenvalue {smallest:.3e}"
        )
    return arr


def off_diagonal_norm(matrix: jax.Array) -> float:
    off = matrix - jnp.diag(jnp.diag(matrix))
    return float(jnp.linalg.norm(off))


def jacobi_eigh(
    matrix: MatrixLike,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> Tuple[jax.Array, jax.Array]:
    r"""
    Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Every rotation first removes the phase of the pivot element
    :math:`a_{pq}=|a_{pq}|e^{i\phi}` and then applies the real plane rotation
    with :math:`\tan 2\theta = 2|a_{pq}|/(a_{qq}-a_{pp})`, so the combined
    unitary acting on the (p, q) plane is

    .. math::
        J = \begin{pmatrix} c & s \\ -s e^{-i\phi} & c e^{-i\phi}\end{pmatrix}

    Parameters
    ----------
    matrix: MatrixLike
        Hermitian matrix
    tol: float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        tol times the Frobenius norm of the matrix
    max_sweeps: int
        Maximal number of full sweeps over the upper triangle

    Returns
    -------
    Tuple[jax.Array, jax.Array]
        Eigenvalues in ascending order and the unitary matrix whose columns
        are the matching eigenvectors

    Notes
    -----
    Intended for the small matrices of the radar model; every rotation updates
    only two rows and two columns.
    """
    a = check_hermitian(matrix)
    n = a.shape[0]
    v = jnp.eye(n, dtype=jnp.complex128)
    scale = float(jnp.linalg.norm(a))
    if scale == 0.0:
        return jnp.zeros(n), v

    for sweep in range(max_sweeps):
        off = off_diagonal_norm(a)
        logger.debug("Jacobi sweep %s off-diagonal norm %s", sweep, off)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                r = abs(apq)
                if r <= tol * scale * 1e-3:
                    continue
                phase = apq / r
                app = float(jnp.real(a[p, p]))
                aqq = float(jnp.real(a[q, q]))
                theta = 0.5 * math.atan2(2.0 * r, aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                rot = jnp.array(
                    [[c, s], [-s * phase.conjugate(), c * phase.conjugate()]],
                    dtype=jnp.complex128,
                )
                idx = jnp.array([p, q])
                a = a.at[:, idx].set(a[:, idx] @ rot)
                a = a.at[idx, :].set(dagger(rot) @ a[idx, :])
                v = v.at[:, idx].set(v[:, idx] @ rot)
    else:
        off = off_diagonal_norm(a)
        if off > tol * scale:
            logger.warning(
                "Jacobi eigensolver stopped after %s sweeps (off-diagonal %s)",
                max_sweeps,
                off,
            )

    eigenvalues = jnp.real(jnp.diag(a))
    order = jnp.argsort(eigenvalues)
    return eigenvalues[order], v[:, order]


def hermitian_sqrt(matrix: MatrixLike) -> jax.Array:
    """
    Hermitian square root of a positive semidefinite matrix, tiny negative
    eigenvalues are clipped to zero
    """
    arr = check_hermitian(matrix)
    eigenvalues, eigenvectors = jnp.linalg.eigh(arr)
    roots = jnp.sqrt(jnp.clip(eigenvalues, 0.0, None))
    return (eigenvectors * roots) @ dagger(eigenvectors)


def trace_product(a: jax.Array, b: jax.Array) -> float:
    """
    Real part of Tr(a b), computed without forming the product
    """
    return float(jnp.real(jnp.sum(a * b.T)))
