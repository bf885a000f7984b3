import random
import sys
from typing import Any, Optional

import jax
import jax.numpy as jnp

jax.config.update("jax_enable_x64", True)


class Config:
    _instance = None

    def __new__(cls, *args: Any, **kwargs: Any) -> "Config":
        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls, *args, **kwargs)
        return cls._instance

    def __init__(self) -> None:
        if not hasattr(self, "_initialized"):
            self._initialized = True  # Prevents reinitialization
            self._random_seed = random.randint(0, sys.maxsize)
            self._contact_tol = 1e-9
            self._kkt_tol = 1e-9
            self._bin_tol: Optional[float] = None
            self._mc_batch_size = 20_000

    def set_seed(self, seed: int) -> None:
        """
        For reproducability one can set a seed for random operations
        Parameters
        ----------
        seed: int
            Seed to be used by random processes
        """
        self._random_seed = seed

    @property
    def random_seed(self) -> int:
        return self._random_seed

    def derived_key(self, stream: str, index: int = 0) -> jnp.ndarray:
        """
        Returns a key that depends only on the seed, the stream name and the index.
        The same trial or fuzz case always sees the same randomness,
        independent of batching.

        Parameters
        ----------
        stream: str
            Name of the random stream (e.g. "h1", "fuzz")
        index: int
            Index within the stream (trial or case number)
        """
        return stream_key(self._random_seed, stream, index)

    @property
    def contact_tol(self) -> float:
        return self._contact_tol

    def set_contact_tol(self, tol: float) -> None:
        self._contact_tol = tol

    @property
    def kkt_tol(self) -> float:
        return self._kkt_tol

    def set_kkt_tol(self, tol: float) -> None:
        self._kkt_tol = tol

    @property
    def bin_tol(self) -> Optional[float]:
        return self._bin_tol

    def set_bin_tol(self, tol: Optional[float]) -> None:
        self._bin_tol = tol

    @property
    def mc_batch_size(self) -> int:
        return self._mc_batch_size

    def set_mc_batch_size(self, batch_size: int) -> None:
        if batch_size < 1:
            raise ValueError("Batch size has to be positive")
        self._mc_batch_size = batch_size


def stream_base_key(seed: int, stream: str) -> jnp.ndarray:
    """
    Base key of a named stream; individual draws fold their index into it
    """
    stream_id = sum(ord(ch) * 31**i for i, ch in enumerate(stream)) % (2**31 - 1)
    return jax.random.fold_in(jax.random.PRNGKey(seed), stream_id)


def stream_key(seed: int, stream: str, index: int = 0) -> jnp.ndarray:
    """
    Key for the given seed, stream name and index, built with `fold_in`
    """
    return jax.random.fold_in(stream_base_key(seed, stream), index)
