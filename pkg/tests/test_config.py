import unittest

import jax.numpy as jnp

from isac_drt.isac_drt import Config, stream_base_key, stream_key


class TestConfig(unittest.TestCase):
    def setUp(self) -> None:
        self.C = Config()
        self.seed = self.C.random_seed
        self.batch_size = self.C.mc_batch_size

    def tearDown(self) -> None:
        self.C.set_seed(self.seed)
        self.C.set_mc_batch_size(self.batch_size)

    def test_singleton(self) -> None:
        self.assertIs(Config(), self.C)

    def test_derived_key(self) -> None:
        self.C.set_seed(3)
        key = self.C.derived_key("h1", 7)
        self.assertTrue(jnp.array_equal(key, stream_key(3, "h1", 7)))
        self.assertTrue(jnp.array_equal(key, self.C.derived_key("h1", 7)))
        self.assertFalse(jnp.array_equal(key, self.C.derived_key("h0", 7)))
        self.assertFalse(jnp.array_equal(key, self.C.derived_key("h1", 8)))

    def test_stream_keys(self) -> None:
        self.assertFalse(
            jnp.array_equal(stream_base_key(1, "fuzz"), stream_base_key(2, "fuzz"))
        )

    def test_batch_size(self) -> None:
        self.C.set_mc_batch_size(10)
        self.assertEqual(Config().mc_batch_size, 10)
        with self.assertRaises(ValueError):
            self.C.set_mc_batch_size(0)
