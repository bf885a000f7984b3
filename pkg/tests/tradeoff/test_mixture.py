import unittest

from isac_drt.isac_drt import stream_key
from isac_drt.tradeoff.envelope import TangentCase, lower_convex_envelope, tangent_set
from isac_drt.tradeoff.exceptions import InconsistentEnvelopeError
from isac_drt.tradeoff.front import DesignGrid, build_front
from isac_drt.tradeoff.lp_oracle import random_design_grid
from isac_drt.tradeoff.mixture import (
    Atom,
    DesignWeight,
    MixedStrategy,
    build_mixture,
    expected_performance,
    perturb_mixture,
    swap_weights,
)


class TestBuildMixture(unittest.TestCase):
    def setUp(self) -> None:
        grid = DesignGrid.from_records([("a", 0, 1), ("b", 1, 0.9), ("c", 2, 0.4)])
        self.front = build_front(grid)
        self.env = lower_convex_envelope(self.front)

    def test_midpoint(self) -> None:
        mix = build_mixture(self.env, self.front, 1.0)
        self.assertEqual(mix.n_atoms, 2)
        self.assertEqual([a.xi for a in mix.atoms], [0, 2])
        self.assertAlmostEqual(mix.atoms[0].weight, 0.5)
        self.assertAlmostEqual(mix.atoms[1].weight, 0.5)
        self.assertAlmostEqual(mix.mean_resource, 1.0, places=12)
        self.assertAlmostEqual(expected_performance(mix, self.front), 0.7)

    def test_weights_follow_mean_constraint(self) -> None:
        for C in (0.1, 0.5, 1.3, 1.9):
            mix = build_mixture(self.env, self.front, C)
            self.assertAlmostEqual(mix.mean_resource, C, places=12)
            self.assertAlmostEqual(sum(a.weight for a in mix.atoms), 1.0, places=12)

    def test_single_atom_cases(self) -> None:
        at_contact = build_mixture(self.env, self.front, 2.0)
        self.assertEqual([(a.weight, a.xi) for a in at_contact.atoms], [(1.0, 2.0)])
        self.assertAlmostEqual(expected_performance(at_contact, self.front), 0.4)
        beyond = build_mixture(self.env, self.front, 7.0)
        self.assertEqual([a.xi for a in beyond.atoms], [2.0])

    def test_designs(self) -> None:
        mix = build_mixture(self.env, self.front, 1.0)
        self.assertEqual(mix.design_probabilities(), {"a": 0.5, "c": 0.5})
        rows = mix.records()
        self.assertEqual(
            list(rows[0]), ["atom", "weight", "xi", "design_id", "conditional_weight"]
        )

    def test_inconsistent_envelope(self) -> None:
        other = build_front(DesignGrid.from_records([("x", 0, 1), ("y", 3, 0.1)]))
        with self.assertRaises(InconsistentEnvelopeError):
            build_mixture(lower_convex_envelope(other), self.front, 1.0)

    def test_strict_gain_over_deterministic_design(self) -> None:
        mix = build_mixture(self.env, self.front, 1.0)
        self.assertLess(expected_performance(mix, self.front), self.front.value_at(1.0))
        checked = 0
        for k in range(10):
            grid, _ = random_design_grid(stream_key(4, "jensen", k), 50)
            front = build_front(grid)
            env = lower_convex_envelope(front)
            for s in env.segments:
                if s.line_value(s.xi_lo) - s.line_value(s.xi_hi) < 1e-6:
                    continue
                C = 0.5 * (s.xi_lo + s.xi_hi)
                self.assertIs(tangent_set(env, C).case, TangentCase.BRACKETED)
                deterministic = [p.g for p in front.points if p.xi <= C][-1]
                mix = build_mixture(env, front, C)
                self.assertLess(expected_performance(mix, front), deterministic)
                checked += 1
        self.assertGreater(checked, 0)


class TestMixedStrategy(unittest.TestCase):
    def test_weight_validation(self) -> None:
        designs = (DesignWeight("a", 1.0),)
        with self.assertRaises(ValueError):
            MixedStrategy((Atom(0.7, 0.0, designs),), 0.0)
        with self.assertRaises(ValueError):
            MixedStrategy((Atom(1.5, 0.0, designs), Atom(-0.5, 1.0, designs)), 0.0)
        with self.assertRaises(ValueError):
            MixedStrategy((Atom(1.0, 0.0, (DesignWeight("a", 0.5),)),), 0.0)

    def test_degenerate_pair(self) -> None:
        grid = DesignGrid.from_records([("a", 0, 1), ("c", 2, 0.4)])
        front = build_front(grid)
        mix = MixedStrategy(
            (
                Atom(0.0, 0.0, (DesignWeight("a", 1.0),)),
                Atom(1.0, 2.0, (DesignWeight("c", 1.0),)),
            ),
            2.0,
        )
        self.assertAlmostEqual(expected_performance(mix, front), 0.4)

    def test_swap_and_perturb(self) -> None:
        grid = DesignGrid.from_records(
            [("a", 0, 1), ("b", 1, 0.9), ("c", 2, 0.4), ("d", 3, 0.3)]
        )
        front = build_front(grid)
        mix = build_mixture(lower_convex_envelope(front), front, 0.5)
        swapped = swap_weights(mix)
        self.assertAlmostEqual(swapped.mean_resource, 1.5)
        moved = perturb_mixture(mix, front, 1, 1.0)
        self.assertEqual(moved.atoms[1].designs, (DesignWeight("b", 1.0),))
        self.assertEqual(
            [a.weight for a in moved.atoms], [a.weight for a in mix.atoms]
        )
        with self.assertRaises(ValueError):
            swap_weights(build_mixture(lower_convex_envelope(front), front, 2.0))
