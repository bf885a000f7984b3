import unittest

from isac_drt.tradeoff.envelope import lower_convex_envelope
from isac_drt.tradeoff.front import DesignGrid, build_front
from isac_drt.tradeoff.kkt import ViolationKind, verify_kkt
from isac_drt.tradeoff.mixture import (
    Atom,
    DesignWeight,
    MixedStrategy,
    build_mixture,
    perturb_mixture,
    swap_weights,
)


def kinds(certificate):
    return {v.kind for v in certificate.violations}


class TestVerifyKkt(unittest.TestCase):
    def setUp(self) -> None:
        self.grid = DesignGrid.from_records(
            [("a", 0, 1), ("b", 1, 0.9), ("c", 2, 0.4), ("d", 3, 0.35)]
        )
        self.front = build_front(self.grid)
        self.env = lower_convex_envelope(self.front)

    def test_optimal_two_atom_mixture(self) -> None:
        mix = build_mixture(self.env, self.front, 1.0)
        certificate = verify_kkt(self.grid, mix, 1.0)
        self.assertTrue(certificate.is_valid, certificate.violation_records())
        self.assertAlmostEqual(certificate.lambda2, 0.3)
        self.assertAlmostEqual(certificate.slacks["a"], 0.0)
        self.assertAlmostEqual(certificate.slacks["c"], 0.0)
        self.assertGreater(certificate.slacks["b"], 0.0)
        self.assertGreater(certificate.slacks["d"], 0.0)
        self.assertEqual(set(certificate.support_ids), {"a", "c"})

    def test_atom_above_envelope(self) -> None:
        mix = build_mixture(self.env, self.front, 1.0)
        moved = perturb_mixture(mix, self.front, 1, 1.0)
        certificate = verify_kkt(self.grid, moved, 1.0)
        self.assertFalse(certificate.is_valid)
        flagged = {
            v.design_id
            for v in certificate.violations
            if v.kind is ViolationKind.OFF_ENVELOPE
        }
        self.assertEqual(flagged, {"b"})

    def test_swapped_weights(self) -> None:
        mix = build_mixture(self.env, self.front, 0.5)
        certificate = verify_kkt(self.grid, swap_weights(mix), 0.5)
        self.assertIn(ViolationKind.MEAN_CONSTRAINT, kinds(certificate))

    def test_single_mean_violation(self) -> None:
        for C in (0.5, 1.5):
            mix = build_mixture(self.env, self.front, C)
            certificate = verify_kkt(self.grid, swap_weights(mix), C)
            mean_violations = [
                v
                for v in certificate.violations
                if v.kind is ViolationKind.MEAN_CONSTRAINT
            ]
            self.assertEqual(len(mean_violations), 1)
            self.assertAlmostEqual(mean_violations[0].margin, 1.0)

    def test_convex_front_single_atom(self) -> None:
        grid = DesignGrid.from_records(
            [(k, float(k), 1.0 / (1.0 + k)) for k in range(6)]
        )
        front = build_front(grid)
        mix = build_mixture(lower_convex_envelope(front), front, 3.0)
        certificate = verify_kkt(grid, mix, 3.0)
        self.assertTrue(certificate.is_valid, certificate.violation_records())
        self.assertEqual(certificate.budget_slack, 0.0)
        self.assertGreater(certificate.lambda2, 0.0)

    def test_slack_budget(self) -> None:
        grid = DesignGrid.from_records([("a", 0, 1), ("b", 1, 0.2), ("c", 2, 0.5)])
        front = build_front(grid)
        mix = build_mixture(lower_convex_envelope(front), front, 1.5)
        certificate = verify_kkt(grid, mix, 1.5)
        self.assertTrue(certificate.is_valid, certificate.violation_records())
        self.assertEqual(certificate.lambda2, 0.0)
        self.assertAlmostEqual(certificate.budget_slack, 0.5)

    def test_suboptimal_single_atom(self) -> None:
        mix = MixedStrategy((Atom(1.0, 1.0, (DesignWeight("b", 1.0),)),), 1.0)
        certificate = verify_kkt(self.grid, mix, 1.0)
        self.assertFalse(certificate.is_valid)
        self.assertTrue(
            {ViolationKind.SUPPORT, ViolationKind.OFF_ENVELOPE} & kinds(certificate)
        )

    def test_unknown_design(self) -> None:
        mix = MixedStrategy((Atom(1.0, 0.0, (DesignWeight("z", 1.0),)),), 0.0)
        certificate = verify_kkt(self.grid, mix, 0.0)
        self.assertEqual(kinds(certificate), {ViolationKind.UNKNOWN_DESIGN})
        self.assertEqual(certificate.violation_records()[0]["kind"], "unknown_design")
