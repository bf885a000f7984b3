import unittest

from isac_drt.isac_drt import stream_key
from isac_drt.tradeoff.exceptions import InfeasibleBudgetError
from isac_drt.tradeoff.front import DesignGrid
from isac_drt.tradeoff.lp_oracle import (
    random_design_grid,
    random_front_fuzz,
    solve_lp,
)


class TestSolveLp(unittest.TestCase):
    def test_pair_beats_pure_strategy(self) -> None:
        grid = DesignGrid.from_records([("a", 0, 1), ("b", 1, 0.9), ("c", 2, 0.4)])
        solution = solve_lp(grid, 1.0)
        self.assertAlmostEqual(solution.value, 0.7)
        self.assertEqual(
            sorted((k, round(w, 12)) for k, w in solution.atoms), [(0, 0.5), (2, 0.5)]
        )
        self.assertTrue(solution.active)

    def test_convex_front_single_atom(self) -> None:
        grid = DesignGrid.from_records(
            [(k, float(k), 1.0 / (1.0 + k)) for k in range(6)]
        )
        solution = solve_lp(grid, 2.0)
        self.assertEqual(solution.atoms, ((2, 1.0),))
        self.assertAlmostEqual(solution.value, 1.0 / 3.0)

    def test_budget_beyond_costs(self) -> None:
        grid = DesignGrid.from_records([("a", 0, 1), ("b", 1, 0.2), ("c", 2, 0.5)])
        solution = solve_lp(grid, 10.0)
        self.assertEqual(solution.atoms, ((1, 1.0),))
        self.assertFalse(solution.active)

    def test_infeasible(self) -> None:
        grid = DesignGrid.from_records([("a", 1, 1)])
        with self.assertRaises(InfeasibleBudgetError):
            solve_lp(grid, 0.5)

    def test_value_monotone_and_below_pure_strategy(self) -> None:
        for k in range(10):
            grid, _ = random_design_grid(stream_key(9, "lp_monotone", k), 50)
            top = grid.entries[-1].cost
            values = []
            for step in range(40):
                C = 1.1 * top * step / 39
                value = solve_lp(grid, C).value
                pure = min(e.perf for e in grid.entries if e.cost <= C)
                tol = 1e-9 * max(1.0, abs(pure))
                self.assertLessEqual(value, pure + tol)
                values.append(value)
            for a, b in zip(values, values[1:]):
                self.assertLessEqual(b, a + 1e-9 * max(1.0, abs(a)))


class TestRandomFrontFuzz(unittest.TestCase):
    def test_random_grid(self) -> None:
        grid, budget = random_design_grid(stream_key(3, "fuzz", 0), 50)
        costs = [e.cost for e in grid.entries]
        perfs = [e.perf for e in grid.entries]
        self.assertEqual(costs[0], 0.0)
        self.assertTrue(all(b >= a for a, b in zip(costs, costs[1:])))
        self.assertTrue(all(b <= a for a, b in zip(perfs, perfs[1:])))
        self.assertTrue(0.0 <= budget <= 1.1 * costs[-1])

    def test_reproducible(self) -> None:
        first = random_front_fuzz(7, 5, 20)
        second = random_front_fuzz(7, 5, 20)
        self.assertEqual(first.records(), second.records())

    def test_single_design_grids(self) -> None:
        report = random_front_fuzz(1, 10, 1)
        self.assertEqual(report.n_pass, 10)
        self.assertTrue(all(c.grid_size == 1 for c in report.cases))
        self.assertIsNone(report.first_counterexample)

    def test_collinear_fronts(self) -> None:
        report = random_front_fuzz(1, 50, 30, collinear=True)
        self.assertEqual(report.n_fail, 0, report.first_counterexample)

    def test_oracle_equivalence(self) -> None:
        report = random_front_fuzz(1, 1000, 200)
        self.assertEqual(report.n_pass, 1000, report.first_counterexample)
