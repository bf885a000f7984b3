"""
Brute force solver of the discretized linear functional program and the fuzz
harness that compares it with the envelope construction.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import jax
import numpy as np

from isac_drt.isac_drt import stream_key
from isac_drt.tradeoff.envelope import lower_convex_envelope
from isac_drt.tradeoff.exceptions import InfeasibleBudgetError
from isac_drt.tradeoff.front import DesignGrid, build_front
from isac_drt.tradeoff.kkt import verify_kkt
from isac_drt.tradeoff.mixture import build_mixture, expected_performance

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()

MAX_ORACLE_GRID = 10_000
PAIR_BLOCK = 1024
FUZZ_VALUE_TOL = 1e-9


@dataclass(slots=True, frozen=True)
class LpSolution:
    """
    Optimum of the discretized program

    Attributes
    ----------
    value: float
        Optimal expected performance
    atoms: Tuple[Tuple[int, float], ...]
        Grid indices and weights of the optimal distribution (at most two)
    active: bool
        Whether the budget constraint binds
    """

    value: float
    atoms: Tuple[Tuple[int, float], ...]
    active: bool


def solve_lp(grid: DesignGrid, C: float) -> LpSolution:
    """
    Solves min sum_j p_j e_j s.t. sum_j p_j c_j <= C over the simplex by
    enumerating every feasible single design and every pair straddling C.

    An optimal basic solution of this program has at most two support points,
    so the enumeration is exact.

    Parameters
    ----------
    grid: DesignGrid
        Design grid, at most 10 000 entries
    C: float
        Resource budget

    Returns
    -------
    LpSolution
        Optimal value and support

    Raises
    ------
    InfeasibleBudgetError
        If every design costs more than C
    """
    if len(grid) > MAX_ORACLE_GRID:
        raise ValueError(
            f"Grid of {len(grid)} entries exceeds the oracle limit {MAX_ORACLE_GRID}"
        )
    costs = np.asarray(grid.costs)
    perfs = np.asarray(grid.perfs)
    feas_tol = 1e-12 * max(1.0, abs(C))
    feasible = costs <= C + feas_tol
    if not bool(np.any(feasible)):
        raise InfeasibleBudgetError()

    single_vals = np.where(feasible, perfs, np.inf)
    best_single = int(np.argmin(single_vals))
    value = float(single_vals[best_single])
    atoms: Tuple[Tuple[int, float], ...] = ((best_single, 1.0),)

    below = np.nonzero(costs < C)[0]
    above = np.nonzero(costs > C)[0]
    if below.size > 0 and above.size > 0:
        c_hi = costs[above][None, :]
        e_hi = perfs[above][None, :]
        for start in range(0, int(below.size), PAIR_BLOCK):
            block = below[start : start + PAIR_BLOCK]
            c_lo = costs[block][:, None]
            e_lo = perfs[block][:, None]
            w_lo = (c_hi - C) / (c_hi - c_lo)
            vals = w_lo * e_lo + (1.0 - w_lo) * e_hi
            flat = int(np.argmin(vals))
            i, j = divmod(flat, vals.shape[1])
            pair_value = float(vals[i, j])
            if pair_value < value - 1e-15 * max(1.0, abs(value)):
                value = pair_value
                weight = float(w_lo[i, j])
                atoms = (
                    (int(block[i]), weight),
                    (int(above[j]), 1.0 - weight),
                )

    mean_cost = sum(w * float(costs[k]) for k, w in atoms)
    active = mean_cost >= C - feas_tol
    return LpSolution(value, atoms, active)


@dataclass(slots=True, frozen=True)
class FuzzCase:
    case_id: int
    budget: float
    grid_size: int
    oracle_value: float
    mixture_value: float
    delta: float
    support_on_envelope: bool
    kkt_valid: bool

    @property
    def passed(self) -> bool:
        scale = max(1.0, abs(self.oracle_value))
        return (
            self.delta <= FUZZ_VALUE_TOL * scale
            and self.support_on_envelope
            and self.kkt_valid
        )

    def record(self) -> Dict[str, object]:
        return {
            "case_id": self.case_id,
            "C": self.budget,
            "grid_size": self.grid_size,
            "oracle_value": self.oracle_value,
            "mixture_value": self.mixture_value,
            "delta": self.delta,
            "support_on_envelope": self.support_on_envelope,
            "kkt_valid": self.kkt_valid,
            "pass": self.passed,
        }


@dataclass(slots=True, frozen=True)
class FuzzReport:
    cases: Tuple[FuzzCase, ...]

    @property
    def n_cases(self) -> int:
        return len(self.cases)

    @property
    def n_pass(self) -> int:
        return sum(1 for c in self.cases if c.passed)

    @property
    def n_fail(self) -> int:
        return self.n_cases - self.n_pass

    @property
    def first_counterexample(self) -> Optional[FuzzCase]:
        return next((c for c in self.cases if not c.passed), None)

    def records(self) -> List[Dict[str, object]]:
        return [c.record() for c in self.cases]


def random_design_grid(
    key: jax.Array, grid_size: int, collinear: bool = False
) -> Tuple[DesignGrid, float]:
    """
    Random grid with sorted costs starting at zero and non-increasing
    performance, plus a budget drawn uniformly in [0, 1.1 max cost]

    Parameters
    ----------
    key: jax.Array
        Random key
    grid_size: int
        Largest number of designs
    collinear: bool
        Place every design on one line

    Returns
    -------
    Tuple[DesignGrid, float]
        Grid and budget
    """
    k_size, k_cost, k_perf, k_line, k_budget = jax.random.split(key, 5)
    n = int(jax.random.randint(k_size, (), 1, grid_size + 1))
    # fixed draw shapes keep one compiled kernel per grid_size
    increments = np.asarray(jax.random.exponential(k_cost, (grid_size,)))[:n]
    costs = np.concatenate([[0.0], np.cumsum(increments[1:])])
    if collinear:
        start, slope = np.asarray(jax.random.uniform(k_line, (2,), minval=0.1))
        perfs = start - slope * costs
    else:
        decrements = np.asarray(jax.random.uniform(k_perf, (grid_size,)))[:n]
        start = float(np.asarray(jax.random.normal(k_line, ())))
        perfs = start - np.concatenate([[0.0], np.cumsum(decrements[1:])])
    budget = float(jax.random.uniform(k_budget, (), maxval=1.1 * costs[-1]))
    grid = DesignGrid.from_records(
        (f"d{i}", float(c), float(e)) for i, (c, e) in enumerate(zip(costs, perfs))
    )
    return grid, budget


def random_front_fuzz(
    seed: int, n_cases: int, grid_size: int, collinear: bool = False
) -> FuzzReport:
    """
    Compares the envelope mixture against the brute force oracle on random
    grids. Failures are reported, never raised.

    Parameters
    ----------
    seed: int
        Master seed, case k uses the stream "fuzz" with index k
    n_cases: int
        Number of random grids
    grid_size: int
        Largest grid size
    collinear: bool
        Draw fully collinear fronts

    Returns
    -------
    FuzzReport
        Per case records
    """
    if n_cases < 1:
        raise ValueError("At least one fuzz case is required")
    if grid_size < 1:
        raise ValueError("Grid size has to be positive")

    cases: List[FuzzCase] = []
    for case_id in range(n_cases):
        grid, budget = random_design_grid(
            stream_key(seed, "fuzz", case_id), grid_size, collinear
        )
        oracle = solve_lp(grid, budget)
        front = build_front(grid)
        env = lower_convex_envelope(front)
        mix = build_mixture(env, front, budget)
        mixture_value = expected_performance(mix, front)

        contact_tol = 1e-9 * max(1.0, front.points[-1].xi)
        contact_xis = env.domain_g
        support_on_envelope = all(
            any(abs(grid.entries[k].cost - x) <= contact_tol for x in contact_xis)
            for k, w in oracle.atoms
            if w > 0.0
        )
        kkt_valid = verify_kkt(grid, mix, budget).is_valid
        case = FuzzCase(
            case_id,
            budget,
            len(grid),
            oracle.value,
            mixture_value,
            abs(mixture_value - oracle.value),
            support_on_envelope,
            kkt_valid,
        )
        logger.debug("Fuzz case %s: %s", case_id, case)
        cases.append(case)

    report = FuzzReport(tuple(cases))
    logger.info(
        "Fuzzed %s cases: %s passed, %s failed",
        report.n_cases,
        report.n_pass,
        report.n_fail,
    )
    return report
