"""
Dual certificates for mixed strategies on a design grid.

The discretized problem minimizes sum_j p_j e_j over the simplex subject to
sum_j p_j c_j <= C. A mixture is optimal iff there are multipliers lambda1
(free) and lambda2 >= 0 such that nu_j = e_j + lambda1 + lambda2 c_j is
nonnegative on the grid, vanishes on the support, and lambda2 times the budget
slack vanishes.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, List, Optional, Tuple

from isac_drt.constants import MEAN_RESOURCE_TOL
from isac_drt.isac_drt import Config
from isac_drt.tradeoff.envelope import envelope_value, lower_convex_envelope
from isac_drt.tradeoff.front import DesignEntry, DesignGrid, build_front
from isac_drt.tradeoff.mixture import MixedStrategy

logger = logging.getLogger()


class ViolationKind(Enum):
    DOMINANCE = ("dominance", 1)
    SUPPORT = ("support", 2)
    OFF_ENVELOPE = ("off_envelope", 3)
    DUAL_SIGN = ("dual_sign", 4)
    COMPLEMENTARY_SLACKNESS = ("complementary_slackness", 5)
    MEAN_CONSTRAINT = ("mean_constraint", 6)
    UNKNOWN_DESIGN = ("unknown_design", 7)

    @property
    def label(self) -> str:
        return self.value[0]


@dataclass(slots=True, frozen=True)
class KktViolation:
    design_id: Optional[Hashable]
    kind: ViolationKind
    margin: float

    def record(self) -> Dict[str, object]:
        return {
            "design_id": self.design_id,
            "kind": self.kind.label,
            "margin": self.margin,
        }


@dataclass(slots=True, frozen=True)
class KktCertificate:
    """
    Multipliers and slacks of a candidate mixture

    Attributes
    ----------
    lambda1: float
        Multiplier of the normalization constraint
    lambda2: float
        Multiplier of the budget constraint
    slacks: Dict[Hashable, float]
        nu per grid design
    support_ids: Tuple[Hashable, ...]
        Grid designs whose slack vanishes
    budget_slack: float
        C minus the mean cost of the mixture
    violations: Tuple[KktViolation, ...]
        Failed optimality conditions, empty for a valid certificate
    """

    lambda1: float
    lambda2: float
    slacks: Dict[Hashable, float] = field(compare=False)
    support_ids: Tuple[Hashable, ...]
    budget_slack: float
    violations: Tuple[KktViolation, ...]

    @property
    def is_valid(self) -> bool:
        return len(self.violations) == 0

    def violation_records(self) -> List[Dict[str, object]]:
        return [v.record() for v in self.violations]


def _single_cost_multiplier(
    entries: Tuple[DesignEntry, ...],
    cost: float,
    perf: float,
    budget_slack_positive: bool,
    cost_tol: float,
) -> Tuple[float, float]:
    """
    Feasible interval [lo, hi] of lambda2 for a support at one cost level
    """
    lo, hi = 0.0, math.inf
    for entry in entries:
        dc = entry.cost - cost
        de = entry.perf - perf
        if dc > cost_tol:
            lo = max(lo, -de / dc)
        elif dc < -cost_tol:
            hi = min(hi, de / -dc)
    if budget_slack_positive:
        hi = min(hi, 0.0)
    return lo, hi


def verify_kkt(
    grid: DesignGrid,
    mix: MixedStrategy,
    C: float,
    tol: Optional[float] = None,
) -> KktCertificate:
    """
    Certifies a mixture against the optimality conditions on a grid.

    The multipliers are read off the supporting line through the support in
    (cost, -perf) coordinates. For a support on a single cost level the slope
    is the smallest value of its feasible dual interval. Failures are returned
    as violations, never raised.

    Parameters
    ----------
    grid: DesignGrid
        Design grid the mixture was built on
    mix: MixedStrategy
        Candidate mixture
    C: float
        Resource budget
    tol: Optional[float]
        Relative tolerance, defaults to Config().kkt_tol

    Returns
    -------
    KktCertificate
        Multipliers, slacks and the violations found
    """
    if tol is None:
        tol = Config().kkt_tol
    lookup = grid.lookup()
    scale = max(1.0, max(abs(e.perf) for e in grid.entries))
    abs_tol = tol * scale
    cost_scale = max(1.0, max(e.cost for e in grid.entries))
    cost_tol = tol * cost_scale
    mean_tol = MEAN_RESOURCE_TOL * max(1.0, abs(C))
    violations: List[KktViolation] = []

    probs = mix.design_probabilities()
    support: List[DesignEntry] = []
    for design_id in probs:
        if design_id not in lookup:
            violations.append(
                KktViolation(design_id, ViolationKind.UNKNOWN_DESIGN, math.nan)
            )
        else:
            support.append(lookup[design_id])

    mean_cost = sum(probs[e.design_id] * e.cost for e in support)
    budget_slack = C - mean_cost
    if budget_slack < -mean_tol:
        violations.append(
            KktViolation(None, ViolationKind.MEAN_CONSTRAINT, -budget_slack)
        )
    distinct_xis = {atom.xi for atom in mix.atoms}
    if (
        budget_slack >= -mean_tol
        and len(distinct_xis) >= 2
        and abs(mix.mean_resource - C) > mean_tol
    ):
        violations.append(
            KktViolation(
                None, ViolationKind.MEAN_CONSTRAINT, abs(mix.mean_resource - C)
            )
        )

    if not support:
        return KktCertificate(
            math.nan, math.nan, {}, (), budget_slack, tuple(violations)
        )

    low = min(support, key=lambda e: (e.cost, e.perf))
    high = max(support, key=lambda e: (e.cost, -e.perf))
    if high.cost - low.cost > cost_tol:
        lambda2 = (low.perf - high.perf) / (high.cost - low.cost)
    else:
        lo, hi = _single_cost_multiplier(
            grid.entries, low.cost, low.perf, budget_slack > mean_tol, cost_tol
        )
        lambda2 = lo
        if lo > hi + abs_tol:
            for entry in support:
                violations.append(
                    KktViolation(entry.design_id, ViolationKind.SUPPORT, lo - hi)
                )
    lambda1 = -low.perf - lambda2 * low.cost

    if lambda2 < -abs_tol:
        violations.append(KktViolation(None, ViolationKind.DUAL_SIGN, lambda2))

    slacks = {e.design_id: e.perf + lambda1 + lambda2 * e.cost for e in grid.entries}
    for entry in grid.entries:
        nu = slacks[entry.design_id]
        if nu < -abs_tol:
            violations.append(
                KktViolation(entry.design_id, ViolationKind.DOMINANCE, nu)
            )
    for entry in support:
        nu = slacks[entry.design_id]
        if abs(nu) > abs_tol:
            violations.append(KktViolation(entry.design_id, ViolationKind.SUPPORT, nu))

    envelope = lower_convex_envelope(build_front(grid))
    for entry in support:
        gap = entry.perf - envelope_value(envelope, entry.cost)
        if gap > abs_tol:
            violations.append(
                KktViolation(entry.design_id, ViolationKind.OFF_ENVELOPE, gap)
            )

    if abs(lambda2 * budget_slack) > abs_tol and budget_slack > mean_tol:
        violations.append(
            KktViolation(
                None,
                ViolationKind.COMPLEMENTARY_SLACKNESS,
                lambda2 * budget_slack,
            )
        )

    support_ids = tuple(d for d, nu in slacks.items() if abs(nu) <= abs_tol)
    certificate = KktCertificate(
        lambda1, lambda2, slacks, support_ids, budget_slack, tuple(violations)
    )
    if certificate.is_valid:
        logger.info(
            "KKT certificate valid: lambda1=%s lambda2=%s slack=%s",
            lambda1,
            lambda2,
            budget_slack,
        )
    else:
        logger.info("KKT certificate rejected with %s violations", len(violations))
    return certificate
