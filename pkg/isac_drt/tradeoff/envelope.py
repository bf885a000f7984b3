"""
Lower convex envelope of a sampled front and the tangent sets of a budget.
"""

import bisect
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from isac_drt.isac_drt import Config
from isac_drt.tradeoff.exceptions import InfeasibleBudgetError
from isac_drt.tradeoff.front import FrontPoint, FrontSample

logger = logging.getLogger()


@dataclass(slots=True, frozen=True)
class EnvelopeSegment:
    """
    Hull segment between two consecutive contacts, the supporting line reads
    -g(xi) = lam + mu * xi
    """

    xi_lo: float
    xi_hi: float
    lam: float
    mu: float

    def line_value(self, xi: float) -> float:
        """
        Envelope value (in g) of the supporting line at xi
        """
        return -(self.lam + self.mu * xi)


@dataclass(slots=True, frozen=True)
class EnvelopeResult:
    contacts: Tuple[FrontPoint, ...]
    segments: Tuple[EnvelopeSegment, ...]

    @property
    def domain_g(self) -> Tuple[float, ...]:
        """
        Resource levels achievable by the scalarized problem
        """
        return tuple(p.xi for p in self.contacts)


class TangentCase(Enum):
    """
    Position of the budget relative to the achievable domain
    """

    CONTACT = ("contact", 1)
    SATURATED = ("saturated", 2)
    BRACKETED = ("bracketed", 3)


@dataclass(slots=True, frozen=True)
class TangentSet:
    xis: Tuple[float, ...]
    lam: float
    mu: float
    budget: float
    case: TangentCase


def _cross(o: FrontPoint, a: FrontPoint, b: FrontPoint) -> Tuple[float, float]:
    left = (a.xi - o.xi) * (b.g - o.g)
    right = (a.g - o.g) * (b.xi - o.xi)
    return left - right, abs(left) + abs(right)


def _segment(lo: FrontPoint, hi: FrontPoint) -> EnvelopeSegment:
    slope = (hi.g - lo.g) / (hi.xi - lo.xi)
    mu = max(0.0, -slope)
    lam = -lo.g - mu * lo.xi
    return EnvelopeSegment(lo.xi, hi.xi, lam, mu)


def lower_convex_envelope(
    front: FrontSample, rel_tol: Optional[float] = None
) -> EnvelopeResult:
    """
    Lower convex hull of the front points by a monotone chain sweep.

    Points on a chord within the relative tolerance are kept as contacts, so a
    collinear run of front points produces several segments sharing one
    supporting line.

    Parameters
    ----------
    front: FrontSample
        Sampled front
    rel_tol: Optional[float]
        Relative collinearity tolerance, defaults to Config().contact_tol

    Returns
    -------
    EnvelopeResult
        Contacts and the supporting lines of the hull segments
    """
    if rel_tol is None:
        rel_tol = Config().contact_tol
    hull: List[FrontPoint] = []
    for point in front.points:
        while len(hull) >= 2:
            cross, scale = _cross(hull[-2], hull[-1], point)
            if cross < -rel_tol * scale:
                hull.pop()
            else:
                break
        hull.append(point)

    segments = tuple(_segment(lo, hi) for lo, hi in zip(hull, hull[1:]))
    logger.info(
        "Lower convex envelope has %s contacts out of %s front points",
        len(hull),
        len(front.points),
    )
    return EnvelopeResult(tuple(hull), segments)


def _same_line(a: EnvelopeSegment, b: EnvelopeSegment, tol: float) -> bool:
    return abs(a.mu - b.mu) <= tol * max(1.0, abs(a.mu)) and abs(
        a.lam - b.lam
    ) <= tol * max(1.0, abs(a.lam))


def tangent_set(
    env: EnvelopeResult, C: float, tol: Optional[float] = None
) -> TangentSet:
    """
    Tangent set of the envelope for the budget C.

    When C coincides with a contact the set is that contact and the multipliers
    are those of the segment to its left (to its right for the first contact,
    zero slope for the last one). A budget beyond the last contact saturates
    at the last contact. Otherwise the contacts bracketing C are returned,
    widened over collinear neighbours.

    Parameters
    ----------
    env: EnvelopeResult
        Envelope of the front
    C: float
        Resource budget
    tol: Optional[float]
        Relative coincidence tolerance, defaults to Config().contact_tol

    Returns
    -------
    TangentSet
        Contacts and supporting line multipliers

    Raises
    ------
    InfeasibleBudgetError
        If the budget is below the smallest sampled cost
    """
    if tol is None:
        tol = Config().contact_tol
    xs = env.domain_g
    scale = max(1.0, abs(C), abs(xs[-1]))
    abs_tol = tol * scale
    if C < xs[0] - abs_tol:
        raise InfeasibleBudgetError()

    k = bisect.bisect_left(xs, C)
    for idx in (k - 1, k):
        if 0 <= idx < len(xs) and abs(xs[idx] - C) <= abs_tol:
            contact = env.contacts[idx]
            if idx == len(xs) - 1:
                lam, mu = -contact.g, 0.0
            elif idx == 0:
                lam, mu = env.segments[0].lam, env.segments[0].mu
            else:
                lam, mu = env.segments[idx - 1].lam, env.segments[idx - 1].mu
            return TangentSet((contact.xi,), lam, mu, C, TangentCase.CONTACT)

    if C > xs[-1]:
        last = env.contacts[-1]
        logger.info(
            "Budget %s lies beyond the sampled resources (max %s), "
            "treating the last contact as saturating",
            C,
            last.xi,
        )
        return TangentSet((last.xi,), -last.g, 0.0, C, TangentCase.SATURATED)

    lo = hi = k - 1
    while lo > 0 and _same_line(env.segments[lo - 1], env.segments[lo], tol):
        lo -= 1
    while hi < len(env.segments) - 1 and _same_line(
        env.segments[hi + 1], env.segments[hi], tol
    ):
        hi += 1
    left = env.contacts[lo]
    right = env.contacts[hi + 1]
    line = _segment(left, right)
    return TangentSet(
        (left.xi, right.xi), line.lam, line.mu, C, TangentCase.BRACKETED
    )


def envelope_value(env: EnvelopeResult, xi: float) -> float:
    """
    Value of the lower convex envelope at xi, flat beyond the contacts
    """
    xs = env.domain_g
    if xi <= xs[0]:
        return env.contacts[0].g
    if xi >= xs[-1]:
        return env.contacts[-1].g
    k = bisect.bisect_right(xs, xi) - 1
    return env.segments[k].line_value(xi)


def front_records(
    front: FrontSample, env: EnvelopeResult
) -> List[Dict[str, object]]:
    """
    Table rows (xi, g, g_equality, is_contact, lambda, mu) of a front and its
    envelope. The multipliers are those of the segment starting at a contact.
    """
    starting: Dict[float, EnvelopeSegment] = {s.xi_lo: s for s in env.segments}
    contact_xis = set(env.domain_g)
    rows: List[Dict[str, object]] = []
    for point in front.points:
        segment = starting.get(point.xi)
        rows.append(
            {
                "xi": point.xi,
                "g": point.g,
                "g_equality": point.raw_g,
                "is_contact": point.xi in contact_xis,
                "lambda": segment.lam if segment is not None else None,
                "mu": segment.mu if segment is not None else None,
            }
        )
    return rows
