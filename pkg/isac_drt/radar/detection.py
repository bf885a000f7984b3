"""
Detection curve of the CFAR detector with the eigen-beamformed covariance and
the sensing-optimal distribution of the transmit power.

With all power P on the principal eigenvector the detection probability is
f(P) = pfa ** (1 / (1 + alpha P)). The curve is convex up to the inflection
power and concave after it, so the half line from (0, f(0)) touches it at the
tangent power P_t. Below P_t time sharing between silence and P_t beats any
deterministic covariance.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional

import jax
import jax.numpy as jnp
from scipy.optimize import brentq

from isac_drt._math.ops import MatrixLike
from isac_drt.constants import (
    BRACKET_EXPANSION_LIMIT,
    GLOBALLY_CONCAVE_PFA,
    TANGENT_RESIDUAL_TOL,
)
from isac_drt.isac_drt import Config
from isac_drt.radar.covariance import (
    illumination,
    optimal_covariance,
    principal_eigen,
    snr_of,
)
from isac_drt.radar.exceptions import TargetUnobservableError
from isac_drt.radar.helpers.bracket_expansion import BracketExpansion
from isac_drt.radar.scenario import RadarScenario
from isac_drt.tradeoff.front import DesignGrid
from isac_drt.tradeoff.mixture import Atom, DesignWeight, MixedStrategy

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()


def pd_closed_form(rho: float, pfa: float) -> float:
    """
    Detection probability pfa ** (1 / (1 + rho)) of the Rayleigh target

    Parameters
    ----------
    rho: float
        Nonnegative signal to noise ratio
    pfa: float
        False alarm probability in (0, 1)
    """
    if rho < 0:
        raise ValueError("SNR has to be nonnegative")
    if not 0.0 < pfa < 1.0:
        raise ValueError("False alarm probability has to lie in (0, 1)")
    return math.exp(math.log(pfa) / (1.0 + rho))


def threshold_for_pfa(scenario: RadarScenario, covariance: MatrixLike) -> float:
    """
    CFAR threshold -T N0 Tr(gram R) ln(pfa)

    Raises
    ------
    TargetUnobservableError
        If the covariance does not illuminate the target
    """
    trace = illumination(scenario, covariance)
    if trace <= 0.0:
        raise TargetUnobservableError()
    return -scenario.snapshots * scenario.noise_psd * trace * math.log(scenario.pfa)


@dataclass(frozen=True)
class DetectionCurve:
    """
    Detection probability as a function of the transmit power

    Attributes
    ----------
    alpha: float
        SNR per unit power, (mean_square_amp T / N0) lambda_max
    pfa: float
        False alarm probability
    """

    alpha: float
    pfa: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise TargetUnobservableError()
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("False alarm probability has to lie in (0, 1)")

    @classmethod
    def from_scenario(cls, scenario: RadarScenario) -> "DetectionCurve":
        lambda_max, _, _ = principal_eigen(scenario.gram)
        return cls(scenario.snr_scale * lambda_max, scenario.pfa)

    @property
    def log_inv_pfa(self) -> float:
        return -math.log(self.pfa)

    def f(self, power: float) -> float:
        return pd_closed_form(self.alpha * power, self.pfa)

    def df(self, power: float) -> float:
        s = 1.0 + self.alpha * power
        return self.f(power) * self.log_inv_pfa * self.alpha / s**2

    def d2f(self, power: float) -> float:
        L = self.log_inv_pfa
        s = 1.0 + self.alpha * power
        return self.f(power) * L * self.alpha**2 / s**4 * (L - 2.0 * s)

    def tangent_residual(self, power: float) -> float:
        """
        f(P) - f(0) - P f'(P), zero where the half line from (0, f(0)) is
        tangent to the curve
        """
        return self.f(power) - self.pfa - power * self.df(power)

    @property
    def globally_concave(self) -> bool:
        return self.pfa >= GLOBALLY_CONCAVE_PFA

    @property
    def analytic_inflection_power(self) -> float:
        return max(0.0, self.log_inv_pfa / (2.0 * self.alpha) - 1.0 / self.alpha)

    @property
    def printed_inflection_candidate(self) -> float:
        """
        Alternative closed form with alpha cubed, kept for comparison only
        """
        return self.log_inv_pfa / (2.0 * self.alpha**3) - 1.0 / self.alpha

    @cached_property
    def p_star(self) -> float:
        return inflection_power(self)

    @cached_property
    def p_t(self) -> float:
        return tangent_power(self)

    def envelope(self, power: float) -> float:
        """
        Concave envelope of f: the chord from (0, f(0)) up to P_t, then f
        """
        p_t = self.p_t
        if p_t > 0.0 and power < p_t:
            return self.pfa + power * (self.f(p_t) - self.pfa) / p_t
        return self.f(power)


def inflection_power(curve: DetectionCurve) -> float:
    """
    Power where the curvature of f changes sign.

    The root of f'' is searched on [0, L / (2 alpha)] with L = -ln(pfa), where
    f'' is positive at zero and negative at the upper end. A curve with
    pfa >= e^-2 is concave everywhere and 0 is returned.

    Parameters
    ----------
    curve: DetectionCurve
        Detection curve

    Returns
    -------
    float
        Inflection power P_*
    """
    if curve.globally_concave:
        logger.info("Detection curve with pfa %s is globally concave", curve.pfa)
        return 0.0
    hi = curve.log_inv_pfa / (2.0 * curve.alpha)
    if curve.d2f(0.0) <= 0.0:
        return 0.0
    p_star = float(brentq(curve.d2f, 0.0, hi, xtol=1e-15, rtol=1e-15))
    logger.info(
        "Inflection power %s (closed form %s, alpha cubed candidate %s)",
        p_star,
        curve.analytic_inflection_power,
        curve.printed_inflection_candidate,
    )
    return p_star


def tangent_power(curve: DetectionCurve) -> float:
    """
    Power P_t where the half line from (0, f(0)) is tangent to f, i.e. the root
    of f(P) - f(0) - P f'(P) beyond the inflection power.

    The residual is negative at P_* and positive far out; the upper end of the
    bracket is expanded geometrically and the root is polished with Brent's
    method.

    Parameters
    ----------
    curve: DetectionCurve
        Detection curve

    Returns
    -------
    float
        Tangent power, 0 for a globally concave curve

    Raises
    ------
    TangentBracketError
        If no sign change is found below max(1e3 P_*, 1e3 / alpha)
    """
    if curve.globally_concave:
        return 0.0
    p_star = curve.p_star
    residual_lo = curve.tangent_residual(p_star)
    if residual_lo >= 0.0:
        logger.warning(
            "Tangent residual %s is not negative at the inflection power", residual_lo
        )
        return p_star
    step = max(p_star, 1.0 / curve.alpha)
    limit = BRACKET_EXPANSION_LIMIT * step
    lo, hi = BracketExpansion(
        curve.tangent_residual, p_star, p_star + step, limit
    ).compute_bracket()
    p_t = float(brentq(curve.tangent_residual, lo, hi, xtol=1e-14, rtol=1e-15))
    residual = abs(curve.tangent_residual(p_t))
    if residual > TANGENT_RESIDUAL_TOL:
        logger.warning("Tangent residual %s exceeds tolerance", residual)
    logger.info("Tangent power %s (inflection power %s)", p_t, p_star)
    return p_t


def detection_grid(
    curve: DetectionCurve,
    p_max: float,
    resolution: int,
    extra_points: Optional[Iterable[float]] = None,
) -> DesignGrid:
    """
    Design grid of transmit powers with cost P and performance -f(P).

    Parameters
    ----------
    curve: DetectionCurve
        Detection curve
    p_max: float
        Largest sampled power
    resolution: int
        Number of equispaced powers on [0, p_max]
    extra_points: Optional[Iterable[float]]
        Powers merged into the grid, defaults to the tangent power

    Returns
    -------
    DesignGrid
        Grid whose design ids are the powers themselves
    """
    if resolution < 1:
        raise ValueError("Resolution has to be positive")
    if p_max < 0:
        raise ValueError("Largest power has to be nonnegative")
    powers = set(jnp.linspace(0.0, p_max, resolution).tolist())
    if extra_points is None:
        extra_points = (curve.p_t,)
    powers.update(float(p) for p in extra_points if 0.0 <= p)
    return DesignGrid.from_records((p, p, -curve.f(p)) for p in sorted(powers))


def curve_records(
    curve: DetectionCurve, p_max: float, resolution: int
) -> List[Dict[str, object]]:
    """
    Rows (P, pd, envelope) of the detection curve and its concave envelope
    """
    return [
        {"P": p, "pd": curve.f(p), "envelope": curve.envelope(p)}
        for p in jnp.linspace(0.0, p_max, resolution).tolist()
    ]


def sensing_optimal_distribution(scenario: RadarScenario) -> MixedStrategy:
    """
    Sensing-optimal distribution of the transmit covariance.

    For a budget below the tangent power the transmitter is silent with
    probability 1 - P/P_t and beamforms P_t with probability P/P_t, so the mean
    power is P. From P_t on a single covariance with trace P is optimal.
    Atoms carry the covariance and use their trace as design id.

    Parameters
    ----------
    scenario: RadarScenario
        Detection problem, the budget is scenario.power_budget

    Returns
    -------
    MixedStrategy
        Distribution over covariance atoms
    """
    curve = DetectionCurve.from_scenario(scenario)
    P = scenario.power_budget
    p_t = curve.p_t
    tol = Config().contact_tol * max(1.0, p_t)

    def atom(weight: float, power: float) -> Atom:
        covariance = optimal_covariance(scenario, power).matrix
        return Atom(weight, power, (DesignWeight(power, 1.0),), covariance)

    if P >= p_t - tol:
        atoms = (atom(1.0, P),)
    elif P <= tol:
        atoms = (atom(1.0, 0.0),)
    else:
        w = P / p_t
        atoms = (atom(1.0 - w, 0.0), atom(w, p_t))
    logger.info(
        "Sensing optimal distribution for P=%s: traces %s, weights %s",
        P,
        [a.xi for a in atoms],
        [a.weight for a in atoms],
    )
    return MixedStrategy(atoms, P)


def distribution_records(
    scenario: RadarScenario, mix: MixedStrategy
) -> List[Dict[str, object]]:
    """
    Rows (weight, trace, rho, pd) per covariance atom
    """
    rows: List[Dict[str, object]] = []
    for a in mix.atoms:
        covariance = (
            a.covariance
            if a.covariance is not None
            else optimal_covariance(scenario, a.xi).matrix
        )
        rho = snr_of(scenario, covariance)
        rows.append(
            {
                "weight": a.weight,
                "trace": a.xi,
                "rho": rho,
                "pd": pd_closed_form(rho, scenario.pfa),
            }
        )
    return rows


def expected_detection(scenario: RadarScenario, mix: MixedStrategy) -> float:
    """
    Mixture average of the closed form detection probability
    """
    total = 0.0
    for a in mix.atoms:
        covariance = (
            a.covariance
            if a.covariance is not None
            else optimal_covariance(scenario, a.xi).matrix
        )
        rho = snr_of(scenario, covariance)
        total += a.weight * pd_closed_form(rho, scenario.pfa)
    return total
