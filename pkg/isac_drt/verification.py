"""
Self checks of the library, grouped into suites.

Every suite returns the failed checks as records (suite, check, detail); an
empty list means the suite passed.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import jax
import jax.numpy as jnp

from isac_drt._math.ops import dagger
from isac_drt.comm.rate_eval import (
    CommChannel,
    gaussian_rate,
    mean_covariance,
    mixture_rate,
    water_filling,
)
from isac_drt.isac_drt import stream_key
from isac_drt.radar.covariance import optimal_covariance, principal_eigen
from isac_drt.radar.detection import (
    DetectionCurve,
    detection_grid,
    sensing_optimal_distribution,
)
from isac_drt.radar.monte_carlo import SimConfig, estimate_pd, estimate_pfa
from isac_drt.radar.scenario import RadarScenario, scalar_scenario
from isac_drt.tradeoff.envelope import lower_convex_envelope
from isac_drt.tradeoff.front import FrontSample, build_front
from isac_drt.tradeoff.kkt import verify_kkt
from isac_drt.tradeoff.lp_oracle import random_front_fuzz
from isac_drt.tradeoff.mixture import MixedStrategy, perturb_mixture, swap_weights

jax.config.update("jax_enable_x64", True)

logger = logging.getLogger()

REFERENCE_TANGENT_POWER = 9.4070
REFERENCE_TANGENT_TOL = 5e-4
QUADRATIC_BOUND_TOL = 1e-3
TANGENCY_SLOPE_TOL = 1e-8
INFLECTION_REL_TOL = 1e-6
MIXTURE_BUDGETS = (1.0, 7.0, 15.0)
FAULTS = ("weights", "atom")


@dataclass(slots=True, frozen=True)
class Failure:
    suite: str
    check: str
    detail: str

    def record(self) -> Dict[str, object]:
        return {"suite": self.suite, "check": self.check, "detail": self.detail}


@dataclass(frozen=True)
class VerifySettings:
    """
    Sizes and seed of the verification run

    Attributes
    ----------
    seed: int
        Master seed of every random check
    fuzz_cases: int
        Random fronts compared with the oracle
    fuzz_grid_size: int
        Largest random front
    eigen_scenarios: int
        Random Gram matrices of the eigen-optimality check
    eigen_covariances: int
        Random covariances per Gram matrix
    inflection_cases: int
        Random detection curves of the inflection check
    moment_trials: int
        Monte Carlo trials per hypothesis
    scenario: Optional[RadarScenario]
        Scenario of the mixture checks, alpha = 1 and pfa = 1e-5 by default
    inject_fault: Optional[str]
        "weights" or "atom" corrupts the radar mixture before certification
    """

    seed: int = 1
    fuzz_cases: int = 1000
    fuzz_grid_size: int = 200
    eigen_scenarios: int = 50
    eigen_covariances: int = 100
    inflection_cases: int = 20
    moment_trials: int = 100_000
    scenario: Optional[RadarScenario] = None
    inject_fault: Optional[str] = None

    def __post_init__(self) -> None:
        if self.inject_fault is not None and self.inject_fault not in FAULTS:
            raise ValueError(f"Unknown fault {self.inject_fault!r}")

    def radar_scenario(self) -> RadarScenario:
        if self.scenario is not None:
            return self.scenario
        return scalar_scenario(1.0, 1e-5)


def check_tangent(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    curve = DetectionCurve(1.0, 1e-5)
    p_t = curve.p_t
    if abs(p_t - REFERENCE_TANGENT_POWER) > REFERENCE_TANGENT_TOL:
        failures.append(
            Failure("tangent", "reference", f"P_t={p_t}, expected 9.4070")
        )
    L = curve.log_inv_pfa
    quadratic_root = 0.5 * ((L - 2.0) + math.sqrt((L - 2.0) ** 2 - 4.0))
    if abs(p_t - quadratic_root) > QUADRATIC_BOUND_TOL:
        failures.append(
            Failure(
                "tangent",
                "quadratic_bound",
                f"P_t={p_t}, quadratic root {quadratic_root}",
            )
        )
    chord = (curve.f(p_t) - curve.f(0.0)) / p_t
    if abs(chord - curve.df(p_t)) > TANGENCY_SLOPE_TOL:
        failures.append(
            Failure(
                "tangent",
                "tangency",
                f"chord slope {chord} differs from f'(P_t)={curve.df(p_t)}",
            )
        )
    if not curve.p_star < p_t:
        failures.append(
            Failure("tangent", "ordering", f"P_*={curve.p_star} >= P_t={p_t}")
        )
    return failures


def check_fuzz(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    for collinear, cases in ((False, settings.fuzz_cases), (True, 50)):
        report = random_front_fuzz(
            settings.seed, cases, settings.fuzz_grid_size, collinear=collinear
        )
        if report.n_fail:
            case = report.first_counterexample
            failures.append(
                Failure(
                    "fuzz",
                    "collinear_oracle" if collinear else "oracle",
                    f"{report.n_fail}/{report.n_cases} failed, first {case}",
                )
            )
    return failures


def _inject(
    mix: MixedStrategy, fault: str, p_t: float, front: FrontSample
) -> MixedStrategy:
    if mix.n_atoms != 2:
        return mix
    if fault == "weights":
        return swap_weights(mix)
    halfway = min((p.xi for p in front.points), key=lambda xi: abs(xi - p_t / 2))
    return perturb_mixture(mix, front, 1, halfway)


def check_kkt(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    base = settings.radar_scenario()
    curve = DetectionCurve.from_scenario(base)
    p_max = max(20.0, 2.0 * curve.p_t, 1.1 * max(MIXTURE_BUDGETS))
    grid = detection_grid(curve, p_max, 401, (curve.p_t,) + MIXTURE_BUDGETS)
    front = build_front(grid)

    for budget in MIXTURE_BUDGETS:
        mix = sensing_optimal_distribution(base.with_budget(budget))
        if settings.inject_fault is not None:
            mix = _inject(mix, settings.inject_fault, curve.p_t, front)
        certificate = verify_kkt(grid, mix, budget)
        for violation in certificate.violations:
            failures.append(
                Failure(
                    "kkt",
                    violation.kind.label,
                    f"budget {budget}: design {violation.design_id} "
                    f"margin {violation.margin}",
                )
            )

    # a mixture moved off the envelope has to be rejected
    env = lower_convex_envelope(front)
    contacts = set(env.domain_g)
    off = [p.xi for p in front.points if p.xi not in contacts and p.xi > 0]
    if off:
        mix = sensing_optimal_distribution(base.with_budget(1.0))
        moved = perturb_mixture(mix, front, mix.n_atoms - 1, off[len(off) // 2])
        if verify_kkt(grid, moved, 1.0).is_valid:
            failures.append(
                Failure("kkt", "perturbed_rejected", "off-envelope mixture accepted")
            )
    return failures


def check_eigen(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    for index in range(settings.eigen_scenarios):
        k_size, k_gram, k_cov = jax.random.split(
            stream_key(settings.seed, "eigen", index), 3
        )
        M = int(jax.random.randint(k_size, (), 2, 5))
        h = jax.random.normal(k_gram, (M + 1, M), dtype=jnp.complex128)
        scenario = RadarScenario(gram=dagger(h) @ h)
        lambda_max, basis, _ = principal_eigen(scenario.gram)
        u = basis[:, 0]
        residual = float(jnp.linalg.norm(scenario.gram @ u - lambda_max * u))
        if residual > 1e-8 * lambda_max:
            failures.append(
                Failure("eigen", "residual", f"scenario {index}: {residual}")
            )
        power = 1.0
        optimal = optimal_covariance(scenario, power).matrix
        best = float(jnp.real(jnp.trace(scenario.gram @ optimal)))
        a = jax.random.normal(
            k_cov, (settings.eigen_covariances, M, M), dtype=jnp.complex128
        )
        covs = a @ jnp.conj(jnp.swapaxes(a, 1, 2))
        covs = power * covs / jnp.real(jnp.trace(covs, axis1=1, axis2=2))[:, None, None]
        illum = jnp.real(jnp.einsum("ij,kji->k", scenario.gram, covs))
        worst = float(jnp.max(illum))
        if worst > best * (1.0 + 1e-12):
            failures.append(
                Failure(
                    "eigen",
                    "optimality",
                    f"scenario {index}: random {worst} beats eigen {best}",
                )
            )
    return failures


def check_inflection(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    for index in range(settings.inflection_cases):
        k_alpha, k_pfa = jax.random.split(
            stream_key(settings.seed, "inflection", index)
        )
        alpha = float(10.0 ** jax.random.uniform(k_alpha, (), minval=-1, maxval=1))
        pfa = float(10.0 ** jax.random.uniform(k_pfa, (), minval=-12, maxval=-1))
        curve = DetectionCurve(alpha, pfa)
        numeric = curve.p_star
        analytic = curve.analytic_inflection_power
        if abs(numeric - analytic) > INFLECTION_REL_TOL * abs(analytic):
            failures.append(
                Failure(
                    "inflection",
                    "closed_form",
                    f"alpha={alpha} pfa={pfa}: {numeric} vs {analytic}",
                )
            )
    return failures


def check_moments(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    scenario = RadarScenario(gram=jnp.eye(1, dtype=jnp.complex128), pfa=1e-2)
    config = SimConfig(
        scenario, jnp.array([[3.0]]), settings.moment_trials, settings.seed
    )
    for report in (estimate_pd(config), estimate_pfa(config)):
        if not report.within_sigmas(3.0):
            failures.append(
                Failure(
                    "moments",
                    f"probability_{report.hypothesis}",
                    f"empirical {report.empirical_prob} target {report.target_prob}",
                )
            )
        mean = report.z_mean_h0 if report.z_mean_h0 is not None else report.z_mean_h1
        expected = report.expected_z_mean
        error = report.z_std_error
        if mean is None or expected is None or error is None:
            continue
        if abs(mean - expected) > 3.0 * error:
            failures.append(
                Failure(
                    "moments",
                    f"z_mean_{report.hypothesis}",
                    f"sample mean {mean} expected {expected} (se {error})",
                )
            )
    return failures


def check_rate(settings: VerifySettings) -> List[Failure]:
    failures: List[Failure] = []
    k_sense, k_comm = jax.random.split(stream_key(settings.seed, "rate"))
    h_s = jax.random.normal(k_sense, (4, 4), dtype=jnp.complex128)
    h_c = jax.random.normal(k_comm, (2, 4), dtype=jnp.complex128)
    scenario = RadarScenario.from_channel(h_s, pfa=1e-5)
    # half the tangent power, so the sensing optimal strategy time shares
    budget = 0.5 * DetectionCurve.from_scenario(scenario).p_t
    channel = CommChannel(h_c, 1.0)
    mix = sensing_optimal_distribution(scenario.with_budget(budget))
    heuristic = mixture_rate(channel, mix)
    capacity = gaussian_rate(channel, water_filling(channel, budget))
    jensen = gaussian_rate(channel, mean_covariance(mix))
    if not heuristic < capacity:
        failures.append(
            Failure("rate", "rate_loss", f"mixture {heuristic} vs capacity {capacity}")
        )
    unit_mix = sensing_optimal_distribution(scenario.with_budget(1.0))
    unit = mixture_rate(channel, unit_mix)
    unit_capacity = gaussian_rate(channel, water_filling(channel, 1.0))
    if not unit < unit_capacity:
        failures.append(
            Failure(
                "rate",
                "rate_loss_unit_budget",
                f"mixture {unit} vs capacity {unit_capacity}",
            )
        )
    if heuristic > jensen + 1e-12:
        failures.append(
            Failure(
                "rate", "jensen", f"mixture {heuristic} vs mean covariance {jensen}"
            )
        )
    return failures


SUITES: Dict[str, Callable[[VerifySettings], List[Failure]]] = {
    "tangent": check_tangent,
    "fuzz": check_fuzz,
    "kkt": check_kkt,
    "eigen": check_eigen,
    "inflection": check_inflection,
    "moments": check_moments,
    "rate": check_rate,
}


def run_verification(
    settings: VerifySettings, suites: Optional[Sequence[str]] = None
) -> List[Failure]:
    """
    Runs the named suites (all by default) and collects their failures
    """
    names = list(SUITES) if suites is None else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"Unknown verification suites {unknown}")
    failures: List[Failure] = []
    for name in names:
        found = SUITES[name](settings)
        logger.info("Suite %s: %s failures", name, len(found))
        failures.extend(found)
    return failures
