# flake8: noqa

from .covariance import OptimalCovariance, optimal_covariance, principal_eigen, snr_of
from .detection import (
    DetectionCurve,
    curve_records,
    detection_grid,
    distribution_records,
    expected_detection,
    inflection_power,
    pd_closed_form,
    sensing_optimal_distribution,
    tangent_power,
    threshold_for_pfa,
)
from .monte_carlo import (
    HypothesisType,
    McReport,
    SimConfig,
    estimate_mixture_pd,
    estimate_pd,
    estimate_pfa,
    exponentiality_check,
    run_statistic,
    synthesize_waveform,
)
from .scenario import RadarScenario, scalar_scenario
