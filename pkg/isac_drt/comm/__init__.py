# flake8: noqa

from .rate_eval import (
    CommChannel,
    gaussian_rate,
    mean_covariance,
    mixture_rate,
    rate_records,
    water_filling,
)
