# flake8: noqa

from .ops import *
