# flake8: noqa

from .envelope import (
    EnvelopeResult,
    EnvelopeSegment,
    TangentCase,
    TangentSet,
    envelope_value,
    front_records,
    lower_convex_envelope,
    tangent_set,
)
from .front import (
    DesignEntry,
    DesignGrid,
    FrontPoint,
    FrontSample,
    build_front,
    scalarize,
)
from .kkt import KktCertificate, KktViolation, ViolationKind, verify_kkt
from .lp_oracle import FuzzCase, FuzzReport, LpSolution, random_front_fuzz, solve_lp
from .mixture import (
    Atom,
    DesignWeight,
    MixedStrategy,
    build_mixture,
    expected_performance,
    perturb_mixture,
    swap_weights,
)
