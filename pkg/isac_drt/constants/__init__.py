import math

# TOLERANCES
HERMITIAN_TOL = 1e-12  # relative, ||A - A^H|| / max(1, ||A||)
PSD_TOL = 1e-12  # eigenvalues >= -PSD_TOL * trace
JACOBI_TOL = 1e-12  # off-diagonal Frobenius norm, relative
JACOBI_MAX_SWEEPS = 50
MULTIPLICITY_TOL = 1e-8  # eigenvalues within this relative distance are degenerate
WEIGHT_SUM_TOL = 1e-12
MEAN_RESOURCE_TOL = 1e-9

# MONTE CARLO
CI_LEVEL = 0.95
WILSON_HIT_THRESHOLD = 30
KS_CRITICAL_1PCT = 1.628  # asymptotic Kolmogorov-Smirnov constant, alpha = 1%

# DETECTION
GLOBALLY_CONCAVE_PFA = math.exp(-2.0)
TANGENT_RESIDUAL_TOL = 1e-10
BRACKET_EXPANSION_LIMIT = 1e3

# OUTPUT
SIGNIFICANT_DIGITS = 12


# FUNCTIONS
def format_number(value: float) -> str:
    return format(value, f".{SIGNIFICANT_DIGITS}g")
