"""Secret-key rate versus eavesdropper distortion for lossless source coding."""

from .adversary import BestResponse, best_response, min_distortion
from .core import (
    DistortionMatrix,
    Pmf,
    ProblemInstance,
    ValidationError,
    conditional_entropy,
    entropy,
    expected_distortion,
    normalize,
)
from .corners import CornerPoint, DegenerateDistortionError, enumerate_corner_points
from .lp import (
    Decomposition,
    SolverError,
    TradeoffCurve,
    in_region,
    rate_requirement,
    solve_key_distortion_lp,
    tradeoff_curve,
)

__version__ = "0.1.0"
