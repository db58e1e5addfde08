"""lipopt: one-dimensional global minimization by bracket contraction
(Super Gradient Descent), with local-optimizer baselines and a benchmark CLI."""

from .baselines import BaselineConfig, BaselineState, baseline_run, detect_divergence
from .benchfns import REGISTRY, OracleResult, grid_oracle, lookup
from .core import Interval, LipschitzEstimate, Objective, estimate_lipschitz, finite_diff, global_gradient
from .errors import (
    BracketCollapse,
    DegeneratePair,
    ExpressionSyntaxError,
    InvalidConfig,
    LipoptError,
    NonFiniteValue,
    NonpositiveK,
    StencilOutOfDomain,
    UnknownFunction,
    UnknownIdentifier,
)
from .expr import parse_expression
from .sugd import (
    BracketState,
    BracketTrace,
    SuGDConfig,
    SuGDResult,
    alpha_max,
    iteration_bound,
    sugd_run,
    sugd_step,
    width_metric,
)

__version__ = "0.1.0"
