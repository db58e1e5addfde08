"""Super Gradient Descent: a bracket-contraction global minimizer for
one-dimensional Lipschitz functions.

The bracket ``[x1, x2]`` starts at the domain endpoints. Each step moves the
endpoint with the larger objective value inward by ``alpha * (w + |df|)``
where ``w = x2 - x1`` and ``df = f(x2) - f(x1)``; ties move the right
endpoint. The loop stops once ``w * (1 + |F|) <= tol``, ``F`` being the secant
slope across the bracket.

The moved endpoint is rounded toward the bracket interior (by at most a few
ulps) so the computed width contracts by at least ``1 - alpha`` per step in
floating point, not just in exact arithmetic.
"""

from __future__ import annotations

import logging
import math
from array import array
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .core import Interval, Objective
from .errors import BracketCollapse, InvalidConfig, NonFiniteValue, NonpositiveK

log = logging.getLogger(__name__)

TOLERANCE_MET = "ToleranceMet"
MAX_ITERS = "MaxIters"
# only reachable with force=True
COLLAPSED = "BracketCollapse"

DEFAULT_MAX_ITERS = 10_000_000

TRACE_COLUMNS = ("iter", "x1", "x2", "f_x1", "f_x2", "width_metric")


@dataclass(frozen=True)
class BracketState:
    x1: float
    x2: float
    f1: float
    f2: float
    iter: int = 0

    @classmethod
    def initial(cls, f: Objective, domain: Interval) -> "BracketState":
        f1 = _checked(f, domain.lo)
        f2 = _checked(f, domain.hi)
        return cls(domain.lo, domain.hi, f1, f2, 0)


@dataclass
class SuGDConfig:
    alpha: Optional[float] = None
    tol: float = 1e-6
    max_iters: Optional[int] = None
    lipschitz: Optional[float] = None
    epsilon_target: Optional[float] = None
    force: bool = False

    def resolve(self, domain: Interval) -> "SuGDConfig":
        """Validate and fill derived defaults (alpha from epsilon, max_iters)."""
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise InvalidConfig(f"tol must be > 0, got {self.tol!r}")
        k = self.lipschitz
        if k is not None and not k >= 0:
            raise InvalidConfig(f"lipschitz constant must be >= 0, got {k!r}")
        if self.epsilon_target is not None and not self.epsilon_target > 0:
            raise InvalidConfig(f"epsilon_target must be > 0, got {self.epsilon_target!r}")

        alpha = self.alpha
        if alpha is None:
            if k is None or self.epsilon_target is None:
                raise InvalidConfig("alpha is required unless both lipschitz and epsilon_target are given")
            if k == 0:
                # constant function: any step within the guard works
                alpha = 0.5
            else:
                alpha = min(alpha_max(self.epsilon_target, domain, k), 0.5 / (1.0 + k))
        if not alpha > 0:
            raise InvalidConfig(f"alpha must be > 0, got {alpha!r}")
        if k is not None and not alpha * (1.0 + k) < 1.0 and not self.force:
            raise InvalidConfig(
                f"alpha*(1+k) = {alpha * (1.0 + k)!r} >= 1 lets the bracket cross; "
                "lower alpha or pass force=True"
            )
        if alpha >= 1.0:
            # a step of alpha*(w + |df|) >= w always crosses
            raise InvalidConfig(f"alpha must be < 1, got {alpha!r}")

        max_iters = self.max_iters
        if max_iters is None:
            if k is not None and alpha * (1.0 + k) < 1.0:
                max_iters = max(1, 2 * iteration_bound(domain, k, self.tol, alpha))
            else:
                max_iters = DEFAULT_MAX_ITERS
        if not (isinstance(max_iters, int) and max_iters > 0):
            raise InvalidConfig(f"max_iters must be a positive integer, got {max_iters!r}")
        return replace(self, alpha=float(alpha), max_iters=max_iters)


@dataclass
class SuGDResult:
    x_min: float
    f_min: float
    x_best_seen: float
    f_best_seen: float
    iters: int
    evals: int
    converged: bool
    termination: str
    alpha: float
    final_state: BracketState
    collapse: Optional[str] = None


@dataclass
class BracketTrace:
    """Column-oriented record of every bracket state, initial one included."""

    iters: array = field(default_factory=lambda: array("q"))
    x1: array = field(default_factory=lambda: array("d"))
    x2: array = field(default_factory=lambda: array("d"))
    f1: array = field(default_factory=lambda: array("d"))
    f2: array = field(default_factory=lambda: array("d"))
    width: array = field(default_factory=lambda: array("d"))

    def append(self, n: int, x1: float, x2: float, f1: float, f2: float, w: float) -> None:
        self.iters.append(n)
        self.x1.append(x1)
        self.x2.append(x2)
        self.f1.append(f1)
        self.f2.append(f2)
        self.width.append(w)

    def __len__(self) -> int:
        return len(self.iters)

    @property
    def records(self) -> Iterator[tuple[int, float, float, float, float, float]]:
        return zip(self.iters, self.x1, self.x2, self.f1, self.f2, self.width)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BracketTrace):
            return NotImplemented
        return all(getattr(self, c) == getattr(other, c)
                   for c in ("iters", "x1", "x2", "f1", "f2", "width"))


def alpha_max(epsilon: float, domain: Interval, k: float) -> float:
    """Largest step for which the epsilon-accuracy convergence argument holds."""
    if not k > 0:
        raise NonpositiveK(
            f"Lipschitz constant must be positive, got {k!r}; "
            "a k=0 function is constant and every point is optimal"
        )
    if not epsilon > 0:
        raise InvalidConfig(f"epsilon must be > 0, got {epsilon!r}")
    return epsilon / (domain.width * (1.0 + k) * k)


def iteration_bound(domain: Interval, k: float, tol: float, alpha: float) -> int:
    """Worst-case step count from w_{n+1} <= (1 - alpha) w_n and |F| <= k."""
    if not (0 < alpha < 1 and k >= 0 and tol > 0):
        raise InvalidConfig(f"iteration_bound needs 0 < alpha < 1, k >= 0, tol > 0; "
                            f"got alpha={alpha!r}, k={k!r}, tol={tol!r}")
    ratio = tol / (domain.width * (1.0 + k))
    if ratio >= 1.0:
        return 0
    return max(0, math.ceil(math.log(ratio) / math.log1p(-alpha)))


def width_metric(state: BracketState) -> float:
    w = state.x2 - state.x1
    slope = (state.f2 - state.f1) / w
    return abs(w) * (1.0 + abs(slope))


def sugd_step(f: Objective, state: BracketState, alpha: float) -> BracketState:
    if not 0 < alpha < 1:
        raise InvalidConfig(f"alpha must be in (0, 1), got {alpha!r}")
    x1, x2, f1, f2 = state.x1, state.x2, state.f1, state.f2
    cap = (1.0 - alpha) * (x2 - x1)
    if f2 - f1 < 0:
        nx = x1 + alpha * ((x2 - x1) + (f1 - f2))
        while x2 - nx > cap:
            nx = math.nextafter(nx, math.inf)
        if not nx < x2:
            raise BracketCollapse(state.iter + 1, nx, x2, alpha)
        return BracketState(nx, x2, _checked(f, nx), f2, state.iter + 1)
    nx = x2 - alpha * ((x2 - x1) + (f2 - f1))
    while nx - x1 > cap:
        nx = math.nextafter(nx, -math.inf)
    if not nx > x1:
        raise BracketCollapse(state.iter + 1, x1, nx, alpha)
    return BracketState(x1, nx, f1, _checked(f, nx), state.iter + 1)


def sugd_run(
    f: Objective,
    domain: Interval,
    config: SuGDConfig,
    record_trace: bool = True,
) -> tuple[SuGDResult, Optional[BracketTrace]]:
    """Run the bracket loop from ``[domain.lo, domain.hi]``.

    ``x_min`` is the final left endpoint; ``x_best_seen`` is the lowest point
    evaluated during the run, which can differ.

    ``record_trace=False`` skips the per-step record for very long runs and
    returns ``None`` as the trace.
    """
    cfg = config.resolve(domain)
    alpha = cfg.alpha
    tol = cfg.tol
    max_iters = cfg.max_iters
    evals_before = f.eval_count

    state = BracketState.initial(f, domain)
    x1, x2, f1, f2 = state.x1, state.x2, state.f1, state.f2
    if f1 <= f2:
        xb, fb = x1, f1
    else:
        xb, fb = x2, f2

    trace = BracketTrace() if record_trace else None
    n = 0
    w = (x2 - x1) * (1.0 + abs((f2 - f1) / (x2 - x1)))
    if trace is not None:
        trace.append(0, x1, x2, f1, f2, w)
    collapse = None

    # Hot loop: same arithmetic as sugd_step, inlined to avoid per-step
    # allocation. tests/test_sugd.py checks both paths agree bitwise.
    one_minus_alpha = 1.0 - alpha
    inf = math.inf
    nextafter = math.nextafter
    while w > tol and n < max_iters:
        cap = one_minus_alpha * (x2 - x1)
        if f2 - f1 < 0:
            nx = x1 + alpha * ((x2 - x1) + (f1 - f2))
            while x2 - nx > cap:
                nx = nextafter(nx, inf)
            if not nx < x2:
                if not cfg.force:
                    raise BracketCollapse(n + 1, nx, x2, alpha)
                collapse = str(BracketCollapse(n + 1, nx, x2, alpha))
                break
            fx = f(nx)
            if not math.isfinite(fx):
                raise NonFiniteValue(nx, fx)
            x1, f1 = nx, fx
        else:
            nx = x2 - alpha * ((x2 - x1) + (f2 - f1))
            while nx - x1 > cap:
                nx = nextafter(nx, -inf)
            if not nx > x1:
                if not cfg.force:
                    raise BracketCollapse(n + 1, x1, nx, alpha)
                collapse = str(BracketCollapse(n + 1, x1, nx, alpha))
                break
            fx = f(nx)
            if not math.isfinite(fx):
                raise NonFiniteValue(nx, fx)
            x2, f2 = nx, fx
        if fx < fb:
            xb, fb = nx, fx
        n += 1
        w = (x2 - x1) * (1.0 + abs((f2 - f1) / (x2 - x1)))
        if trace is not None:
            trace.append(n, x1, x2, f1, f2, w)

    if collapse is not None:
        log.warning("%s", collapse)
        termination = COLLAPSED
    elif w <= tol:
        termination = TOLERANCE_MET
    else:
        termination = MAX_ITERS
    final = BracketState(x1, x2, f1, f2, n)
    result = SuGDResult(
        x_min=x1,
        f_min=f1,
        x_best_seen=xb,
        f_best_seen=fb,
        iters=n,
        evals=f.eval_count - evals_before,
        converged=termination == TOLERANCE_MET,
        termination=termination,
        alpha=alpha,
        final_state=final,
        collapse=collapse,
    )
    return result, trace


def _checked(f: Objective, x: float) -> float:
    fx = f(x)
    if not math.isfinite(fx):
        raise NonFiniteValue(x, fx)
    return fx
