"""Local first-order optimizers used as comparison points: GD, AdaGrad,
RMSprop, Adam, AdamW and Nesterov accelerated gradient, all in one dimension.

Step functions are pure: they take a state and a gradient and return a new
state. Iterates are never clamped; an iterate leaving the search interval is
reported as divergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .core import Interval, Objective, default_step, finite_diff
from .errors import InvalidConfig, NonFiniteValue, StencilOutOfDomain

KINDS = ("GD", "AdaGrad", "RMSprop", "Adam", "AdamW", "NAG")
GRAD_SOURCES = ("forward", "backward", "central", "analytic")

GRAD_TOL = "GradTol"
MAX_ITERS = "MaxIters"
DIVERGED = "Diverged"

TRACE_COLUMNS = ("iter", "x", "f_x", "grad", "evals")

# Objective evaluations per iteration: gradient stencil plus one f(x) for
# logging/divergence. NAG's look-ahead gradient replaces the gradient at x,
# so it costs the same.
EVALS_PER_GRADIENT = {"forward": 2, "backward": 2, "central": 2, "analytic": 0}


def evals_per_step(cfg: "BaselineConfig") -> int:
    return EVALS_PER_GRADIENT[cfg.fd_scheme] + 1


@dataclass(frozen=True)
class BaselineConfig:
    kind: str = "GD"
    lr: float = 0.01
    eps_num: float = 1e-8
    beta1: float = 0.9
    beta2: float = 0.999
    rho: float = 0.9
    weight_decay: float = 0.01
    momentum: float = 0.9
    fd_scheme: str = "central"
    fd_h: Optional[float] = None
    max_iters: int = 100_000
    grad_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown optimizer kind {self.kind!r}; use one of {KINDS}")
        if self.fd_scheme not in GRAD_SOURCES:
            raise InvalidConfig(f"unknown gradient source {self.fd_scheme!r}; use one of {GRAD_SOURCES}")
        for name in ("lr", "eps_num", "grad_tol"):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{name} must be > 0, got {getattr(self, name)!r}")
        for name in ("beta1", "beta2", "rho", "momentum"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1), got {v!r}")
        if not self.weight_decay >= 0:
            raise InvalidConfig(f"weight_decay must be >= 0, got {self.weight_decay!r}")
        if self.fd_h is not None and not self.fd_h > 0:
            raise InvalidConfig(f"fd_h must be > 0, got {self.fd_h!r}")
        if not (isinstance(self.max_iters, int) and self.max_iters > 0):
            raise InvalidConfig(f"max_iters must be a positive integer, got {self.max_iters!r}")

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class BaselineState:
    x: float
    t: int = 0
    accum_g2: float = 0.0
    ema_g2: float = 0.0
    m: float = 0.0
    v: float = 0.0
    velocity: float = 0.0


@dataclass
class PointTrace:
    iters: list[int] = field(default_factory=list)
    x: list[float] = field(default_factory=list)
    f_x: list[float] = field(default_factory=list)
    grad: list[float] = field(default_factory=list)
    evals: list[int] = field(default_factory=list)

    def append(self, n: int, x: float, fx: float, g: float, evals: int) -> None:
        self.iters.append(n)
        self.x.append(x)
        self.f_x.append(fx)
        self.grad.append(g)
        self.evals.append(evals)

    def __len__(self) -> int:
        return len(self.iters)

    @property
    def records(self):
        return zip(self.iters, self.x, self.f_x, self.grad, self.evals)


@dataclass
class BaselineResult:
    kind: str
    x: float
    f_x: float
    iters: int
    evals: int
    termination: str
    final_state: BaselineState


def gd_step(state: BaselineState, g: float, cfg: BaselineConfig) -> BaselineState:
    return replace(state, x=state.x - cfg.lr * g, t=state.t + 1)


def adagrad_step(state: BaselineState, g: float, cfg: BaselineConfig) -> BaselineState:
    acc = state.accum_g2 + g * g
    x = state.x - cfg.lr * g / math.sqrt(acc + cfg.eps_num)
    return replace(state, x=x, t=state.t + 1, accum_g2=acc)


def rmsprop_step(state: BaselineState, g: float, cfg: BaselineConfig) -> BaselineState:
    ema = cfg.rho * state.ema_g2 + (1.0 - cfg.rho) * g * g
    x = state.x - cfg.lr * g / math.sqrt(ema + cfg.eps_num)
    return replace(state, x=x, t=state.t + 1, ema_g2=ema)


def _adam_moments(state: BaselineState, g: float, cfg: BaselineConfig):
    t = state.t + 1
    m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * g * g
    m_hat = m / (1.0 - cfg.beta1 ** t)
    v_hat = v / (1.0 - cfg.beta2 ** t)
    return t, m, v, cfg.lr * m_hat / (math.sqrt(v_hat) + cfg.eps_num)


def adam_step(state: BaselineState, g: float, cfg: BaselineConfig) -> BaselineState:
    t, m, v, update = _adam_moments(state, g, cfg)
    return replace(state, x=state.x - update, t=t, m=m, v=v)


def adamw_step(state: BaselineState, g: float, cfg: BaselineConfig) -> BaselineState:
    t, m, v, update = _adam_moments(state, g, cfg)
    # decay uses the pre-step iterate
    x = state.x - update - cfg.lr * cfg.weight_decay * state.x
    return replace(state, x=x, t=t, m=m, v=v)


def nag_lookahead(state: BaselineState, cfg: BaselineConfig) -> float:
    return state.x - cfg.momentum * state.velocity


def nag_update(state: BaselineState, g_lookahead: float, cfg: BaselineConfig) -> BaselineState:
    vel = cfg.momentum * state.velocity + cfg.lr * g_lookahead
    return replace(state, x=state.x - vel, t=state.t + 1, velocity=vel)


def nag_step(
    state: BaselineState,
    f: Objective,
    cfg: BaselineConfig,
    domain: Optional[Interval] = None,
) -> BaselineState:
    """Nesterov step; the gradient is taken at the look-ahead point.

    Raises StencilOutOfDomain when the look-ahead point is outside ``domain``
    (default ``f.domain``).
    """
    if domain is None:
        domain = f.domain
    xa = nag_lookahead(state, cfg)
    if domain is not None and xa not in domain:
        raise StencilOutOfDomain(xa, domain.lo, domain.hi)
    return nag_update(state, gradient(f, xa, cfg), cfg)


STEPS = {
    "GD": gd_step,
    "AdaGrad": adagrad_step,
    "RMSprop": rmsprop_step,
    "Adam": adam_step,
    "AdamW": adamw_step,
    "NAG": nag_update,
}


def gradient(f: Objective, x: float, cfg: BaselineConfig) -> float:
    """Gradient from the configured source.

    Stencils are not domain-checked: the baselines are unconstrained methods
    and only their iterates are held to the search interval.
    """
    if cfg.fd_scheme == "analytic":
        if f.analytic_derivative is None:
            raise InvalidConfig(f"objective {f.name!r} has no analytic derivative")
        return float(f.analytic_derivative(x))
    h = cfg.fd_h if cfg.fd_h is not None else default_step(x)
    return finite_diff(f, x, h, cfg.fd_scheme)


def detect_divergence(x: float, f_x: float, domain: Interval) -> bool:
    return not (math.isfinite(x) and math.isfinite(f_x) and domain.lo <= x <= domain.hi)


def baseline_run(
    f: Objective,
    domain: Interval,
    x0: float,
    cfg: BaselineConfig,
) -> tuple[BaselineResult, PointTrace]:
    """Iterate one optimizer from ``x0`` until |g| <= grad_tol, the iteration
    cap, or divergence.

    Each trace row holds the iterate, its objective value, the gradient the
    next step consumes (NaN on the row that diverged), and the cumulative
    evaluation count. For NAG the recorded gradient is the look-ahead one and
    stopping additionally requires |velocity| <= grad_tol.
    """
    if not (math.isfinite(x0) and x0 in domain):
        raise InvalidConfig(f"x0={x0!r} must lie in [{domain.lo!r}, {domain.hi!r}]")
    step = STEPS[cfg.kind]
    is_nag = cfg.kind == "NAG"
    start = f.eval_count

    state = BaselineState(x=float(x0))
    fx = f(state.x)
    if not math.isfinite(fx):
        raise NonFiniteValue(state.x, fx)
    trace = PointTrace()
    termination = MAX_ITERS

    while True:
        n = state.t
        if is_nag:
            xa = nag_lookahead(state, cfg)
            if xa not in domain:
                trace.append(n, state.x, fx, math.nan, f.eval_count - start)
                termination = DIVERGED
                break
            g = gradient(f, xa, cfg)
        else:
            g = gradient(f, state.x, cfg)
        if not math.isfinite(g):
            raise NonFiniteValue(state.x, g, "gradient")
        trace.append(n, state.x, fx, g, f.eval_count - start)
        if abs(g) <= cfg.grad_tol and (not is_nag or abs(state.velocity) <= cfg.grad_tol):
            termination = GRAD_TOL
            break
        if n >= cfg.max_iters:
            break
        state = step(state, g, cfg)
        try:
            fx = f(state.x)
        except NonFiniteValue:
            fx = math.nan
        if detect_divergence(state.x, fx, domain):
            trace.append(state.t, state.x, fx, math.nan, f.eval_count - start)
            termination = DIVERGED
            break

    result = BaselineResult(
        kind=cfg.kind,
        x=state.x,
        f_x=fx,
        iters=state.t,
        evals=f.eval_count - start,
        termination=termination,
        final_state=state,
    )
    return result, trace
