"""Shared primitives: search intervals, counted objectives, secant slopes,
finite differences and Lipschitz-constant estimation."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegeneratePair, InvalidConfig, NonFiniteValue, StencilOutOfDomain

ScalarFn = Callable[[float], float]

SCHEMES = ("forward", "backward", "central")


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidConfig(f"interval endpoints must be finite, got [{self.lo!r}, {self.hi!r}]")
        if not lo < hi:
            raise InvalidConfig(f"interval must satisfy lo < hi, got [{self.lo!r}, {self.hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``"lo:hi"``."""
        parts = text.split(":")
        if len(parts) != 2:
            raise InvalidConfig(f"domain must look like lo:hi, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise InvalidConfig(f"domain must look like lo:hi, got {text!r}") from exc


class Objective:
    """A scalar function with a thread-safe evaluation counter.

    ``vectorized`` is an optional numpy ufunc-style twin of ``func`` used for
    bulk grid evaluation; it must agree with ``func`` to rounding.
    Python math-domain errors are reported as :class:`NonFiniteValue`.
    """

    def __init__(
        self,
        func: ScalarFn,
        derivative: Optional[ScalarFn] = None,
        name: str = "f",
        domain: Optional[Interval] = None,
        vectorized: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.func = func
        self.analytic_derivative = derivative
        self.name = name
        self.domain = domain
        self.vectorized = vectorized
        self._count = 0
        self._lock = threading.Lock()

    @property
    def eval_count(self) -> int:
        return self._count

    def __call__(self, x: float) -> float:
        with self._lock:
            self._count += 1
        try:
            return float(self.func(x))
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise NonFiniteValue(x, reason=str(exc)) from exc

    eval = __call__

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate on an array; counts one evaluation per element."""
        xs = np.asarray(xs, dtype=float)
        with self._lock:
            self._count += xs.size
        if self.vectorized is not None:
            with np.errstate(all="ignore"):
                return np.asarray(self.vectorized(xs), dtype=float)
        func = self.func
        out = np.empty(xs.size)
        for i, x in enumerate(xs.tolist()):
            try:
                out[i] = func(x)
            except (ValueError, OverflowError, ZeroDivisionError):
                out[i] = math.nan
        return out

    def fresh(self) -> "Objective":
        """Copy with a zeroed counter."""
        return Objective(self.func, self.analytic_derivative, self.name, self.domain, self.vectorized)

    def __repr__(self) -> str:
        return f"Objective({self.name!r}, evals={self._count})"


@dataclass(frozen=True)
class LipschitzEstimate:
    k_hat: float
    samples: int
    safety_factor: float
    # slope maximum before the safety factor
    raw_max_slope: float = 0.0


def global_gradient(f: Objective, x: float, y: float) -> float:
    """Secant slope between two arbitrary points. Symmetric in x and y."""
    if x == y:
        raise DegeneratePair(f"global gradient needs two distinct points, got x = y = {x!r}")
    # order the operands so F(x, y) and F(y, x) run the same arithmetic
    if y < x:
        x, y = y, x
    return (f(y) - f(x)) / (y - x)


def default_step(x: float) -> float:
    return 1e-6 * max(1.0, abs(x))


def finite_diff(
    f: Objective,
    x: float,
    h: Optional[float] = None,
    scheme: str = "central",
    domain: Optional[Interval] = None,
) -> float:
    """Finite-difference derivative of ``f`` at ``x``.

    Stencil points are checked against ``domain`` only when one is given.
    """
    if h is None:
        h = default_step(x)
    if not h > 0:
        raise InvalidConfig(f"finite-difference step must be positive, got {h!r}")
    if scheme == "forward":
        pts = (x, x + h)
    elif scheme == "backward":
        pts = (x - h, x)
    elif scheme == "central":
        pts = (x - h, x + h)
    else:
        raise InvalidConfig(f"unknown finite-difference scheme {scheme!r}; use one of {SCHEMES}")
    if domain is not None:
        for p in pts:
            if p not in domain:
                raise StencilOutOfDomain(p, domain.lo, domain.hi)
    lo_val = f(pts[0])
    hi_val = f(pts[1])
    if scheme == "central":
        return (hi_val - lo_val) / (2.0 * h)
    return (hi_val - lo_val) / h


def estimate_lipschitz(
    f: Objective,
    domain: Interval,
    samples: int = 10_001,
    safety_factor: float = 1.5,
) -> LipschitzEstimate:
    """Inflated maximum secant slope over consecutive points of a uniform grid.

    Underestimates sup|f'| for C1 functions by a vanishing amount as the grid
    refines; the safety factor covers the gap. Costs ``samples`` evaluations.
    """
    if samples < 2:
        raise InvalidConfig(f"need at least 2 samples, got {samples}")
    if not safety_factor >= 1.0:
        raise InvalidConfig(f"safety factor must be >= 1, got {safety_factor!r}")
    xs = np.linspace(domain.lo, domain.hi, samples)
    ys = f.eval_many(xs)
    if not np.all(np.isfinite(ys)):
        bad = int(np.flatnonzero(~np.isfinite(ys))[0])
        raise NonFiniteValue(float(xs[bad]), float(ys[bad]))
    slopes = np.abs(np.diff(ys) / np.diff(xs))
    raw = float(slopes.max())
    return LipschitzEstimate(k_hat=safety_factor * raw, samples=samples,
                             safety_factor=safety_factor, raw_max_slope=raw)
