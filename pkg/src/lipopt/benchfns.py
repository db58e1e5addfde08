"""Test-function registry and the brute-force grid oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Interval, Objective
from .errors import InvalidConfig, NonFiniteValue, UnknownFunction

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def f1(x: float) -> float:
    return x * math.sin(x)


def f1_prime(x: float) -> float:
    return math.sin(x) + x * math.cos(x)


def f2(x: float) -> float:
    x3 = x * x * x
    return 2.0 * x * math.sin(x3) - x * math.cos(x3 / 12.0)


def f3(x: float) -> float:
    return math.exp(-0.004 * (x - 35.0) ** 2) * (
        math.sin(0.3 * x) + math.exp(-0.2 * (x - 25.0) ** 2) * math.sin(5.0 * x)
    )


def quad(x: float, c: float = 0.5) -> float:
    return (x - c) ** 2


def quad_prime(x: float, c: float = 0.5) -> float:
    return 2.0 * (x - c)


def _f1_np(x):
    return x * np.sin(x)


def _f2_np(x):
    x3 = x * x * x
    return 2.0 * x * np.sin(x3) - x * np.cos(x3 / 12.0)


def _f3_np(x):
    return np.exp(-0.004 * (x - 35.0) ** 2) * (
        np.sin(0.3 * x) + np.exp(-0.2 * (x - 25.0) ** 2) * np.sin(5.0 * x)
    )


def _quad_np(x):
    return (x - 0.5) ** 2


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    func: Callable[[float], float]
    default_domain: Interval
    derivative: Optional[Callable[[float], float]] = None
    vectorized: Optional[Callable] = None
    default_x0: float = 0.0
    notes: str = ""

    @property
    def analytic_derivative_available(self) -> bool:
        return self.derivative is not None

    def objective(self, domain: Optional[Interval] = None) -> Objective:
        """A fresh counted objective for this entry."""
        return Objective(self.func, self.derivative, self.name,
                         domain or self.default_domain, self.vectorized)


# default_x0 values are starting points for the local baselines; each sits in
# a basin that does not contain the global minimizer on the default domain.
REGISTRY: dict[str, RegistryEntry] = {
    e.name: e
    for e in (
        RegistryEntry("f1", f1, Interval(0.0, 10.0), f1_prime, _f1_np, default_x0=1.0,
                      notes="x*sin(x); several minima, regular"),
        RegistryEntry("f2", f2, Interval(0.0, 3.0), None, _f2_np, default_x0=0.5,
                      notes="2x*sin(x^3) - x*cos(x^3/12); many minima, steep oscillation"),
        RegistryEntry("f3", f3, Interval(0.0, 50.0), None, _f3_np, default_x0=10.0,
                      notes="Gaussian-envelope sine with a rough bump at x=25"),
        RegistryEntry("quad", quad, Interval(0.0, 1.0), quad_prime, _quad_np, default_x0=0.0,
                      notes="(x-0.5)^2 convex control"),
    )
}

BENCHMARK_FUNCTIONS = ("f1", "f2", "f3")


def lookup(name: str) -> RegistryEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownFunction(name, sorted(REGISTRY)) from None


@dataclass(frozen=True)
class OracleResult:
    x_star: float
    f_star: float
    grid_points: int
    refined: bool


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
                   max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for a minimum on [lo, hi]; returns the best
    point evaluated, endpoints included."""
    best_x, best_f = lo, f(lo)
    fh = f(hi)
    if fh < best_f:
        best_x, best_f = hi, fh
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx < best_f:
                best_x, best_f = x, fx
    for x, fx in ((c, fc), (d, fd)):
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x, best_f


CHUNK = 1 << 16


def grid_oracle(f: Objective, domain: Interval, n: int = 1_000_000, refine: bool = True) -> OracleResult:
    """Minimize by exhaustive evaluation on ``n`` uniform points, endpoints
    included. The lowest index wins ties. With ``refine``, golden-section
    search within one grid spacing of the winner polishes the result."""
    if not (isinstance(n, int) and n >= 2):
        raise InvalidConfig(f"grid needs n >= 2 points, got {n!r}")
    xs = np.linspace(domain.lo, domain.hi, n)
    best_i, best_f = -1, math.inf
    # fixed chunk order keeps the reduction deterministic
    for start in range(0, n, CHUNK):
        chunk = xs[start:start + CHUNK]
        ys = f.eval_many(chunk)
        finite = np.isfinite(ys)
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise NonFiniteValue(float(chunk[bad]), float(ys[bad]))
        i = int(np.argmin(ys))
        if ys[i] < best_f:
            best_i, best_f = start + i, float(ys[i])

    x_star = float(xs[best_i])
    f_star = f(x_star)
    if not math.isfinite(f_star):
        raise NonFiniteValue(x_star, f_star)
    if refine:
        h = domain.width / (n - 1)
        lo = max(domain.lo, x_star - h)
        hi = min(domain.hi, x_star + h)
        xr, fr = golden_section(f, lo, hi)
        if fr < f_star:
            x_star, f_star = xr, fr
    return OracleResult(x_star=x_star, f_star=f_star, grid_points=n, refined=refine)
