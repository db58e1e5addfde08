import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipopt import (
    BracketCollapse,
    BracketState,
    Interval,
    InvalidConfig,
    NonFiniteValue,
    NonpositiveK,
    Objective,
    SuGDConfig,
    alpha_max,
    estimate_lipschitz,
    iteration_bound,
    lookup,
    sugd_run,
    sugd_step,
    width_metric,
)
from lipopt.benchfns import f1
from lipopt.sugd import COLLAPSED, MAX_ITERS, TOLERANCE_MET

UNIT = Interval(0.0, 1.0)


def obj(fn):
    return Objective(fn)


def trace_arrays(trace):
    return (np.asarray(trace.iters), np.asarray(trace.x1), np.asarray(trace.x2),
            np.asarray(trace.f1), np.asarray(trace.f2), np.asarray(trace.width))


def check_bracket_invariants(trace, alpha):
    """Per-step invariants of a bracket trace; returns the number of steps."""
    it, x1, x2, f1_, f2_, w = trace_arrays(trace)
    assert np.array_equal(it, np.arange(len(it)))
    assert np.all(x1 < x2)
    dx1, dx2 = np.diff(x1), np.diff(x2)
    assert np.all(dx1 >= 0)
    assert np.all(dx2 <= 0)
    # exactly one endpoint moves, the other is bitwise unchanged
    assert np.all((dx1 != 0) ^ (dx2 != 0))
    width = x2 - x1
    assert np.all(width[1:] <= (1 - alpha) * width[:-1] + 1e-15)
    return len(it) - 1


# ------------------------------------------------------------------ alpha_max

@pytest.mark.parametrize("eps,dom,k,expected", [
    (0.1, Interval(0, 10), 1.0, 0.005),
    (1e-3, Interval(0, 10), 10.0, 1e-3 / 1100),
    (1.0, UNIT, 1.0, 0.5),
])
def test_alpha_max(eps, dom, k, expected):
    assert alpha_max(eps, dom, k) == pytest.approx(expected, rel=1e-15)


def test_alpha_max_example_value():
    assert alpha_max(1e-3, Interval(0, 10), 10.0) == pytest.approx(9.0909e-7, rel=1e-4)


@pytest.mark.parametrize("k", [0.0, -1.0])
def test_alpha_max_rejects_nonpositive_k(k):
    with pytest.raises(NonpositiveK):
        alpha_max(0.1, UNIT, k)


# --------------------------------------------------------------- width_metric

def test_width_metric_examples():
    assert width_metric(BracketState(0.0, 1.0, 0.0, 1.0)) == 2.0
    assert width_metric(BracketState(0.0, 1.0, 3.0, 3.0)) == 1.0
    assert width_metric(BracketState(0.0, math.pi, f1(0.0), f1(math.pi))) == pytest.approx(math.pi, rel=1e-15)


# ------------------------------------------------------------------ sugd_step

def test_step_right_endpoint_moves_when_right_is_higher():
    f = obj(lambda x: x)
    s = sugd_step(f, BracketState(0.0, 1.0, 0.0, 1.0), 0.1)
    assert (s.x1, s.x2) == (0.0, pytest.approx(0.8, abs=1e-15))
    assert s.iter == 1


def test_step_left_endpoint_moves_when_left_is_higher():
    f = obj(lambda x: -x)
    s = sugd_step(f, BracketState(0.0, 1.0, 0.0, -1.0), 0.1)
    assert (s.x1, s.x2) == (pytest.approx(0.2, abs=1e-15), 1.0)


def test_step_tie_moves_right_endpoint():
    f = obj(lambda x: (x - 0.5) ** 2)
    s = sugd_step(f, BracketState(0.0, 1.0, 0.25, 0.25), 0.1)
    assert s.x1 == 0.0
    assert s.x2 == pytest.approx(0.9, abs=1e-15)


def test_step_evaluates_once_and_keeps_other_cache():
    f = obj(f1)
    s0 = BracketState.initial(f, Interval(0, 10))
    n0 = f.eval_count
    s1 = sugd_step(f, s0, 1e-2)
    assert f.eval_count == n0 + 1
    # f(10) < f(0), so x1 moved and x2's cache is untouched
    assert s1.x2 == s0.x2 and s1.f2 == s0.f2
    assert s1.f1 == f1(s1.x1)


def test_step_collapse():
    f = obj(lambda x: 100 * x)
    with pytest.raises(BracketCollapse):
        sugd_step(f, BracketState(0.0, 1.0, 0.0, 100.0), 0.5)


def test_step_matches_secant_form():
    """The simplified update equals x - a*(x1-x2)*(1 -/+ F) up to rounding."""
    f = obj(f1)
    s = BracketState.initial(f, Interval(0, 10))
    for _ in range(50):
        F = (s.f2 - s.f1) / (s.x2 - s.x1)
        if s.f2 - s.f1 < 0:
            expect = (s.x1 - 0.01 * (s.x1 - s.x2) * (1 - F), s.x2)
        else:
            expect = (s.x1, s.x2 - 0.01 * (s.x2 - s.x1) * (1 + F))
        s = sugd_step(f, s, 0.01)
        assert s.x1 == pytest.approx(expect[0], abs=1e-13)
        assert s.x2 == pytest.approx(expect[1], abs=1e-13)


# ----------------------------------------------------------- iteration_bound

def test_iteration_bound_examples():
    assert iteration_bound(UNIT, 1.0, 0.5, 0.5) == 2
    assert iteration_bound(UNIT, 0.1, 1.1, 0.9) == 0
    b = iteration_bound(Interval(0, 10), 10.0, 1e-6, 9.0909e-7)
    assert b == math.ceil(math.log(1e-6 / 110) / math.log1p(-9.0909e-7))
    assert b == pytest.approx(2.04e7, rel=0.01)


@pytest.mark.parametrize("alpha,k,tol", [(0.0, 1.0, 1e-3), (1.0, 1.0, 1e-3), (0.1, -1.0, 1e-3), (0.1, 1.0, 0.0)])
def test_iteration_bound_preconditions(alpha, k, tol):
    with pytest.raises(InvalidConfig):
        iteration_bound(UNIT, k, tol, alpha)


# ------------------------------------------------------------------- sugd_run

def test_run_quadratic(oracle):
    f = lookup("quad").objective()
    res, trace = sugd_run(f, UNIT, SuGDConfig(alpha=0.01, tol=1e-6))
    assert res.converged and res.termination == TOLERANCE_MET
    assert abs(res.x_min - oracle["quad"][0]) <= 1e-3
    assert len(trace) == res.iters + 1
    assert res.evals == res.iters + 2


def test_run_constant_function():
    f = obj(lambda x: 2.0)
    res, trace = sugd_run(f, UNIT, SuGDConfig(alpha=0.1, tol=0.5))
    assert res.converged
    assert res.x_min == 0.0
    # tie branch shrinks the width by exactly 0.9 per step
    assert res.iters == math.ceil(math.log(0.5) / math.log(0.9))
    assert trace.width[-1] <= 0.5 < trace.width[-2]


def test_run_f1_practical(oracle):
    x_star, f_star = oracle["f1"]
    res, _ = sugd_run(lookup("f1").objective(), Interval(0, 10), SuGDConfig(alpha=1e-3, tol=1e-6))
    assert res.termination == TOLERANCE_MET
    assert abs(res.x_min - x_star) < 1e-6
    assert 0 <= res.f_min - f_star < 1e-5
    assert res.f_best_seen <= res.f_min


def test_run_matches_repeated_steps():
    f = lookup("f2").objective()
    dom = Interval(0, 3)
    res, trace = sugd_run(f, dom, SuGDConfig(alpha=1e-2, tol=1e-6))
    g = lookup("f2").objective()
    s = BracketState.initial(g, dom)
    states = [s]
    for _ in range(res.iters):
        s = sugd_step(g, s, 1e-2)
        states.append(s)
    assert list(trace.x1) == [t.x1 for t in states]
    assert list(trace.x2) == [t.x2 for t in states]
    assert list(trace.width) == [width_metric(t) for t in states]
    assert g.eval_count == f.eval_count


def test_run_deterministic():
    a = sugd_run(lookup("f3").objective(), Interval(0, 50), SuGDConfig(alpha=1e-2))[1]
    b = sugd_run(lookup("f3").objective(), Interval(0, 50), SuGDConfig(alpha=1e-2))[1]
    assert a == b


def test_run_max_iters():
    res, trace = sugd_run(obj(f1), Interval(0, 10), SuGDConfig(alpha=1e-4, max_iters=10))
    assert res.termination == MAX_ITERS and not res.converged
    assert res.iters == 10 and len(trace) == 11


def test_run_without_trace():
    res, trace = sugd_run(obj(f1), Interval(0, 10), SuGDConfig(alpha=1e-3), record_trace=False)
    assert trace is None and res.converged


def test_run_nonfinite_aborts():
    f = obj(lambda x: math.nan if 0.4 < x < 0.6 else abs(x - 0.5))
    with pytest.raises(NonFiniteValue) as info:
        sugd_run(f, UNIT, SuGDConfig(alpha=0.05))
    assert 0.4 < info.value.x < 0.6


def test_run_collapse_raises_and_force_records():
    f = obj(lambda x: 50 * x)
    with pytest.raises(BracketCollapse):
        sugd_run(f, UNIT, SuGDConfig(alpha=0.5))
    res, trace = sugd_run(obj(lambda x: 50 * x), UNIT, SuGDConfig(alpha=0.5, force=True))
    assert res.termination == COLLAPSED and not res.converged
    assert "collapsed" in res.collapse
    assert np.all(np.asarray(trace.x1) < np.asarray(trace.x2))


def test_config_guard():
    with pytest.raises(InvalidConfig):
        SuGDConfig(alpha=0.5, lipschitz=1.0).resolve(UNIT)
    SuGDConfig(alpha=0.5, lipschitz=1.0, force=True).resolve(UNIT)
    with pytest.raises(InvalidConfig):
        SuGDConfig().resolve(UNIT)
    with pytest.raises(InvalidConfig):
        SuGDConfig(alpha=0.1, tol=0).resolve(UNIT)


def test_config_derives_alpha_and_max_iters():
    dom = Interval(0, 10)
    cfg = SuGDConfig(lipschitz=10.0, epsilon_target=1e-3).resolve(dom)
    assert cfg.alpha == alpha_max(1e-3, dom, 10.0)
    assert cfg.max_iters == 2 * iteration_bound(dom, 10.0, 1e-6, cfg.alpha)
    # large epsilon: crossing cap wins
    cfg = SuGDConfig(lipschitz=1.0, epsilon_target=100.0).resolve(dom)
    assert cfg.alpha == 0.25
    assert SuGDConfig(alpha=0.1).resolve(dom).max_iters == 10_000_000


# ------------------------------------------------------------ property tests

@st.composite
def smooth_functions(draw):
    """Random sums of a few sinusoids plus a quadratic, with a Lipschitz bound."""
    n = draw(st.integers(1, 3))
    terms = [(draw(st.floats(-2, 2)), draw(st.floats(0.1, 8)), draw(st.floats(0, 6.3))) for _ in range(n)]
    c = draw(st.floats(0, 1))
    q = draw(st.floats(0, 3))

    def fn(x):
        return q * (x - c) ** 2 + sum(a * math.sin(w * x + p) for a, w, p in terms)

    k = 2 * q * 1.0 + sum(abs(a) * w for a, w, _ in terms)
    return fn, k


@settings(max_examples=60, deadline=None)
@given(smooth_functions(), st.floats(0.05, 0.95))
def test_run_invariants_hold(fk, frac):
    fn, k = fk
    alpha = frac / (1 + k)
    f = obj(fn)
    cfg = SuGDConfig(alpha=alpha, tol=1e-6, lipschitz=k)
    res, trace = sugd_run(f, UNIT, cfg)
    check_bracket_invariants(trace, alpha)
    assert res.evals == res.iters + 2
    assert res.iters <= iteration_bound(UNIT, k, 1e-6, alpha)
    assert res.converged
    assert res.f_best_seen <= res.f_min


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(1e-4, 0.3))
def test_quadratic_converges_to_vertex(c, alpha):
    f = obj(lambda x: (x - c) ** 2)
    res, _ = sugd_run(f, UNIT, SuGDConfig(alpha=alpha, tol=1e-9, lipschitz=2.0))
    assert abs(res.x_min - c) < 1e-6


@pytest.mark.parametrize("name,eps", [("quad", 1e-2), ("f3", 0.1), ("f1", 0.05)])
def test_theorem_step_keeps_optimum_bracketed(name, eps, oracle):
    entry = lookup(name)
    dom = entry.default_domain
    k = estimate_lipschitz(entry.objective(), dom, 100_000, 1.2).k_hat
    alpha = alpha_max(eps, dom, k)
    res, trace = sugd_run(entry.objective(), dom, SuGDConfig(alpha=alpha, tol=1e-6, lipschitz=k))
    x_star, f_star = oracle[name]
    x1, x2 = np.asarray(trace.x1), np.asarray(trace.x2)
    assert np.all(x1 <= x_star + eps / k)
    assert np.all(x2 >= x_star - eps / k)
    check_bracket_invariants(trace, alpha)
    assert res.iters <= iteration_bound(dom, k, 1e-6, alpha)
    assert res.f_min - f_star <= eps
