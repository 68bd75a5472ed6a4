import math

import numpy as np
import pytest

from sieve_lab.quad import (IteratedDomain, NonFiniteIntegrand, QuadConfig, arrangement_domain,
                            integrate_iterated, integrate_mc, region_domain)
from sieve_lab.regions import make_support


def triangle():
    return IteratedDomain(2, [(0.0, 1.0), (0.0, lambda o: o[0])])


def test_triangle_area():
    res = integrate_iterated(triangle(), lambda p: np.ones(len(p)))
    assert res.converged
    assert res.value == pytest.approx(0.5, abs=1e-14)


def test_empty_slab_is_zero():
    dom = IteratedDomain(1, [(1.0, 0.5)])
    res = integrate_iterated(dom, lambda p: np.ones(len(p)))
    assert res.value == 0.0 and res.error == 0.0


@pytest.mark.parametrize("k", [3, 4, 5])
def test_simplex_volume_both_engines(k):
    reg = make_support(k, "simplex")
    q = integrate_iterated(region_domain(reg), lambda p: np.ones(len(p)))
    assert q.value == pytest.approx(1 / math.factorial(k), rel=1e-10)
    mc = integrate_mc(reg, lambda p: np.ones(len(p)), QuadConfig(mc_samples=400_000, seed=2))
    assert abs(mc.value - 1 / math.factorial(k)) <= 3 * mc.error


def test_extended_support_volume_cross_check():
    reg = make_support(4, "extended")
    q = integrate_iterated(arrangement_domain(reg), lambda p: np.ones(len(p)),
                           QuadConfig(rel_tol=1e-8))
    mc = integrate_mc(reg, lambda p: np.ones(len(p)), QuadConfig(mc_samples=10**6, seed=4))
    assert abs(q.value - mc.value) <= max(3 * mc.error, 0.01 * q.value)


def test_kinked_integrand_with_breakpoint():
    dom = IteratedDomain(1, [(0.0, 2.0)], [lambda o: [math.sqrt(2)]])
    res = integrate_iterated(dom, lambda p: np.abs(p[:, 0] - math.sqrt(2)),
                             QuadConfig(rel_tol=1e-12, abs_tol=1e-14))
    exact = (2 + (2 - math.sqrt(2)) ** 2) / 2
    assert res.value == pytest.approx(exact, rel=1e-12)


def test_refinement_monotonicity():
    # without the breakpoint the kink forces refinement; tighter tolerance must not hurt
    dom = IteratedDomain(2, [(0.0, 1.0), (0.0, 1.0)])
    fn = lambda p: np.sqrt(np.abs(p[:, 0] - 0.3)) * np.exp(p[:, 1])  # noqa: E731
    exact = (2 / 3) * (0.3 ** 1.5 + 0.7 ** 1.5) * (math.e - 1)
    errs, evals = [], []
    for tol in (1e-3, 1e-5, 1e-7):
        r = integrate_iterated(dom, fn, QuadConfig(rel_tol=tol, abs_tol=tol * 1e-3))
        errs.append(abs(r.value - exact))
        evals.append(r.evaluations)
        assert errs[-1] <= 10 * tol * exact
    assert evals[0] <= evals[1] <= evals[2]
    assert errs[2] <= errs[0] + 1e-15


def test_nan_is_reported():
    dom = IteratedDomain(1, [(0.0, 1.0)])
    with pytest.raises(NonFiniteIntegrand):
        integrate_iterated(dom, lambda p: np.where(p[:, 0] > 0.5, np.nan, 1.0))


def test_non_convergence_flag():
    dom = IteratedDomain(1, [(0.0, 1.0)])
    res = integrate_iterated(dom, lambda p: np.sin(1 / (p[:, 0] + 1e-4)),
                             QuadConfig(max_depth=2, rel_tol=1e-12, abs_tol=1e-14))
    assert not res.converged


def test_mc_linearity_and_determinism():
    reg = make_support(3, "simplex")
    cfg = QuadConfig(mc_samples=50_000, seed=9)
    g = lambda p: p[:, 0] ** 2 + p[:, 1]  # noqa: E731
    a = integrate_mc(reg, g, cfg)
    b = integrate_mc(reg, lambda p: 3.5 * g(p), cfg)
    assert b.value == pytest.approx(3.5 * a.value, rel=1e-13)
    assert integrate_mc(reg, g, cfg).value == a.value
