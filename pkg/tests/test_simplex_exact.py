import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from sieve_lab.functionals import SieveParams, compute_J, compute_J0
from sieve_lab.optimizer import table_c_polynomial
from sieve_lab.quad import QuadConfig
from sieve_lab.simplex_exact import (ExactPathNotAvailable, conjecture_J, conjecture_J0_exact,
                                     conjecture_upsilon, power_product_to_monomial,
                                     simplex_monomial)
from sieve_lab.sympoly import SymmetricPolynomial


def test_simplex_monomial_closed_forms():
    assert simplex_monomial(3, [0, 0, 0]) == Fraction(1, 6)
    assert simplex_monomial(2, [1]) == Fraction(1, 6)
    assert simplex_monomial(5, [2, 1, 0, 0, 0], Fraction(1, 2)) == Fraction(2, math.factorial(8)) \
        * Fraction(1, 2) ** 8
    with pytest.raises(ValueError):
        simplex_monomial(2, [1, 1, 1])


def test_simplex_monomial_against_sampling():
    # Dirichlet sampling gives uniform points on the simplex of side 1/2
    rng = np.random.default_rng(0)
    n = 400_000
    pts = rng.dirichlet(np.ones(6), size=n)[:, :5] * 0.5
    vals = pts[:, 0] ** 2 * pts[:, 1]
    vol = 0.5 ** 5 / math.factorial(5)
    est = vol * vals.mean()
    sigma = vol * vals.std() / math.sqrt(n)
    exact = float(simplex_monomial(5, [2, 1, 0, 0, 0], Fraction(1, 2)))
    assert abs(est - exact) <= 4 * sigma


@pytest.mark.parametrize("key,nvars", [((1, 1), 3), ((1, 2), 3), ((2, 2, 1), 4), ((1, 1, 1), 2)])
def test_power_products_match_symbolic_expansion(key, nvars):
    xs = sympy.symbols(f"x0:{nvars}")
    expr = sympy.Integer(1)
    for j in key:
        expr *= sum(x ** j for x in xs)
    poly = sympy.Poly(sympy.expand(expr), *xs)
    want = {}
    for mon, c in poly.terms():
        lam = tuple(sorted((e for e in mon if e), reverse=True))
        want[lam] = c   # every monomial in an orbit carries the same coefficient
    got = dict(power_product_to_monomial(tuple(sorted(key)), nvars))
    assert got == want


def test_linear_weight_k3():
    F = SymmetricPolynomial.shifted_p1(3, [0, 1])
    # int (1 - s)^2 s^2/2 ds over [0, 1]
    assert conjecture_J(F) == Fraction(1, 60)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 7), st.integers(-9, 9).filter(bool))
def test_constant_weight_closed_form(k, c):
    F = SymmetricPolynomial.constant(k, c)
    assert conjecture_J(F) == Fraction(c * c, math.factorial(k))
    e = conjecture_J0_exact(F, Fraction(1, 3))
    # the shifted constant is c inside the support, so only the shell term survives
    assert e.retained.rational == 0
    y = sympy.symbols("y")
    shell = sympy.integrate((1 - (1 - y) ** k) * (1 / y - sympy.Rational(1, 3)), (y, 0, 1)) \
        + sympy.integrate(1 / y - sympy.Rational(1, 3), (y, 1, 3))
    assert float(e.total) == pytest.approx(float(shell) * c * c / math.factorial(k), rel=1e-13)


def test_exact_matches_quadrature_path():
    F = table_c_polynomial(4, 1)
    p = SieveParams(4, Fraction(1, 3), Fraction(1), "simplex", (), "conjecture")
    cfg = QuadConfig(rel_tol=1e-10, abs_tol=1e-14)
    jq = compute_J(F, p, cfg, method="quadrature").value
    j0q = compute_J0(F, p, cfg, method="quadrature")[0].value
    e = conjecture_J0_exact(F, Fraction(1, 3))
    assert jq == pytest.approx(float(e.J), rel=1e-9)
    assert j0q == pytest.approx(float(e.total), rel=1e-8)


@pytest.mark.parametrize("k,which,published", [(3, 1, 7.38120), (5, 2, 13.68492)])
def test_printed_polynomials_reproduce_published_values(k, which, published):
    assert conjecture_upsilon(table_c_polynomial(k, which), Fraction(1, 3)) == \
        pytest.approx(published, abs=5e-5)


def test_exact_path_refuses_other_settings():
    F = SymmetricPolynomial.constant(3, 1)
    with pytest.raises(ExactPathNotAvailable):
        conjecture_J0_exact(F, Fraction(1, 3), Fraction(1, 2))
    with pytest.raises(ExactPathNotAvailable):
        conjecture_J(F, support="extended")
