from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from sieve_lab.sympoly import (ReductionNotAvailable, SymmetricPolynomial, diagonal_reduce,
                               evaluate, int_clipped, power_sums, shift_evaluate)

HEADLINE = SymmetricPolynomial.shifted_p1(5, [11, 85, 170])
F2_K3 = SymmetricPolynomial.from_terms(
    3, [(1846, {}), (-3225, {1: 1}), (2203, {1: 2}), (-727, {1: 3}), (228, {2: 1}),
        (-223, {1: 1, 2: 1})], "raw")


def test_headline_at_origin_and_face():
    assert evaluate(HEADLINE, [0] * 5, exact=True) == 266
    assert evaluate(HEADLINE, [Fraction(1, 5)] * 5, exact=True) == 11


def test_table_entry_against_symbolic_expansion():
    # independent oracle: sympy expands the polynomial in the coordinates
    t1, t2, t3 = sympy.symbols("t1 t2 t3")
    P1 = t1 + t2 + t3
    P2 = t1**2 + t2**2 + t3**2
    expr = sympy.expand(1846 - 3225 * P1 + 2203 * P1**2 - 727 * P1**3 + 228 * P2 - 223 * P1 * P2)
    pt = {t1: sympy.Rational(1, 5), t2: sympy.Rational(3, 10), t3: sympy.Rational(1, 10)}
    want = Fraction(str(expr.subs(pt)))
    got = evaluate(F2_K3, [Fraction(1, 5), Fraction(3, 10), Fraction(1, 10)], exact=True)
    assert got == want
    # frozen value of the oracle
    assert want == Fraction(1846) - Fraction(3225 * 3, 5) + Fraction(2203 * 9, 25) \
        - Fraction(727 * 27, 125) + Fraction(228 * 7, 50) - Fraction(223 * 3 * 7, 250)


def test_diagonal_reduction():
    f = diagonal_reduce(HEADLINE)
    for x in np.linspace(0, 1.3, 7):
        assert f(x) == pytest.approx(11 + 85 * (1 - x) + 170 * (1 - x) ** 2, rel=1e-14)
    c = diagonal_reduce(SymmetricPolynomial.constant(4, 7))
    assert c(0.3) == 7
    with pytest.raises(ReductionNotAvailable):
        diagonal_reduce(F2_K3)


def test_int_clipped():
    f = diagonal_reduce(SymmetricPolynomial.constant(3, 1))
    assert int_clipped(f, 0.2, 0.9, -0.5) == pytest.approx(0.3)
    assert int_clipped(f, 0.4, 0.4, 0.1) == 0
    g = diagonal_reduce(HEADLINE)
    # a = t, b = t + y beyond the clip: integral up to 1 + s/4
    t, y, s = 0.9, 1.2, 0.1
    assert int_clipped(g, t, t + y, s / 4) == pytest.approx(
        g.antiderivative(1 + s / 4) - g.antiderivative(t))


def test_shift_evaluate():
    assert shift_evaluate(HEADLINE, [0.3] * 5, 1, 1.0, "extended") == 0.0
    t = [0.1, 0.05, 0.2, 0.0, 0.1]
    assert shift_evaluate(HEADLINE, t, 2, 0.0, "extended") == pytest.approx(evaluate(HEADLINE, t))
    F = SymmetricPolynomial.shifted_p1(3, [0, 1])
    assert shift_evaluate(F, [0.2, 0.2, 0.2], 1, 0.3, "simplex") == pytest.approx(0.1)


def test_basis_round_trip_and_json():
    raw = F2_K3
    back = raw.to_shifted().to_raw()
    assert back.key() == raw.key()
    assert SymmetricPolynomial.loads(raw.dumps()).key() == raw.key()
    pt = [Fraction(1, 7), Fraction(2, 9), Fraction(1, 11)]
    assert evaluate(raw.to_shifted(), pt, exact=True) == evaluate(raw, pt, exact=True)


def test_power_sums():
    # index j holds P_j
    assert power_sums([1, 2, 3], 3, exact=True)[1:] == [6, 14, 36]


coords = st.lists(st.fractions(min_value=0, max_value=1, max_denominator=50),
                  min_size=3, max_size=6)


@settings(max_examples=60, deadline=None)
@given(coords, st.randoms(use_true_random=False))
def test_permutation_invariance(t, rnd):
    k = len(t)
    F = SymmetricPolynomial.from_terms(
        k, [(3, {}), (-2, {1: 1}), (5, {2: 1}), (1, {1: 1, 3: 1}), (-4, {2: 2})], "shifted")
    perm = list(t)
    rnd.shuffle(perm)
    assert evaluate(F, t, exact=True) == evaluate(F, perm, exact=True)
    a = evaluate(F, [float(x) for x in t])
    b = evaluate(F, [float(x) for x in perm])
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_diagonal_consistency_random_points():
    rng = np.random.default_rng(3)
    F = SymmetricPolynomial.raw_p1(4, [529, -877, 567, -189])
    f = diagonal_reduce(F)
    for _ in range(1000):
        t = rng.dirichlet(np.ones(5))[:4]
        assert abs(evaluate(F, t) - f(t.sum())) <= 1e-12 * 1000


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5),
       st.floats(0.0, 1.2, allow_nan=False))
def test_antiderivative_matches_finite_difference(coeffs, x):
    f = diagonal_reduce(SymmetricPolynomial.shifted_p1(3, coeffs))
    h = 1e-5
    fd = (f.antiderivative(x + h) - f.antiderivative(x - h)) / (2 * h)
    assert abs(fd - f(x)) <= 1e-6 * max(1.0, float(np.abs(f.as_array()).sum()))
    assert f.derivative_of_antider() == f.coeffs
