from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sieve_lab.functionals import SieveParams, upsilon
from sieve_lab.optimizer import (BasisSpec, DegenerateBasis, GramPair, QuadraticForms,
                                 assemble_gram, basis_f1, basis_quadratic, jacobi_eigh,
                                 minimize_rayleigh, optimize, reoptimize_table)
from sieve_lab.simplex_exact import conjecture_J, conjecture_J0_exact
from sieve_lab.sympoly import SymmetricPolynomial

Q = Fraction
BIG = Fraction(10**40)   # makes the k/theta0 term vanish in float arithmetic


def test_diagonal_pair():
    g = GramPair(np.diag([2.0, 1.0]), np.eye(2), 1, BIG, const_index=None)
    c, ups = minimize_rayleigh(g)
    assert ups == pytest.approx(1.0, abs=1e-14)
    assert c == pytest.approx([0.0, 1.0], abs=1e-14)


def random_spd(rng, n):
    M = rng.normal(size=(n, n))
    return M @ M.T + n * np.eye(n)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_pair_against_sphere_grid(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4))
    A = A + A.T
    B = random_spd(rng, 4)
    _, ups = minimize_rayleigh(GramPair(A, B, 1, BIG))
    # oracle: dense hyperspherical grid, then local polishing of the best cells
    n = 60
    a1, a2 = np.meshgrid(np.linspace(0, np.pi, n), np.linspace(0, np.pi, n), indexing="ij")
    a3 = np.linspace(0, 2 * np.pi, 2 * n)
    X = []
    for phi in a3:
        X.append(np.stack([np.cos(a1), np.sin(a1) * np.cos(a2),
                           np.sin(a1) * np.sin(a2) * np.cos(phi),
                           np.sin(a1) * np.sin(a2) * np.sin(phi)], axis=-1).reshape(-1, 4))
    X = np.concatenate(X)
    R = np.einsum("ij,jk,ik->i", X, A, X) / np.einsum("ij,jk,ik->i", X, B, X)
    best = X[np.argsort(R)[:20]]
    for x in best:
        step = 0.05
        r = x @ A @ x / (x @ B @ x)
        while step > 1e-9:
            moved = False
            for d in np.concatenate([np.eye(4), -np.eye(4)]):
                y = x + step * d
                ry = y @ A @ y / (y @ B @ y)
                if ry < r:
                    x, r, moved = y, ry, True
            if not moved:
                step /= 2
        R = np.append(R, r)
    assert ups == pytest.approx(R.min(), abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_jacobi_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    S = rng.normal(size=(n, n))
    S = S + S.T
    w, V = jacobi_eigh(S)
    assert w == pytest.approx(np.linalg.eigvalsh(S), abs=1e-10 * max(1, np.abs(S).max()))
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-12)
    assert np.allclose(S @ V, V * w, atol=1e-9)


def test_single_element_basis_reproduces_upsilon():
    F = SymmetricPolynomial.shifted_p1(4, [2, 3, 1])
    p = SieveParams(4, Q(1, 4), Q(3, 8), "extended", [(1, 1), (2, 1), (2, 2)])
    basis = BasisSpec(4, (F,))
    g = assemble_gram(basis, p)
    assert g.upsilon_of([1.0]) == pytest.approx(upsilon(F, p).upsilon, abs=1e-10)
    _, ups = minimize_rayleigh(g)
    assert ups == pytest.approx(upsilon(F, p).upsilon, abs=1e-10)


def test_two_element_gram_against_exact_rationals():
    k = 3
    p = SieveParams(k, Q(1, 3), None, "simplex", (), "conjecture")
    one = SymmetricPolynomial.constant(k, 1)
    lin = SymmetricPolynomial.shifted_p1(k, [0, 1])
    g = assemble_gram(BasisSpec(k, (one, lin)), p)
    els = (one, lin)
    for i in range(2):
        for j in range(2):
            u, v = els[i], els[j]
            Jx = (conjecture_J(u + v) - conjecture_J(u - v)) / 4
            N = lambda F: conjecture_J0_exact(F, Q(1, 3)).total  # noqa: E731
            Nx = (float(N(u + v)) - float(N(u - v))) / 4
            assert g.B[i, j] == pytest.approx(float(Jx), rel=1e-12)
            assert g.A[i, j] == pytest.approx(Nx, rel=1e-10)
    assert g.B[0, 0] == pytest.approx(1 / 6) and g.B[1, 1] == pytest.approx(1 / 60)
    assert np.array_equal(g.A, g.A.T) and np.array_equal(g.B, g.B.T)


def test_degenerate_basis_is_rejected():
    k = 3
    p = SieveParams(k, Q(1, 3), None, "simplex", (), "conjecture")
    F = SymmetricPolynomial.shifted_p1(k, [1, 1])
    with pytest.raises(DegenerateBasis):
        assemble_gram(BasisSpec(k, (F, F.scale(2))), p)


def test_quadratic_family_k3():
    res, = reoptimize_table("G", 3)
    assert res.upsilon <= 7.85039 + 1e-3
    assert res.coefficients[0] == 1.0


def test_positivity_costs_something_and_stays_positive():
    k = 4
    p = SieveParams(k, Q(1, 3), None, "simplex", (), "conjecture")
    forms = QuadraticForms(p)
    _, c_free, free = optimize(basis_f1(k, False), p, forms=forms)
    _, c_pos, pos = optimize(basis_f1(k, True), p, forms=forms)
    assert np.all(c_pos >= 0)
    assert pos >= free - 1e-12
    # never worse than any single basis element
    for e in basis_f1(k).elements:
        assert pos <= upsilon(e, p).upsilon + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100.0))
def test_argmin_is_scale_free(s):
    k = 3
    p = SieveParams(k, Q(1, 4), None, "extended", (), "conjecture")
    basis = basis_quadratic(k)
    g = assemble_gram(basis, p)
    c, ups = minimize_rayleigh(g)
    g2 = GramPair(g.A * s, g.B * s, g.k, g.theta0, const_index=g.const_index)
    c2, ups2 = minimize_rayleigh(g2)
    assert ups2 == pytest.approx(ups, rel=1e-10)
    assert c2 == pytest.approx(c, rel=1e-8)
    assert g.upsilon_of(c * 7.0) == pytest.approx(ups, rel=1e-12)


def test_eigen_value_matches_direct_evaluation():
    k = 4
    p = SieveParams(k, Q(1, 4), None, "extended", (), "conjecture")
    F, _, ups = optimize(basis_quadratic(k), p)
    assert upsilon(F, p).upsilon == pytest.approx(ups, abs=1e-7)
