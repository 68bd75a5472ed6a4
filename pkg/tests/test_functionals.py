import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sieve_lab.functionals import (FunctionalReport, PathNotAvailable, SieveParams, compute_J,
                                   compute_J0, compute_J11, compute_Jrs, compute_Jrs_flat,
                                   piece_integrals, upsilon)
from sieve_lab.optimizer import table_c_polynomial
from sieve_lab.quad import QuadConfig, integrate_mc
from sieve_lab.regions import make_correction_domain
from sieve_lab.sympoly import SymmetricPolynomial

HEADLINE = SymmetricPolynomial.shifted_p1(5, [11, 85, 170])
Q = Fraction


def headline_params(corrections=()):
    return SieveParams(5, Q(1, 4), Q(3, 8), "extended", corrections, "standard")


def test_j11_hand_value():
    F = SymmetricPolynomial.constant(3, 1)
    p = SieveParams(3, Q(1, 4), Q(1, 2), "simplex", (), "standard")
    assert compute_J11(F, p).value == pytest.approx(1 / 12, rel=1e-13)


@pytest.mark.parametrize("name,value", [("J", 14.3115286045), ("J0", 15.7806245134),
                                        ("J01", 11.3104037062), ("J02", 20.2508453206),
                                        ("J11", 9.4661240888)])
def test_headline_constituents(name, value):
    p = headline_params()
    if name == "J":
        got = compute_J(HEADLINE, p).value
    elif name == "J11":
        got = compute_J11(HEADLINE, p).value
    else:
        got = dict(zip(("J0", "J01", "J02"), compute_J0(HEADLINE, p)))[name].value
    assert got == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize("rs,value", [((2, 1), 15.8900183178), ((2, 2), 1.9342154969)])
def test_headline_corrections(rs, value):
    assert compute_Jrs(HEADLINE, headline_params(), *rs).value == pytest.approx(value, abs=1e-6)


def test_corrections_vanish_at_theta0_one():
    p = SieveParams(4, Q(1, 4), Q(1), "extended", (), "standard")
    F = SymmetricPolynomial.shifted_p1(4, [1, 2])
    for rs in [(1, 1), (2, 1), (3, 1), (2, 2), (3, 2)]:
        assert compute_Jrs(F, p, *rs).value == 0.0


def test_flat_never_exceeds_standard():
    # the flat cap only bites once theta exceeds theta0, and then only for (4,1) and (3,3)
    F = table_c_polynomial(5, 1)
    p = SieveParams(5, Q(71, 200), None, "simplex", (), "flat")
    for rs in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        assert compute_Jrs_flat(F, p, *rs).value == pytest.approx(compute_Jrs(F, p, *rs).value)
    for rs in [(4, 1), (3, 3)]:
        std = compute_Jrs(F, p, *rs).value
        flat = compute_Jrs_flat(F, p, *rs).value
        assert 0 < flat < std


def test_flat_3_3_against_sampling():
    F = table_c_polynomial(5, 1)
    p = SieveParams(5, Q(71, 200), None, "simplex", (), "flat")
    val = compute_Jrs_flat(F, p, 3, 3, QuadConfig(rel_tol=1e-5)).value
    # independent estimate: sample the weight domain, integrate the inner part by quadrature
    from sieve_lab.functionals import _diag_data, _inner_nodes, correction_weight, subset_matrix
    from sieve_lab import _kernels as K
    region = make_correction_domain(3, 3, theta=p.theta, theta0=p.theta0, flat=True)
    diag = _diag_data(F)
    xt, wt, xs, ws = _inner_nodes(diag, 5, 2 * (diag.deg + 1))
    M, signs = subset_matrix(2)

    def g(Y):
        inner = K.shift_sq_batch(diag.A, np.ascontiguousarray(Y @ M.T), signs, 5, False,
                                 xt, wt, xs, ws)
        return correction_weight(Y, 3, 3, float(p.theta), float(p.theta0)) * inner

    mc = integrate_mc(region, g, QuadConfig(mc_samples=400_000, seed=5))
    assert abs(val - mc.value) <= max(3 * mc.error, 1e-3 * abs(val))


def test_mode_consistency_at_theta0_one():
    F = table_c_polynomial(4, 1)
    std = SieveParams(4, Q(1, 3), Q(1), "simplex", [(1, 1), (2, 1)], "standard")
    conj = SieveParams(4, Q(1, 3), None, "simplex", (), "conjecture")
    assert upsilon(F, std).upsilon == pytest.approx(upsilon(F, conj).upsilon, abs=1e-8)


def test_extended_support_dominates_simplex():
    F = SymmetricPolynomial.shifted_p1(4, [3, -1, 5])
    ext = compute_J(F, SieveParams(4, Q(1, 4), Q(1, 2), "extended")).value
    sim = compute_J(F, SieveParams(4, Q(1, 4), Q(1, 2), "simplex")).value
    assert ext >= sim > 0


@settings(max_examples=8, deadline=None)
@given(st.fractions(min_value=Q(1, 10), max_value=50, max_denominator=20))
def test_scale_invariance(c):
    p = SieveParams(4, Q(1, 4), Q(3, 8), "extended", [(1, 1), (2, 1), (2, 2)], "standard")
    F = SymmetricPolynomial.shifted_p1(4, [2, 3, 1])
    base = upsilon(F, p).upsilon
    assert upsilon(F.scale(c), p).upsilon == pytest.approx(base, rel=1e-10)


def test_adding_corrections_never_increases_upsilon():
    F = SymmetricPolynomial.shifted_p1(4, [2, 3, 1])
    prev = None
    chain = [(), [(1, 1)], [(1, 1), (2, 1)], [(1, 1), (2, 1), (2, 2)],
             [(1, 1), (2, 1), (2, 2), (3, 1)]]
    for corr in chain:
        val = upsilon(F, SieveParams(4, Q(1, 4), Q(3, 8), "extended", corr)).upsilon
        if prev is not None:
            assert val <= prev + 1e-12
        prev = val


def test_report_round_trip():
    p = SieveParams(3, Q(1, 3), None, "simplex", (), "conjecture")
    rep = upsilon(table_c_polynomial(3, 1), p)
    assert rep.check()
    assert rep.upsilon == pytest.approx(7.38120, abs=5e-5)
    back = FunctionalReport.from_json_obj(json.loads(rep.dumps()))
    assert back.upsilon == rep.upsilon and back.check()
    assert "upsilon" in rep.to_csv().splitlines()[0]


def test_unsupported_pair_is_rejected():
    with pytest.raises(PathNotAvailable):
        SieveParams(5, Q(1, 4), Q(3, 8), "extended", [(5, 1)])
    with pytest.raises(ValueError):
        SieveParams(5, Q(1, 4), Q(3, 8), "extended", [(1, 2)])


def test_r2_pieces_sum_to_generic_value():
    p = headline_params()
    pieces = piece_integrals(HEADLINE, p, "R2", QuadConfig(mc_samples=200_000, seed=3))
    raw = [2 * pc.quadrature.value for pc in pieces]
    assert raw == pytest.approx([15.2749404974, 16.5050961382], abs=1e-6)
    assert all(pc.agree() for pc in pieces)
    total = compute_Jrs(HEADLINE, p, 2, 1).value
    assert sum(pc.quadrature.value for pc in pieces) == pytest.approx(total, rel=1e-5)
