import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from sieve_lab.tuples import (Assumption, InadmissibleTuple, LinearFormTuple,
                              admissibility_report, is_admissible, nu_p, prime_bound, primes_upto,
                              rho, rho_report)


@pytest.mark.parametrize("shifts,p,want", [((0, 2, 4), 3, 3), ((0, 2, 6), 3, 2),
                                           ((0, 4, 6, 10, 12), 5, 4)])
def test_nu_p_examples(shifts, p, want):
    assert nu_p(LinearFormTuple.from_shifts(shifts), p) == want


def test_admissibility_examples():
    assert is_admissible(LinearFormTuple.from_shifts((0, 2, 4))) == (False, 3)
    assert is_admissible(LinearFormTuple.from_shifts((0, 2, 6))) == (True, None)
    assert is_admissible(LinearFormTuple.from_shifts((0, 4, 6, 10, 12))) == (True, None)
    # n and n + 1 always contain an even number
    assert is_admissible(LinearFormTuple.from_shifts((0, 1, 6))) == (False, 2)


def test_rho_values():
    assert rho(5) == 14
    assert rho(5, "GEH") == 13
    assert rho(3, Assumption.UNCONDITIONAL) == 7
    with pytest.raises(ValueError):
        rho(11)


def test_reports():
    tup = LinearFormTuple.from_shifts((0, 4, 6, 10, 12))
    rep = rho_report(tup, "unconditional")
    assert rep["rho"] == 14 and rep["rho_geh"] == 13 and rep["warnings"] == []
    bad = LinearFormTuple.from_shifts((0, 2, 4))
    with pytest.raises(InadmissibleTuple) as info:
        rho_report(bad)
    assert info.value.witness == 3
    assert admissibility_report(bad) == {"admissible": False, "witness": 3, "k": 3,
                                         "rho_unconditional": None, "rho_geh": None}


def test_parsing_and_normalization_warning():
    tup = LinearFormTuple.parse("2:1, 2:3, 4:5")
    assert tup.forms == ((2, 1), (2, 3), (4, 5))
    assert tup.normalization_warnings() == []
    odd = LinearFormTuple.parse("2:2,3:1,1:0")
    msgs = odd.normalization_warnings()
    assert any("same prime" in m for m in msgs) and any("divides" in m for m in msgs)
    with pytest.raises(ValueError):
        LinearFormTuple.parse("1:0,1:0")
    with pytest.raises(ValueError):
        LinearFormTuple.parse("0:1,1:2")


# primitive forms: a form with p | gcd(A, B) vanishes identically mod p
forms = st.lists(st.tuples(st.integers(1, 12), st.integers(-40, 40)).filter(
    lambda f: math.gcd(*f) == 1), min_size=2, max_size=6, unique=True)


def test_non_primitive_form_covers_every_residue():
    tup = LinearFormTuple.parse("1:0,9:0")
    assert nu_p(tup, 3) == 3
    assert is_admissible(tup) == (False, 3)


@settings(max_examples=150, deadline=None)
@given(forms, st.sampled_from(primes_upto(50)))
def test_nu_p_range(fs, p):
    tup = LinearFormTuple(tuple(fs))
    assert 0 <= nu_p(tup, p) <= min(tup.k, p)


@settings(max_examples=100, deadline=None)
@given(forms, st.integers(-30, 30))
def test_shift_invariance(fs, c):
    tup = LinearFormTuple(tuple(fs))
    moved = LinearFormTuple(tuple((a, b + a * c) for a, b in fs))
    assert is_admissible(moved) == is_admissible(tup)
    for p in (2, 3, 5, 7):
        assert nu_p(moved, p) == nu_p(tup, p)


@settings(max_examples=60, deadline=None)
@given(forms)
def test_prime_bound_is_sound(fs):
    tup = LinearFormTuple(tuple(fs))
    bound = prime_bound(tup)
    assume(bound <= 400)
    for p in primes_upto(10 * bound):
        if p > bound:
            assert nu_p(tup, p) < p
