"""Exact integration of symmetric polynomials over scaled simplices.

Uses the Dirichlet integral

    int_{t_i >= 0, sum t <= u} prod t_i**a_i dt = prod(a_i!) / (k + |a|)! * u**(k + |a|)

together with the expansion of products of power sums into monomial symmetric
functions.  With ``theta0 = 1`` on the simplex support this gives ``J`` and
``J0`` as exact rationals, apart from a single ``ln(1/theta)`` term in ``J0``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .sympoly import SymmetricPolynomial


class ExactPathNotAvailable(NotImplementedError):
    pass


def simplex_monomial(k: int, a: Sequence[int], u=1) -> Fraction:
    """``int_{Delta_k(u)} prod t_i**a_i`` exactly."""
    a = list(a)
    if len(a) > k:
        raise ValueError("more exponents than variables")
    if any(x < 0 for x in a):
        raise ValueError("exponents must be nonnegative")
    u = Fraction(u)
    n = sum(a)
    num = 1
    for x in a:
        num *= math.factorial(x)
    return Fraction(num, math.factorial(k + n)) * u ** (k + n)


@dataclass
class MonomialIntegralTable:
    k: int
    cache: dict = field(default_factory=dict)

    def get(self, a: Sequence[int]) -> Fraction:
        key = tuple(sorted((x for x in a if x), reverse=True))
        hit = self.cache.get(key)
        if hit is None:
            hit = simplex_monomial(self.k, key, 1)
            self.cache[key] = hit
        return hit

    def scaled(self, a: Sequence[int], u) -> Fraction:
        u = Fraction(u)
        return self.get(a) * u ** (self.k + sum(a))


# ---------------------------------------------------------------------------
# power sums -> monomial symmetric functions

Partition = tuple[int, ...]


def _mul_power_sum(m: dict, j: int, nvars: int) -> dict:
    out: dict = defaultdict(int)
    for lam, c in m.items():
        cands = set()
        for idx, v in enumerate(lam):
            mu = list(lam)
            mu[idx] = v + j
            cands.add(tuple(sorted(mu, reverse=True)))
        if len(lam) < nvars:
            cands.add(tuple(sorted(lam + (j,), reverse=True)))
        for mu in cands:
            count = 0
            for w in set(mu):
                if w < j:
                    continue
                rest = list(mu)
                rest.remove(w)
                if w - j:
                    rest.append(w - j)
                if tuple(sorted(rest, reverse=True)) == lam:
                    count += mu.count(w)
            if count:
                out[mu] += c * count
    return dict(out)


@lru_cache(maxsize=None)
def power_product_to_monomial(key: tuple[int, ...], nvars: int) -> tuple:
    """``prod_{j in key} p_j`` in ``nvars`` variables as ``((partition, int), ...)``."""
    if not key:
        return (((), 1),)
    head = power_product_to_monomial(key[:-1], nvars)
    m = _mul_power_sum(dict(head), key[-1], nvars)
    return tuple(sorted(m.items()))


def orbit_size(lam: Partition, nvars: int) -> int:
    if len(lam) > nvars:
        return 0
    denom = math.factorial(nvars - len(lam))
    for v in set(lam):
        denom *= math.factorial(lam.count(v))
    return math.factorial(nvars) // denom


def monomial_integral(lam: Partition, nvars: int, extra: int = 0, total_vars: int | None = None
                      ) -> Fraction:
    """``int_{Delta_K(1)} t_1**extra * m_lam(t_2..)`` with ``K = total_vars``.

    With ``total_vars = nvars`` and ``extra = 0`` this is the plain integral of
    ``m_lam`` over the ``nvars``-simplex.
    """
    K = total_vars if total_vars is not None else nvars
    num = math.factorial(extra)
    for v in lam:
        num *= math.factorial(v)
    return Fraction(orbit_size(lam, nvars) * num, math.factorial(K + extra + sum(lam)))


def _raw_terms(F: SymmetricPolynomial) -> list[tuple[Fraction, tuple[int, ...]]]:
    out = []
    for c, e in F.to_raw().terms:
        key = []
        for j, n in e:
            key += [j] * n
        out.append((c, tuple(sorted(key))))
    return out


def _square_terms(terms) -> dict:
    sq: dict = defaultdict(Fraction)
    for c1, k1 in terms:
        for c2, k2 in terms:
            sq[tuple(sorted(k1 + k2))] += c1 * c2
    return sq


def _check(F: SymmetricPolynomial, support) -> None:
    if support is not None and str(getattr(support, "value", support)) != "simplex":
        raise ExactPathNotAvailable(
            "exact integration is only available on the simplex support; use quadrature")


def conjecture_J(F: SymmetricPolynomial, support=None) -> Fraction:
    """``int_{R_k} F**2`` exactly."""
    _check(F, support)
    k = F.k
    total = Fraction(0)
    for key, c in _square_terms(_raw_terms(F)).items():
        if c == 0:
            continue
        for lam, mc in power_product_to_monomial(key, k):
            total += c * mc * monomial_integral(lam, k)
    return total


# ---------------------------------------------------------------------------
# J0 at theta0 = 1

def _poly_add(p: list, q: dict | list, scale=Fraction(1)):
    items = q.items() if isinstance(q, dict) else enumerate(q)
    for i, v in items:
        while len(p) <= i:
            p.append(Fraction(0))
        p[i] += scale * v
    return p


def _one_minus_y_pow(n: int) -> list:
    return [Fraction(math.comb(n, i) * (-1) ** i) for i in range(n + 1)]


def _split_first(F: SymmetricPolynomial) -> dict:
    """``F`` as a polynomial in ``t_1`` and power sums ``Q_j`` of the other variables.

    Keys are ``(a, qkey)`` for ``t_1**a * prod_{j in qkey} Q_j``.
    """
    out: dict = defaultdict(Fraction)
    for c, key in _raw_terms(F):
        partial = {(0, ()): Fraction(1)}
        for j in key:
            nxt: dict = defaultdict(Fraction)
            for (a, q), v in partial.items():
                nxt[(a + j, q)] += v               # t_1^j
                nxt[(a, tuple(sorted(q + (j,))))] += v  # Q_j
            partial = nxt
        for kk, v in partial.items():
            out[kk] += c * v
    return {kk: v for kk, v in out.items() if v}


def _shift_difference(F: SymmetricPolynomial) -> dict:
    """``F(t) - F(t + y e_1)`` keyed by ``(a, b, qkey)`` for ``t_1**a y**b Q``."""
    base = _split_first(F)
    out: dict = defaultdict(Fraction)
    for (a, q), c in base.items():
        for i in range(a + 1):
            if a - i == 0:
                continue  # the y**0 part cancels against F(t)
            out[(i, a - i, q)] -= c * math.comb(a, i)
    return {kk: v for kk, v in out.items() if v}


@dataclass(frozen=True)
class ExactLog:
    """``rational + log_coeff * ln(1/theta)``."""

    rational: Fraction
    log_coeff: Fraction
    theta: Fraction

    def __float__(self) -> float:
        return float(self.rational) + float(self.log_coeff) * math.log(1 / float(self.theta))

    def __add__(self, other: "ExactLog") -> "ExactLog":
        return ExactLog(self.rational + other.rational, self.log_coeff + other.log_coeff,
                        self.theta)

    def __sub__(self, other: "ExactLog") -> "ExactLog":
        return ExactLog(self.rational - other.rational, self.log_coeff - other.log_coeff,
                        self.theta)

    def scale(self, c) -> "ExactLog":
        c = Fraction(c)
        return ExactLog(self.rational * c, self.log_coeff * c, self.theta)


@dataclass(frozen=True)
class J0Exact:
    total: ExactLog
    retained: ExactLog   # shifted point stays in the support
    shell: ExactLog      # shifted point leaves the support
    J: Fraction


def _integral_against_weight(Q: list, theta: Fraction) -> Fraction:
    """``int_0^1 (1 - theta y) Q(y) dy`` for a polynomial ``Q``."""
    return sum((c * (Fraction(1, i + 1) - theta * Fraction(1, i + 2)) for i, c in enumerate(Q)),
               Fraction(0))


def conjecture_J0_exact(F: SymmetricPolynomial, theta, theta0=1, support=None) -> J0Exact:
    """Small-prime functional at ``theta0 = 1`` on the simplex, exactly."""
    _check(F, support)
    if Fraction(theta0) != 1:
        raise ExactPathNotAvailable("the exact path needs theta0 = 1; use quadrature")
    theta = Fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    k = F.k
    # retained part: int_{Delta(1-y)} (F(t) - F(t + y e_1))^2 as a polynomial in y
    G = _shift_difference(F)
    grouped: dict = defaultdict(Fraction)   # (b, N) -> coefficient of y^b (1-y)^N
    items = list(G.items())
    for (a1, b1, q1), c1 in items:
        for (a2, b2, q2), c2 in items:
            a, b = a1 + a2, b1 + b2
            q = tuple(sorted(q1 + q2))
            for lam, mc in power_product_to_monomial(q, k - 1):
                val = monomial_integral(lam, k - 1, extra=a, total_vars=k)
                grouped[(b, k + a + sum(lam))] += c1 * c2 * mc * val
    retained: list = []
    for (b, N), c in grouped.items():
        if c:
            _poly_add(retained, {b + i: v for i, v in enumerate(_one_minus_y_pow(N))}, c)
    # shell part: J - int_{Delta(1-y)} F^2
    shell: list = []
    J = Fraction(0)
    for key, c in _square_terms(_raw_terms(F)).items():
        if c == 0:
            continue
        for lam, mc in power_product_to_monomial(key, k):
            v = c * mc * monomial_integral(lam, k)
            J += v
            N = k + sum(lam)
            _poly_add(shell, {0: Fraction(1)}, v)
            _poly_add(shell, _one_minus_y_pow(N), -v)
    for name, p in (("retained", retained), ("shell", shell)):
        if p and p[0] != 0:
            raise ArithmeticError(f"{name} part does not vanish at y = 0")
    r_poly = retained[1:]
    s_poly = shell[1:]
    r_val = _integral_against_weight(r_poly, theta)
    s_val = _integral_against_weight(s_poly, theta)
    # for 1 < y < 1/theta only the shell survives and equals J
    if theta < 1:
        tail_rat = J * (theta - 1)      # int_1^{1/theta} (1/y - theta) dy minus the log
        tail_log = J
    else:
        tail_rat = tail_log = Fraction(0)
    ret = ExactLog(r_val, Fraction(0), theta)
    sh = ExactLog(s_val + tail_rat, tail_log, theta)
    return J0Exact(ret + sh, ret, sh, J)


def conjecture_J0(F: SymmetricPolynomial, theta, theta0=1, support=None) -> ExactLog:
    return conjecture_J0_exact(F, theta, theta0, support).total


def conjecture_J0_parts(F: SymmetricPolynomial, theta) -> tuple[float, float, float]:
    e = conjecture_J0_exact(F, theta)
    return float(e.total), float(e.retained), float(e.shell)


def conjecture_upsilon(F: SymmetricPolynomial, theta) -> float:
    """``k J0 / J + k`` at ``theta0 = 1`` on the simplex."""
    e = conjecture_J0_exact(F, theta)
    return F.k * float(e.total) / float(e.J) + F.k
