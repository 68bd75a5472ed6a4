"""Symmetric sieve weights built from power sums.

A weight ``F`` is stored as a finite sum of terms ``c * prod_j X_j**e_j`` where
``X_1`` is either ``P_1`` (raw basis) or ``1 - P_1`` (shifted basis) and
``X_j = P_j = sum_i t_i**j`` for ``j >= 2``.  Coefficients are exact
``Fraction`` objects.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .regions import SupportKind, in_support

Exponents = tuple[tuple[int, int], ...]


class Basis(str, Enum):
    SHIFTED = "shifted"
    RAW = "raw"


class ReductionNotAvailable(ValueError):
    """The polynomial involves P_2 or higher and has no one-variable form."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot interpret {x!r} as a rational coefficient")


def _canon(exps: Mapping[int, int] | Iterable[tuple[int, int]]) -> Exponents:
    items = exps.items() if isinstance(exps, Mapping) else exps
    out: dict[int, int] = {}
    for j, e in items:
        j, e = int(j), int(e)
        if j < 1 or e < 0:
            raise ValueError(f"bad exponent entry ({j}, {e})")
        if e:
            out[j] = out.get(j, 0) + e
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class SymmetricPolynomial:
    k: int
    terms: tuple[tuple[Fraction, Exponents], ...]
    basis: Basis = Basis.SHIFTED

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        merged: dict[Exponents, Fraction] = {}
        for c, e in self.terms:
            key = _canon(e)
            merged[key] = merged.get(key, Fraction(0)) + _frac(c)
        canon = tuple(sorted(((c, e) for e, c in merged.items() if c != 0),
                             key=lambda ce: (sum(j * n for j, n in ce[1]), ce[1])))
        object.__setattr__(self, "terms", canon)
        object.__setattr__(self, "basis", Basis(self.basis))

    # construction helpers -------------------------------------------------
    @classmethod
    def from_terms(cls, k: int, terms: Iterable[tuple[object, Mapping[int, int]]],
                   basis: Basis | str = Basis.SHIFTED) -> "SymmetricPolynomial":
        return cls(k, tuple((_frac(c), _canon(e)) for c, e in terms), Basis(basis))

    @classmethod
    def constant(cls, k: int, c=1) -> "SymmetricPolynomial":
        return cls(k, ((_frac(c), ()),), Basis.SHIFTED)

    @classmethod
    def shifted_p1(cls, k: int, coeffs: Sequence) -> "SymmetricPolynomial":
        """``sum_i coeffs[i] * (1 - P_1)**i``."""
        return cls(k, tuple((_frac(c), ((1, i),)) for i, c in enumerate(coeffs)),
                   Basis.SHIFTED)

    @classmethod
    def raw_p1(cls, k: int, coeffs: Sequence) -> "SymmetricPolynomial":
        """``sum_i coeffs[i] * P_1**i``."""
        return cls(k, tuple((_frac(c), ((1, i),)) for i, c in enumerate(coeffs)),
                   Basis.RAW)

    # algebra ----------------------------------------------------------------
    def _aligned(self, other: "SymmetricPolynomial") -> "SymmetricPolynomial":
        if other.k != self.k:
            raise ValueError("dimension mismatch")
        return other if other.basis == self.basis else other.convert(self.basis)

    def __add__(self, other: "SymmetricPolynomial") -> "SymmetricPolynomial":
        other = self._aligned(other)
        return SymmetricPolynomial(self.k, self.terms + other.terms, self.basis)

    def __neg__(self) -> "SymmetricPolynomial":
        return self.scale(-1)

    def __sub__(self, other: "SymmetricPolynomial") -> "SymmetricPolynomial":
        return self + (-other)

    def scale(self, c) -> "SymmetricPolynomial":
        c = _frac(c)
        return SymmetricPolynomial(self.k, tuple((c * a, e) for a, e in self.terms), self.basis)

    __rmul__ = scale

    def __mul__(self, other):
        if isinstance(other, SymmetricPolynomial):
            other = self._aligned(other)
            prods = []
            for a, ea in self.terms:
                for b, eb in other.terms:
                    prods.append((a * b, _canon(list(ea) + list(eb))))
            return SymmetricPolynomial(self.k, tuple(prods), self.basis)
        return self.scale(other)

    # basis conversion -------------------------------------------------------
    def convert(self, basis: Basis | str) -> "SymmetricPolynomial":
        """Rewrite in the other basis.

        ``(1-P_1)**a`` and ``P_1**a`` are mapped into each other by the same
        binomial expansion, so the conversion is an exact involution.
        """
        basis = Basis(basis)
        if basis == self.basis:
            return self
        out = []
        for c, e in self.terms:
            ed = dict(e)
            a = ed.pop(1, 0)
            rest = tuple(ed.items())
            for i in range(a + 1):
                coef = c * math.comb(a, i) * (-1) ** i
                out.append((coef, _canon(rest + ((1, i),))))
        return SymmetricPolynomial(self.k, tuple(out), basis)

    def to_raw(self) -> "SymmetricPolynomial":
        return self.convert(Basis.RAW)

    def to_shifted(self) -> "SymmetricPolynomial":
        return self.convert(Basis.SHIFTED)

    # inspection -------------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(j * n for j, n in e) for _, e in self.terms), default=0)

    @property
    def max_power_index(self) -> int:
        return max((j for _, e in self.terms for j, _ in e), default=0)

    def is_p1_only(self) -> bool:
        return self.max_power_index <= 1

    def key(self) -> tuple:
        raw = self.to_raw()
        return (raw.k, tuple((str(c), e) for c, e in raw.terms))

    def __str__(self) -> str:
        x1 = "(1-P1)" if self.basis == Basis.SHIFTED else "P1"
        parts = []
        for c, e in self.terms:
            mon = "*".join(
                (x1 if j == 1 else f"P{j}") + (f"^{n}" if n > 1 else "") for j, n in e)
            parts.append(f"{c}" + (f"*{mon}" if mon else ""))
        return " + ".join(parts) if parts else "0"

    # evaluation ---------------------------------------------------------------
    def evaluate(self, t: Sequence, exact: bool = False):
        return evaluate(self, t, exact=exact)

    # JSON ---------------------------------------------------------------------
    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "basis": self.basis.value,
            "terms": [
                {"c": f"{c.numerator}/{c.denominator}", "e": {str(j): n for j, n in e}}
                for c, e in self.terms
            ],
        }

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "SymmetricPolynomial":
        k = int(obj["k"])
        basis = Basis(obj.get("basis", "shifted"))
        terms = [(_frac(t["c"]), {int(j): int(n) for j, n in t.get("e", {}).items()})
                 for t in obj["terms"]]
        return cls.from_terms(k, terms, basis)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "SymmetricPolynomial":
        return cls.from_json_obj(json.loads(text))


def power_sums(t: Sequence, upto: int, exact: bool = False) -> list:
    if exact:
        ts = [_frac(x) for x in t]
        return [None] + [sum((x ** j for x in ts), Fraction(0)) for j in range(1, upto + 1)]
    ts = np.asarray(t, dtype=float)
    return [None] + [float(np.sum(ts ** j)) for j in range(1, upto + 1)]


def evaluate(F: SymmetricPolynomial, t: Sequence, exact: bool = False):
    """Evaluate ``F`` at the point ``t``.

    With ``exact=True`` the coordinates are converted to ``Fraction`` and the
    result is exact.
    """
    if len(t) != F.k:
        raise ValueError(f"expected {F.k} coordinates, got {len(t)}")
    if not exact and not np.all(np.isfinite(np.asarray(t, dtype=float))):
        raise ValueError("non-finite coordinate")
    p = power_sums(t, max(F.max_power_index, 1), exact=exact)
    x1 = (1 - p[1]) if F.basis == Basis.SHIFTED else p[1]
    total = Fraction(0) if exact else 0.0
    for c, e in F.terms:
        term = c if exact else float(c)
        for j, n in e:
            term = term * ((x1 if j == 1 else p[j]) ** n)
        total += term
    return total


@dataclass(frozen=True)
class DiagonalPolynomial:
    """``f(x)`` with ``F(t) = f(t_1 + ... + t_k)``; monomial coefficients in x."""

    coeffs: tuple[Fraction, ...]
    k: int
    antider: tuple[Fraction, ...] = field(init=False, repr=False)

    def __post_init__(self):
        cs = [_frac(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(
            self, "antider", (Fraction(0),) + tuple(c / (i + 1) for i, c in enumerate(cs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def antider_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.antider])

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.as_array())

    def eval_exact(self, x) -> Fraction:
        x = _frac(x)
        return sum((c * x ** i for i, c in enumerate(self.coeffs)), Fraction(0))

    def antiderivative(self, x):
        return np.polynomial.polynomial.polyval(x, self.antider_array())

    def antiderivative_exact(self, x) -> Fraction:
        x = _frac(x)
        return sum((c * x ** i for i, c in enumerate(self.antider)), Fraction(0))

    def derivative_of_antider(self) -> tuple[Fraction, ...]:
        """Re-differentiated antiderivative; equals ``coeffs`` identically."""
        return tuple(c * i for i, c in enumerate(self.antider))[1:]

    def __add__(self, other: "DiagonalPolynomial") -> "DiagonalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return DiagonalPolynomial(tuple(x + y for x, y in zip(a, b)), self.k)

    def scale(self, c) -> "DiagonalPolynomial":
        c = _frac(c)
        return DiagonalPolynomial(tuple(c * x for x in self.coeffs), self.k)


def diagonal_reduce(F: SymmetricPolynomial) -> DiagonalPolynomial:
    """Return ``f`` with ``f(t_1 + ... + t_k) = F(t)``."""
    if not F.is_p1_only():
        raise ReductionNotAvailable(
            "F involves P_j with j >= 2; use the simplex-exact or full-dimensional path")
    raw = F.to_raw()
    deg = raw.degree
    cs = [Fraction(0)] * (deg + 1)
    for c, e in raw.terms:
        cs[dict(e).get(1, 0)] += c
    return DiagonalPolynomial(tuple(cs), F.k)


def int_clipped(f: DiagonalPolynomial, a: float, b: float, u: float) -> float:
    """Integral of ``f`` from ``min(a, 1+u)`` to ``min(b, 1+u)``."""
    vals = np.array([a, b, u], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite argument")
    cap = 1.0 + u
    return float(f.antiderivative(min(b, cap)) - f.antiderivative(min(a, cap)))


def shift_evaluate(F: SymmetricPolynomial, t: Sequence, j: int, y: float,
                   support: SupportKind | str | None = None):
    """``F(t + y e_j)`` if the shifted point stays in ``support``, else 0.

    ``j`` is 1-based.
    """
    if not 1 <= j <= F.k:
        raise ValueError(f"j must lie in 1..{F.k}")
    if y < 0:
        raise ValueError("shift must be nonnegative")
    pt = list(t)
    pt[j - 1] = pt[j - 1] + y
    if support is not None and support != "none":
        if not in_support(pt, F.k, SupportKind(support)):
            return 0.0
    return evaluate(F, pt)
