"""Admissibility of tuples of linear forms ``A_i n + B_i`` and the rho_k tables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class Assumption(str, Enum):
    UNCONDITIONAL = "unconditional"
    GEH = "GEH"

    @classmethod
    def _missing_(cls, value):
        if isinstance(value, str):
            for m in cls:
                if m.value.lower() == value.lower():
                    return m
        return None


class InadmissibleTuple(ValueError):
    def __init__(self, witness: int):
        super().__init__(f"tuple is not admissible: it covers every residue class mod {witness}")
        self.witness = witness


# rho_k for 3 <= k <= 10; the unconditional k = 5 entry is improved to 14
# by the extended-support computation
RHO_UNCONDITIONAL = {3: 7, 4: 11, 5: 15, 6: 18, 7: 22, 8: 26, 9: 30, 10: 34}
RHO_UNCONDITIONAL_IMPROVED = {5: 14}
RHO_GEH = {3: 7, 4: 10, 5: 13, 6: 17, 7: 20, 8: 24, 9: 28, 10: 32}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(sieve[p * p::p]))
    return [i for i, v in enumerate(sieve) if v]


def _prime_factors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class LinearFormTuple:
    forms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        forms = tuple((int(a), int(b)) for a, b in self.forms)
        object.__setattr__(self, "forms", forms)
        if not forms:
            raise ValueError("empty tuple")
        for a, _ in forms:
            if a <= 0:
                raise ValueError("leading coefficients must be positive")
        if len(set(forms)) != len(forms):
            raise ValueError("forms must be pairwise distinct")

    @property
    def k(self) -> int:
        return len(self.forms)

    @classmethod
    def from_shifts(cls, shifts: Iterable[int]) -> "LinearFormTuple":
        return cls(tuple((1, int(h)) for h in shifts))

    @classmethod
    def parse(cls, text: str) -> "LinearFormTuple":
        """``"0,2,6"`` (shifts) or ``"1:0,1:2,1:6"`` (``A:B`` pairs)."""
        items = [x.strip() for x in text.replace(";", ",").split(",") if x.strip()]
        if any(":" in x for x in items):
            return cls(tuple(tuple(int(v) for v in x.split(":")) for x in items))
        return cls.from_shifts(int(x) for x in items)

    def normalization_warnings(self) -> list[str]:
        """Checks the convention that all A_i share one prime set coprime to every B_i."""
        sets = [_prime_factors(a) for a, _ in self.forms]
        msgs = []
        if any(s != sets[0] for s in sets):
            msgs.append("leading coefficients do not share the same prime factors")
        primes = set().union(*sets)
        for p in sorted(primes):
            if any(b % p == 0 for _, b in self.forms):
                msgs.append(f"prime {p} divides a leading coefficient and some B_i")
        return msgs

    def to_json_obj(self) -> dict:
        return {"forms": [list(f) for f in self.forms]}


def nu_p(tup: LinearFormTuple, p: int) -> int:
    """Number of residues ``n mod p`` with ``prod (A_i n + B_i) = 0 mod p``."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sum(1 for n in range(p) if any((a * n + b) % p == 0 for a, b in tup.forms))


def prime_bound(tup: LinearFormTuple) -> int:
    """Beyond this bound every prime leaves a residue uncovered."""
    bound = tup.k
    for a, _ in tup.forms:
        bound = max(bound, max(_prime_factors(a), default=1))
    for i, (a1, b1) in enumerate(tup.forms):
        for a2, b2 in tup.forms[i + 1:]:
            res = a1 * b2 - a2 * b1
            if res:
                bound = max(bound, max(_prime_factors(res), default=1))
    return bound


def is_admissible(tup: LinearFormTuple) -> tuple[bool, int | None]:
    for p in primes_upto(prime_bound(tup)):
        if nu_p(tup, p) >= p:
            return False, p
    return True, None


def rho(k: int, assumption: Assumption | str = Assumption.UNCONDITIONAL) -> int:
    a = Assumption(assumption)
    if not 3 <= k <= 10:
        raise ValueError("rho_k is tabulated for 3 <= k <= 10")
    if a is Assumption.GEH:
        return RHO_GEH[k]
    return RHO_UNCONDITIONAL_IMPROVED.get(k, RHO_UNCONDITIONAL[k])


def _provenance(k: int, a: Assumption) -> str:
    if a is Assumption.GEH:
        return f"GEH[2/3] table, k={k}"
    if k in RHO_UNCONDITIONAL_IMPROVED:
        return f"extended sieve support, k={k}"
    return f"unconditional table, k={k}"


def rho_report(tup: LinearFormTuple, assumption: Assumption | str | None = None) -> dict:
    """Admissibility verdict and the number of prime factors guaranteed infinitely often.

    With ``assumption=None`` both unconditional and GEH values are reported.
    """
    ok, witness = is_admissible(tup)
    k = tup.k
    if not ok:
        raise InadmissibleTuple(witness)
    if not 3 <= k <= 10:
        raise ValueError("rho_k is tabulated for 3 <= k <= 10")
    out = {"admissible": True, "witness": None, "k": k,
           "rho_unconditional": rho(k, Assumption.UNCONDITIONAL),
           "rho_geh": rho(k, Assumption.GEH),
           "provenance": {"unconditional": _provenance(k, Assumption.UNCONDITIONAL),
                          "GEH": _provenance(k, Assumption.GEH)},
           "warnings": tup.normalization_warnings()}
    if assumption is not None:
        a = Assumption(assumption)
        out["assumption"] = a.value
        out["rho"] = rho(k, a)
    return out


def admissibility_report(tup: LinearFormTuple) -> dict:
    """Like ``rho_report`` but never raises for inadmissible tuples."""
    ok, witness = is_admissible(tup)
    if not ok or not 3 <= tup.k <= 10:
        return {"admissible": ok, "witness": witness, "k": tup.k,
                "rho_unconditional": None, "rho_geh": None}
    rep = rho_report(tup)
    return {key: rep[key] for key in ("admissible", "witness", "k", "rho_unconditional",
                                      "rho_geh", "provenance", "warnings")}


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
