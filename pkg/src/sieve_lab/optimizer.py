"""Minimizing Upsilon over a linear family of weights.

Upsilon is ``k * N(F) / J(F) + k / theta0`` with ``N = J0 - theta * sum J_rs``;
both ``N`` and ``J`` are quadratic forms in the coefficients of ``F`` over a
fixed basis, so minimizing Upsilon is a generalized Rayleigh-quotient problem.
The Gram matrices are assembled by polarization from the scalar functionals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .functionals import (Mode, SieveParams, compute_J, compute_J0, compute_Jrs,
                          compute_Jrs_flat)
from .quad import QuadConfig
from .regions import SupportKind
from .sympoly import SymmetricPolynomial


class DegenerateBasis(np.linalg.LinAlgError):
    pass


class JacobiNotConverged(RuntimeError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    k: int
    elements: tuple[SymmetricPolynomial, ...]
    positivity: bool = False
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.names:
            object.__setattr__(self, "names", tuple(str(e) for e in self.elements))
        for e in self.elements:
            if e.k != self.k:
                raise ValueError("basis elements must share k")

    def __len__(self) -> int:
        return len(self.elements)

    def combine(self, coeffs: Sequence) -> SymmetricPolynomial:
        total = SymmetricPolynomial.constant(self.k, 0)
        for c, e in zip(coeffs, self.elements):
            total = total + e.scale(Fraction(c).limit_denominator(10**12)
                                    if not isinstance(c, Fraction) else c)
        return total

    def to_json_obj(self) -> dict:
        return {"k": self.k, "positivity": self.positivity,
                "elements": [e.to_json_obj() for e in self.elements]}

    @classmethod
    def from_json_obj(cls, obj) -> "BasisSpec":
        els = tuple(SymmetricPolynomial.from_json_obj(e) for e in obj["elements"])
        return cls(int(obj["k"]), els, bool(obj.get("positivity", False)))


def _shifted(k: int, **exps) -> SymmetricPolynomial:
    e = {int(j): n for j, n in exps.items()}
    return SymmetricPolynomial.from_terms(k, [(1, e)], "shifted")


def _mono(k: int, spec: dict) -> SymmetricPolynomial:
    return SymmetricPolynomial.from_terms(k, [(1, spec)], "shifted")


def basis_quadratic(k: int, positivity: bool = False) -> BasisSpec:
    """``{1, (1-P_1), (1-P_1)^2}``."""
    els = [_mono(k, {}), _mono(k, {1: 1}), _mono(k, {1: 2})]
    return BasisSpec(k, tuple(els), positivity, ("1", "(1-P1)", "(1-P1)^2"))


def basis_f1(k: int, positivity: bool = True) -> BasisSpec:
    """``{1, (1-P_1), (1-P_1)^2, (1-P_1)^3}``."""
    els = [_mono(k, {}), _mono(k, {1: 1}), _mono(k, {1: 2}), _mono(k, {1: 3})]
    return BasisSpec(k, tuple(els), positivity, ("1", "(1-P1)", "(1-P1)^2", "(1-P1)^3"))


def basis_f2(k: int, positivity: bool = True) -> BasisSpec:
    """The cubic family plus ``P_2`` and ``(1-P_1) P_2``."""
    b = basis_f1(k, positivity)
    els = b.elements + (_mono(k, {2: 1}), _mono(k, {1: 1, 2: 1}))
    return BasisSpec(k, els, positivity, b.names + ("P2", "(1-P1)P2"))


def basis_quartic_full(k: int) -> BasisSpec:
    """All products of ``(1-P_1), P_2, P_3, P_4`` of weighted degree at most 4."""
    specs = [({}, "1"), ({1: 1}, "(1-P1)"), ({1: 2}, "(1-P1)^2"), ({2: 1}, "P2"),
             ({1: 3}, "(1-P1)^3"), ({1: 1, 2: 1}, "(1-P1)P2"), ({3: 1}, "P3"),
             ({1: 4}, "(1-P1)^4"), ({1: 2, 2: 1}, "(1-P1)^2P2"), ({2: 2}, "P2^2"),
             ({1: 1, 3: 1}, "(1-P1)P3"), ({4: 1}, "P4")]
    return BasisSpec(k, tuple(_mono(k, s) for s, _ in specs), False, tuple(n for _, n in specs))


# ---------------------------------------------------------------------------
# Gram matrices

@dataclass
class GramPair:
    A: np.ndarray
    B: np.ndarray
    k: int
    theta0: Fraction
    methods: dict = field(default_factory=dict)
    const_index: int | None = 0

    def __post_init__(self):
        self.A = 0.5 * (np.asarray(self.A, float) + np.asarray(self.A, float).T)
        self.B = 0.5 * (np.asarray(self.B, float) + np.asarray(self.B, float).T)

    def upsilon_of(self, c: np.ndarray) -> float:
        c = np.asarray(c, float)
        return self.k * float(c @ self.A @ c) / float(c @ self.B @ c) + self.k / float(self.theta0)


class QuadraticForms:
    """``N`` and ``J`` of a weight under fixed parameters, memoized by polynomial."""

    def __init__(self, params: SieveParams, cfg: QuadConfig | None = None):
        self.params = params
        self.cfg = cfg or QuadConfig()
        self.cache: dict = {}

    def __call__(self, F: SymmetricPolynomial) -> tuple[float, float, str]:
        key = (F.key(), self.params.key())
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        p = self.params
        J = compute_J(F, p, self.cfg)
        J0 = compute_J0(F, p, self.cfg)[0]
        N = J0.value
        methods = {J.method, J0.method}
        if p.mode is not Mode.CONJECTURE:
            fn = compute_Jrs_flat if p.flat else compute_Jrs
            for r, s in p.sorted_corrections():
                e = fn(F, p, r, s, self.cfg)
                N -= float(p.theta) * e.value
                methods.add(e.method)
        out = (N, J.value, "+".join(sorted(methods)))
        self.cache[key] = out
        return out


def assemble_gram(basis: BasisSpec, params: SieveParams, cfg: QuadConfig | None = None,
                  forms: QuadraticForms | None = None) -> GramPair:
    """Gram matrices of ``N`` (A) and ``J`` (B) via ``Q(u,v) = (Q(u+v) - Q(u-v))/4``."""
    forms = forms or QuadraticForms(params, cfg)
    n = len(basis)
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    methods = {}
    for i in range(n):
        ni, ji, m = forms(basis.elements[i])
        A[i, i], B[i, i] = ni, ji
        methods[(i, i)] = m
    for i in range(n):
        for j in range(i + 1, n):
            u, v = basis.elements[i], basis.elements[j]
            npl, jpl, m1 = forms(u + v)
            nmi, jmi, m2 = forms(u - v)
            A[i, j] = A[j, i] = (npl - nmi) / 4
            B[i, j] = B[j, i] = (jpl - jmi) / 4
            methods[(i, j)] = m1
    const = None
    for idx, e in enumerate(basis.elements):
        if e.terms and len(e.terms) == 1 and e.terms[0][1] == ():
            const = idx
            break
    g = GramPair(A, B, params.k, params.theta0, methods, const)
    ev = np.linalg.eigvalsh(g.B)
    if ev.min() <= 1e-10 * ev.max():
        raise DegenerateBasis(f"J Gram matrix is not positive definite (eigenvalues {ev})")
    return g


# ---------------------------------------------------------------------------
# eigen-solver

def jacobi_eigh(S: np.ndarray, max_sweeps: int = 100, tol: float = 1e-15
                ) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations for a symmetric matrix; eigenvalues ascending."""
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.abs(A).max(), 1e-300)
    for _ in range(max_sweeps):
        off = float(np.sqrt((np.triu(A, 1) ** 2).sum() * 2))
        if off <= tol * scale * n:
            order = np.argsort(np.diag(A), kind="stable")
            return np.diag(A)[order].copy(), V[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                R = np.eye(n)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
                V = V @ R
    raise JacobiNotConverged(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _normalize(c: np.ndarray, const_index: int | None) -> np.ndarray:
    c = np.asarray(c, float)
    if const_index is not None and abs(c[const_index]) > 1e-14 * np.abs(c).max():
        return c / c[const_index]
    nz = np.flatnonzero(np.abs(c) > 1e-14 * np.abs(c).max())
    return c / c[nz[-1]]


def _line_min(A, B, c, i):
    """Minimize the quotient over ``c_i >= 0`` with the other entries fixed."""
    e = np.zeros_like(c)
    e[i] = 1.0
    base = c.copy()
    base[i] = 0.0
    a, b, cc = A[i, i], float(e @ A @ base), float(base @ A @ base)
    d, ee, f = B[i, i], float(e @ B @ base), float(base @ B @ base)

    def R(x):
        den = d * x * x + 2 * ee * x + f
        return (a * x * x + 2 * b * x + cc) / den if den > 0 else math.inf

    cands = [0.0]
    qa, qb, qc = a * ee - b * d, a * f - cc * d, b * f - cc * ee
    if abs(qa) > 1e-300:
        disc = qb * qb - 4 * qa * qc
        if disc >= 0:
            r = math.sqrt(disc)
            cands += [(-qb + r) / (2 * qa), (-qb - r) / (2 * qa)]
    elif abs(qb) > 1e-300:
        cands.append(-qc / qb)
    cands = [x for x in cands if x >= 0 and math.isfinite(x)]
    best = min(cands, key=R)
    return best, R(best)


def _positive_descent(A, B, start, tol=1e-10, max_iter=10000):
    c = np.maximum(start, 0.0)
    if not c.any():
        c = np.abs(start)
    val = float(c @ A @ c) / float(c @ B @ c)
    for _ in range(max_iter):
        prev = val
        for i in range(len(c)):
            x, v = _line_min(A, B, c, i)
            if v <= val:
                c[i] = x
                val = v
        if abs(prev - val) <= tol * abs(prev):
            break
    return c, val


def minimize_rayleigh(gram: GramPair, positivity: bool = False
                      ) -> tuple[np.ndarray, float]:
    """Coefficients minimizing ``N/J`` and the corresponding Upsilon."""
    try:
        L = np.linalg.cholesky(gram.B)
    except np.linalg.LinAlgError as exc:
        raise DegenerateBasis("J Gram matrix is not positive definite") from exc
    Linv = np.linalg.inv(L)
    S = Linv @ gram.A @ Linv.T
    S = 0.5 * (S + S.T)
    w, V = jacobi_eigh(S)
    lam = w[0]
    ties = np.flatnonzero(w - lam < 1e-9 * max(1.0, abs(lam)))
    cands = [Linv.T @ V[:, j] for j in ties]
    ci = gram.const_index if gram.const_index is not None else 0
    cands = [c if c[ci] >= 0 else -c for c in cands]
    c = max(cands, key=lambda v: v[ci] / np.linalg.norm(v))
    if positivity:
        best = None
        for sgn in (1.0, -1.0):
            cp, val = _positive_descent(gram.A, gram.B, sgn * c)
            if best is None or val < best[1]:
                best = (cp, val)
        c, lam = best
    c = _normalize(c, gram.const_index)
    return c, gram.k * float(lam) + gram.k / float(gram.theta0)


# ---------------------------------------------------------------------------
# table pipelines

TABLE_C_F1 = {
    3: (529, -877, 567, -189), 4: (17950, -36681, 28786, -9510),
    5: (15566, -35617, 30136, -9807), 6: (12739, -31508, 28087, -9178),
    7: (11754, -30703, 28386, -9354), 8: (11131, -30235, 28687, -9531),
    9: (6710, -18690, 18003, -6001), 10: (6573, -18606, 18072, -6024),
}
# raw-basis coefficients of 1, P1, P1^2, P1^3, P2, P1 P2
TABLE_C_F2 = {
    3: (1846, -3225, 2203, -727, 228, -223), 4: (20875, -43615, 33273, -10000, 4867, -4649),
    5: (17195, -40385, 33413, -10000, 5366, -5148), 6: (11908, -30242, 26486, -8071, 4310, -4162),
    7: (11091, -29705, 27075, -8420, 4322, -4197), 8: (10523, -29241, 27419, -8679, 4232, -4128),
    9: (9528, -27175, 26009, -8351, 3857, -3775), 10: (9726, -1513, 712, -1, 4548, -3828),
}
TABLE_E_THETA = {3: "0.371", 4: "0.365", 5: "0.355", 6: "0.355", 7: "0.352", 8: "0.350",
                 9: "0.347", 10: "0.345"}
BOUND_CORRECTIONS = ((1, 1), (2, 1), (3, 1), (2, 2), (3, 2))
FLAT_CORRECTIONS = ((1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (3, 3))
HEADLINE_CORRECTIONS = ((1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (3, 2))


def table_c_polynomial(k: int, which: int = 1) -> SymmetricPolynomial:
    if which == 1:
        cs = TABLE_C_F1[k]
        return SymmetricPolynomial.raw_p1(k, cs)
    a = TABLE_C_F2[k]
    exps = [{}, {1: 1}, {1: 2}, {1: 3}, {2: 1}, {1: 1, 2: 1}]
    return SymmetricPolynomial.from_terms(k, list(zip(a, exps)), "raw")


def table_params(table: str, k: int) -> SieveParams:
    t = table.upper()
    if t in ("C", "D"):
        return SieveParams(k, Fraction(1, 3), None, SupportKind.SIMPLEX, (), Mode.CONJECTURE)
    if t == "E":
        return SieveParams(k, Fraction(TABLE_E_THETA[k]), None, SupportKind.SIMPLEX,
                           FLAT_CORRECTIONS, Mode.FLAT)
    if t == "F":
        return SieveParams(k, Fraction(1, 4), None, SupportKind.SIMPLEX, (), Mode.CONJECTURE)
    if t == "G":
        return SieveParams(k, Fraction(1, 4), None, SupportKind.EXTENDED, (), Mode.CONJECTURE)
    raise KeyError(f"unknown table {table!r}")


@dataclass
class OptimizationResult:
    table: str
    k: int
    basis: str
    coefficients: list
    polynomial: SymmetricPolynomial
    upsilon: float
    published: float | None
    params: SieveParams

    @property
    def within(self) -> bool | None:
        if self.published is None:
            return None
        return self.upsilon <= self.published + 1e-3

    def to_json_obj(self) -> dict:
        return {"table": self.table, "k": self.k, "basis": self.basis,
                "coefficients": [float(c) for c in self.coefficients],
                "polynomial": self.polynomial.to_json_obj(), "upsilon": self.upsilon,
                "published": self.published, "params": self.params.to_json_obj(),
                "within_1e-3": self.within}


def optimize(basis: BasisSpec, params: SieveParams, cfg: QuadConfig | None = None,
             forms: QuadraticForms | None = None) -> tuple[SymmetricPolynomial, np.ndarray, float]:
    g = assemble_gram(basis, params, cfg, forms)
    c, ups = minimize_rayleigh(g, basis.positivity)
    F = basis.combine([Fraction(float(x)).limit_denominator(10**9) for x in c])
    return F, c, ups


def reoptimize_table(table: str, k: int, cfg: QuadConfig | None = None,
                     published: Callable[[str, int, str], float | None] | None = None
                     ) -> list[OptimizationResult]:
    """Run the documented basis and mode of a table for one ``k``."""
    if not 3 <= k <= 10:
        raise ValueError("tables cover 3 <= k <= 10")
    t = table.upper()
    params = table_params(t, k)
    pub = published or (lambda *_: None)
    plans: list[tuple[str, BasisSpec]]
    if t in ("C", "D"):
        plans = [("F1", basis_f1(k, True)), ("F2", basis_f2(k, True))]
        if t == "C":
            plans = plans[:1]
    elif t == "E":
        plans = [("F1", basis_f1(k, True))]
    elif t == "F":
        plans = [("F1", basis_f1(k, True)), ("F2", basis_f2(k, True))]
    else:
        plans = [("quadratic", basis_quadratic(k, False))]
    forms = QuadraticForms(params, cfg)
    out = []
    for name, basis in plans:
        F, c, ups = optimize(basis, params, cfg, forms)
        out.append(OptimizationResult(t, k, name, list(c), F, ups, pub(t, k, name), params))
    return out
