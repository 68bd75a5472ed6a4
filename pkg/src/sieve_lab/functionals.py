"""The quadratic sieve functionals and the combined bound Upsilon.

For a weight ``F`` and parameters ``(k, theta, theta0)`` the bound is

    Upsilon = k * (J0 - theta * sum_{(r,s)} J_rs) / J + k / theta0.

``J`` is the squared mass of ``F`` on its support, ``J0`` the small-prime
term, and each ``J_rs`` a correction term integrated over a polytope of
rescaled prime sizes ``y_i = x_i / theta``.  For weights depending only on
``P_1`` the integrals over the support collapse to an inner integral over the
triangle ``0 < s < t < 1`` (or ``0 < t < 1`` on the simplex); those inner
integrals are evaluated exactly by compiled kernels and the remaining shift
variables by adaptive iterated quadrature with kink splitting.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .quad import (QuadConfig, QuadResult, arrangement_domain, integrate_iterated,
                   integrate_mc)
from .regions import (PIECE_SPECS, Constraint, SupportKind, decomposition,
                      make_correction_domain, make_support)
from .sympoly import (DiagonalPolynomial, ReductionNotAvailable, SymmetricPolynomial,
                      diagonal_reduce)

SUPPORTED_PAIRS = ((1, 1), (2, 1), (3, 1), (4, 1), (2, 2), (3, 2), (3, 3))


class Mode(str, Enum):
    STANDARD = "standard"
    FLAT = "flat"
    CONJECTURE = "conjecture"


class PathNotAvailable(NotImplementedError):
    """No evaluation path exists for the requested combination."""


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def parse_corrections(spec) -> frozenset:
    if spec is None:
        return frozenset()
    if isinstance(spec, str):
        s = spec.strip().lower()
        if s in ("", "none"):
            return frozenset()
        pairs = []
        for tok in s.replace(";", " ").split():
            r, sv = tok.strip("()").split(",")
            pairs.append((int(r), int(sv)))
        return frozenset(pairs)
    return frozenset((int(r), int(s)) for r, s in spec)


@dataclass(frozen=True)
class SieveParams:
    k: int
    theta: Fraction
    theta0: Fraction | None = None
    support: SupportKind = SupportKind.EXTENDED
    corrections: frozenset = frozenset()
    mode: Mode = Mode.STANDARD

    def __post_init__(self):
        mode = Mode(self.mode)
        th = _q(self.theta)
        if self.k < 3:
            raise ValueError("k must be at least 3")
        if not (0 < th <= Fraction(1, 2)):
            raise ValueError("theta must lie in (0, 1/2]")
        if mode is Mode.FLAT:
            th0 = 1 - 2 * th
            if self.theta0 is not None and _q(self.theta0) != th0:
                raise ValueError("flat mode fixes theta0 = 1 - 2 theta")
        elif mode is Mode.CONJECTURE:
            th0 = Fraction(1)
        else:
            if self.theta0 is None:
                raise ValueError("theta0 is required in standard mode")
            th0 = _q(self.theta0)
            if th > th0:
                warnings.warn(f"theta = {th} exceeds theta0 = {th0}", stacklevel=3)
        if not (0 < th0 <= 1):
            raise ValueError("theta0 must lie in (0, 1]")
        corr = parse_corrections(self.corrections)
        for r, s in corr:
            if s > r or s < 1:
                raise ValueError(f"invalid correction ({r},{s}): need 1 <= s <= r")
            if (r, s) not in SUPPORTED_PAIRS:
                raise PathNotAvailable(
                    f"correction ({r},{s}) has no evaluation path; supported: {SUPPORTED_PAIRS}")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "theta0", th0)
        object.__setattr__(self, "support", SupportKind(self.support))
        object.__setattr__(self, "corrections", corr)
        object.__setattr__(self, "mode", mode)

    @property
    def flat(self) -> bool:
        return self.mode is Mode.FLAT

    @property
    def extended(self) -> bool:
        return self.support is SupportKind.EXTENDED

    def sorted_corrections(self) -> list[tuple[int, int]]:
        return sorted(self.corrections, key=lambda p: (p[1], p[0]))

    def key(self) -> tuple:
        return (self.k, str(self.theta), str(self.theta0), self.support.value,
                tuple(sorted(self.corrections)), self.mode.value)

    def replace(self, **kw) -> "SieveParams":
        d = dict(k=self.k, theta=self.theta, theta0=self.theta0, support=self.support,
                 corrections=self.corrections, mode=self.mode)
        d.update(kw)
        if d["mode"] in (Mode.FLAT, "flat") and "theta0" not in kw:
            d["theta0"] = None
        return SieveParams(**d)

    def to_json_obj(self) -> dict:
        return {"k": self.k, "theta": str(self.theta), "theta0": str(self.theta0),
                "support": self.support.value, "mode": self.mode.value,
                "corrections": [list(p) for p in self.sorted_corrections()]}


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float = 0.0
    method: str = "quadrature"
    converged: bool = True

    def __float__(self) -> float:
        return float(self.value)

    def scaled(self, c: float) -> "Estimate":
        return Estimate(self.value * c, self.error * abs(c), self.method, self.converged)

    def to_json_obj(self) -> dict:
        return {"value": self.value, "error": self.error, "method": self.method,
                "converged": self.converged}


def _est(res: QuadResult, method: str = "quadrature", factor: float = 1.0) -> Estimate:
    return Estimate(res.value * factor, res.error * abs(factor), method, res.converged)


# ---------------------------------------------------------------------------
# diagonal data

@dataclass(frozen=True)
class _Diag:
    f: np.ndarray
    A: np.ndarray
    A2: np.ndarray
    deg: int


def _diag_data(F) -> _Diag:
    d = F if isinstance(F, DiagonalPolynomial) else diagonal_reduce(F)
    f = d.as_array()
    A = d.antider_array()
    sq = np.polynomial.polynomial.polymul(f, f)
    A2 = np.polynomial.polynomial.polyint(sq)
    return _Diag(f, A, A2, d.degree)


def _nodes(deg: int):
    return K.gl_nodes(K.exact_nodes(deg))


def _inner_nodes(diag: _Diag, k: int, power: int):
    """GL rules exact for an inner integrand of degree ``power`` in (t, s)."""
    xs, ws = _nodes(power + k - 3)
    xt, wt = _nodes(power + k - 2)
    return xt, wt, xs, ws


def _as_diag_or_none(F):
    if isinstance(F, DiagonalPolynomial):
        return F
    try:
        return diagonal_reduce(F)
    except ReductionNotAvailable:
        return None


# ---------------------------------------------------------------------------
# J

def compute_J(F, params: SieveParams, cfg: QuadConfig | None = None, method: str = "auto"
              ) -> Estimate:
    """Squared mass of ``F`` on the chosen support.

    Diagonal weights use the reduced one-variable form (exact up to rounding);
    other weights use exact simplex integration or, on the extended support,
    full-dimensional quadrature.
    """
    cfg = cfg or QuadConfig()
    k = params.k
    d = _as_diag_or_none(F)
    if d is not None and not (method == "exact" and not params.extended):
        diag = _diag_data(d)
        xt, wt, xs, ws = _inner_nodes(diag, k, 2 * diag.deg + 1)
        # a shift longer than the support leaves only the shell term
        _, i2 = K.j0_batch(diag.f, diag.A2, np.array([4.0]), k, params.extended, xt, wt, xs, ws)
        return Estimate(float(i2[0]), 1e-15 * abs(float(i2[0])), "reduced-exact")
    if not params.extended:
        from .simplex_exact import conjecture_J
        return Estimate(float(conjecture_J(_as_symmetric(F, k))), 0.0, "simplex-exact")
    if k > 5:
        raise PathNotAvailable("non-diagonal F on the extended support needs k <= 5")
    return _J_full_dimensional(F, k, cfg)


def evaluate_batch(F: SymmetricPolynomial, pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, float))
    out = np.zeros(len(pts))
    mx = max(F.max_power_index(), 1)
    ps = {j: (pts ** j).sum(axis=1) for j in range(1, mx + 1)}
    x1 = ps[1] if F.basis.value == "raw" else 1.0 - ps[1]
    for c, e in F.terms:
        term = np.full(len(pts), float(c))
        for j, n in e:
            term = term * ((x1 if j == 1 else ps[j]) ** n)
        out += term
    return out


def _J_full_dimensional(F, k: int, cfg: QuadConfig) -> Estimate:
    region = make_support(k, SupportKind.EXTENDED)
    dom = arrangement_domain(region)
    res = integrate_iterated(dom, lambda X: evaluate_batch(F, X) ** 2, cfg.with_(
        panel_rule="GL7"))
    return _est(res, "full-dimensional-quadrature")


# ---------------------------------------------------------------------------
# J0

def _j0_weight(y, th, th0):
    return (th0 - th * y) / (th0 * y)


def _as_symmetric(F, k: int) -> SymmetricPolynomial:
    if isinstance(F, DiagonalPolynomial):
        return SymmetricPolynomial.raw_p1(k, F.coeffs)
    return F


def compute_J0(F, params: SieveParams, cfg: QuadConfig | None = None, method: str = "auto"
               ) -> tuple[Estimate, Estimate, Estimate]:
    """``(J0, J01, J02)``; the pieces are reported before the ``1/(k-3)!`` factor.

    ``method`` is ``"auto"`` (exact whenever theta0 = 1 on the simplex),
    ``"exact"`` or ``"quadrature"``.
    """
    cfg = cfg or QuadConfig()
    k = params.k
    th, th0 = float(params.theta), float(params.theta0)
    fac = math.factorial(k - 3)
    d = _as_diag_or_none(F)
    exact_ok = params.theta0 == 1 and not params.extended
    if method == "exact" or d is None or (method == "auto" and exact_ok):
        if not exact_ok:
            raise PathNotAvailable(
                "the exact path needs theta0 = 1 and simplex support; non-diagonal F has "
                "no quadrature path for J0")
        from .simplex_exact import conjecture_J0_parts
        total, p1, p2 = conjecture_J0_parts(_as_symmetric(F, k), params.theta)
        return (Estimate(total, 0.0, "simplex-exact"),
                Estimate(p1 * fac, 0.0, "simplex-exact"),
                Estimate(p2 * fac, 0.0, "simplex-exact"))
    diag = _diag_data(d)
    xt, wt, xs, ws = _inner_nodes(diag, k, 2 * diag.deg + 1)
    ext = params.extended
    ymax = th0 / th
    brk = [1.0 / (k - 1), 1.0] if ext else [1.0]

    from .quad import IteratedDomain
    dom = IteratedDomain(1, [(0.0, ymax)], [lambda o: brk])
    cache: dict = {}

    def parts(Y):
        key = Y.tobytes()
        hit = cache.get(key)
        if hit is None:
            y = Y[:, 0]
            i1, i2 = K.j0_batch(diag.f, diag.A2, y, k, ext, xt, wt, xs, ws)
            w = _j0_weight(y, th, th0)
            hit = (w * i1, w * i2)
            cache.clear()
            cache[key] = hit
        return hit

    scale = compute_J(d, params, cfg).value
    r1 = integrate_iterated(dom, lambda Y: parts(Y)[0], cfg, scale_hint=scale)
    r2 = integrate_iterated(dom, lambda Y: parts(Y)[1], cfg, scale_hint=scale)
    j01, j02 = _est(r1), _est(r2)
    tot = Estimate(j01.value + j02.value, j01.error + j02.error, "quadrature",
                   j01.converged and j02.converged)
    return tot, j01.scaled(fac), j02.scaled(fac)


# ---------------------------------------------------------------------------
# corrections

def compute_J11(F, params: SieveParams, cfg: QuadConfig | None = None) -> Estimate:
    th0 = params.theta0
    if th0 == 1:
        return Estimate(0.0, 0.0, "empty-domain")
    diag = _diag_data(_require_diag(F))
    k = params.k
    xt, wt, xs, ws = _inner_nodes(diag, k, 2 * (diag.deg + 1))
    offs = np.zeros((1, 1))
    v = K.shift_sq_batch(diag.A, offs, np.ones(1), k, params.extended, xt, wt, xs, ws)[0]
    pref = float((1 - th0) / th0)
    return Estimate(pref * v, 1e-15 * abs(pref * v), "reduced-exact")


def _require_diag(F) -> DiagonalPolynomial:
    d = _as_diag_or_none(F)
    if d is None:
        raise PathNotAvailable("correction terms need F depending on P_1 only")
    return d


def subset_matrix(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All subsets of ``n`` shift variables as 0/1 rows with signs ``(-1)^|J|``."""
    rows = np.array(list(itertools.product((0, 1), repeat=n)), dtype=float)
    if n == 0:
        rows = np.zeros((1, 0))
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    signs = (-1.0) ** rows.sum(axis=1)
    return rows, signs


def kink_hyperplanes(n: int, k: int, extended: bool) -> list[tuple[np.ndarray, float]]:
    """Hyperplanes in shift space across which the inner integral is not analytic.

    The clip lines ``t + c_J = U`` are parallel in the (t, s) triangle, so the
    inner integral only changes form when a line passes a triangle vertex
    (``c_J = 1``, and ``c_J = 1/(k-1)`` on the extended support) or when two
    lines coincide (``c_J = c_J'`` for subsets neither containing the other).
    """
    M, _ = subset_matrix(n)
    out = []
    for r in M:
        if r.any():
            out.append((r.copy(), 1.0))
            if extended:
                out.append((r.copy(), 1.0 / (k - 1)))
    for a, b in itertools.combinations(range(len(M)), 2):
        diff = M[a] - M[b]
        if (diff > 0).any() and (diff < 0).any():
            out.append((diff, 0.0))
    return out


def correction_weight(Y: np.ndarray, r: int, s: int, th: float, th0: float) -> np.ndarray:
    n_small = r - s
    num = 1.0 - s * th0 - th * Y[:, :n_small].sum(axis=1)
    return num / (th0 * np.prod(Y, axis=1) * (1.0 - th * Y.sum(axis=1)))


def _correction(F, params: SieveParams, r: int, s: int, cfg: QuadConfig, flat: bool
                ) -> Estimate:
    if s > r or s < 1:
        raise ValueError(f"invalid correction ({r},{s}): need 1 <= s <= r")
    if (r, s) not in SUPPORTED_PAIRS:
        raise PathNotAvailable(
            f"correction ({r},{s}) has no evaluation path; supported: {SUPPORTED_PAIRS}")
    if (r, s) == (1, 1):
        return compute_J11(F, params, cfg)
    if params.theta0 == 1:
        return Estimate(0.0, 0.0, "empty-domain")
    diag = _diag_data(_require_diag(F))
    k = params.k
    th, th0 = float(params.theta), float(params.theta0)
    region = make_correction_domain(r, s, theta=params.theta, theta0=params.theta0, flat=flat)
    n = r - 1
    M, signs = subset_matrix(n)
    kinks = kink_hyperplanes(n, k, params.extended)
    dom = arrangement_domain(region, kinks)
    xt, wt, xs, ws = _inner_nodes(diag, k, 2 * (diag.deg + 1))
    ext = params.extended

    def integrand(Y):
        offs = np.ascontiguousarray(Y @ M.T)
        inner = K.shift_sq_batch(diag.A, offs, signs, k, ext, xt, wt, xs, ws)
        return correction_weight(Y, r, s, th, th0) * inner

    if dom.bounds(0, np.empty(0))[1] <= dom.bounds(0, np.empty(0))[0]:
        return Estimate(0.0, 0.0, "empty-domain")
    c = cfg if n == 1 else cfg.with_(panel_rule="GL7")
    scale = compute_J(_require_diag(F), params, cfg).value
    res = integrate_iterated(dom, integrand, c, scale_hint=scale)
    return _est(res, "quadrature")


def compute_Jrs(F, params: SieveParams, r: int, s: int, cfg: QuadConfig | None = None
                ) -> Estimate:
    return _correction(F, params, r, s, cfg or QuadConfig(), flat=False)


def compute_Jrs_flat(F, params: SieveParams, r: int, s: int, cfg: QuadConfig | None = None
                     ) -> Estimate:
    return _correction(F, params, r, s, cfg or QuadConfig(), flat=True)


# ---------------------------------------------------------------------------
# case-split pieces

@dataclass(frozen=True)
class PieceValue:
    label: str
    quadrature: Estimate | None
    monte_carlo: Estimate | None

    def agree(self, rel: float = 0.01, nsigma: float = 3.0) -> bool | None:
        """``|quad - mc| <= max(nsigma * sigma, rel * |quad|)``."""
        if self.quadrature is None or self.monte_carlo is None:
            return None
        tol = max(nsigma * self.monte_carlo.error, rel * abs(self.quadrature.value))
        return bool(abs(self.quadrature.value - self.monte_carlo.value) <= tol)

    def to_json_obj(self) -> dict:
        return {"label": self.label,
                "quadrature": None if self.quadrature is None else self.quadrature.to_json_obj(),
                "monte_carlo": None if self.monte_carlo is None else self.monte_carlo.to_json_obj(),
                "agree": self.agree()}


def _pointwise_shift_sq(diag: _Diag, k: int, extended: bool, M: np.ndarray, signs: np.ndarray):
    """Vectorized ``h(t, s)^2 (t - s)^(k-3) / (k-3)!`` (or the simplex analogue)."""
    A = diag.A

    def fn(Y, t, s):
        offs = Y @ M.T
        U = 1.0 + s / (k - 1) if extended else np.ones_like(t)
        AU = np.polynomial.polynomial.polyval(U, A)
        x = t[:, None] + offs
        vals = AU[:, None] - np.polynomial.polynomial.polyval(x, A)
        h = ((x < U[:, None]) * vals * signs).sum(axis=1)
        if extended:
            return h * h * (t - s) ** (k - 3) / math.factorial(k - 3)
        return h * h * t ** (k - 2) / math.factorial(k - 2)
    return fn


def piece_integrals(F, params: SieveParams, label: str, cfg: QuadConfig | None = None,
                    engines: Sequence[str] = ("quadrature", "mc")) -> list[PieceValue]:
    """Contribution of each case-split piece of a correction term, by both engines.

    Values carry the same normalization as ``compute_Jrs`` so the pieces of a
    decomposition sum to the correction term.
    """
    cfg = cfg or QuadConfig()
    lab = label.upper().replace("'", "P")
    r, s, bands = PIECE_SPECS[lab]
    diag = _diag_data(_require_diag(F))
    k = params.k
    th, th0 = float(params.theta), float(params.theta0)
    ext = params.extended
    flat = params.flat
    parent, pieces = decomposition(lab, k, params.theta, params.theta0, params.support, flat)
    n = r - 1
    # decomposition coordinates are descending; the weight expects ascending
    perm = list(range(n - 1, -1, -1))
    M, signs = subset_matrix(n)
    out = []
    outer_region = make_correction_domain(r, s, theta=params.theta, theta0=params.theta0,
                                          flat=flat).permuted(perm)
    kinks = kink_hyperplanes(n, k, ext)
    xt, wt, xs, ws = _inner_nodes(diag, k, 2 * (diag.deg + 1))
    point_fn = _pointwise_shift_sq(diag, k, ext, M, signs)
    scale = None
    for band, piece in zip(bands, pieces):
        q_est = mc_est = None
        lo = np.array(band.lo, float)
        hi = None if band.hi is None else np.array(band.hi, float)
        if "quadrature" in engines:
            region = outer_region
            if band.outer is not None:
                region = region.intersect(Constraint.make(list(band.outer[0]), band.outer[1],
                                                          True))
            dom = arrangement_domain(region, kinks)

            def integrand(Yd, lo=lo, hi=hi):
                Ya = np.ascontiguousarray(Yd[:, perm])
                offs = np.ascontiguousarray(Ya @ M.T)
                clo = Yd @ lo
                chi = np.full(len(Yd), np.inf) if hi is None else Yd @ hi
                inner = K.band_sq_batch(diag.A, offs, signs, k, ext, clo, chi, xt, wt, xs, ws)
                return correction_weight(Ya, r, s, th, th0) * inner

            if scale is None:
                scale = compute_J(_require_diag(F), params, cfg).value
            c = cfg if n == 1 else cfg.with_(panel_rule="GL7")
            q_est = _est(integrate_iterated(dom, integrand, c, scale_hint=scale), "quadrature")
        if "mc" in engines:
            def mc_integrand(P):
                Ya = P[:, :n][:, perm]
                t, sv = P[:, n], P[:, n + 1]
                return correction_weight(Ya, r, s, th, th0) * point_fn(Ya, t, sv)

            res = integrate_mc(piece, mc_integrand, cfg)
            mc_est = Estimate(res.value, res.error, "monte-carlo", True)
        out.append(PieceValue(band.label, q_est, mc_est))
    return out


# ---------------------------------------------------------------------------
# the combined bound

@dataclass
class FunctionalReport:
    params: SieveParams
    J: Estimate
    J0: Estimate
    J01: Estimate
    J02: Estimate
    Jrs: dict = field(default_factory=dict)
    upsilon: float = float("nan")
    polynomial: str = ""

    @property
    def converged(self) -> bool:
        parts = [self.J, self.J0, self.J01, self.J02, *self.Jrs.values()]
        return all(p.converged for p in parts)

    def recompute_upsilon(self) -> float:
        return combine_upsilon(self.params, self.J.value, self.J0.value,
                               {rs: e.value for rs, e in self.Jrs.items()})

    def check(self, tol: float = 1e-12) -> bool:
        return abs(self.recompute_upsilon() - self.upsilon) <= tol * max(1.0, abs(self.upsilon))

    def to_json_obj(self) -> dict:
        return {
            "params": self.params.to_json_obj(),
            "polynomial": self.polynomial,
            "J": self.J.to_json_obj(),
            "J0": self.J0.to_json_obj(),
            "J01": self.J01.to_json_obj(),
            "J02": self.J02.to_json_obj(),
            "Jrs": {f"{r},{s}": e.to_json_obj() for (r, s), e in sorted(self.Jrs.items())},
            "upsilon": self.upsilon,
            "converged": self.converged,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "FunctionalReport":
        p = obj["params"]
        params = SieveParams(p["k"], p["theta"], p["theta0"] if p["mode"] != "flat" else None,
                             p["support"], [tuple(x) for x in p["corrections"]], p["mode"])

        def est(d):
            return Estimate(d["value"], d["error"], d["method"], d["converged"])
        jrs = {tuple(int(v) for v in key.split(",")): est(v) for key, v in obj["Jrs"].items()}
        return cls(params, est(obj["J"]), est(obj["J0"]), est(obj["J01"]), est(obj["J02"]),
                   jrs, obj["upsilon"], obj.get("polynomial", ""))

    CSV_FIELDS = ("k", "mode", "support", "theta", "theta0", "J", "J0", "sum_Jrs", "upsilon",
                  "converged")

    def csv_row(self) -> dict:
        return {"k": self.params.k, "mode": self.params.mode.value,
                "support": self.params.support.value, "theta": str(self.params.theta),
                "theta0": str(self.params.theta0), "J": self.J.value, "J0": self.J0.value,
                "sum_Jrs": sum(e.value for e in self.Jrs.values()), "upsilon": self.upsilon,
                "converged": self.converged}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS)
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


def combine_upsilon(params: SieveParams, J: float, J0: float, Jrs: Mapping) -> float:
    th, th0 = float(params.theta), float(params.theta0)
    return params.k * (J0 - th * sum(Jrs.values())) / J + params.k / th0


def upsilon(F, params: SieveParams, cfg: QuadConfig | None = None) -> FunctionalReport:
    """Evaluate every ingredient of the bound and assemble the report."""
    cfg = cfg or QuadConfig()
    J = compute_J(F, params, cfg)
    J0, J01, J02 = compute_J0(F, params, cfg)
    jrs = {}
    if params.mode is not Mode.CONJECTURE:
        fn = compute_Jrs_flat if params.flat else compute_Jrs
        for r, s in params.sorted_corrections():
            jrs[(r, s)] = fn(F, params, r, s, cfg)
    else:
        for rs in params.sorted_corrections():
            jrs[rs] = Estimate(0.0, 0.0, "empty-domain")
    rep = FunctionalReport(params, J, J0, J01, J02, jrs, float("nan"), str(F))
    rep.upsilon = rep.recompute_upsilon()
    return rep
