"""Adaptive iterated Gauss-Legendre quadrature and a seeded Monte-Carlo oracle.

The iterated engine integrates over domains described by ordered limits: the
bounds of coordinate ``L`` are functions of coordinates ``0..L-1``.  Each level
bisects panels until a panel's rule and an embedded lower-order rule on the
same panel agree to that level's tolerance share.  The innermost level is evaluated in batches so
compiled integrands can be vectorized.

``arrangement_domain`` builds such a domain from a polytope plus a set of kink
hyperplanes: at every level it projects the vertices of the restricted
arrangement to obtain both the limits and the breakpoints, so no panel ever
straddles a kink of the integrand.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from ._kernels import gl_nodes
from .regions import Region, RegionPossiblyEmpty


class PanelRule(str, Enum):
    GL7 = "GL7"
    GL15 = "GL15"

    @property
    def order(self) -> int:
        return 7 if self is PanelRule.GL7 else 15


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    max_depth: int = 40
    panel_rule: PanelRule = PanelRule.GL15
    seed: int = 0
    mc_samples: int = 1_000_000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        object.__setattr__(self, "panel_rule", PanelRule(self.panel_rule))

    def with_(self, **kw) -> "QuadConfig":
        d = dict(abs_tol=self.abs_tol, rel_tol=self.rel_tol, max_depth=self.max_depth,
                 panel_rule=self.panel_rule, seed=self.seed, mc_samples=self.mc_samples)
        d.update(kw)
        return QuadConfig(**d)


@dataclass
class QuadResult:
    value: float
    error: float
    converged: bool = True
    evaluations: int = 0

    def __iter__(self):
        yield self.value
        yield self.error


Bound = Callable[[np.ndarray], float] | float


@dataclass
class IteratedDomain:
    """Ordered limits; ``breakpoints[L](outer)`` lists interior splits of level L."""

    dim: int
    limits: Sequence[tuple[Bound, Bound]]
    breakpoints: Sequence[Callable[[np.ndarray], Sequence[float]] | None] | None = None

    def __post_init__(self):
        if len(self.limits) != self.dim:
            raise ValueError("one (lower, upper) pair per coordinate is required")
        if self.dim > 5:
            raise ValueError("iterated quadrature supports at most 5 dimensions")
        if self.breakpoints is None:
            self.breakpoints = [None] * self.dim

    def bounds(self, level: int, outer: np.ndarray) -> tuple[float, float]:
        lo, hi = self.limits[level]
        a = lo(outer) if callable(lo) else float(lo)
        b = hi(outer) if callable(hi) else float(hi)
        return float(a), float(b)

    def splits(self, level: int, outer: np.ndarray, a: float, b: float) -> list[float]:
        fn = self.breakpoints[level]
        pts = [a, b]
        if fn is not None:
            pts += [float(p) for p in fn(outer) if a < p < b]
        pts = sorted(set(pts))
        merged = [pts[0]]
        for p in pts[1:]:
            if p - merged[-1] > 1e-14 * max(1.0, abs(p)):
                merged.append(p)
        merged[-1] = b
        return merged


class NonFiniteIntegrand(FloatingPointError):
    pass


class _Engine:
    def __init__(self, domain: IteratedDomain, integrand, cfg: QuadConfig):
        self.domain = domain
        self.integrand = integrand
        self.cfg = cfg
        x, w = gl_nodes(cfg.panel_rule.order)
        self.x, self.w = x, w
        # the lower-order companion rule only serves the error estimate
        self.xl, self.wl = gl_nodes(cfg.panel_rule.order // 2)
        self.converged = True
        self.evals = 0

    def _eval_points(self, level: int, outer: np.ndarray, xs: np.ndarray, tol: float,
                     span: float) -> np.ndarray:
        d = self.domain.dim
        if level == d - 1:
            pts = np.empty((len(xs), d))
            pts[:, :level] = outer
            pts[:, level] = xs
            vals = np.asarray(self.integrand(pts), dtype=float)
            self.evals += len(xs)
            bad = ~np.isfinite(vals)
            if bad.any():
                raise NonFiniteIntegrand(f"integrand not finite at {pts[np.argmax(bad)].tolist()}")
            return vals
        # inner errors integrate over the whole level span
        inner_tol = tol / (10.0 * max(span, 1e-300))
        out = np.empty(len(xs))
        for i, xv in enumerate(xs):
            o = np.append(outer, xv)
            out[i] = self._level(level + 1, o, inner_tol)[0]
        return out

    def _rule(self, a: float, b: float, x=None, w=None) -> tuple[np.ndarray, np.ndarray]:
        x = self.x if x is None else x
        w = self.w if w is None else w
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        return m + h * x, h * w

    def _level(self, level: int, outer: np.ndarray, tol: float) -> tuple[float, float]:
        a, b = self.domain.bounds(level, outer)
        if not b > a:
            return 0.0, 0.0
        span = b - a
        cuts = self.domain.splits(level, outer, a, b)
        n = len(self.x)
        stack = [(cuts[i], cuts[i + 1], 0) for i in range(len(cuts) - 1)]
        total = 0.0
        err = 0.0
        # panels are processed in a fixed order so results are reproducible
        while stack:
            pa, pb, depth = stack.pop(0)
            xh, wh = self._rule(pa, pb)
            xl, wl = self._rule(pa, pb, self.xl, self.wl)
            share = tol * (pb - pa) / span
            vals = self._eval_points(level, outer, np.concatenate([xh, xl]), tol, span)
            high = float(vals[:n] @ wh)
            low = float(vals[n:] @ wl)
            # the low-order discrepancy bounds the high-order error for smooth panels
            diff = abs(high - low)
            if diff <= max(share, 64 * np.finfo(float).eps * abs(high)):
                total += high
                err += diff
            elif depth + 1 >= self.cfg.max_depth:
                total += high
                err += diff
                self.converged = False
            else:
                mid = 0.5 * (pa + pb)
                stack.insert(0, (mid, pb, depth + 1))
                stack.insert(0, (pa, mid, depth + 1))
        return total, err


def integrate_iterated(domain: IteratedDomain, integrand, cfg: QuadConfig | None = None,
                       scale_hint: float | None = None) -> QuadResult:
    """Nested adaptive Gauss-Legendre integral over an ``IteratedDomain``.

    ``integrand`` receives an ``(n, dim)`` array of points and returns ``n``
    values.  The absolute target is ``max(abs_tol, rel_tol * |scale_hint|)``;
    without a hint a coarse first pass supplies the scale.
    """
    cfg = cfg or QuadConfig()
    if scale_hint is None:
        probe = _Engine(domain, integrand, cfg.with_(max_depth=min(cfg.max_depth, 6)))
        scale_hint = abs(probe._level(0, np.empty(0), max(cfg.abs_tol, 1e-3))[0])
    tol = max(cfg.abs_tol, cfg.rel_tol * abs(scale_hint))
    eng = _Engine(domain, integrand, cfg)
    val, err = eng._level(0, np.empty(0), tol)
    return QuadResult(val, err, eng.converged, eng.evals)


def integrate_mc(region: Region, integrand, cfg: QuadConfig | None = None,
                 batch: int = 1 << 18) -> QuadResult:
    """Box-sampling estimate of ``int_region integrand``; deterministic per seed."""
    cfg = cfg or QuadConfig()
    rng = np.random.default_rng(cfg.seed)
    lo, hi = region.sampling_box()
    if np.any(hi - lo <= 0):
        raise RegionPossiblyEmpty(f"{region.label}: the region has no interior")
    vol = float(np.prod(hi - lo))
    n = int(cfg.mc_samples)
    s1 = s2 = 0.0
    hits = 0
    done = 0
    while done < n:
        m = min(batch, n - done)
        pts = lo + (hi - lo) * rng.random((m, region.dim))
        inside = region.contains(pts)
        vals = np.zeros(m)
        if inside.any():
            v = np.asarray(integrand(pts[inside]), dtype=float)
            if not np.all(np.isfinite(v)):
                bad = pts[inside][~np.isfinite(v)][0]
                raise NonFiniteIntegrand(f"integrand not finite at {bad.tolist()}")
            vals[inside] = v
        s1 += vals.sum()
        s2 += (vals * vals).sum()
        hits += int(inside.sum())
        done += m
    if hits == 0:
        raise RegionPossiblyEmpty(f"{region.label}: no sample of {n} fell inside")
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return QuadResult(mean * vol, vol * math.sqrt(var / n), True, n)


# ---------------------------------------------------------------------------
# arrangements

@dataclass
class Arrangement:
    """Polytope ``A x <= b`` (box included) plus kink hyperplanes ``K x = c``."""

    A: np.ndarray
    b: np.ndarray
    K: np.ndarray
    c: np.ndarray
    tol: float = 1e-11
    _cache: dict = field(default_factory=dict)

    @classmethod
    def from_region(cls, region: Region, kinks: Sequence[tuple[Sequence[float], float]] = ()):
        lo, hi = region.box_arrays()
        eye = np.eye(region.dim)
        A0, b0 = region.constraint_arrays()
        A = np.vstack([eye, -eye, A0]) if len(b0) else np.vstack([eye, -eye])
        b = np.concatenate([hi, -lo, b0]) if len(b0) else np.concatenate([hi, -lo])
        if kinks:
            K = np.array([np.asarray(a, float) for a, _ in kinks])
            c = np.array([float(v) for _, v in kinks])
        else:
            K = np.zeros((0, region.dim))
            c = np.zeros(0)
        return cls(A, b, K, c)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def projected_vertices(self, level: int, outer: np.ndarray) -> np.ndarray:
        """Coordinate ``level`` of every feasible vertex of the restricted arrangement."""
        d = self.dim
        q = d - level
        o = np.asarray(outer, float)
        H = np.vstack([self.A, self.K])
        h = np.concatenate([self.b, self.c])
        Hin = H[:, level:]
        hr = h - H[:, :level] @ o if level else h.copy()
        norms = np.abs(Hin).max(axis=1)
        keep = norms > 1e-14
        Hin, hr = Hin[keep] / norms[keep, None], hr[keep] / norms[keep]
        # dedupe rows
        key = np.round(np.hstack([Hin, hr[:, None]]), 12)
        _, idx = np.unique(key, axis=0, return_index=True)
        Hin, hr = Hin[np.sort(idx)], hr[np.sort(idx)]
        Ain = self.A[:, level:]
        br = self.b - (self.A[:, :level] @ o if level else 0.0)
        if q == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                xs = hr / Hin[:, 0]
            xs = xs[np.isfinite(xs)]
            pts = xs[:, None]
        else:
            combos = np.array(list(itertools.combinations(range(len(hr)), q)))
            if len(combos) == 0:
                return np.zeros(0)
            M = Hin[combos]
            rhs = hr[combos]
            det = np.linalg.det(M)
            good = np.abs(det) > 1e-12
            if not good.any():
                return np.zeros(0)
            pts = np.linalg.solve(M[good], rhs[good][..., None])[..., 0]
        feas = np.all(pts @ Ain.T <= br + self.tol, axis=1)
        v = np.sort(pts[feas, 0])
        if len(v) > 1:
            v = v[np.concatenate([[True], np.diff(v) > 1e-12])]
        return v

    def level_info(self, level: int, outer: np.ndarray) -> tuple[float, float, list[float]]:
        v = self.projected_vertices(level, outer)
        if len(v) == 0:
            return 0.0, 0.0, []
        return float(v[0]), float(v[-1]), [float(p) for p in v[1:-1]]


def arrangement_domain(region: Region, kinks: Sequence[tuple[Sequence[float], float]] = ()
                       ) -> IteratedDomain:
    arr = Arrangement.from_region(region, kinks)
    memo: dict = {}

    def info(level, outer):
        key = (level, tuple(np.asarray(outer, float).tolist()))
        hit = memo.get(key)
        if hit is None:
            hit = arr.level_info(level, outer)
            if len(memo) > 200_000:
                memo.clear()
            memo[key] = hit
        return hit

    limits = []
    breaks = []
    for L in range(region.dim):
        limits.append((lambda o, L=L: info(L, o)[0], lambda o, L=L: info(L, o)[1]))
        breaks.append(lambda o, L=L: info(L, o)[2])
    return IteratedDomain(region.dim, limits, breaks)


def region_domain(region: Region) -> IteratedDomain:
    """Iterated limits of a region from Fourier-Motzkin elimination."""
    from .regions import bound_value

    lb = region.level_bounds()
    limits = []
    for L in range(region.dim):
        lows, ups = lb[L]
        limits.append((lambda o, lows=lows: bound_value(lows, o, True),
                       lambda o, ups=ups: bound_value(ups, o, False)))
    return IteratedDomain(region.dim, limits)
