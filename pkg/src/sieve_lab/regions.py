"""Integration domains as boxes cut by linear inequalities.

Every domain that appears in the functionals (the sieve supports, the
correction domains in rescaled prime-size variables, and the case-split
pieces used to check the explicit-limit decompositions) is a ``Region``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np


class SupportKind(str, Enum):
    SIMPLEX = "simplex"
    EXTENDED = "extended"

    @classmethod
    def _missing_(cls, value):
        aliases = {"r_k": cls.SIMPLEX, "rk": cls.SIMPLEX, "r'_k": cls.EXTENDED,
                   "r'k": cls.EXTENDED, "ext": cls.EXTENDED}
        if isinstance(value, str):
            return aliases.get(value.lower())
        return None


class RegionPossiblyEmpty(RuntimeError):
    pass


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class Constraint:
    """``coeffs . x  <  rhs`` (strict) or ``<=``."""

    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    strict: bool = False

    @classmethod
    def make(cls, coeffs: Sequence, rhs, strict: bool = False) -> "Constraint":
        return cls(tuple(_q(c) for c in coeffs), _q(rhs), strict)

    def to_json_obj(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs], "rhs": str(self.rhs),
                "sense": "<" if self.strict else "<="}


@dataclass(frozen=True)
class Region:
    dim: int
    box: tuple[tuple[Fraction, Fraction], ...]
    constraints: tuple[Constraint, ...] = ()
    label: str = ""
    variables: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.box) != self.dim:
            raise ValueError("box must have one interval per coordinate")
        for c in self.constraints:
            if len(c.coeffs) != self.dim:
                raise ValueError(f"constraint arity {len(c.coeffs)} != dim {self.dim}")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"x{i + 1}" for i in range(self.dim)))

    # geometry -----------------------------------------------------------------
    def box_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([float(a) for a, _ in self.box])
        hi = np.array([float(b) for _, b in self.box])
        return lo, hi

    def box_volume(self) -> float:
        lo, hi = self.box_arrays()
        return float(np.prod(np.maximum(hi - lo, 0.0)))

    def sampling_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box of the region itself: each coordinate's exact projected range."""
        cached = _SAMPLING_BOX.get(self)
        if cached is not None:
            return cached
        lo, hi = self.box_arrays()
        for i in range(self.dim):
            order = [i] + [j for j in range(self.dim) if j != i]
            lowers, uppers = self.permuted(order).level_bounds()[0]
            if lowers:
                lo[i] = max(lo[i], max(c for _, c in lowers))
            if uppers:
                hi[i] = min(hi[i], min(c for _, c in uppers))
        hi = np.maximum(hi, lo)
        _SAMPLING_BOX[self] = (lo, hi)
        return lo.copy(), hi.copy()

    def constraint_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.constraints:
            return np.zeros((0, self.dim)), np.zeros(0)
        A = np.array([[float(c) for c in con.coeffs] for con in self.constraints])
        b = np.array([float(con.rhs) for con in self.constraints])
        return A, b

    def contains(self, x) -> np.ndarray | bool:
        """Membership; ties on a boundary count as inside."""
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {pts.shape[1]}")
        lo, hi = self.box_arrays()
        ok = np.all((pts >= lo) & (pts <= hi), axis=1)
        A, b = self.constraint_arrays()
        if len(b):
            ok &= np.all(pts @ A.T <= b + 1e-15 * (1 + np.abs(b)), axis=1)
        return bool(ok[0]) if single else ok

    def slack(self, x) -> np.ndarray:
        """Distance-like slack ``b - A x`` of each constraint at points ``x``."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        A, b = self.constraint_arrays()
        return b - pts @ A.T

    def intersect(self, *extra: Constraint, label: str | None = None) -> "Region":
        return Region(self.dim, self.box, self.constraints + tuple(extra),
                      label if label is not None else self.label, self.variables)

    def permuted(self, order: Sequence[int], variables: Sequence[str] | None = None,
                 label: str | None = None) -> "Region":
        """Reorder coordinates: new coordinate i is old coordinate ``order[i]``."""
        box = tuple(self.box[o] for o in order)
        cons = tuple(Constraint(tuple(c.coeffs[o] for o in order), c.rhs, c.strict)
                     for c in self.constraints)
        return Region(self.dim, box, cons, label if label is not None else self.label,
                      tuple(variables) if variables else tuple(self.variables[o] for o in order))

    def embed(self, extra_box: Sequence[tuple], extra_vars: Sequence[str],
              extra: Sequence[Constraint] = (), label: str | None = None) -> "Region":
        """Append coordinates (with their box) and constraints over the full set."""
        n = len(extra_box)
        cons = tuple(Constraint(c.coeffs + (Fraction(0),) * n, c.rhs, c.strict)
                     for c in self.constraints)
        box = self.box + tuple((_q(a), _q(b)) for a, b in extra_box)
        return Region(self.dim + n, box, cons + tuple(extra),
                      label if label is not None else self.label,
                      tuple(self.variables) + tuple(extra_vars))

    # iterated limits (Fourier-Motzkin) ---------------------------------------
    def level_bounds(self) -> list[tuple[list, list]]:
        """Per-coordinate affine lower/upper bounds in terms of outer coordinates.

        Entry ``L`` is ``(lowers, uppers)``; each bound is ``(a, c)`` with ``a``
        an array over coordinates ``0..L-1`` and the bound value ``c - a.x``.
        Obtained by eliminating coordinates from the innermost outwards.
        """
        rows = []
        for i, (lo, hi) in enumerate(self.box):
            e = [Fraction(0)] * self.dim
            e[i] = Fraction(1)
            rows.append((tuple(e), hi))
            rows.append((tuple(-v for v in e), -lo))
        rows += [(c.coeffs, c.rhs) for c in self.constraints]
        rows = _dedupe(rows)
        out: list[tuple[list, list]] = [([], []) for _ in range(self.dim)]
        for L in range(self.dim - 1, -1, -1):
            pos, neg, rest = [], [], []
            for a, b in rows:
                if any(a[L + 1:]):
                    continue
                if a[L] > 0:
                    pos.append((a, b))
                elif a[L] < 0:
                    neg.append((a, b))
                else:
                    rest.append((a, b))
            lowers, uppers = out[L]
            for a, b in pos:
                uppers.append((np.array([float(v / a[L]) for v in a[:L]]), float(b / a[L])))
            for a, b in neg:
                lowers.append((np.array([float(v / a[L]) for v in a[:L]]), float(b / a[L])))
            new = list(rest)
            for ap, bp in pos:
                for an, bn in neg:
                    sp, sn = ap[L], -an[L]
                    a = tuple(sn * x + sp * y for x, y in zip(ap, an))
                    b = sn * bp + sp * bn
                    if any(a[:L]):
                        new.append((a, b))
                    elif b < 0:
                        new.append((a, b))  # infeasible marker, kept
            rows = _dedupe(new) + [r for r in rows if any(r[0][L + 1:])]
        return out

    # serialization ------------------------------------------------------------
    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "variables": list(self.variables),
            "box": [[str(a), str(b)] for a, b in self.box],
            "constraints": [c.to_json_obj() for c in self.constraints],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)


_SAMPLING_BOX: dict = {}


def _dedupe(rows):
    seen = {}
    for a, b in rows:
        nz = [abs(v) for v in a if v != 0]
        if not nz:
            if b >= 0:
                continue
            seen[("empty",)] = (a, b)
            continue
        s = max(nz)
        key = (tuple(v / s for v in a), b / s)
        seen[key] = (tuple(v / s for v in a), b / s)
    return list(seen.values())


def bound_value(bounds: list, outer: np.ndarray, lower: bool) -> float:
    if not bounds:
        return -np.inf if lower else np.inf
    vals = [c - (float(a @ outer) if len(a) else 0.0) for a, c in bounds]
    return max(vals) if lower else min(vals)


# ---------------------------------------------------------------------------
# supports

def in_support(t: Sequence, k: int, kind: SupportKind | str) -> bool:
    kind = SupportKind(kind)
    x = np.asarray(t, dtype=float)
    if x.shape != (k,):
        raise ValueError(f"expected {k} coordinates")
    if np.any(x < 0) or np.any(x > 1):
        return False
    total = x.sum()
    if kind == SupportKind.SIMPLEX:
        return bool(total <= 1 + 1e-15)
    return bool(total - x.min() <= 1 + 1e-15)


def make_support(k: int, kind: SupportKind | str) -> Region:
    """``R_k`` (simplex) or ``R'_k`` (extended) as a region in ``[0,1]^k``."""
    if k < 3:
        raise ValueError("k must be at least 3")
    kind = SupportKind(kind)
    box = tuple((Fraction(0), Fraction(1)) for _ in range(k))
    names = tuple(f"t{i + 1}" for i in range(k))
    if kind == SupportKind.SIMPLEX:
        cons = (Constraint.make([1] * k, 1),)
        return Region(k, box, cons, f"R_{k}", names)
    cons = tuple(Constraint.make([0 if i == j else 1 for i in range(k)], 1) for j in range(k))
    return Region(k, box, cons, f"R'_{k}", names)


def membership(region: Region, x) -> bool:
    return region.contains(x)


# ---------------------------------------------------------------------------
# correction domains

def _params(params, theta, theta0, flat):
    if params is not None:
        theta = params.theta if theta is None else theta
        theta0 = params.theta0 if theta0 is None else theta0
        flat = flat or getattr(params, "mode", None) in ("flat",) or \
            getattr(getattr(params, "mode", None), "value", None) == "flat"
    if theta is None or theta0 is None:
        raise ValueError("theta and theta0 are required")
    return _q(theta), _q(theta0), flat


def make_correction_domain(r: int, s: int, params=None, *, theta=None, theta0=None,
                           flat: bool = False, eps=0) -> Region:
    """Domain of the weight for the (r, s) correction, in ``y_i = x_i / theta``.

    Coordinates are ascending: ``y_1 < ... < y_{r-1}``.  The first ``r - s`` lie
    at or below ``theta0/theta``, the rest above it.  The sum constraint
    ``sum y + y_{r-1} < 1/theta`` always applies; the flat variant also imposes
    ``sum y < (1 - theta)/theta``.  The weight's nonnegativity adds
    ``sum y < (1 - theta0)/theta`` (only binding when ``s = 1``).
    """
    if s > r:
        raise ValueError("s must not exceed r")
    if r < 2 or s < 1:
        raise ValueError("correction domains exist for r >= 2, 1 <= s <= r")
    th, th0, flat = _params(params, theta, theta0, flat)
    n = r - 1
    cut = th0 / th
    hi = 1 / (2 * th)
    box = tuple((_q(eps) / th if i == 0 else Fraction(0), hi) for i in range(n))
    cons = []
    for i in range(n - 1):
        e = [0] * n
        e[i], e[i + 1] = 1, -1
        cons.append(Constraint.make(e, 0, strict=True))
    if r - s >= 1:
        e = [0] * n
        e[r - s - 1] = 1
        cons.append(Constraint.make(e, cut))
    if s >= 2:
        e = [0] * n
        e[r - s] = -1
        cons.append(Constraint.make(e, -cut, strict=True))
    e = [1] * n
    e[-1] = 2
    cons.append(Constraint.make(e, 1 / th, strict=True))
    cons.append(Constraint.make([1] * n, (1 - th0) / th, strict=True))
    if flat:
        cons.append(Constraint.make([1] * n, (1 - th) / th, strict=True))
    names = tuple(f"y{i + 1}" for i in range(n))
    tag = "flat" if flat else "std"
    return Region(n, box, tuple(cons), f"A[{r},{s};{tag}]", names)


def sample(region: Region, seed: int, n: int, max_proposals: int = 10**7,
           batch: int = 2**18) -> tuple[np.ndarray, float]:
    """``n`` uniform points of ``region`` by rejection from its sampling box.

    The returned rate is the acceptance fraction relative to ``sampling_box()``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = region.sampling_box()
    if np.any(hi - lo <= 0):
        raise RegionPossiblyEmpty(f"{region.label}: the region has no interior")
    got: list[np.ndarray] = []
    have = proposed = 0
    while have < n:
        m = batch
        pts = lo + (hi - lo) * rng.random((m, region.dim))
        proposed += m
        keep = pts[region.contains(pts)]
        got.append(keep)
        have += len(keep)
        if proposed >= max_proposals and have / proposed < 1e-6:
            raise RegionPossiblyEmpty(
                f"{region.label}: acceptance {have}/{proposed} after {proposed} proposals")
        if proposed >= 50 * max_proposals:
            raise RegionPossiblyEmpty(f"{region.label}: too few accepted points")
    pts = np.concatenate(got)[:n]
    return pts, have / proposed


# ---------------------------------------------------------------------------
# case-split decompositions of the (shift variables, t, s) domains

def _ts_block(k: int, support: SupportKind):
    """Constraints ``0 < s < t < 1`` on the trailing (t, s) coordinates."""
    return [((0, 0, 1), 0), ((0, -1, 1), 0), ((0, 1, 0), 1)]


def _clip_constraint(nshift: int, offset_mask: Sequence[int], k: int, above: bool,
                     support: SupportKind) -> Constraint:
    """``t + c < U`` (above=False) or ``t + c > U`` where ``U = 1 + s/(k-1)``."""
    us = Fraction(1, k - 1) if support == SupportKind.EXTENDED else Fraction(0)
    coeffs = [Fraction(m) for m in offset_mask] + [Fraction(1), -us]
    rhs = Fraction(1)
    if above:
        coeffs = [-c for c in coeffs]
        rhs = -rhs
    return Constraint(tuple(coeffs), rhs, True)


def _shift_ts_parent(r: int, s: int, k: int, theta, theta0, flat: bool,
                     descending: bool) -> Region:
    dom = make_correction_domain(r, s, theta=theta, theta0=theta0, flat=flat)
    n = dom.dim
    names = ["y", "z", "w"][:n] if descending else [f"y{i + 1}" for i in range(n)]
    if descending:
        dom = dom.permuted(list(range(n - 1, -1, -1)), names)
    ts = [Constraint.make([0] * n + [0, -1], 0, True),
          Constraint.make([0] * n + [-1, 1], 0, True)]
    return dom.embed([(0, 1), (0, 1)], ["t", "s"], ts)


@dataclass(frozen=True)
class PieceBand:
    """Piece where the clip offset ``lo`` is active and ``hi`` is not.

    Offsets are 0/1 masks over the shift coordinates; ``hi = None`` means no
    upper edge.  ``outer`` is an optional extra constraint on the shift
    coordinates alone.
    """

    label: str
    lo: tuple
    hi: tuple | None
    outer: tuple | None = None   # (coeffs over shift coords, rhs), strict


_BIG = ((-1, 1, 1), 0)     # y > z + w
_SMALL = ((1, -1, -1), 0)  # y < z + w
_R4_OFFSETS = {"0": (0, 0, 0), "w": (0, 0, 1), "z": (0, 1, 0), "zw": (0, 1, 1),
               "y": (1, 0, 0), "yw": (1, 0, 1), "yz": (1, 1, 0), "yzw": (1, 1, 1)}
_R4_SPEC = [("0", "w", None), ("w", "z", None), ("z", "zw", _BIG), ("zw", "y", _BIG),
            ("y", "yw", _BIG), ("z", "y", _SMALL), ("y", "zw", _SMALL), ("zw", "yw", _SMALL),
            ("yw", "yz", None), ("yz", "yzw", None), ("yzw", None, None)]

# (r, s, shift-variable order, pieces); coordinates are descending y > z > w,
# and for R3p y is the large variable and z the small one
PIECE_SPECS = {
    "R2": (2, 1, [PieceBand("R2;1", (0,), (1,)), PieceBand("R2;2", (1,), None)]),
    "R3": (3, 1, [PieceBand("R3;1", (0, 0), (0, 1)), PieceBand("R3;2", (0, 1), (1, 0)),
                  PieceBand("R3;3", (1, 0), (1, 1)), PieceBand("R3;4", (1, 1), None)]),
    "R3P": (3, 2, [PieceBand("R3';1", (0, 0), (0, 1)), PieceBand("R3';2", (0, 1), None)]),
    "R4": (4, 1, [PieceBand(f"R4;{i + 1}", _R4_OFFSETS[lo],
                            None if hi is None else _R4_OFFSETS[hi], extra)
                  for i, (lo, hi, extra) in enumerate(_R4_SPEC)]),
}


def _norm_label(label: str) -> str:
    lab = label.upper().replace("'", "P")
    if lab not in PIECE_SPECS:
        raise KeyError(f"unknown decomposition {label!r}; choose R2, R3, R4 or R3p")
    return lab


def decomposition_parent(label: str, k: int = 5, theta=Fraction(1, 4), theta0=Fraction(3, 8),
                         flat: bool = False) -> Region:
    lab = _norm_label(label)
    r, s, _ = PIECE_SPECS[lab]
    if lab == "R3P":
        parent = _shift_ts_parent(r, s, k, theta, theta0, flat, False)
        # ascending (small, large) -> (y large, z small)
        return parent.permuted([1, 0, 2, 3], ["y", "z", "t", "s"], "R3'")
    parent = _shift_ts_parent(r, s, k, theta, theta0, flat, True)
    return Region(parent.dim, parent.box, parent.constraints, lab, parent.variables)


def decomposition(label: str, k: int = 5, theta=Fraction(1, 4), theta0=Fraction(3, 8),
                  support: SupportKind | str = SupportKind.EXTENDED, flat: bool = False
                  ) -> tuple[Region, list[Region]]:
    """Parent region and case-split pieces for ``R2``, ``R3``, ``R4`` or ``R3p``.

    Coordinates follow the descending convention ``(y, z, w, t, s)`` with
    ``y > z > w``; for ``R3p`` the small variable is ``z`` and ``y`` is the
    large one.  Pieces are cut by the position of the clip bound between
    consecutive offsets ``t + c``.
    """
    support = SupportKind(support)
    lab = _norm_label(label)
    parent = decomposition_parent(lab, k, theta, theta0, flat)
    n = parent.dim - 2
    pieces = []
    for band in PIECE_SPECS[lab][2]:
        cons = [_clip_constraint(n, band.lo, k, False, support)]
        if band.hi is not None:
            cons.append(_clip_constraint(n, band.hi, k, True, support))
        if band.outer is not None:
            cons.append(Constraint.make(list(band.outer[0]) + [0, 0], band.outer[1], True))
        pieces.append(parent.intersect(*cons, label=band.label))
    return parent, pieces


DECOMPOSITIONS = ("R2", "R3", "R4", "R3p")
