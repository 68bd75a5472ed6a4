"""Command-line interface: ``sieve-lab <command>``.

Exit codes: 0 success, 1 usage or hard computation error, 2 a quadrature
result did not converge, 3 a compared cell missed its published value.
"""

from __future__ import annotations

import argparse
import concurrent.futures as cf
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import partial
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .functionals import (FunctionalReport, Mode, PathNotAvailable, SieveParams,
                          compute_Jrs, compute_Jrs_flat, correction_weight, piece_integrals,
                          upsilon, _pointwise_shift_sq, _diag_data, _require_diag,
                          subset_matrix)
from .optimizer import (FLAT_CORRECTIONS, BOUND_CORRECTIONS, HEADLINE_CORRECTIONS, TABLE_C_F1,
                        TABLE_C_F2, TABLE_E_THETA, BasisSpec, basis_quartic_full, optimize,
                        reoptimize_table, table_c_polynomial, table_params)
from .quad import QuadConfig, integrate_mc
from .regions import (DECOMPOSITIONS, PIECE_SPECS, SupportKind, decomposition,
                      make_correction_domain, make_support, sample)
from .simplex_exact import conjecture_upsilon
from .sympoly import SymmetricPolynomial
from .tuples import LinearFormTuple, admissibility_report

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def load_golden() -> dict:
    text = resources.files("sieve_lab").joinpath("data/golden.json").read_text("utf-8")
    return json.loads(text)


# ---------------------------------------------------------------------------
# presets

HEADLINE_PARAMS = dict(k=5, theta=Fraction(1, 4), theta0=Fraction(3, 8),
                       support=SupportKind.EXTENDED, corrections=HEADLINE_CORRECTIONS)


def preset(name: str) -> tuple[SymmetricPolynomial, dict]:
    """Polynomial and default parameters for a named preset."""
    if name == "headline5":
        return SymmetricPolynomial.shifted_p1(5, [11, 85, 170]), dict(HEADLINE_PARAMS)
    if name == "remark3":
        d = dict(HEADLINE_PARAMS, k=3)
        return SymmetricPolynomial.shifted_p1(3, [256, 819, 833]), d
    if name.startswith("tableC_F"):
        try:
            which, k = name[len("tableC_F"):].split("_k")
            which, k = int(which), int(k)
            F = table_c_polynomial(k, which)
        except (ValueError, KeyError):
            raise UsageError(f"unknown preset {name!r}") from None
        return F, dict(k=k, theta=Fraction(1, 3), theta0=Fraction(1),
                       support=SupportKind.SIMPLEX, corrections=())
    raise UsageError(f"unknown preset {name!r}; see 'sieve-lab presets'")


def preset_names() -> list[str]:
    names = ["headline5", "remark3"]
    names += [f"tableC_F1_k{k}" for k in TABLE_C_F1] + [f"tableC_F2_k{k}" for k in TABLE_C_F2]
    return names


# ---------------------------------------------------------------------------
# manifests and output

@dataclass
class RunManifest:
    command: str
    arguments: dict
    seed: int
    tolerances: dict
    version: str = __version__
    params_hash: str = ""
    outputs: list = field(default_factory=list)

    def __post_init__(self):
        blob = json.dumps({"command": self.command, "arguments": self.arguments,
                           "seed": self.seed, "tolerances": self.tolerances},
                          sort_keys=True, default=str)
        self.params_hash = hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cfg(args) -> QuadConfig:
    return QuadConfig(abs_tol=args.abs_tol, rel_tol=args.rel_tol, seed=args.seed,
                      mc_samples=int(args.mc_samples))


def _manifest(args, command: str) -> RunManifest:
    skip = {"func", "out", "format"}
    arguments = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return RunManifest(command, arguments, args.seed,
                       {"abs_tol": args.abs_tol, "rel_tol": args.rel_tol,
                        "mc_samples": int(args.mc_samples)})


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _envelope(manifest: RunManifest, result, wall: float) -> str:
    obj = {"manifest": asdict(manifest), "result": result, "timing": {"wall_seconds": wall}}
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SIEVE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_cells(tasks: Sequence[Callable[[], dict]]) -> list[dict]:
    n = min(_workers(), len(tasks))
    if n <= 1:
        return [t() for t in tasks]
    with cf.ProcessPoolExecutor(n) as pool:
        futs = [pool.submit(t) for t in tasks]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# compute

def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def build_compute(args) -> tuple[SymmetricPolynomial, SieveParams]:
    if bool(args.preset) == bool(args.poly):
        raise UsageError("give exactly one of --preset or --poly")
    if args.preset:
        F, d = preset(args.preset)
    else:
        F = SymmetricPolynomial.loads(Path(args.poly).read_text())
        d = dict(k=F.k, theta=None, theta0=None, support=SupportKind.EXTENDED, corrections=())
    if args.k is not None:
        if args.k != F.k:
            raise UsageError(f"--k {args.k} does not match the polynomial (k = {F.k})")
    for name in ("theta", "theta0"):
        v = getattr(args, name)
        if v is not None:
            d[name] = _parse_fraction(v)
    if args.support:
        d["support"] = SupportKind(args.support)
    if args.corrections is not None:
        d["corrections"] = args.corrections
    mode = Mode(args.mode)
    if d.get("theta") is None:
        raise UsageError("--theta is required")
    if mode is Mode.STANDARD and d.get("theta0") is None:
        raise UsageError("--theta0 is required in standard mode")
    theta0 = None if mode is not Mode.STANDARD else d["theta0"]
    params = SieveParams(F.k, d["theta"], theta0, d["support"], d["corrections"], mode)
    return F, params


def cmd_compute(args) -> int:
    F, params = build_compute(args)
    t0 = time.perf_counter()
    rep = upsilon(F, params, _cfg(args))
    wall = time.perf_counter() - t0
    if args.format == "csv":
        _emit(args, rep.to_csv())
    else:
        _emit(args, _envelope(_manifest(args, "compute"), rep.to_json_obj(), wall))
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


# ---------------------------------------------------------------------------
# reproduce

def _cell(table, k, column, computed, published, tol, anchor, one_sided=False,
          converged=True, note="") -> dict:
    diff = computed - published
    ok = diff <= tol if one_sided else abs(diff) <= tol
    return {"table": table, "k": k, "column": column, "computed": computed,
            "published": published, "tol": tol, "diff": diff, "pass": bool(ok),
            "converged": bool(converged), "anchor": anchor, "note": note}


def _d_bound_cells(k: int, cfg: QuadConfig, golden: dict) -> list[dict]:
    F = table_c_polynomial(k, 1)
    row = golden["D"]["rows"][str(k)]
    tol = golden["D"]["tol_bound"]
    p = SieveParams(k, Fraction(1, 3), Fraction(1, 3), SupportKind.SIMPLEX, BOUND_CORRECTIONS)
    r1 = upsilon(F, p, cfg)
    r2 = upsilon(F, p.replace(corrections=p.corrections | {(4, 1)}), cfg)
    return [_cell("D", k, "bound", r1.upsilon, row[0], tol, f"Table D k={k} bound",
                  converged=r1.converged),
            _cell("D", k, "bound_with_J41", r2.upsilon, row[1], tol,
                  f"Table D k={k} bound incl. J41", converged=r2.converged)]


def _d_conjecture_cells(k: int, golden: dict, table: str = "D") -> list[dict]:
    row = golden["D"]["rows"][str(k)]
    tol = golden["D"]["tol_conjecture"]
    out = []
    for which, col in ((1, 2), (2, 3)):
        u = conjecture_upsilon(table_c_polynomial(k, which), Fraction(1, 3))
        out.append(_cell(table, k, f"conjecture_F{which}", u, row[col], tol,
                         f"Table D k={k} conjectured F{which} from Table C polynomial"))
    return out


def _d_cells(k: int, cfg: QuadConfig, golden: dict) -> list[dict]:
    return _d_bound_cells(k, cfg, golden) + _d_conjecture_cells(k, golden)


def _e_cells(k: int, cfg: QuadConfig, golden: dict) -> list[dict]:
    theta, pub = golden["E"]["rows"][str(k)]
    p = SieveParams(k, Fraction(theta), None, SupportKind.SIMPLEX, FLAT_CORRECTIONS, Mode.FLAT)
    r = upsilon(table_c_polynomial(k, 1), p, cfg)
    return [_cell("E", k, f"flat theta={theta}", r.upsilon, pub, golden["E"]["tol"],
                  f"Table E k={k}", converged=r.converged)]


def _f_cells(k: int, cfg: QuadConfig, golden: dict) -> list[dict]:
    row = golden["F"]["rows"][str(k)]
    res = reoptimize_table("F", k, cfg)
    return [_cell("F", k, f"optimized_{r.basis}", r.upsilon, pub, golden["F"]["tol"],
                  f"Table F k={k} {r.basis}") for r, pub in zip(res, row)]


def _f_full_family(cfg: QuadConfig, golden: dict) -> list[dict]:
    g = golden["F"]["full_family_k5"]
    _, _, u = optimize(basis_quartic_full(5), table_params("F", 5), cfg)
    return [_cell("F", 5, "optimized_full_quartic", u, g["value"], g["tol"],
                  "12-coefficient quartic family, k=5")]


def _g_cells(k: int, cfg: QuadConfig, golden: dict) -> list[dict]:
    pub = golden["G"]["rows"][str(k)]
    (r,) = reoptimize_table("G", k, cfg)
    note = "deviation above 1e-4" if abs(r.upsilon - pub) > 1e-4 else ""
    return [_cell("G", k, "optimized_quadratic", r.upsilon, pub, golden["G"]["tol"],
                  f"Table G k={k}", one_sided=True, note=note)]


def _final_cells(cfg: QuadConfig, golden: dict) -> list[dict]:
    h = golden["headline"]
    F, d = preset("headline5")
    rep = upsilon(F, SieveParams(**d), cfg)
    cells = []
    lo, hi = h["upsilon_lower"], h["upsilon_upper"]
    ok = lo < rep.upsilon < hi
    cells.append({"table": "final", "k": 5, "column": "upsilon", "computed": rep.upsilon,
                  "published": hi, "tol": 0.0, "diff": rep.upsilon - hi, "pass": bool(ok),
                  "converged": rep.converged, "anchor": f"Upsilon < {hi}",
                  "note": f"required in ({lo}, {hi})"})
    vals = {"J": rep.J, "J0": rep.J0, "J01": rep.J01, "J02": rep.J02}
    for (r, s), e in rep.Jrs.items():
        vals[f"J{r}{s}"] = e
    for name, spec in h["constituents"].items():
        e = vals[name]
        cells.append(_cell("final", 5, name, e.value, spec["value"], spec["tol"], spec["anchor"],
                           converged=e.converged))
    return cells


def reproduce_rows(table: str, cfg: QuadConfig, ks: Sequence[int] | None = None) -> list[dict]:
    golden = load_golden()
    ks = list(ks or range(3, 11))
    t = table.upper() if table.lower() != "final" else "final"
    tasks: list[Callable[[], list[dict]]] = []
    if t == "C":
        tasks = [partial(_d_conjecture_cells, k, golden, "C") for k in ks]
    elif t == "D":
        tasks = [partial(_d_cells, k, cfg, golden) for k in ks]
    elif t == "E":
        tasks = [partial(_e_cells, k, cfg, golden) for k in ks]
    elif t == "F":
        tasks = [partial(_f_cells, k, cfg, golden) for k in ks]
        if 5 in ks:
            tasks.append(partial(_f_full_family, cfg, golden))
    elif t == "G":
        tasks = [partial(_g_cells, k, cfg, golden) for k in ks]
    elif t == "final":
        tasks = [partial(_final_cells, cfg, golden)]
    else:
        raise UsageError(f"unknown table {table!r}; choose C, D, E, F, G or final")
    rows: list[dict] = []
    for chunk in _run_cells(tasks):
        rows.extend(chunk)
    return rows


CSV_COLUMNS = ("table", "k", "column", "computed", "published", "tol", "diff", "pass",
               "converged", "anchor", "note")


def rows_to_csv(rows: Sequence[dict]) -> str:
    import csv
    import io
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in CSV_COLUMNS})
    return buf.getvalue()


def cmd_reproduce(args) -> int:
    t0 = time.perf_counter()
    rows = reproduce_rows(args.table, _cfg(args), args.k)
    wall = time.perf_counter() - t0
    if args.format == "json":
        _emit(args, _envelope(_manifest(args, "reproduce"), rows, wall))
    else:
        _emit(args, rows_to_csv(rows))
    npass = sum(r["pass"] for r in rows)
    print(f"# {npass}/{len(rows)} cells pass", file=sys.stderr)
    if not all(r["converged"] for r in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK if npass == len(rows) else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# optimize

def cmd_optimize(args) -> int:
    cfg = _cfg(args)
    t0 = time.perf_counter()
    if args.basis:
        obj = json.loads(Path(args.basis).read_text())
        basis = BasisSpec.from_json_obj(obj)
        if basis.k != args.k:
            raise UsageError("basis k does not match --k")
        params = table_params(args.table, args.k)
        F, c, u = optimize(basis, params, cfg)
        results = [{"table": args.table.upper(), "k": args.k, "basis": "custom",
                    "coefficients": [float(x) for x in c], "polynomial": F.to_json_obj(),
                    "upsilon": u, "params": params.to_json_obj()}]
        polys = [F]
    else:
        golden = load_golden()
        res = reoptimize_table(args.table, args.k, cfg)
        results, polys = [], []
        for r in res:
            o = r.to_json_obj()
            o["published"] = _published(golden, r.table, r.k, r.basis)
            results.append(o)
            polys.append(r.polynomial)
    wall = time.perf_counter() - t0
    poly_out = args.poly_out
    if poly_out is None and args.out:
        poly_out = str(Path(args.out).with_suffix("")) + ".poly.json"
    if poly_out:
        Path(poly_out).write_text(polys[-1].dumps() + "\n", encoding="utf-8")
    _emit(args, _envelope(_manifest(args, "optimize"), results, wall))
    return EXIT_OK


def _published(golden: dict, table: str, k: int, basis: str):
    if table == "G":
        return golden["G"]["rows"][str(k)]
    if table == "F":
        return golden["F"]["rows"][str(k)][0 if basis == "F1" else 1]
    if table in ("C", "D"):
        return golden["D"]["rows"][str(k)][2 if basis == "F1" else 3]
    if table == "E":
        return golden["E"]["rows"][str(k)][1]
    return None


# ---------------------------------------------------------------------------
# verify

def partition_check(parent, pieces, seed: int, n: int, tie_tol: float = 1e-9) -> dict:
    """Sample the parent and count points lying in zero or several pieces."""
    pts, rate = sample(parent, seed, n)
    member = np.stack([p.contains(pts) for p in pieces], axis=1)
    counts = member.sum(axis=1)
    bad = np.flatnonzero(counts != 1)
    ambiguous = violations = 0
    example = None
    for i in bad:
        near = min(float(np.min(np.abs(p.slack(pts[i:i + 1])))) for p in pieces)
        if near <= tie_tol:
            ambiguous += 1
        else:
            violations += 1
            if example is None:
                example = {"point": pts[i].tolist(), "pieces": int(counts[i])}
    return {"samples": int(len(pts)), "acceptance_rate": rate, "ambiguous": ambiguous,
            "violations": violations, "counterexample": example,
            "ok": violations == 0 and ambiguous <= 10 * max(1, len(pts) // 10**6)}


def verify_decomposition(label: str, cfg: QuadConfig, partition_samples: int | None = None
                         ) -> dict:
    golden = load_golden()
    lab = label.upper().replace("'", "P")
    if lab not in PIECE_SPECS:
        raise UsageError(f"unknown decomposition {label!r}; choose one of {DECOMPOSITIONS}")
    F, d = preset("headline5")
    params = SieveParams(**d)
    r, s, _ = PIECE_SPECS[lab]
    parent, pieces = decomposition(lab, params.k, params.theta, params.theta0, params.support)
    part = partition_check(parent, pieces, cfg.seed, partition_samples or int(cfg.mc_samples))
    values = piece_integrals(F, params, lab, cfg)
    g = {key.upper(): v for key, v in golden["pieces"].items()}[lab]
    factor = math.factorial(params.k - 3) if g["raw"] else 1
    rows = []
    for v, pub in zip(values, g["values"]):
        row = v.to_json_obj()
        row["published"] = pub / factor
        row["diff"] = v.quadrature.value - pub / factor
        rows.append(row)
    qsum = sum(v.quadrature.value for v in values)
    msum = sum(v.monte_carlo.value for v in values)
    merr = math.sqrt(sum(v.monte_carlo.error ** 2 for v in values))
    fn = compute_Jrs_flat if params.flat else compute_Jrs
    whole = fn(F, params, r, s, cfg)
    # the parent integral by sampling, independent of the piece split
    diag = _diag_data(_require_diag(F))
    n = r - 1
    M, signs = subset_matrix(n)
    pf = _pointwise_shift_sq(diag, params.k, params.extended, M, signs)
    perm = list(range(n - 1, -1, -1))
    th, th0 = float(params.theta), float(params.theta0)

    def parent_integrand(P):
        Ya = P[:, :n][:, perm]
        return correction_weight(Ya, r, s, th, th0) * pf(Ya, P[:, n], P[:, n + 1])

    # a separate stream so the parent estimate does not reuse the piece samples
    pmc = integrate_mc(parent, parent_integrand, cfg.with_(seed=cfg.seed + 1_000_003))
    sums = {
        "quadrature_piece_sum": qsum, "quadrature_parent": whole.value,
        "mc_piece_sum": msum, "mc_piece_sum_error": merr,
        "mc_parent": pmc.value, "mc_parent_error": pmc.error,
        "published_total": g["total"],
        "quadrature_consistent": bool(
            abs(qsum - whole.value) <= 1e-6 * max(1.0, abs(whole.value))),
        "mc_consistent": bool(abs(msum - pmc.value) <= max(3 * math.hypot(merr, pmc.error),
                                                           0.01 * abs(pmc.value))),
    }
    ok = (part["ok"] and all(rw["agree"] for rw in rows) and sums["quadrature_consistent"]
          and sums["mc_consistent"])
    return {"decomposition": lab, "pieces_count": len(pieces), "partition": part,
            "pieces": rows, "sums": sums, "ok": bool(ok)}


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    rep = verify_decomposition(args.decomposition, _cfg(args), args.partition_samples)
    wall = time.perf_counter() - t0
    _emit(args, _envelope(_manifest(args, "verify"), rep, wall))
    return EXIT_OK if rep["ok"] else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# admissible, regions, presets

def cmd_admissible(args) -> int:
    if bool(args.shifts) == bool(args.forms):
        raise UsageError("give either shifts like \"0,2,6\" or --forms \"1:0,1:2,1:6\"")
    tup = LinearFormTuple.parse(args.forms or args.shifts)
    rep = admissibility_report(tup)
    _emit(args, json.dumps(rep, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_regions(args) -> int:
    label = args.label
    k = args.k
    th, th0 = _parse_fraction(args.theta), _parse_fraction(args.theta0)
    if label.upper().replace("'", "P") in PIECE_SPECS:
        parent, pieces = decomposition(label, k, th, th0, args.support, args.flat)
        obj = {"parent": parent.to_json_obj(), "pieces": [p.to_json_obj() for p in pieces]}
    elif label.lower() in ("simplex", "extended", "r_k", "r'_k"):
        obj = make_support(k, label).to_json_obj()
    elif label.upper().startswith("A"):
        try:
            r, s = (int(x) for x in label[1:].strip("[]()").split(","))
        except ValueError:
            raise UsageError("correction domains are written A2,1 or A[3,2]") from None
        obj = make_correction_domain(r, s, theta=th, theta0=th0, flat=args.flat).to_json_obj()
    else:
        raise UsageError(f"unknown region {label!r}")
    _emit(args, json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.write:
        out = Path(args.write)
        out.mkdir(parents=True, exist_ok=True)
        for name in preset_names():
            F, _ = preset(name)
            (out / f"{name}.json").write_text(F.dumps() + "\n", encoding="utf-8")
    for name in preset_names():
        F, d = preset(name)
        print(f"{name}\tk={F.k}\t{F}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--abs-tol", type=float, default=1e-8)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--mc-samples", type=float, default=1e6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sieve-lab",
                                 description="Sieve functional evaluation and optimization.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate Upsilon and its ingredients")
    c.add_argument("--preset")
    c.add_argument("--poly", help="polynomial JSON file")
    c.add_argument("--k", type=int)
    c.add_argument("--theta")
    c.add_argument("--theta0")
    c.add_argument("--support", choices=["simplex", "extended"])
    c.add_argument("--corrections", help='e.g. "1,1 2,1 3,1" or "none"')
    c.add_argument("--mode", choices=[m.value for m in Mode], default="standard")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    _common(c)
    c.set_defaults(func=cmd_compute)

    r = sub.add_parser("reproduce", help="recompute a published table")
    r.add_argument("table", choices=["C", "D", "E", "F", "G", "final", "c", "d", "e", "f", "g"])
    r.add_argument("--k", type=int, nargs="*", help="restrict to these k")
    r.add_argument("--format", choices=["json", "csv"], default="csv")
    _common(r)
    r.set_defaults(func=cmd_reproduce)

    o = sub.add_parser("optimize", help="minimize Upsilon over a basis")
    o.add_argument("--k", type=int, required=True)
    o.add_argument("--table", choices=["C", "D", "E", "F", "G"], required=True)
    o.add_argument("--basis", help="custom basis JSON")
    o.add_argument("--poly-out", help="where to write the optimal polynomial")
    _common(o)
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="check a case-split decomposition")
    v.add_argument("decomposition", help="R2, R3, R4 or R3p")
    v.add_argument("--partition-samples", type=int)
    _common(v)
    v.set_defaults(func=cmd_verify)

    a = sub.add_parser("admissible", help="admissibility of a tuple of linear forms")
    a.add_argument("shifts", nargs="?", help='shifts such as "0,2,6"')
    a.add_argument("--forms", help='A:B pairs such as "1:0,1:2,1:6"')
    a.add_argument("--out")
    a.set_defaults(func=cmd_admissible)

    g = sub.add_parser("regions", help="inspect regions")
    gs = g.add_subparsers(dest="action", required=True)
    show = gs.add_parser("show")
    show.add_argument("label", help="R2, R3, R4, R3p, simplex, extended or A<r>,<s>")
    show.add_argument("--k", type=int, default=5)
    show.add_argument("--theta", default="1/4")
    show.add_argument("--theta0", default="3/8")
    show.add_argument("--support", default="extended")
    show.add_argument("--flat", action="store_true")
    show.add_argument("--out")
    show.set_defaults(func=cmd_regions)

    pr = sub.add_parser("presets", help="list presets or write them as polynomial files")
    pr.add_argument("--write", metavar="DIR")
    pr.set_defaults(func=cmd_presets)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, PathNotAvailable, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # hard computation error
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
