"""Command-line entry point: ``python -m siegel_poincare <group> <command> ...``.

Exit codes: 0 success, 1 numerical failure (or a failed check under
verify-all), 2 advisory precondition violated, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import exact_terms as et
from . import gk_support as gk
from .config import CONFIG_ENV, RunConfig, load_config
from .elliptic_poincare import ConvergenceError, eval_elliptic_poincare, spectral_pairing_check
from .poincare2 import (P2Params, eval_p2, kst_y0_search, lowering_depth_probe, nonvanishing_scan)
from .siegel_kernel import (QuadratureError, SiegelPoint, SymMat2, apply_omega, h_batch, psi)
from .sp2_cosets import enumerate_delta_cosets

EXIT_OK, EXIT_NUMERIC, EXIT_ADVISORY, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ------------------------------------------------------------------ parsing

def _floats(text: str, n: Optional[int] = None) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _sym(text: str) -> SymMat2:
    """'m11,m12,m22'."""
    return SymMat2(*_floats(text, 3))


def _point(text: str) -> SiegelPoint:
    """'x11,x12,x22,y11,y12,y22'."""
    return SiegelPoint.from_coords(_floats(text, 6))


def _tau(text: str) -> complex:
    x, y = _floats(text, 2)
    return complex(x, y)


def _ktypes(text: str) -> list[tuple[int, int]]:
    """'a,b;a,b;...'."""
    out = []
    for chunk in text.split(";"):
        a, b = _ints(chunk)
        out.append((a, b))
    return out


def _walls(text: Optional[str]) -> list[tuple[str, int]]:
    """'right:3,up:1'."""
    if not text:
        return []
    out = []
    for item in text.split(","):
        d, x = item.split(":")
        out.append((d.strip(), int(x)))
    return out


# ------------------------------------------------------------------- output

def _emit(obj, fmt: str, table: Optional[list[dict]] = None, text: Optional[str] = None):
    if fmt == "text" and text is not None:
        print(text)
    elif fmt == "csv" and table:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(table[0]))
        w.writeheader()
        w.writerows(table)
        print(buf.getvalue(), end="")
    else:
        print(json.dumps(obj, indent=2, sort_keys=True, default=_json_default))


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _plot(path: Optional[str], series: dict):
    if path:
        Path(path).write_text(json.dumps(series, indent=2, default=_json_default))


# ----------------------------------------------------------------- commands

def _make_elliptic(kind: str, k: int, n: int, d: int) -> et.WeightedFunction:
    if kind == "phi":
        return et.make_phi(k, d, n)
    if kind == "psi":
        return et.make_psi(k, n)
    if kind == "phi_tilde":
        return et.make_phi_tilde(k, n)
    return et.make_psi_tilde(k, n)


def cmd_elliptic(a, cfg: RunConfig) -> int:
    if a.cmd == "eval":
        f = _make_elliptic(a.kind, a.k, a.n, a.d)
        if a.times:
            kind, l, m = a.times.split(":")
            f = et.multiply(f, _make_elliptic(kind, int(l), int(m), 0))
        r = eval_elliptic_poincare(f, a.tau, a.height or cfg.elliptic_height)
        _emit(r.to_dict(), a.format)
        return EXIT_OK
    r = spectral_pairing_check(a.k, a.l, a.s, a.n, a.m, cfg.precision)
    _emit({**r.to_dict(), "params": {"k": a.k, "l": a.l, "s": a.s, "n": a.n, "m": a.m}}, a.format)
    return EXIT_OK


def cmd_sl2(a, cfg: RunConfig) -> int:
    s = gk.canonical_sl2_support(a.kind, a.k, a.d, a.radius)
    if a.tensor:
        kind, k, d = a.tensor.split(":")
        s = gk.tensor_sl2(s, gk.canonical_sl2_support(kind, int(k), int(d), a.radius))
    out = {**s.to_dict(), "has_lowest_weight": gk.has_lowest_weight(s), "min_weight": s.min_weight()}
    _emit(out, a.format, text=gk.render_sl2(s))
    return EXIT_OK


def cmd_ktype(a, cfg: RunConfig) -> int:
    s1 = gk.KTypeSupport.of(_ktypes(a.left), _walls(a.left_walls))
    s2 = gk.KTypeSupport.of(_ktypes(a.right), _walls(a.right_walls))
    s = gk.tensor_ktype_support(s1, s2)
    out = {**s.to_dict(), "contains_scalar": gk.contains_scalar_ktype(s)}
    table = [{"a": t.a, "b": t.b, "multiplicity": n} for t, n in s.counts]
    text = "\n".join(f"({t.a},{t.b}) x{n}" for t, n in s.counts)
    _emit(out, a.format, table, text)
    return EXIT_OK


def cmd_siegel(a, cfg: RunConfig) -> int:
    q = cfg.quadrature
    if a.cmd == "h-integral":
        r = h_batch(a.alpha, a.beta, a.T, [a.Y], q)
        out = {"value": float(r.value[0, 0]), "est_error": float(r.error[0, 0]),
               "params": {"alpha": a.alpha, "beta": a.beta, "T": a.T.to_list(), "Y": a.Y.to_list()}}
    elif a.cmd == "psi":
        v = psi(a.k, a.T, a.Z, q)
        out = {"value": [v.real, v.imag], "params": {"k": a.k, "T": a.T.to_list(), "Z": a.Z.coords().tolist()}}
    else:
        k = a.k

        def G(Z):
            return Z.Y.det ** (k - 0.5) * psi(k, a.T, Z, q)

        om = apply_omega(0.5, 0.5 - k, G, a.Z)
        g = G(a.Z)
        out = {"omega": om, "rel_norm": float(np.linalg.norm(om) / abs(g)), "value": [g.real, g.imag],
               "params": {"k": k, "T": a.T.to_list(), "Z": a.Z.coords().tolist()}}
    _emit(out, a.format)
    return EXIT_OK


def cmd_sp2(a, cfg: RunConfig) -> int:
    reps = enumerate_delta_cosets(a.height or cfg.sp2_height)
    out = {"height": a.height or cfg.sp2_height, "count": len(reps),
           "c_zero": sum(r.c_is_zero for r in reps)}
    if not a.count_only:
        out["representatives"] = [r.to_list() for r in reps]
    _emit(out, a.format)
    return EXIT_OK


def _p2_params(a, cfg: RunConfig, l: Optional[int] = None) -> P2Params:
    return P2Params(a.k, a.l if l is None else l, a.T, a.T_prime, a.height or cfg.sp2_height, cfg.quadrature)


def cmd_p2(a, cfg: RunConfig) -> int:
    if a.cmd == "kst-search":
        r = kst_y0_search(a.height or 3, a.grid)
        _emit(r.to_dict(), a.format)
        return EXIT_OK if r.y0 is not None else EXIT_NUMERIC
    if a.cmd == "eval":
        p = _p2_params(a, cfg)
        Z = a.Z if a.Z is not None else SiegelPoint.scalar(a.y0)
        r = eval_p2(p, Z)
        _emit(r.to_dict(), a.format)
        return EXIT_ADVISORY if r.advisory else EXIT_OK
    if a.cmd == "nonvanishing":
        H = a.height or cfg.sp2_height
        y0 = a.y0 if a.y0 is not None else kst_y0_search(H, a.grid).y0
        if y0 is None:
            print("no KST y0 on the grid", file=sys.stderr)
            return EXIT_NUMERIC
        r = nonvanishing_scan(a.k, a.T, a.T_prime, y0, a.l_list, H, cfg.quadrature)
        rows = [x.to_dict() for x in r.rows]
        _emit(r.to_dict(), a.format, rows)
        _plot(a.emit_plot_data, {"l": [x.l for x in r.rows],
                                 "total": [x.total.real for x in r.rows],
                                 "c_zero": [x.c_zero.real for x in r.rows],
                                 "abs_c_nonzero": [abs(x.c_nonzero) for x in r.rows]})
        return EXIT_ADVISORY if any(x.advisory for x in r.rows) else EXIT_OK
    p = _p2_params(a, cfg)
    Zs = a.Z_grid or [SiegelPoint.scalar(1.1)]
    r = lowering_depth_probe(p, Zs, a.d_max, a.target)
    rows = [{"d": d + 1, "ratio": r.ratios[d], "noise_floor": r.noise_floor[d], "tail": r.tail[d],
             "differencing_error": r.differencing_error[d]} for d in range(len(r.ratios))]
    _emit(r.to_dict(), a.format, rows)
    _plot(a.emit_plot_data, {"d": [x["d"] for x in rows], "ratio": list(r.ratios),
                             "noise_floor": list(r.noise_floor)})
    return EXIT_OK


def _run_check(n: int):
    from .verification import CHECKS
    return CHECKS[n]()


def cmd_verify(a, cfg: RunConfig) -> int:
    from .verification import CHECKS, QUICK
    numbers = list(QUICK) if a.quick else sorted(CHECKS)
    if a.only:
        numbers = [n for n in a.only if n in CHECKS]
    workers = a.workers or cfg.workers
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_run_check, numbers))
    else:
        results = [_run_check(n) for n in numbers]
    if a.format == "json":
        _emit({"results": [r.to_dict() for r in results],
               "passed": sum(r.passed for r in results), "total": len(results)}, a.format)
    else:
        for r in results:
            print(r.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"JSON run config (default: ${CONFIG_ENV})")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--emit-plot-data", metavar="PATH", help="write (x, y) series as JSON")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)

    p = _Parser(prog="siegel_poincare", description="Poincare series from products of Fourier terms")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = groups.add_parser("elliptic").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    e = g.add_parser("eval", parents=[common])
    e.add_argument("--kind", choices=("phi", "psi", "phi_tilde", "psi_tilde"), required=True)
    e.add_argument("-k", type=int, required=True)
    e.add_argument("-n", type=int, required=True)
    e.add_argument("-d", type=int, default=0)
    e.add_argument("--times", help="multiply by another term, 'kind:weight:n'")
    e.add_argument("--tau", type=_tau, required=True, help="x,y")
    e.add_argument("--height", type=int)
    s = g.add_parser("spectral-check", parents=[common])
    for name, typ in (("-k", int), ("-l", int), ("-s", float), ("-n", int), ("-m", int)):
        s.add_argument(name, type=typ, required=True)

    g = groups.add_parser("sl2").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = g.add_parser("diagram", parents=[common])
    s.add_argument("--kind", choices=("phi_kd", "psi", "phi_tilde", "psi_tilde"), required=True)
    s.add_argument("-k", type=int, required=True)
    s.add_argument("-d", type=int, default=0)
    s.add_argument("--radius", type=int, default=8)
    s.add_argument("--tensor", help="tensor with 'kind:k:d'")

    g = groups.add_parser("ktype").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = g.add_parser("tensor", parents=[common])
    s.add_argument("--left", required=True, help="'a,b;a,b'")
    s.add_argument("--right", required=True)
    s.add_argument("--left-walls", help="'right:3,up:1'")
    s.add_argument("--right-walls")

    g = groups.add_parser("siegel").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = g.add_parser("h-integral", parents=[common])
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--T", type=_sym, default=SymMat2.identity())
    s.add_argument("--Y", type=_sym, default=SymMat2.identity())
    for name in ("psi", "omega-check"):
        s = g.add_parser(name, parents=[common])
        s.add_argument("-k", type=int, default=4)
        s.add_argument("--T", type=_sym, default=SymMat2.identity())
        s.add_argument("--Z", type=_point, default=SiegelPoint.scalar(1.0), help="x11,x12,x22,y11,y12,y22")

    g = groups.add_parser("sp2").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = g.add_parser("cosets", parents=[common])
    s.add_argument("--height", type=int)
    s.add_argument("--count-only", action="store_true")

    g = groups.add_parser("p2").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    s = g.add_parser("kst-search", parents=[common])
    s.add_argument("--height", type=int)
    s.add_argument("--grid", type=_floats, default=[1.1, 1.5, 2.0, 3.0])
    for name in ("eval", "nonvanishing", "depth-probe"):
        s = g.add_parser(name, parents=[common])
        s.add_argument("-k", type=int, default=4)
        s.add_argument("--T", type=_sym, default=SymMat2.identity())
        s.add_argument("--T-prime", type=_sym, default=SymMat2.identity())
        s.add_argument("--height", type=int)
        if name == "eval":
            s.add_argument("-l", type=int, default=16)
            s.add_argument("--y0", type=float, default=1.1)
            s.add_argument("--Z", type=_point, default=None)
        elif name == "nonvanishing":
            s.add_argument("--y0", type=float, default=None, help="default: KST search on --grid")
            s.add_argument("--grid", type=_floats, default=[1.1, 1.5, 2.0, 3.0])
            s.add_argument("--l-list", type=_ints, default=list(range(8, 25, 2)))
        else:
            s.add_argument("-l", type=int, default=16)
            s.add_argument("--d-max", type=int, default=4)
            s.add_argument("--target", choices=("series", "product", "holomorphic"), default="series")
            s.add_argument("--Z", dest="Z_grid", type=_point, action="append")

    s = groups.add_parser("verify-all", parents=[common])
    s.add_argument("--quick", action="store_true", help="exact and combinatorial checks only")
    s.add_argument("--only", type=_ints, help="comma-separated criterion numbers")
    return p


HANDLERS = {"elliptic": cmd_elliptic, "sl2": cmd_sl2, "ktype": cmd_ktype, "siegel": cmd_siegel,
            "sp2": cmd_sp2, "p2": cmd_p2, "verify-all": cmd_verify}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = load_config(a.config)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = cfg.override(seed=a.seed, workers=a.workers, output=a.format)
    a.format = cfg.output
    try:
        return HANDLERS[a.group](a, cfg)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        if isinstance(exc, ConvergenceError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, FloatingPointError, ArithmeticError, et.NonClosureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(dispatch())
