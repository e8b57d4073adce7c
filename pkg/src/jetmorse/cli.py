"""Command-line front end: ``jetmorse fg | morse | mk | check-surface | selftest``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from fractions import Fraction

from . import cone, morse
from .cache import CacheEntry, CacheError, FGCache, first_difference
from .chern import intersection_polynomials
from .exact import format_rational, parse_rational
from .recursion import CONVENTIONS, CORRECTED

log = logging.getLogger("jetmorse")


class CliError(Exception):
    pass


def _q(x: Fraction) -> str:
    return format_rational(x)


def _weight(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(t) for t in text.split(",") if t.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad weight {text!r}: {exc}") from None


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}: {exc}") from None


def _emit(rows: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        obj = rows[0] if len(rows) == 1 else rows
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    flat = [{k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()} for r in rows]
    keys = list(flat[0])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        out.write(buf.getvalue())
        return
    widths = {k: max(len(k), *(len(str(r[k])) for r in flat)) for k in keys}
    out.write("  ".join(k.ljust(widths[k]) for k in keys) + "\n")
    for r in flat:
        out.write("  ".join(str(r[k]).ljust(widths[k]) for k in keys) + "\n")


# -- fg -------------------------------------------------------------------------


def compute_fg(k: int, engine: str, convention: str, cache: FGCache | None):
    if cache is not None:
        hit = cache.load(k, convention, engine)
        if hit is not None:
            log.debug("cache hit k=%d %s %s", k, convention, engine)
            return hit.form
    if engine == "chern":
        form = intersection_polynomials(k)
    else:
        form = morse.fg_via_integrals(k, None, convention)
    if cache is not None:
        cache.store(CacheEntry(k, convention, engine, form.F, form.G))
    return form


def cmd_fg(args, out) -> int:
    if args.k < 1:
        raise CliError("--k must be >= 1")
    cache = None if args.no_cache else FGCache(args.cache_dir)
    engines = ("chern", "integral") if args.engine == "both" else (args.engine,)
    forms = {e: compute_fg(args.k, e, args.convention, cache) for e in engines}
    status = 0
    if args.engine == "both":
        for label in ("F", "G"):
            diff = first_difference(getattr(forms["chern"], label), getattr(forms["integral"], label))
            if diff:
                sys.stderr.write(f"engine mismatch in {label}_{args.k}: first differing term {diff}\n")
                status = 1
    rows = []
    for e, form in forms.items():
        row = {"k": args.k, "engine": e, "convention": args.convention}
        if args.format == "json":
            row["F"] = form.F.to_json_obj()
            row["G"] = form.G.to_json_obj()
        else:
            row["F"] = str(form.F)
            row["G"] = str(form.G)
        if args.at is not None:
            if len(args.at) != args.k:
                raise CliError(f"--at needs {args.k} weights")
            f, g = form.at(args.at)
            row["F_at"] = _q(f)
            row["G_at"] = _q(g)
            row["ratio_at"] = None if g == 0 else _q(f / g)
        rows.append(row)
    _emit(rows, args.format, out)
    return status


# -- morse ----------------------------------------------------------------------


def cmd_morse(args, out) -> int:
    if args.model != "ball":
        raise CliError(f"unknown model {args.model!r}; only 'ball' is supported")
    if len(args.weight) != args.k:
        raise CliError(f"--weight needs {args.k} entries, got {len(args.weight)}")
    tol = args.tol if args.tol is not None else Fraction(1, 1000)
    res = morse.restricted_morse_integral(
        args.k, args.weight, morse.SurfaceModel.ball(), qmax=args.qmax, tol=tol, convention=args.convention
    )
    row = {
        "k": args.k,
        "weight": [_q(v) for v in args.weight],
        "model": args.model,
        "qmax": args.qmax,
    }
    if res.exact:
        row["value"] = _q(res.value)
        row["region_volume"] = _q(res.region_volume)
    else:
        q = res.quadrature
        row["value"] = {
            "estimate": q.estimate,
            "error_bound": q.error_bound,
            "lower": _q(q.lower),
            "upper": _q(q.upper),
        }
        row["region_volume"] = res.region_volume
    if args.format != "json" and not res.exact:
        row["value"] = f"{q.estimate:.6f} +/- {q.error_bound:.2e}"
    _emit([row], args.format, out)
    return 0


# -- mk -------------------------------------------------------------------------


def _config(args) -> cone.OptimizerConfig:
    return cone.OptimizerConfig(restarts=args.restarts, seed=args.seed, max_iters=args.max_iters)


def _mk_row(rec: cone.MkRecord) -> dict:
    return {
        "k": rec.k,
        "ratio": _q(rec.best_ratio),
        "ratio_float": float(rec.best_ratio),
        "argmax": [_q(v) for v in rec.argmax],
        "certified_lower_bound": _q(rec.certified_lower_bound),
        "seeds_used": [[_q(v) for v in s] for s in rec.seeds_used],
    }


def cmd_mk(args, out) -> int:
    if args.k < 1:
        raise CliError("--k must be >= 1")
    table = cone.mk_table(args.k, _config(args))
    rows = table if args.all else table[-1:]
    rendered = [_mk_row(r) for r in rows]
    if args.format != "json":
        for r in rendered:
            r.pop("seeds_used")
    _emit(rendered, args.format, out)
    return 0


# -- check-surface -----------------------------------------------------------------


def cmd_check_surface(args, out) -> int:
    if args.hypersurface_degree is not None:
        surf = cone.SurfaceInvariants.hypersurface(args.hypersurface_degree)
    else:
        if args.c1sq is None or args.c2 is None:
            raise CliError("give --c1sq and --c2, or --hypersurface-degree")
        surf = cone.SurfaceInvariants.of(args.c1sq, args.c2)
    if surf.c1sq <= 0:
        raise CliError("c1sq must be positive")
    rep = cone.jet_order_for_surface(surf, args.kmax, _config(args))
    row = {
        "c1sq": _q(surf.c1sq),
        "c2": _q(surf.c2),
        "ratio": _q(surf.ratio),
        "order": rep.order,
        "witness_weight": [_q(v) for v in rep.witness.argmax] if rep.witness else None,
        "bound": _q(rep.witness.certified_lower_bound) if rep.witness else None,
    }
    if args.format == "table" and rep.order is None:
        row["order"] = f"none (ratio {row['ratio'].removesuffix('/1')})"
    _emit([row], args.format, out)
    return 0


# -- selftest ------------------------------------------------------------------------


def selftest_checks():
    """(name, callable returning bool) pairs for the quick self-test."""
    F = Fraction

    def anchors():
        f1, f2 = intersection_polynomials(1), intersection_polynomials(2)
        return (
            f1.at((1,)) == (1, 1)
            and f2.at((0, 1)) == (-1, -5)
            and morse.fg_via_integrals(2, (0, 1)) == (-1, -5)
            and f2.at((2, 1)) == (39, 27)
        )

    def seeds():
        return (
            intersection_polynomials(2).ratio((2, 1)) == F(13, 9)
            and intersection_polynomials(3).ratio((6, 2, 1)) == F(1195, 742)
            and intersection_polynomials(4).ratio((18, 6, 2, 1)) == F(442243, 271697)
        )

    def morse_low():
        r1 = morse.restricted_morse_integral(1, (1,))
        r2 = morse.restricted_morse_integral(2, (0, 1))
        return r1.value == F(2, 3) and r2.value == F(8, 27)

    def cross_engine():
        return all(morse.fg_via_integrals(k) == intersection_polynomials(k) for k in (1, 2, 3))

    def cone_points():
        return (
            cone.cone_contains((2, 1)) == cone.BOUNDARY
            and cone.cone_contains((1, 1)) == cone.OUTSIDE
            and cone.theta_positivity_certificate(2, (3, 1)).positive
        )

    return [
        ("anchor intersections", anchors),
        ("canonical seed ratios", seeds),
        ("ball-quotient Morse integrals k=1,2", morse_low),
        ("cross-engine F_k, G_k for k<=3", cross_engine),
        ("cone membership and theta positivity", cone_points),
    ]


def cmd_selftest(args, out) -> int:
    ok = True
    for name, check in selftest_checks():
        t = time.perf_counter()
        try:
            passed = bool(check())
        except Exception as exc:  # a crash is a failure, reported not raised
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        out.write(f"{'PASS' if passed else 'FAIL'}  {name}  [{time.perf_counter() - t:.2f}s]\n")
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jetmorse", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    fmt = argparse.ArgumentParser(add_help=False)
    g = fmt.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json")
    g.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.set_defaults(format="table")

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--restarts", type=int, default=cone.OptimizerConfig.restarts)
    opt.add_argument("--seed", type=int, default=cone.OptimizerConfig.seed)
    opt.add_argument("--max-iters", type=int, default=cone.OptimizerConfig.max_iters)

    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fg", parents=[fmt], help="F_k and G_k polynomials")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--engine", choices=("chern", "integral", "both"), default="chern")
    s.add_argument("--convention", choices=CONVENTIONS, default=CORRECTED)
    s.add_argument("--at", type=_weight, default=None, help="evaluate at a1,...,ak")
    s.add_argument("--cache-dir", default=None)
    s.add_argument("--no-cache", action="store_true")
    s.set_defaults(func=cmd_fg)

    s = sub.add_parser("morse", parents=[fmt], help="restricted Morse integral")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--weight", type=_weight, required=True)
    s.add_argument("--model", default="ball")
    s.add_argument("--qmax", type=int, default=1)
    s.add_argument("--tol", type=_rational, default=None)
    s.add_argument("--convention", choices=CONVENTIONS, default=CORRECTED)
    s.set_defaults(func=cmd_morse)

    s = sub.add_parser("mk", parents=[fmt, opt], help="lower bound for m_k")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--all", action="store_true", help="print every k up to K")
    s.set_defaults(func=cmd_mk)

    s = sub.add_parser("check-surface", parents=[fmt, opt], help="lowest certified jet order")
    s.add_argument("--c1sq", type=_rational)
    s.add_argument("--c2", type=_rational)
    s.add_argument("--hypersurface-degree", type=int)
    s.add_argument("--kmax", type=int, default=4)
    s.set_defaults(func=cmd_check_surface)

    s = sub.add_parser("selftest", help="quick exact checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, out)
    except (CliError, CacheError, ValueError) as exc:
        sys.stderr.write(f"jetmorse {args.command}: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
