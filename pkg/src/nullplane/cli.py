"""Command-line entry point: ``nullplane verify``, ``nullplane expand``, ``nullplane contract``.

Exit status: 0 when every check passes, 1 when some check fails, 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, _kernels
from .algebras import BUILTINS, DEFAULT_ORDER, load
from .exprtext import ParseError, evaluate, series_to_text
from .ncpoly import MAX_ORDER, NCPolyError
from .suites import SUITES, SuiteNotApplicable, applicable, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_VERIFY_ORDER = 3


class ConfigError(Exception):
    pass


def _order(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be an integer, got {text!r}") from None
    if not 1 <= n <= MAX_ORDER:
        raise argparse.ArgumentTypeError(f"order must lie in 1..{MAX_ORDER}, got {n}")
    return n


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nullplane", description="Verify null-plane quantum Poincare algebras.")
    p.add_argument("--version", action="version", version=f"nullplane {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--algebra", default="poincare-1+1-quantum",
                   help=f"built-in name ({', '.join(BUILTINS)}) or presentation file")
    v.add_argument("--suite", default="all", help=f"comma list of {', '.join(SUITES)}, or 'all'")
    v.add_argument("--order", type=_order, default=DEFAULT_VERIFY_ORDER, help=f"truncation order 1..{MAX_ORDER}")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--jobs", type=int, default=1, help="suites run in parallel processes")
    v.add_argument("--dump-matrices", metavar="DIR", help="write representation and R matrices here")
    v.add_argument("--definitions", metavar="FILE", help="presentation file to verify instead of --algebra")
    v.add_argument("--seed", type=int, default=0, help="seed for randomized spot checks")

    e = sub.add_parser("expand", help="print the PBW normal form of an expression")
    e.add_argument("expr")
    e.add_argument("--algebra", default="poincare-1+1-quantum")
    e.add_argument("--order", type=_order, default=DEFAULT_ORDER)
    e.add_argument("--definitions", metavar="FILE")

    c = sub.add_parser("contract", help="take a contraction limit and print the resulting tables")
    c.add_argument("--map", dest="map_name", default="sl2-p11", help="sl2-p11, so22-p21 or unrescaled-p11")
    c.add_argument("--order", type=_order, default=DEFAULT_ORDER)
    return p


def _select_suites(spec: str, pres) -> list[str]:
    if spec == "all":
        return [s for s in SUITES if applicable(pres, s)]
    chosen = [s.strip() for s in spec.split(",") if s.strip()]
    unknown = [s for s in chosen if s not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(SUITES)} or 'all'")
    bad = [s for s in chosen if not applicable(pres, s)]
    if bad:
        raise ConfigError(f"suite(s) {', '.join(bad)} do not apply to {pres.name}")
    return sorted(set(chosen), key=SUITES.index)


def _run_task(task) -> list[dict]:
    source, order, suite, seed, dump = task
    pres = load(source, order)
    return [r.to_dict() for r in run_suite(pres, suite, seed=seed, dump_dir=dump)]


def report_line(d: dict) -> str:
    subj = f" [{d['generator_or_pair']}]" if "generator_or_pair" in d else ""
    tail = "" if d["status"] != "fail" else f" residual_terms={d['residual_term_count']}"
    note = f" ({d['note']})" if d.get("note") else ""
    return f"{d['status'].upper():4} {d['algebra']} {d['check']}{subj} N={d['order']}{tail}{note}"


def verify(args) -> int:
    source = args.definitions or args.algebra
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    pres = load(source, args.order)
    suites = _select_suites(args.suite, pres)
    tasks = [(source, args.order, s, args.seed, args.dump_matrices) for s in suites]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [[r.to_dict() for r in run_suite(pres, s, seed=args.seed, dump_dir=args.dump_matrices)]
                   for s in suites]
    reports = []
    for suite, rs in zip(suites, results):
        for r in rs:
            reports.append({"suite": suite, **r})
    failed = sum(r["status"] == "fail" for r in reports)
    if args.format == "json":
        doc = {
            "tool": "nullplane",
            "version": __version__,
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": {"algebra": pres.name, "source": source, "suites": suites, "order": args.order,
                       "seed": args.seed, "backend": _kernels.backend()},
            "summary": {"total": len(reports), "passed": sum(r["status"] == "pass" for r in reports),
                        "failed": failed, "info": sum(r["status"] == "info" for r in reports)},
            "reports": reports,
        }
        print(json.dumps(doc, indent=2, sort_keys=False))
    else:
        for r in reports:
            print(report_line(r))
        print(f"{len(reports)} checks, {failed} failed")
    return EXIT_FAIL if failed else EXIT_OK


def expand(args) -> int:
    pres = load(args.definitions or args.algebra, args.order)
    print(series_to_text(evaluate(args.expr, pres, args.order)))
    return EXIT_OK


def contract(args) -> int:
    from . import contraction as C

    if args.map_name not in C.MAPS:
        raise ConfigError(f"unknown map {args.map_name!r}; choose from {', '.join(C.MAPS)}")
    cmap = C.MAPS[args.map_name](args.order)
    limit = C.take_limit(C.apply_contraction(cmap))
    names = limit.generators
    for i, x in enumerate(names):
        for y in names[:i]:
            b = limit.bracket(x, y)
            if not b.is_zero():
                print(f"[{x},{y}] = {b.to_text()}")
    for x in names:
        print(f"Delta({x}) = {limit.coproducts[x].to_text()}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    handlers = {"verify": verify, "expand": expand, "contract": contract}
    try:
        return handlers[args.command](args)
    except ParseError as exc:
        print(f"nullplane: parse error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"nullplane: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SuiteNotApplicable as exc:
        print(f"nullplane: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, KeyError) as exc:
        print(f"nullplane: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NCPolyError as exc:
        # divergent contractions and malformed presentations are input problems
        print(f"nullplane: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
