"""Command-line entry point: ``cartprl check|eval|repl|serve``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from cartprl.checker import check_signature, check_theorem
from cartprl.dynamics import DEFAULT_FUEL, EvalError, evaluate, trace
from cartprl.parser import ParseError, Thm, parse, parse_term


def _check(args) -> int:
    try:
        sig = parse(Path(args.file).read_text())
    except ParseError as e:
        print(f"{args.file}:{e}", file=sys.stderr)
        return 2
    report = check_signature(sig, args.fuel)
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        print(report.render())
    if args.trace:
        for d in sig.decls:
            if isinstance(d, Thm):
                _, st = check_theorem(d, args.fuel)
                if st is not None:
                    print(f"-- {d.name}")
                    for entry in st.journal:
                        print(f"   {entry}")
    return 0 if report.ok else 1


def _eval(args) -> int:
    try:
        t = parse_term(args.term)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    if args.trace:
        for n, e in enumerate(trace(t, args.fuel)):
            tag = "" if e.stable is None else (" (stable)" if e.stable else " (unstable)")
            print(f"{n:>4}  {e.term}{tag}")
    try:
        print(evaluate(t, args.fuel))
    except EvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def _repl(args) -> int:
    from cartprl.repl import run_repl

    run_repl(args.file, args.fuel)
    return 0


def _serve(args) -> int:
    from cartprl.server import serve

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    try:
        serve(args.port, args.host)
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="cartprl", description="Cartesian cubical refiner")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("check", help="check a signature file")
    c.add_argument("file")
    c.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    c.add_argument("--trace", action="store_true", help="print each theorem's rule applications")
    c.add_argument("--json", action="store_true", help="machine-readable report")
    c.set_defaults(fn=_check)

    e = sub.add_parser("eval", help="evaluate a closed term")
    e.add_argument("term")
    e.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    e.add_argument("--trace", action="store_true")
    e.set_defaults(fn=_eval)

    r = sub.add_parser("repl", help="interactive refinement")
    r.add_argument("file", nargs="?")
    r.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    r.set_defaults(fn=_repl)

    s = sub.add_parser("serve", help="run the session server")
    s.add_argument("--port", type=int, default=8765)
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(fn=_serve)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
