"""Command-line front end.

Exit status: 0 on success, 1 when the domain says no (a law fails, terms
differ under ``--expect-equal``, a sort or guardedness error), 2 on usage
and parse errors.  Results go to stdout, diagnostics to stderr prefixed
with ``error:``.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from .bisim import RationalHandle, bisim_rational, bisim_to_depth, first_difference, pretty
from .coterm import SortError, embed
from .eqparse import EqSyntaxError, parse_equations
from .inhabit import atoms_of, enumerate_inhabitants, generate_search_forest, parse_context, parse_type
from .laws import check_monad_laws
from .signature import (BUILTIN_NAMES, SignatureError, SignatureSyntaxError, SortSyntaxError,
                        builtin_signature, parse_signature, validate_signature)

USAGE_ERROR = 2
DOMAIN_FAILURE = 1


class UsageError(Exception):
    pass


def _color(stream) -> bool:
    return os.environ.get("COCALC_COLOR", "1") != "0" and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, stream) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if _color(stream) else text


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def load_signature(source: str, atoms: int = 1):
    """A built-in name, or a path to a signature file (a ``/`` forces a path)."""
    if atoms < 1:
        raise UsageError("--atoms must be at least 1")
    atom_names = tuple(str(i) for i in range(atoms))
    if "/" not in source and source in BUILTIN_NAMES:
        return builtin_signature(source, atom_names)
    if "/" not in source and not Path(source).exists():
        raise UsageError(f"unknown signature {source!r} (built-ins: {', '.join(BUILTIN_NAMES)})")
    return parse_signature(_read(source))


def _load_eqs(path: str, sig):
    return parse_equations(_read(path), sig)


def _root(eqs, name: str | None, flag: str):
    if name is None:
        return eqs.unknowns[0]
    if name not in eqs.system.decls:
        raise UsageError(f"{flag}: no unknown named {name!r}")
    return name


def _cmd_unfold(a, out) -> int:
    sig = load_signature(a.sig, a.atoms)
    eqs = _load_eqs(a.eqs, sig)
    root = _root(eqs, a.root, "--root")
    t = RationalHandle.solve(eqs.system, root).term
    names = list(eqs.names[root]) if a.style == "named" else None
    print(pretty(t, a.depth, a.style, names), file=out)
    return 0


def _cmd_bisim(a, out) -> int:
    sig = load_signature(a.sig, a.atoms)
    e1 = _load_eqs(a.eqs, sig)
    e2 = _load_eqs(a.eqs2, sig) if a.eqs2 else e1
    r1, r2 = _root(e1, a.root, "--root"), _root(e2, a.root2, "--root2")
    h1, h2 = RationalHandle.solve(e1.system, r1), RationalHandle.solve(e2.system, r2)
    if a.depth is not None:
        equal = bisim_to_depth(h1.term, h2.term, a.depth)
        if equal:
            print(f"equal to depth {a.depth}", file=out)
        else:
            print(f"different at depth {first_difference(h1.term, h2.term, a.depth)}", file=out)
    else:
        res = bisim_rational(h1, h2)
        equal = res.equal
        print(f"{'equal' if equal else 'different'} (states={res.states})", file=out)
    if a.expect_equal and not equal:
        return DOMAIN_FAILURE
    if a.expect_different and equal:
        return DOMAIN_FAILURE
    return 0


def _cmd_laws(a, out) -> int:
    if a.trials < 0 or a.depth < 0:
        raise UsageError("--trials and --depth must be non-negative")
    sig = load_signature(a.sig, a.atoms)
    report = check_monad_laws(sig, seed=a.seed, trials=a.trials, depth=a.depth)
    for line in report.lines():
        print(line, file=out)
    return DOMAIN_FAILURE if report.failures else 0


def _cmd_inhabit(a, out) -> int:
    if a.fuel < 0:
        raise UsageError("--fuel must be non-negative")
    goal = parse_type(a.type)
    entries = parse_context(a.context or "")
    gamma = [b for _, b in entries]
    names = [n for n, _ in entries]
    if a.mode == "forest":
        print(pretty(generate_search_forest(gamma, goal), a.fuel, "named", names), file=out)
    else:
        for ft in enumerate_inhabitants(gamma, goal, a.fuel):
            print(pretty(embed(ft), ft.height() + 1, "named", names), file=out)
    return 0


def _cmd_check_sig(a, out) -> int:
    sig = load_signature(a.sig, a.atoms)
    report = validate_signature(sig)
    for line in report.lines():
        print(line, file=out)
    return 0 if report.ok else DOMAIN_FAILURE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cocalc", description="Coinductive syntax with binders: unfold, compare, check laws.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_sig(sp):
        sp.add_argument("--sig", required=True, help="built-in name or signature file")
        sp.add_argument("--atoms", type=int, default=1, help="number of atoms 0..N-1 for typed built-ins")

    sp = sub.add_parser("unfold", help="pretty-print a depth-bounded unfolding")
    with_sig(sp)
    sp.add_argument("--eqs", required=True)
    sp.add_argument("--root")
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--style", choices=("named", "debruijn"), default="named")
    sp.set_defaults(run=_cmd_unfold)

    sp = sub.add_parser("bisim", help="compare two rational terms")
    with_sig(sp)
    sp.add_argument("--eqs", required=True)
    sp.add_argument("--root")
    sp.add_argument("--eqs2")
    sp.add_argument("--root2")
    sp.add_argument("--depth", type=int, help="compare to this depth (default: exactly)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--expect-equal", action="store_true")
    g.add_argument("--expect-different", action="store_true")
    sp.set_defaults(run=_cmd_bisim)

    sp = sub.add_parser("laws", help="check the monad laws of substitution on random terms")
    with_sig(sp)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(run=_cmd_laws)

    sp = sub.add_parser("inhabit", help="inhabitation search forest or inhabitants")
    sp.add_argument("--type", required=True)
    sp.add_argument("--context", default="")
    sp.add_argument("--fuel", type=int, default=8)
    sp.add_argument("--mode", choices=("forest", "terms"), default="terms")
    sp.set_defaults(run=_cmd_inhabit)

    sp = sub.add_parser("check-sig", help="validate a signature")
    with_sig(sp)
    sp.set_defaults(run=_cmd_check_sig)
    return p


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err

    def fail(msg: str, code: int) -> int:
        print(_paint("error:", "31", err) + " " + msg.replace("\n", " "), file=err)
        return code

    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out)
    except UsageError as e:
        return fail(str(e), USAGE_ERROR)
    except (EqSyntaxError, SignatureSyntaxError, SortSyntaxError) as e:
        return fail(str(e), USAGE_ERROR)
    except SortError as e:
        return fail(str(e), DOMAIN_FAILURE)
    except SignatureError as e:
        return fail(str(e), USAGE_ERROR)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
