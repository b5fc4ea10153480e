"""Regenerate the golden pretty-printer files under tests/golden/.

Run after an intentional change to the concrete syntax, then review the diff.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from cocalc.bisim import pretty
from cocalc.coterm import embed, fcon, fvar
from cocalc.eqparse import parse_equations
from cocalc.signature import Arrow, Op, builtin_signature, parse_sort
from cocalc.system import solve

ROOT = Path(__file__).resolve().parent.parent
STLC = builtin_signature("stlc")


def church_fin(n: int):
    f = parse_sort("0->0")
    ctx = ("0", f)
    body = fvar(STLC, ctx, 0)
    for _ in range(n):
        body = fcon(STLC, Op("app", ("0", "0")), [fvar(STLC, ctx, 1), body])
    return fcon(STLC, Op("lam", (f, Arrow("0", "0"))), [fcon(STLC, Op("lam", ("0", "0")), [body])])


def goldens() -> dict[str, str]:
    church = solve(parse_equations((ROOT / "data/church.eq").read_text(), STLC).system)["C"]
    two = embed(church_fin(2))
    forests = builtin_signature("untyped-forests")
    omega = parse_equations((ROOT / "data/omega.eq").read_text(), forests)
    return {
        "church_infinite_depth4.txt": pretty(church, 4),
        "church_infinite_depth4_debruijn.txt": pretty(church, 4, "debruijn"),
        "church2_depth4.txt": pretty(two, 4),
        "church2_depth4_debruijn.txt": pretty(two, 4, "debruijn"),
        "omega_depth4.txt": pretty(solve(omega.system)["S"], 4, "named", list(omega.names["S"])),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "tests" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in goldens().items():
        (args.out / name).write_bytes((text + "\n").encode("utf-8"))
        print(f"{name}: {text}")


if __name__ == "__main__":
    main()
