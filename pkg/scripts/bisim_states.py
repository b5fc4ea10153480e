"""How many product states exact comparison explores, against system sizes.

For random pairs of rational terms, prints the number of unknowns on each
side, the states visited by the exact check, and whether the depth-bounded
check at the product bound agrees.
"""
from __future__ import annotations

import argparse
import random
import statistics
from dataclasses import dataclass

from cocalc.bisim import RationalHandle, bisim_rational, bisim_to_depth
from cocalc.randgen import GenConfig, random_context, random_sort, random_system
from cocalc.signature import builtin_signature
from cocalc.subst import Substitution, bind_via_solve


@dataclass
class StatesConfig:
    signature: str = "stlc"
    pairs: int = 200
    seed: int = 7
    max_unknowns: int = 4


def run(cfg: StatesConfig) -> None:
    sig = builtin_signature(cfg.signature)
    rng = random.Random(cfg.seed)
    gen = GenConfig(max_unknowns=cfg.max_unknowns)
    ratios, equal, disagree = [], 0, 0
    for _ in range(cfg.pairs):
        ctx = random_context(sig, rng, gen)
        es1, r1 = random_system(sig, rng, ctx, random_sort(sig, rng, ctx), gen)
        a = RationalHandle.solve(es1, r1)
        if rng.random() < 0.5:
            # an equal term with a different presentation
            b = RationalHandle.of(bind_via_solve(Substitution.identity(sig, ctx), a.term))
        else:
            es2, r2 = random_system(sig, rng, ctx, es1.decls[r1][1], gen)
            b = RationalHandle.solve(es2, r2)
        res = bisim_rational(a, b)
        bound = len(a.system.decls) * len(b.system.decls) + 1
        if bisim_to_depth(a.term, b.term, max(bound, 64)) != res.equal:
            disagree += 1
        equal += res.equal
        ratios.append(res.states / (len(a.system.decls) * len(b.system.decls)))
    print(f"signature={cfg.signature} pairs={cfg.pairs} equal={equal} disagreements={disagree}")
    print(f"states per unknown pair: mean={statistics.mean(ratios):.2f} max={max(ratios):.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sig", default="stlc")
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=7)
    a = ap.parse_args()
    run(StatesConfig(signature=a.sig, pairs=a.pairs, seed=a.seed))


if __name__ == "__main__":
    main()
