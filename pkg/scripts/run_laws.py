"""Law-check sweep: failures and timing per signature, depth and lift variant.

    python scripts/run_laws.py --trials 200 --depths 4 8 16 64
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from cocalc.coterm import extend, var
from cocalc.laws import check_monad_laws
from cocalc.signature import builtin_signature
from cocalc.subst import Substitution


@dataclass
class SweepConfig:
    signatures: list[str] = field(default_factory=lambda: ["stlc", "untyped-forests", "typed-forests"])
    depths: list[int] = field(default_factory=lambda: [4, 8, 16, 64])
    trials: int = 200
    seed: int = 42
    broken: bool = True
    # the mutated lift builds a fresh substitution under every binder, so its
    # terms have no finite presentation and comparison cost grows with depth
    broken_max_depth: int = 16


def lift_without_weakening(sigma, bound):
    bound = tuple(bound)
    if not bound:
        return sigma
    target = extend(sigma.target, bound)
    fresh = tuple(var(sigma.sig, target, i) for i in range(len(bound)))
    return Substitution.unchecked(extend(sigma.source, bound), target, fresh + sigma.assign, sigma.sig)


def run(cfg: SweepConfig) -> None:
    variants = [("lift", None)] + ([("no-weaken", lift_without_weakening)] if cfg.broken else [])
    print(f"{'signature':<16} {'variant':<10} {'depth':>5} {'right':>6} {'left':>6} {'assoc':>6} {'secs':>7}")
    for name in cfg.signatures:
        sig = builtin_signature(name)
        for label, lf in variants:
            for d in cfg.depths:
                if lf is not None and d > cfg.broken_max_depth:
                    print(f"{name:<16} {label:<10} {d:>5} {'skipped (depth cap)':>28}")
                    continue
                t0 = time.perf_counter()
                rep = check_monad_laws(sig, seed=cfg.seed, trials=cfg.trials, depth=d, lift_fn=lf)
                dt = time.perf_counter() - t0
                f = [rep.results[k].failures for k in ("right-unit", "left-unit", "associativity")]
                print(f"{name:<16} {label:<10} {d:>5} {f[0]:>6} {f[1]:>6} {f[2]:>6} {dt:>7.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--depths", type=int, nargs="+", default=[4, 8, 16, 64])
    ap.add_argument("--no-broken", action="store_true", help="skip the mutated lift")
    a = ap.parse_args()
    run(SweepConfig(depths=a.depths, trials=a.trials, seed=a.seed, broken=not a.no_broken))


if __name__ == "__main__":
    main()
