"""Inhabitant counts by fuel for a few types, forest reading vs direct search."""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from cocalc.inhabit import enumerate_inhabitants, oracle_enumerate, parse_type


@dataclass
class CountConfig:
    types: list[str] = field(default_factory=lambda: ["(0->0)->0->0", "((0->0)->0)->0", "(0->0->0)->0->0"])
    max_fuel: int = 14


def run(cfg: CountConfig) -> None:
    for text in cfg.types:
        goal = parse_type(text)
        print(text)
        for fuel in range(cfg.max_fuel + 1):
            t0 = time.perf_counter()
            got = enumerate_inhabitants([], goal, fuel)
            dt = time.perf_counter() - t0
            ref = oracle_enumerate([], goal, fuel)
            flag = "" if len(got) == len(ref) else "  MISMATCH"
            print(f"  fuel={fuel:>2} inhabitants={len(got):>5} oracle={len(ref):>5} secs={dt:.3f}{flag}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--types", nargs="+")
    ap.add_argument("--max-fuel", type=int, default=14)
    a = ap.parse_args()
    cfg = CountConfig(max_fuel=a.max_fuel)
    if a.types:
        cfg.types = a.types
    run(cfg)


if __name__ == "__main__":
    main()
