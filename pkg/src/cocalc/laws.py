"""Randomized checking of the monad laws for :func:`cocalc.subst.bind`."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bisim import bisim_to_depth, first_difference, pretty
from .coterm import var
from .randgen import GenConfig, random_context, random_rational, random_sort, random_substitution
from .signature import Signature
from .subst import Substitution, bind

LAWS = ("right-unit", "left-unit", "associativity")


@dataclass
class Counterexample:
    trial: int
    depth: int
    lhs: str
    rhs: str

    def __str__(self):
        return f"trial={self.trial} depth={self.depth}: {self.lhs} ≠ {self.rhs}"


@dataclass
class LawResult:
    name: str
    trials: int = 0
    failures: int = 0
    counterexample: Counterexample | None = None

    def record(self, cx: Counterexample) -> None:
        self.failures += 1
        key = (cx.depth, len(cx.lhs) + len(cx.rhs), cx.lhs, cx.rhs)
        old = self.counterexample
        if old is None or key < (old.depth, len(old.lhs) + len(old.rhs), old.lhs, old.rhs):
            self.counterexample = cx

    def line(self) -> str:
        return f"LAW {self.name} trials={self.trials} failures={self.failures}"


@dataclass
class LawReport:
    results: dict[str, LawResult] = field(default_factory=dict)

    @property
    def failures(self) -> int:
        return sum(r.failures for r in self.results.values())

    def lines(self) -> list[str]:
        out = []
        for name in LAWS:
            r = self.results[name]
            out.append(r.line())
            if r.counterexample is not None:
                out.append(f"  counterexample {r.counterexample}")
        return out


def _differ(trial: int, a, b, depth: int) -> Counterexample | None:
    try:
        ok = bisim_to_depth(a, b, depth)
    except Exception as e:  # a broken bind may build ill-scoped terms
        return Counterexample(trial, depth, f"<error: {e}>", "")
    if ok:
        return None
    d = first_difference(a, b, depth)
    return Counterexample(trial, d, pretty(a, d, "debruijn"), pretty(b, d, "debruijn"))


def _check(res: LawResult, trial: int, pairs, depth: int) -> None:
    """One trial of a law; it fails if any of its instances differ."""
    res.trials += 1
    for a, b in pairs:
        cx = _differ(trial, a, b, depth)
        if cx is not None:
            res.record(cx)
            return


def check_monad_laws(sig: Signature, seed: int = 0, trials: int = 200, depth: int = 8,
                     lift_fn=None, cfg: GenConfig = GenConfig()) -> LawReport:
    """Run ``trials`` random instances of each law, compared up to ``depth``.

    Failures are reported with the smallest distinguishing depth and the two
    truncations at that depth.  ``lift_fn`` swaps in another lifting
    operation (for checking that the checker notices broken ones).
    """
    rng = random.Random(seed)
    report = LawReport({name: LawResult(name) for name in LAWS})

    def b(sigma, t):
        return bind(sigma, t, lift_fn)

    for trial in range(trials):
        gamma = random_context(sig, rng, cfg)
        delta = random_context(sig, rng, cfg, include=gamma)
        theta = random_context(sig, rng, cfg, include=delta)
        t = random_rational(sig, rng, gamma, random_sort(sig, rng, gamma), cfg)
        sigma = random_substitution(sig, rng, gamma, delta, cfg)
        tau = random_substitution(sig, rng, delta, theta, cfg)
        if depth <= 0:
            for name in LAWS:
                report.results[name].trials += 1
            continue
        laws = {
            "right-unit": lambda: [(b(Substitution.identity(sig, gamma), t), t)],
            "left-unit": lambda: [(b(sigma, var(sig, gamma, i)), sigma[i]) for i in range(len(gamma))],
            "associativity": lambda: [(b(tau, b(sigma, t)),
                                       b(Substitution.unchecked(gamma, theta, tuple(b(tau, s) for s in sigma.assign),
                                                                sig), t))],
        }
        for name in LAWS:
            try:
                pairs = laws[name]()
            except Exception as e:
                report.results[name].trials += 1
                report.results[name].record(Counterexample(trial, depth, f"<error: {e}>", ""))
                continue
            _check(report.results[name], trial, pairs, depth)
    return report
