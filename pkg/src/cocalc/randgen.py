"""Seeded random generation of contexts, rational coterms, substitutions and
finite terms.

Equation systems have at most ``max_unknowns`` unknowns, all declared over
one base context, with right-hand sides of constructor depth at most
``rhs_depth``.  Constructors are drawn uniformly from the signature's
``candidates`` for the required sort.  References use the weakening into the
local context, occasionally redirected to another variable of the same sort
(which may be one bound inside the right-hand side).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .coterm import ContextMorphism, FinTerm, Var, Con, extend, var
from .signature import Signature, Sort
from .subst import Substitution
from .system import EquationSystem, PCon, PRef, PVar, solve


class _Stuck(Exception):
    pass


@dataclass
class GenConfig:
    max_unknowns: int = 4
    rhs_depth: int = 3
    max_ctx: int = 3
    var_prob: float = 0.3
    ref_prob: float = 0.35
    redirect_prob: float = 0.25
    retries: int = 200


def random_context(sig: Signature, rng: random.Random, cfg: GenConfig = GenConfig(),
                   include: Sequence[Sort] = ()) -> tuple:
    pool = [s for s in sig.sort_pool() if sig.var_only(s)] or list(sig.sort_pool())
    extra = [rng.choice(pool) for _ in range(rng.randint(1, cfg.max_ctx))]
    ctx = list(include) + extra
    rng.shuffle(ctx)
    return tuple(ctx)


def _term_sorts(sig: Signature, ctx) -> list:
    return [s for s in sig.sort_pool() if not sig.var_only(s)]


class _SystemGen:
    def __init__(self, sig, rng, cfg, base_ctx, unknowns):
        self.sig, self.rng, self.cfg = sig, rng, cfg
        self.base = tuple(base_ctx)
        self.unknowns = unknowns  # name -> sort

    def ref(self, name, lctx):
        k = len(lctx) - len(self.base)
        mapping = []
        for i, s in enumerate(self.base):
            j = i + k
            if self.rng.random() < self.cfg.redirect_prob:
                same = [p for p, q in enumerate(lctx) if q == s]
                j = self.rng.choice(same)
            mapping.append(j)
        return PRef(name, ContextMorphism(self.base, tuple(lctx), tuple(mapping)))

    def gen(self, lctx, sort, depth, guarded):
        rng, cfg = self.rng, self.cfg
        vars_ = [i for i, s in enumerate(lctx) if s == sort]
        refs = [u for u, s in self.unknowns.items() if s == sort] if guarded else []
        cons = self.sig.candidates(lctx, sort)
        if depth <= 0:
            cons = [op for op in cons if not self.sig.arity(op).args]
        if guarded:
            r = rng.random()
            if vars_ and r < cfg.var_prob:
                return PVar(rng.choice(vars_))
            if refs and r < cfg.var_prob + cfg.ref_prob:
                return self.ref(rng.choice(refs), lctx)
        if cons:
            op = rng.choice(cons)
            ar = self.sig.arity(op)
            return PCon(op, tuple(self.gen(extend(lctx, ba.bound), ba.sort, depth - 1, True) for ba in ar.args))
        if guarded and refs:
            return self.ref(rng.choice(refs), lctx)
        if vars_:
            return PVar(rng.choice(vars_))
        raise _Stuck()


def random_system(sig: Signature, rng: random.Random, ctx: Sequence[Sort], root_sort: Sort | None = None,
                  cfg: GenConfig = GenConfig()) -> tuple[EquationSystem, str]:
    """A random guarded system over ``ctx``; returns it with the name of its root unknown."""
    ctx = tuple(ctx)
    sorts = _term_sorts(sig, ctx)
    for _ in range(cfg.retries):
        n = rng.randint(1, cfg.max_unknowns)
        unknowns = {f"U{i}": rng.choice(sorts) for i in range(n)}
        if root_sort is not None:
            unknowns["U0"] = root_sort
        g = _SystemGen(sig, rng, cfg, ctx, unknowns)
        try:
            rhs = {u: g.gen(ctx, s, rng.randint(1, cfg.rhs_depth), False) for u, s in unknowns.items()}
        except _Stuck:
            continue
        es = EquationSystem(sig, {u: (ctx, s) for u, s in unknowns.items()}, rhs)
        es.check()
        return es, "U0"
    raise RuntimeError(f"could not generate a system over {ctx} for {root_sort}")


def random_rational(sig: Signature, rng: random.Random, ctx: Sequence[Sort], sort: Sort | None = None,
                    cfg: GenConfig = GenConfig()):
    es, root = random_system(sig, rng, ctx, sort, cfg)
    return solve(es)[root]


def random_substitution(sig: Signature, rng: random.Random, source: Sequence[Sort], target: Sequence[Sort],
                        cfg: GenConfig = GenConfig()) -> Substitution:
    source, target = tuple(source), tuple(target)
    assign = []
    for s in source:
        same = [j for j, q in enumerate(target) if q == s]
        if sig.var_only(s) or (same and rng.random() < 0.3):
            if not same:
                raise ValueError(f"no variable of sort {s} in target context")
            assign.append(var(sig, target, rng.choice(same)))
        else:
            assign.append(random_rational(sig, rng, target, s, cfg))
    return Substitution(source, target, tuple(assign), sig)


def random_finterm(sig: Signature, rng: random.Random, ctx: Sequence[Sort], sort: Sort,
                   depth: int = 4, retries: int = 200) -> FinTerm:
    ctx = tuple(ctx)

    def gen(lctx, sort, d):
        vars_ = [i for i, s in enumerate(lctx) if s == sort]
        cons = sig.candidates(lctx, sort)
        if d <= 0:
            cons = [op for op in cons if not sig.arity(op).args]
        if vars_ and (not cons or rng.random() < 0.3):
            return FinTerm(sig, lctx, sort, Var(rng.choice(vars_)))
        if not cons:
            raise _Stuck()
        op = rng.choice(cons)
        ar = sig.arity(op)
        args = tuple(gen(extend(lctx, ba.bound), ba.sort, d - 1) for ba in ar.args)
        return FinTerm(sig, lctx, sort, Con(op, args))

    for _ in range(retries):
        try:
            return gen(ctx, sort, depth)
        except _Stuck:
            continue
    raise RuntimeError(f"could not generate a finite term of sort {sort}")


def random_sort(sig: Signature, rng: random.Random, ctx: Sequence[Sort]) -> Sort:
    return rng.choice(_term_sorts(sig, ctx))
