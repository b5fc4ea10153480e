"""Guarded equation systems and their unique solutions.

Each unknown is declared with a context and a sort; its right-hand side is a
finite pre-term that may mention other unknowns (through a renaming into the
local context) or embed already-built coterms.  Every reference to an
unknown must sit under at least one constructor, which is what makes the
solution productive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Sequence

from .coterm import (Con, ContextMorphism, CoTerm, SortError, Var, con, extend,
                     fmt_ctx, rename, var)
from .signature import Op, Signature, SignatureError, Sort, format_sort


class GuardednessError(SortError):
    """A reference to an unknown is not under any constructor."""


@dataclass(frozen=True)
class PVar:
    index: int


@dataclass(frozen=True)
class PCon:
    op: Op
    args: tuple


@dataclass(frozen=True)
class PRef:
    name: Hashable
    rho: ContextMorphism


@dataclass(frozen=True, eq=False)
class PEmbed:
    term: CoTerm
    rho: ContextMorphism


PreTerm = Any  # PVar | PCon | PRef | PEmbed


@dataclass
class EquationSystem:
    sig: Signature
    decls: dict[Hashable, tuple[tuple, Sort]]
    rhs: dict[Hashable, PreTerm] = field(default_factory=dict)

    def check(self) -> None:
        """Raise :class:`GuardednessError` or :class:`SortError` on the first problem."""
        for name in self.decls:
            if name not in self.rhs:
                raise SortError(f"unknown {name!r} has no equation")
        for name in self.rhs:
            if name not in self.decls:
                raise SortError(f"equation for undeclared unknown {name!r}")
        for name, (ctx, sort) in self.decls.items():
            if not self.sig.is_sort(sort):
                raise SortError(f"unknown {name!r}: {format_sort(sort)} is not a sort")
            for s in ctx:
                if not self.sig.is_sort(s):
                    raise SortError(f"unknown {name!r}: {format_sort(s)} is not a sort")
            self._check(name, self.rhs[name], tuple(ctx), sort, (), False)

    def _check(self, name, pt, ctx, sort, path, guarded):
        where = f"unknown {name!r} at path {list(path)}: "
        if isinstance(pt, PVar):
            if not 0 <= pt.index < len(ctx) or ctx[pt.index] != sort:
                raise SortError(where + f"variable {pt.index} does not have sort {format_sort(sort)} in {fmt_ctx(ctx)}")
        elif isinstance(pt, PCon):
            try:
                ar = self.sig.arity(pt.op)
            except SignatureError as e:
                raise SortError(where + str(e)) from None
            if ar.target != sort:
                raise SortError(where + f"{pt.op} builds {format_sort(ar.target)}, expected {format_sort(sort)}")
            if len(pt.args) != len(ar.args):
                raise SortError(where + f"{pt.op} expects {len(ar.args)} arguments, got {len(pt.args)}")
            for j, (a, ba) in enumerate(zip(pt.args, ar.args)):
                self._check(name, a, extend(ctx, ba.bound), ba.sort, path + (j,), True)
        elif isinstance(pt, PRef):
            if pt.name not in self.decls:
                raise SortError(where + f"reference to undeclared unknown {pt.name!r}")
            if not guarded:
                raise GuardednessError(where + f"unguarded reference to {pt.name!r}")
            rctx, rsort = self.decls[pt.name]
            if rsort != sort:
                raise SortError(where + f"{pt.name!r} has sort {format_sort(rsort)}, expected {format_sort(sort)}")
            if pt.rho.source != tuple(rctx) or pt.rho.target != ctx:
                raise SortError(where + f"renaming for {pt.name!r} does not go from {fmt_ctx(rctx)} to {fmt_ctx(ctx)}")
        elif isinstance(pt, PEmbed):
            if pt.term.sig != self.sig:
                raise SortError(where + "embedded term belongs to another signature")
            if pt.term.sort != sort or pt.rho.source != pt.term.ctx or pt.rho.target != ctx:
                raise SortError(where + "embedded term does not fit its position")
        else:
            raise SortError(where + f"not a pre-term: {pt!r}")

    def references(self, name) -> list[Hashable]:
        out = []

        def walk(pt):
            if isinstance(pt, PRef):
                out.append(pt.name)
            elif isinstance(pt, PCon):
                for a in pt.args:
                    walk(a)

        walk(self.rhs[name])
        return out


def ref(name: Hashable, decl_ctx: Sequence[Sort], local_ctx: Sequence[Sort] | None = None,
        rho: ContextMorphism | None = None) -> PRef:
    """Reference helper: default renaming is the weakening of ``decl_ctx`` into ``local_ctx``."""
    decl_ctx = tuple(decl_ctx)
    if rho is None:
        local_ctx = decl_ctx if local_ctx is None else tuple(local_ctx)
        k = len(local_ctx) - len(decl_ctx)
        rho = ContextMorphism.weakening(local_ctx[:k], decl_ctx)
    return PRef(name, rho)


def solve(es: EquationSystem) -> dict[Hashable, CoTerm]:
    """The unique solution: one coterm per unknown, sharing structure along cycles."""
    es.check()
    sig = es.sig
    sols: dict[Hashable, CoTerm] = {}

    def build(pt, ctx, sort) -> CoTerm:
        if isinstance(pt, PVar):
            return var(sig, ctx, pt.index)
        if isinstance(pt, PRef):
            return rename(pt.rho, sols[pt.name])
        if isinstance(pt, PEmbed):
            return rename(pt.rho, pt.term)
        ar = sig.arity(pt.op)
        kids = [build(a, extend(ctx, ba.bound), ba.sort) for a, ba in zip(pt.args, ar.args)]
        return con(sig, pt.op, kids, ctx=ctx)

    def top(name):
        ctx, _ = es.decls[name]
        pt = es.rhs[name]
        if isinstance(pt, PVar):
            return Var(pt.index)
        if isinstance(pt, PEmbed):
            return rename(pt.rho, pt.term).out()
        ar = sig.arity(pt.op)
        return Con(pt.op, tuple(build(a, extend(ctx, ba.bound), ba.sort) for a, ba in zip(pt.args, ar.args)))

    for name, (ctx, sort) in es.decls.items():
        t = CoTerm(sig, ctx, sort, thunk=lambda name=name: top(name))
        t.provenance = (es, name)
        sols[name] = t
    return sols


def interpret(es: EquationSystem, pt: PreTerm, sols: Mapping[Hashable, CoTerm],
              ctx: Sequence[Sort], sort: Sort) -> CoTerm:
    """Plug given coterms into a pre-term (eagerly, layer by layer)."""
    sig = es.sig
    ctx = tuple(ctx)
    if isinstance(pt, PVar):
        return var(sig, ctx, pt.index)
    if isinstance(pt, PRef):
        return rename(pt.rho, sols[pt.name])
    if isinstance(pt, PEmbed):
        return rename(pt.rho, pt.term)
    ar = sig.arity(pt.op)
    kids = [interpret(es, a, sols, extend(ctx, ba.bound), ba.sort) for a, ba in zip(pt.args, ar.args)]
    return con(sig, pt.op, kids, ctx=ctx)


def unfold_system(es: EquationSystem, name: Hashable, d: int):
    """Truncation of an unknown's solution computed by pure pre-term expansion.

    Independent of the coterm machinery: references are expanded by
    substituting renamed right-hand sides, and the result uses the same
    tree encoding as :func:`cocalc.coterm.truncate`.
    """
    from .coterm import CUT

    def expand(pt, env, depth):
        # env maps the pre-term's local positions to positions of the observed context
        while True:
            if isinstance(pt, PRef):
                env = tuple(env[j] for j in pt.rho.map)
                pt = es.rhs[pt.name]
            elif isinstance(pt, PEmbed):
                return _trunc_renamed(pt.term, tuple(env[j] for j in pt.rho.map), depth)
            else:
                break
        if isinstance(pt, PVar):
            return Var(env[pt.index])
        if depth <= 0:
            return CUT
        ar = es.sig.arity(pt.op)
        kids = []
        for a, ba in zip(pt.args, ar.args):
            k = len(ba.bound)
            kids.append(expand(a, tuple(range(k)) + tuple(e + k for e in env), depth - 1))
        return Con(pt.op, tuple(kids))

    ctx, _ = es.decls[name]
    return expand(es.rhs[name], tuple(range(len(ctx))), d)


def _trunc_renamed(t: CoTerm, env, depth):
    from .coterm import CUT

    node = t.out()
    if isinstance(node, Var):
        return Var(env[node.index])
    if depth <= 0:
        return CUT
    ar = t.sig.arity(node.op)
    kids = []
    for a, ba in zip(node.args, ar.args):
        k = len(ba.bound)
        kids.append(_trunc_renamed(a, tuple(range(k)) + tuple(e + k for e in env), depth - 1))
    return Con(node.op, tuple(kids))
