"""Renaming, binder lifting and monadic substitution on coterms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .coterm import (_CODERS, Con, ContextMorphism, CoTerm, FinTerm, SortError, Var, _Memo,
                     code, extend, fmt_ctx, rename, var, weaken)
from .signature import Signature, Sort, format_sort
from .system import EquationSystem, PCon, PEmbed, PRef, PVar, solve

__all__ = ["Substitution", "rename", "weaken", "lift", "bind", "compose", "bind_via_solve",
           "NotRationalError", "fin_bind", "fin_lift", "fin_weaken"]


@dataclass(frozen=True, eq=False)
class Substitution:
    """Assigns to each position of ``source`` a coterm over ``target``.

    ``sig`` is read off the entries; it only has to be given for an empty
    source context.
    """

    source: tuple
    target: tuple
    assign: tuple
    sig: Signature | None = None

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "assign", tuple(self.assign))
        if self.sig is None and self.assign:
            object.__setattr__(self, "sig", self.assign[0].sig)
        if len(self.assign) != len(self.source):
            raise SortError(f"substitution has {len(self.assign)} entries for {len(self.source)} variables")
        for i, (s, t) in enumerate(zip(self.source, self.assign)):
            if t.ctx != self.target or t.sort != s:
                raise SortError(f"entry {i} of substitution: {fmt_ctx(t.ctx)} ⊢ {format_sort(t.sort)}, "
                                f"expected {fmt_ctx(self.target)} ⊢ {format_sort(s)}")

    @classmethod
    def unchecked(cls, source, target, assign, sig=None) -> "Substitution":
        """Bypass the well-sortedness check (for fault injection in tests)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "source", tuple(source))
        object.__setattr__(obj, "target", tuple(target))
        object.__setattr__(obj, "assign", tuple(assign))
        object.__setattr__(obj, "sig", sig if sig is not None else (assign[0].sig if assign else None))
        return obj

    @classmethod
    def identity(cls, sig: Signature, ctx: Sequence[Sort]) -> "Substitution":
        ctx = tuple(ctx)
        return cls(ctx, ctx, tuple(var(sig, ctx, i) for i in range(len(ctx))), sig)

    @classmethod
    def from_renaming(cls, sig: Signature, rho: ContextMorphism) -> "Substitution":
        return cls(rho.source, rho.target, tuple(var(sig, rho.target, j) for j in rho.map), sig)

    def __getitem__(self, i: int) -> CoTerm:
        return self.assign[i]

    @property
    def key(self) -> Hashable:
        return (self.target, tuple(map(id, self.assign)))

    def with_sig(self, sig: Signature) -> "Substitution":
        if self.sig is not None:
            return self
        return Substitution(self.source, self.target, self.assign, sig)

    def precompose(self, rho: ContextMorphism) -> "Substitution":
        """``i -> self[rho(i)]``, a substitution from ``rho.source``."""
        if rho.target != self.source:
            raise SortError("renaming does not land in the substitution's source")
        return Substitution(rho.source, self.target, tuple(self.assign[j] for j in rho.map), self.sig)


def lift(sigma: Substitution, bound: Sequence[Sort]) -> Substitution:
    """Go under a binder: fresh variables map to themselves, old entries are weakened."""
    bound = tuple(bound)
    if not bound:
        return sigma
    if sigma.sig is None:
        raise SortError("cannot lift an empty substitution without a signature")
    target = extend(sigma.target, bound)
    fresh = tuple(var(sigma.sig, target, i) for i in range(len(bound)))
    return Substitution(extend(sigma.source, bound), target,
                        fresh + tuple(weaken(bound, t) for t in sigma.assign), sigma.sig)


_BINDS = _Memo()

LiftFn = Callable[[Substitution, Sequence[Sort]], Substitution]


def bind(sigma: Substitution, t: CoTerm, lift_fn: LiftFn | None = None) -> CoTerm:
    """Simultaneous substitution of ``sigma`` into ``t``, lazily and corecursively.

    A variable ``i`` unfolds to ``sigma[i]``; a constructor keeps its index and
    substitutes into each argument with ``sigma`` lifted over that argument's
    binders.  ``lift_fn`` replaces :func:`lift` (used to test the law checker).
    """
    if t.ctx != sigma.source:
        raise SortError(f"cannot substitute: term context {fmt_ctx(t.ctx)} is not {fmt_ctx(sigma.source)}")
    sigma = sigma.with_sig(t.sig)
    lf = lift if lift_fn is None else lift_fn
    if lift_fn is None and t.origin is not None and t.origin[0] == "rename":
        sigma = sigma.precompose(t.origin[1])
        t = t.origin[2]
    node = t._node
    if isinstance(node, Var):
        return sigma.assign[node.index]
    key = (sigma.key, id(t), id(lift_fn))
    return _BINDS.get_or_make(key, lambda: _bind_node(sigma, t, lf, lift_fn))


def _bind_node(sigma: Substitution, t: CoTerm, lf: LiftFn, lift_fn) -> CoTerm:
    def step():
        node = t.out()
        if isinstance(node, Var):
            return sigma.assign[node.index].out()
        ar = t.sig.arity(node.op)
        return Con(node.op, tuple(bind(lf(sigma, ba.bound), a, lift_fn) for a, ba in zip(node.args, ar.args)))

    sort = t.sort
    return CoTerm(t.sig, sigma.target, sort, thunk=step, origin=("bind", sigma, t, lf))


def _bind_code(t: CoTerm):
    # bind(sigma, rename(te, R)) = rename(U, bind(sigma_c, R)) with sigma_c the
    # entries sigma[te[k]] compressed onto the positions U they mention
    _, sigma, base_t, lf = t.origin
    if lf is not lift:
        return None
    tb, te = code(base_t)
    parts = [code(sigma.assign[k]) for k in te]
    used = sorted({p for _, e in parts for p in e})
    rank = {p: r for r, p in enumerate(used)}
    base = ("bind", tb, tuple(b for b, _ in parts), tuple(tuple(rank[p] for p in e) for _, e in parts))
    return base, tuple(used)


_CODERS["bind"] = _bind_code


def compose(sigma: Substitution, tau: Substitution) -> Substitution:
    """Kleisli composite: ``i -> bind(tau, sigma[i])``."""
    if sigma.target != tau.source:
        raise SortError("substitutions do not compose")
    return Substitution(sigma.source, tau.target, tuple(bind(tau, t) for t in sigma.assign), tau.sig or sigma.sig)


# ---------------------------------------------------------------- via solve

class NotRationalError(ValueError):
    """The term has no finite equation-system presentation usable here."""


def bind_via_solve(sigma: Substitution, handle) -> CoTerm:
    """Substitution computed as the solution of one derived equation system.

    ``handle`` is a :class:`cocalc.bisim.RationalHandle` (or a coterm returned
    by :func:`cocalc.system.solve`).  The derived unknowns are triples
    ``(u, fresh, pattern)``: the source unknown ``u`` under the substitution
    sending position ``k`` either to a variable bound since the root
    (``("new", r)``, an index into ``fresh``) or to the root entry
    ``sigma[j]`` weakened past those variables (``("old", j)``).  Only finitely
    many triples exist, so the system is finite.  Variables substituted by
    ``sigma`` enter as embedded coterms.
    """
    es, root = _provenance(handle)
    sig = es.sig
    if tuple(es.decls[root][0]) != sigma.source:
        raise SortError("substitution source does not match the term's context")
    sigma = sigma.with_sig(sig)
    delta = sigma.target
    decls: dict = {}
    rhs: dict = {}
    todo = []

    def name_of(u, fresh, pattern):
        key = (u, fresh, pattern)
        if key not in decls:
            ctx = extend(delta, fresh)
            decls[key] = (ctx, es.decls[u][1])
            todo.append(key)
        return key

    def translate(pt, local_bound, fresh, pattern):
        # pt lives in local_bound ++ ctx(u); the output in local_bound ++ fresh ++ delta
        lb = len(local_bound)
        out_ctx = extend(extend(delta, fresh), local_bound)
        if isinstance(pt, PVar):
            i = pt.index
            if i < lb:
                return PVar(i)
            kind, j = pattern[i - lb]
            if kind == "new":
                return PVar(lb + j)
            return PEmbed(sigma.assign[j], ContextMorphism.weakening(extend(fresh, local_bound), delta))
        if isinstance(pt, PCon):
            ar = sig.arity(pt.op)
            return PCon(pt.op, tuple(translate(a, extend(local_bound, ba.bound), fresh, pattern)
                                     for a, ba in zip(pt.args, ar.args)))
        if isinstance(pt, PRef):
            # position k of the referenced unknown goes to local position rho(k)
            nf = len(fresh)
            used: list[int] = []
            targets = []
            for q in pt.rho.map:
                if q < lb:
                    targets.append(("local", q))
                else:
                    kind, j = pattern[q - lb]
                    targets.append(("local", lb + j) if kind == "new" else ("old", j))
            for kind, pos in targets:
                if kind == "local" and pos not in used:
                    used.append(pos)
            new_fresh = tuple(out_ctx[p] for p in used)
            new_pattern = tuple(("new", used.index(pos)) if kind == "local" else ("old", pos)
                                for kind, pos in targets)
            key = name_of(pt.name, new_fresh, new_pattern)
            rmap = tuple(used) + tuple(lb + nf + j for j in range(len(delta)))
            return PRef(key, ContextMorphism(extend(delta, new_fresh), out_ctx, rmap))
        raise NotRationalError("embedded coterms inside the system are not supported")

    start = name_of(root, (), tuple(("old", j) for j in range(len(sigma.source))))
    while todo:
        key = todo.pop()
        u, fresh, pattern = key
        rhs[key] = translate(es.rhs[u], (), fresh, pattern)
    derived = EquationSystem(sig, decls, rhs)
    return solve(derived)[start]


def _provenance(handle):
    if isinstance(handle, CoTerm):
        if handle.provenance is None:
            raise NotRationalError("term was not produced by solve()")
        return handle.provenance
    return handle.system, handle.unknown


# ---------------------------------------------------------------- finite oracle

def fin_weaken(ft: FinTerm, bound: Sequence[Sort], cutoff: int = 0) -> FinTerm:
    """Shift free variables (index >= cutoff) of a finite term by ``len(bound)``."""
    n = len(bound)
    ctx = ft.ctx[:cutoff] + tuple(bound) + ft.ctx[cutoff:]
    node = ft.node
    if isinstance(node, Var):
        i = node.index
        return FinTerm(ft.sig, ctx, ft.sort, Var(i + n if i >= cutoff else i))
    ar = ft.sig.arity(node.op)
    args = tuple(fin_weaken(a, bound, cutoff + len(ba.bound)) for a, ba in zip(node.args, ar.args))
    return FinTerm(ft.sig, ctx, ft.sort, Con(node.op, args))


def fin_lift(assign: Sequence[FinTerm], target: Sequence[Sort], bound: Sequence[Sort], sig) -> tuple:
    k = len(bound)
    new_target = tuple(bound) + tuple(target)
    fresh = tuple(FinTerm(sig, new_target, bound[i], Var(i)) for i in range(k))
    return fresh + tuple(fin_weaken(a, bound) for a in assign), new_target


def fin_bind(assign: Sequence[FinTerm], target: Sequence[Sort], ft: FinTerm) -> FinTerm:
    """Structural substitution on finite terms (independent of the coterm code)."""
    node = ft.node
    if isinstance(node, Var):
        return assign[node.index]
    ar = ft.sig.arity(node.op)
    args = []
    for a, ba in zip(node.args, ar.args):
        sub, tgt = fin_lift(assign, target, ba.bound, ft.sig)
        args.append(fin_bind(sub, tgt, a))
    return FinTerm(ft.sig, tuple(target), ft.sort, Con(node.op, tuple(args)))
