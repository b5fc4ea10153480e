"""Equality of coterms: bounded bisimilarity, exact bisimilarity of rational
coterms, and rendering of finite prefixes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .coterm import CUT, CoTerm, Var, code, truncate
from .signature import Signature
from .system import EquationSystem, PEmbed, PRef, PVar, solve


def bisim_to_depth(a: CoTerm, b: CoTerm, d: int) -> bool:
    """True iff ``a`` and ``b`` agree on every node above depth ``d``.

    Constructors count as one layer each; a node at depth ``d`` or below is
    never inspected.  A state is a pair of coterms together with where their
    variables point in the context observed so far.  States are identified by
    the behaviour codes of both sides (:func:`cocalc.coterm.code`) with the
    two environments compressed jointly, and each is expanded only at the
    first (shallowest) level it appears, which is also where it has the most
    depth left to check.  Rational inputs therefore cost time bounded by
    their number of distinct states, not by the size of the unfolded tree.
    """
    if a.ctx != b.ctx or a.sort != b.sort or a.sig != b.sig:
        return False
    n = len(a.ctx)
    frontier = [(a, tuple(range(n)), b, tuple(range(n)))]
    seen = set()
    for _ in range(d):
        nxt = []
        for x, ex, y, ey in frontier:
            bx, cx = code(x)
            by, cy = code(y)
            ox = tuple(ex[p] for p in cx)
            oy = tuple(ey[p] for p in cy)
            if bx == by and ox == oy:
                continue
            key = (bx, by) + _canon(ox, oy)
            if key in seen:
                continue
            seen.add(key)
            nx, ny = x.out(), y.out()
            if isinstance(nx, Var) or isinstance(ny, Var):
                if not (isinstance(nx, Var) and isinstance(ny, Var) and ex[nx.index] == ey[ny.index]):
                    return False
                continue
            if nx.op != ny.op:
                return False
            for p, q, ba in zip(nx.args, ny.args, x.sig.arity(nx.op).args):
                k = len(ba.bound)
                fresh = tuple(range(k))
                nxt.append((p, fresh + tuple(e + k for e in ex), q, fresh + tuple(e + k for e in ey)))
        if not nxt:
            return True
        frontier = nxt
    return True


def first_difference(a: CoTerm, b: CoTerm, limit: int) -> int | None:
    """Smallest ``d <= limit`` with ``bisim_to_depth(a, b, d)`` false, else None."""
    lo, hi = 0, limit
    if bisim_to_depth(a, b, limit):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if bisim_to_depth(a, b, mid):
            lo = mid + 1
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------- rational

class ProvenanceError(ValueError):
    """A rational handle's equation system does not re-solve."""


@dataclass(frozen=True)
class RationalHandle:
    term: CoTerm
    system: EquationSystem
    unknown: Hashable

    @classmethod
    def of(cls, t: CoTerm) -> "RationalHandle":
        if t.provenance is None:
            raise ProvenanceError("coterm has no equation-system provenance")
        es, name = t.provenance
        return cls(t, es, name)

    @classmethod
    def solve(cls, es: EquationSystem, name: Hashable) -> "RationalHandle":
        return cls(solve(es)[name], es, name)

    def resolve(self) -> CoTerm:
        try:
            return solve(self.system)[self.unknown]
        except Exception as e:
            raise ProvenanceError(f"provenance does not re-solve: {e}") from e


@dataclass
class RationalResult:
    equal: bool
    states: int
    level: int  # BFS level of the first mismatch, or levels explored

    def __bool__(self):
        return self.equal


def _resolve(es, pt, env):
    """Follow references and embedded solutions down to a variable or constructor."""
    seen = 0
    while True:
        if isinstance(pt, PRef):
            env = tuple(env[j] for j in pt.rho.map)
            pt = es.rhs[pt.name]
        elif isinstance(pt, PEmbed):
            t = pt.term
            env = tuple(env[j] for j in pt.rho.map)
            if t.provenance is not None:
                es, name = t.provenance
                pt = es.rhs[name]
            elif isinstance(t._node, Var):
                return es, PVar(t._node.index), env
            else:
                raise ProvenanceError("embedded coterm has no equation-system provenance")
        else:
            return es, pt, env
        seen += 1
        if seen > 100000:
            raise ProvenanceError("reference chain does not reach a constructor")


def _canon(env_a, env_b):
    used = sorted(set(env_a) | set(env_b))
    rank = {p: r for r, p in enumerate(used)}
    return tuple(rank[p] for p in env_a), tuple(rank[p] for p in env_b)


def bisim_rational(a: RationalHandle, b: RationalHandle) -> RationalResult:
    """Decide bisimilarity of two rational coterms at every depth.

    Explores pairs of positions in the two equation systems breadth-first.
    A state records, for each side, where its pre-term's local variables
    point in the shared observed context; that context is compressed to the
    positions either side can still mention, which keeps the state space
    finite even when cycles pass under binders.
    """
    for h in (a, b):
        try:
            h.system.check()
        except Exception as e:
            raise ProvenanceError(f"provenance does not re-solve: {e}") from e
    if a.term.ctx != b.term.ctx or a.term.sort != b.term.sort or a.system.sig != b.system.sig:
        return RationalResult(False, 0, 0)
    sig: Signature = a.system.sig
    n = len(a.term.ctx)
    start = (a.system, a.system.rhs[a.unknown], tuple(range(n)),
             b.system, b.system.rhs[b.unknown], tuple(range(n)))
    seen = set()
    frontier = [start]
    level = 0
    while frontier:
        nxt = []
        for sa, pa, ea, sb, pb, eb in frontier:
            sa, pa, ea = _resolve(sa, pa, ea)
            sb, pb, eb = _resolve(sb, pb, eb)
            ea, eb = _canon(ea, eb)
            key = (id(sa), id(pa), ea, id(sb), id(pb), eb)
            if key in seen:
                continue
            seen.add(key)
            if isinstance(pa, PVar) or isinstance(pb, PVar):
                if not (isinstance(pa, PVar) and isinstance(pb, PVar) and ea[pa.index] == eb[pb.index]):
                    return RationalResult(False, len(seen), level)
                continue
            if pa.op != pb.op:
                return RationalResult(False, len(seen), level)
            ar = sig.arity(pa.op)
            for ca, cb, ba in zip(pa.args, pb.args, ar.args):
                k = len(ba.bound)
                fresh = tuple(range(k))
                nxt.append((sa, ca, fresh + tuple(e + k for e in ea),
                            sb, cb, fresh + tuple(e + k for e in eb)))
        frontier = nxt
        level += 1
    return RationalResult(True, len(seen), level)


# ---------------------------------------------------------------- pretty

def pretty(t: CoTerm, d: int, style: str = "named", names: Sequence[str] | None = None) -> str:
    """Render the depth-``d`` truncation of ``t``.  Cuts print as ``…``.

    ``names`` labels the context of ``t``, outermost variable first; by
    default position ``i`` of an ``n``-element context is ``x{n-1-i}``.
    """
    return pretty_tree(t.sig, truncate(t, d), len(t.ctx), style, names)


def pretty_tree(sig: Signature, tree, ctx_len: int, style: str = "named",
                names: Sequence[str] | None = None) -> str:
    if style == "debruijn":
        return _debruijn(tree)
    if style != "named":
        raise ValueError(f"unknown style {style!r}")
    if names is None:
        names = [f"x{i}" for i in range(ctx_len)]
    if len(names) != ctx_len:
        raise ValueError(f"{len(names)} names for a context of length {ctx_len}")
    return _named(sig, tree, list(reversed(names)), frozenset(names))[0]


def _debruijn(tree) -> str:
    if tree is CUT:
        return "…"
    if isinstance(tree, Var):
        return f"#{tree.index}"
    if not tree.args:
        return str(tree.op)
    return f"{tree.op}(" + ", ".join(_debruijn(a) for a in tree.args) + ")"


def _named(sig: Signature, tree, names: list[str], taken: frozenset) -> tuple[str, int]:
    if tree is CUT:
        return "…", 0
    if isinstance(tree, Var):
        return names[tree.index], 0
    ar = sig.arity(tree.op)
    rendered, binders = [], []
    for a, ba in zip(tree.args, ar.args):
        level = len(names)
        k = len(ba.bound)
        fresh = [_fresh(level + k - 1 - i, taken) for i in range(k)]
        binders.append(fresh)
        rendered.append(_named(sig, a, fresh + names, taken))
    custom = sig.render(tree.op, rendered, binders)
    if custom is not None:
        return custom
    if not rendered:
        return str(tree.op), 0
    parts = []
    for (text, _), fresh in zip(rendered, binders):
        parts.append((" ".join(fresh) + ". " + text) if fresh else text)
    return f"{tree.op}(" + ", ".join(parts) + ")", 0


def _fresh(level: int, taken: frozenset) -> str:
    name = f"x{level}"
    while name in taken:
        name += "'"
    return name
