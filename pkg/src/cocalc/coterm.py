"""Lazily unfolded, well-scoped coinductive terms.

Contexts are tuples of sorts with position 0 the most recently bound
variable; variables are de Bruijn positions into them.  A :class:`CoTerm`
carries its context and sort and a suspended one-step unfolding that is
forced at most once.

Derived coterms (renamings here, substitutions in :mod:`cocalc.subst`) are
memoized on the identity of their operands so that unfolding a cyclic input
yields a cyclic output instead of an ever-growing tree.  Memo tables hold
their values weakly; each value keeps its operands alive, so keys built from
``id()`` stay valid for as long as the entry exists.
"""
from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Sequence

from .signature import Op, Signature, Sort, format_sort

Context = tuple


class SortError(Exception):
    """A term, layer or equation violates the sorting rules."""


def extend(ctx: Sequence[Sort], bound: Sequence[Sort]) -> Context:
    """Prepend a binder list: ``bound[0]`` becomes position 0."""
    return tuple(bound) + tuple(ctx)


def fmt_ctx(ctx: Sequence[Sort]) -> str:
    return "[" + ", ".join(format_sort(s) for s in ctx) + "]"


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Con:
    op: Op
    args: tuple


Node = Any  # Var | Con


class _CutMarker:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "CUT"

    def __reduce__(self):
        return (_CutMarker, ())


CUT = _CutMarker()


# ---------------------------------------------------------------- renamings

@dataclass(frozen=True)
class ContextMorphism:
    """A sort-preserving map from positions of ``source`` to positions of ``target``."""

    source: Context
    target: Context
    map: tuple[int, ...]

    def __post_init__(self):
        if len(self.map) != len(self.source):
            raise SortError(f"renaming has {len(self.map)} entries for a context of length {len(self.source)}")
        for i, j in enumerate(self.map):
            if not 0 <= j < len(self.target):
                raise SortError(f"renaming sends {i} outside the target context")
            if self.target[j] != self.source[i]:
                raise SortError(
                    f"renaming sends {i} : {format_sort(self.source[i])} to {j} : {format_sort(self.target[j])}")

    def __call__(self, i: int) -> int:
        return self.map[i]

    @classmethod
    def identity(cls, ctx: Sequence[Sort]) -> "ContextMorphism":
        ctx = tuple(ctx)
        return cls(ctx, ctx, tuple(range(len(ctx))))

    @classmethod
    def weakening(cls, bound: Sequence[Sort], ctx: Sequence[Sort]) -> "ContextMorphism":
        """The inclusion ``ctx -> bound ++ ctx``."""
        ctx, k = tuple(ctx), len(bound)
        return cls(ctx, extend(ctx, bound), tuple(range(k, k + len(ctx))))

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and self.map == tuple(range(len(self.source)))

    def then(self, other: "ContextMorphism") -> "ContextMorphism":
        """Diagrammatic composite: first ``self``, then ``other``."""
        if self.target != other.source:
            raise SortError("renamings do not compose")
        return ContextMorphism(self.source, other.target, tuple(other.map[j] for j in self.map))

    def lift(self, bound: Sequence[Sort]) -> "ContextMorphism":
        """Extend to ``bound ++ source -> bound ++ target``, fixing the fresh positions."""
        k = len(bound)
        if not k:
            return self
        return ContextMorphism(extend(self.source, bound), extend(self.target, bound),
                               tuple(range(k)) + tuple(j + k for j in self.map))


# ---------------------------------------------------------------- coterms

_ALLOC = threading.Lock()


class CoTerm:
    """A coterm: context, sort and a memoized one-step unfolding.

    ``origin`` records how a derived coterm was made (``("rename", rho, t)``,
    ``("bind", sigma, t)``, ...) and keeps its operands alive.
    """

    __slots__ = ("sig", "ctx", "sort", "_thunk", "_node", "_lock", "origin", "provenance", "_code",
                 "__weakref__")

    def __init__(self, sig: Signature, ctx: Sequence[Sort], sort: Sort,
                 thunk: Callable[[], Node] | None = None, node: Node | None = None,
                 origin: tuple | None = None):
        self.sig = sig
        self.ctx = tuple(ctx)
        self.sort = sort
        self._thunk = thunk
        self._node = node
        self._lock = None
        self.origin = origin
        self.provenance = None
        self._code = None

    @property
    def forced(self) -> bool:
        return self._node is not None

    def out(self) -> Node:
        node = self._node
        if node is not None:
            return node
        with _ALLOC:
            lock = self._lock
            if lock is None:
                lock = self._lock = threading.RLock()
        with lock:
            if self._node is None:
                self._node = self._thunk()
                self._thunk = None
            self._lock = None
            return self._node

    def __repr__(self):
        state = self._node if self._node is not None else "<unforced>"
        return f"CoTerm({fmt_ctx(self.ctx)} ⊢ {format_sort(self.sort)}: {state})"


def out(t: CoTerm) -> Node:
    return t.out()


class _Memo:
    """Weak-valued memo table guarded by a lock."""

    def __init__(self):
        self._table: weakref.WeakValueDictionary = weakref.WeakValueDictionary()
        self._lock = threading.Lock()

    def get_or_make(self, key: Hashable, make: Callable[[], CoTerm]) -> CoTerm:
        with self._lock:
            hit = self._table.get(key)
        if hit is not None:
            return hit
        value = make()
        with self._lock:
            return self._table.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._table.clear()

    def __len__(self):
        return len(self._table)


_VARS = _Memo()
_RENAMES = _Memo()


def var(sig: Signature, ctx: Sequence[Sort], i: int) -> CoTerm:
    ctx = tuple(ctx)
    if not 0 <= i < len(ctx):
        raise SortError(f"variable {i} out of range in context {fmt_ctx(ctx)}")
    return _VARS.get_or_make((id(sig), ctx, i), lambda: CoTerm(sig, ctx, ctx[i], node=Var(i)))


def _host_context(sig: Signature, op: Op, args: Sequence, ctx):
    ar = sig.arity(op)
    if len(args) != len(ar.args):
        raise SortError(f"{op} expects {len(ar.args)} arguments, got {len(args)}")
    if ctx is None:
        if not args:
            raise SortError(f"nullary {op} needs an explicit context")
        k = len(ar.args[0].bound)
        ctx = args[0].ctx[k:]
    return ar, tuple(ctx)


def _check_args(sig: Signature, op: Op, ar, ctx: Context, args: Sequence, where: str = "") -> None:
    for j, (a, ba) in enumerate(zip(args, ar.args)):
        if a.sig != sig:
            raise SortError(f"{where}argument {j} of {op} belongs to another signature")
        want = extend(ctx, ba.bound)
        if a.ctx != want:
            raise SortError(f"{where}argument {j} of {op}: context {fmt_ctx(a.ctx)}, expected {fmt_ctx(want)}")
        if a.sort != ba.sort:
            raise SortError(
                f"{where}argument {j} of {op}: sort {format_sort(a.sort)}, expected {format_sort(ba.sort)}")


def con(sig: Signature, op: Op, args: Sequence[CoTerm], ctx: Sequence[Sort] | None = None) -> CoTerm:
    """Apply a constructor.  ``ctx`` is required only when it cannot be read off the arguments."""
    ar, ctx = _host_context(sig, op, args, ctx)
    _check_args(sig, op, ar, ctx, args)
    return CoTerm(sig, ctx, ar.target, node=Con(op, tuple(args)))


def check_node(t: CoTerm, node: Node) -> None:
    """Raise :class:`SortError` unless ``node`` is a valid layer for ``t``."""
    if isinstance(node, Var):
        if not 0 <= node.index < len(t.ctx):
            raise SortError(f"variable {node.index} out of range in {fmt_ctx(t.ctx)}")
        if t.ctx[node.index] != t.sort:
            raise SortError(f"variable {node.index} has sort {format_sort(t.ctx[node.index])}, "
                            f"expected {format_sort(t.sort)}")
        return
    ar = t.sig.arity(node.op)
    if ar.target != t.sort:
        raise SortError(f"{node.op} builds {format_sort(ar.target)}, expected {format_sort(t.sort)}")
    if len(node.args) != len(ar.args):
        raise SortError(f"{node.op} expects {len(ar.args)} arguments, got {len(node.args)}")
    _check_args(t.sig, node.op, ar, t.ctx, node.args)


# ---------------------------------------------------------------- behaviour codes

# origin tag -> function computing a code from the origin, or returning None
_CODERS: dict[str, Callable[[CoTerm], Any]] = {}


def code(t: CoTerm) -> tuple:
    """A pair ``(base, env)`` such that ``t`` behaves as the renaming by ``env``
    of any coterm with the same ``base``.

    ``env`` lists positions of ``t.ctx``.  Renamings compose into ``env`` and
    substitutions get structural bases (see :mod:`cocalc.subst`), so the
    subterms of a rational coterm have finitely many bases even when their
    contexts are all different.  Anything else is its own base.
    """
    c = t._code
    if c is None:
        node = t._node
        if isinstance(node, Var):
            c = (("var", t.sort), (node.index,))
        elif t.origin is not None and t.origin[0] in _CODERS:
            c = _CODERS[t.origin[0]](t)
        if c is None:
            c = (("node", id(t)), tuple(range(len(t.ctx))))
        t._code = c
    return c


def _rename_code(t: CoTerm):
    _, rho, a = t.origin
    base, env = code(a)
    return base, tuple(rho.map[p] for p in env)


_CODERS["rename"] = _rename_code


# ---------------------------------------------------------------- anamorphisms

def unfold_coterm(sig: Signature, ctx: Sequence[Sort], sort: Sort, seed: Any,
                  step: Callable[[Any], Node], share: bool = True) -> CoTerm:
    """Build the coterm generated from ``seed`` by ``step``.

    ``step(state)`` returns ``Var(i)`` or ``Con(op, children)`` where each
    child is either an existing :class:`CoTerm` or another state.  Child
    contexts and sorts follow from the arity.  Layers are sort-checked when
    forced; errors name the path of argument positions from the root.  With
    ``share``, equal hashable states reuse one coterm, so rational unfoldings
    come out cyclic.
    """
    cache: dict = {}

    def make(ctx, sort, state, path):
        key = None
        if share:
            try:
                key = (ctx, sort, state)
                hit = cache.get(key)
            except TypeError:
                key = hit = None
            if hit is not None:
                return hit
        t = CoTerm(sig, ctx, sort)
        t._thunk = lambda: layer(t, state, path)
        if key is not None:
            cache[key] = t
        return t

    def layer(t, state, path):
        lay = step(state)
        try:
            if isinstance(lay, Var):
                check_node(t, lay)
                return lay
            if not isinstance(lay, Con):
                raise SortError(f"step returned {lay!r}, not a Var or Con layer")
            ar = sig.arity(lay.op)
            if ar.target != t.sort or len(lay.args) != len(ar.args):
                check_node(t, lay)
            kids = []
            for j, (c, ba) in enumerate(zip(lay.args, ar.args)):
                cctx = extend(t.ctx, ba.bound)
                if isinstance(c, CoTerm):
                    if c.ctx != cctx or c.sort != ba.sort:
                        raise SortError(f"argument {j} of {lay.op} has the wrong context or sort")
                    kids.append(c)
                else:
                    kids.append(make(cctx, ba.sort, c, path + (j,)))
            return Con(lay.op, tuple(kids))
        except SortError as e:
            raise SortError(f"at path {list(path)}: {e}") from None

    return make(tuple(ctx), sort, seed, ())


# ---------------------------------------------------------------- observation

def truncate(t: CoTerm, d: int):
    """Finite prefix: ``Var`` leaves, ``Con(op, subtrees)``, and ``CUT`` for constructors at depth ``d``."""
    node = t.out()
    if isinstance(node, Var):
        return node
    if d <= 0:
        return CUT
    return Con(node.op, tuple(truncate(a, d - 1) for a in node.args))


# ---------------------------------------------------------------- renaming

def rename(rho: ContextMorphism, t: CoTerm) -> CoTerm:
    """Apply a context renaming lazily.  Nested renamings are fused."""
    if t.ctx != rho.source:
        raise SortError(f"cannot rename: term context {fmt_ctx(t.ctx)} is not {fmt_ctx(rho.source)}")
    if t.origin is not None and t.origin[0] == "rename":
        rho = t.origin[1].then(rho)
        t = t.origin[2]
    if rho.is_identity:
        return t
    node = t._node
    if isinstance(node, Var):
        return var(t.sig, rho.target, rho.map[node.index])
    return _RENAMES.get_or_make((rho.target, rho.map, id(t)), lambda: _rename_node(rho, t))


def _rename_node(rho: ContextMorphism, t: CoTerm) -> CoTerm:
    def step():
        node = t.out()
        if isinstance(node, Var):
            return Var(rho.map[node.index])
        ar = t.sig.arity(node.op)
        return Con(node.op, tuple(rename(rho.lift(ba.bound), a) for a, ba in zip(node.args, ar.args)))

    return CoTerm(t.sig, rho.target, t.sort, thunk=step, origin=("rename", rho, t))


def weaken(bound: Sequence[Sort], t: CoTerm) -> CoTerm:
    """View ``t`` in the context ``bound ++ t.ctx``."""
    if not bound:
        return t
    return rename(ContextMorphism.weakening(bound, t.ctx), t)


# ---------------------------------------------------------------- finite terms

@dataclass(frozen=True)
class FinTerm:
    """A finite, well-sorted term: ``node`` is ``Var(i)`` or ``Con(op, FinTerm args)``."""

    sig: Signature
    ctx: Context
    sort: Sort
    node: Node

    def height(self) -> int:
        """Number of constructor layers on the longest branch."""
        if isinstance(self.node, Var):
            return 0
        return 1 + max((a.height() for a in self.node.args), default=0)


def fvar(sig: Signature, ctx: Sequence[Sort], i: int) -> FinTerm:
    ctx = tuple(ctx)
    if not 0 <= i < len(ctx):
        raise SortError(f"variable {i} out of range in context {fmt_ctx(ctx)}")
    return FinTerm(sig, ctx, ctx[i], Var(i))


def fcon(sig: Signature, op: Op, args: Sequence[FinTerm], ctx: Sequence[Sort] | None = None) -> FinTerm:
    ar, ctx = _host_context(sig, op, args, ctx)
    _check_args(sig, op, ar, ctx, args)
    return FinTerm(sig, ctx, ar.target, Con(op, tuple(args)))


def embed(ft: FinTerm) -> CoTerm:
    """The coterm whose unfolding replays ``ft``."""
    memo: dict[int, CoTerm] = {}

    def go(f: FinTerm) -> CoTerm:
        hit = memo.get(id(f))
        if hit is not None:
            return hit
        if isinstance(f.node, Var):
            t = var(f.sig, f.ctx, f.node.index)
        else:
            node = f.node
            t = CoTerm(f.sig, f.ctx, f.sort, thunk=lambda: Con(node.op, tuple(go(a) for a in node.args)))
        memo[id(f)] = t
        return t

    return go(ft)


def clear_caches() -> None:
    _VARS.clear()
    _RENAMES.clear()
