"""Multi-sorted binding signatures.

A signature is a (possibly infinite) set of constructor indices together with
an arity function.  Each arity lists, per argument, the sorts of the variables
bound in that argument and the argument's own sort, plus the sort of the
constructed term.

Sorts are plain hashable values:

* atoms and enumeration elements are ``str``,
* simple types are built from atoms with :class:`Arrow`,
* typed-forest sorts are pairs ``(type, category)`` with category in
  ``{"v", "t", "e"}``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence

Sort = Hashable


class SignatureError(Exception):
    """Unknown constructor index or malformed arity."""


class SortSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int = 0):
        super().__init__(f"{msg} (at offset {pos})")
        self.pos = pos


# ---------------------------------------------------------------- sorts

@dataclass(frozen=True)
class Arrow:
    src: Sort
    tgt: Sort

    def __str__(self) -> str:
        return format_sort(self)


def arrows(*sorts: Sort) -> Sort:
    """``arrows(a, b, c)`` is ``a -> (b -> c)``."""
    out = sorts[-1]
    for s in reversed(sorts[:-1]):
        out = Arrow(s, out)
    return out


def spine(sort: Sort) -> tuple[tuple[Sort, ...], Sort]:
    """Split ``B1 -> ... -> Bk -> p`` into ``((B1, ..., Bk), p)``."""
    args = []
    while isinstance(sort, Arrow):
        args.append(sort.src)
        sort = sort.tgt
    return tuple(args), sort


def format_sort(s: Sort) -> str:
    if isinstance(s, Arrow):
        src = format_sort(s.src)
        if isinstance(s.src, Arrow):
            src = f"({src})"
        return f"{src}->{format_sort(s.tgt)}"
    if isinstance(s, tuple) and len(s) == 2:
        return f"<{format_sort(s[0])},{format_sort(s[1])}>"
    return str(s)


_SORT_TOKEN = re.compile(r"\s*(->|[()<>,]|[A-Za-z0-9_']+)")


def parse_sort(text: str) -> Sort:
    """Inverse of :func:`format_sort` (whitespace tolerant)."""
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        m = _SORT_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise SortSyntaxError(f"unexpected character {text[pos]!r} in sort", pos)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    sort, i = _parse_arrow(toks, 0, text)
    if i != len(toks):
        raise SortSyntaxError(f"trailing input {toks[i][0]!r} in sort", toks[i][1])
    return sort


def _parse_arrow(toks, i, text):
    left, i = _parse_prim(toks, i, text)
    if i < len(toks) and toks[i][0] == "->":
        right, i = _parse_arrow(toks, i + 1, text)
        return Arrow(left, right), i
    return left, i


def _parse_prim(toks, i, text):
    if i >= len(toks):
        raise SortSyntaxError("unexpected end of sort", len(text))
    tok, pos = toks[i]
    if tok == "(":
        s, i = _parse_arrow(toks, i + 1, text)
        _expect(toks, i, ")", text)
        return s, i + 1
    if tok == "<":
        a, i = _parse_arrow(toks, i + 1, text)
        _expect(toks, i, ",", text)
        b, i = _parse_arrow(toks, i + 1, text)
        _expect(toks, i, ">", text)
        return (a, b), i + 1
    if tok in ("->", ")", ">", ","):
        raise SortSyntaxError(f"unexpected {tok!r} in sort", pos)
    return tok, i + 1


def _expect(toks, i, want, text):
    if i >= len(toks) or toks[i][0] != want:
        pos = toks[i][1] if i < len(toks) else len(text)
        raise SortSyntaxError(f"expected {want!r} in sort", pos)


# ---------------------------------------------------------------- arities

@dataclass(frozen=True)
class BinderArity:
    bound: tuple[Sort, ...]
    sort: Sort

    def __str__(self) -> str:
        if not self.bound:
            return format_sort(self.sort)
        return "[" + " ".join(format_sort(s) for s in self.bound) + "]" + format_sort(self.sort)


@dataclass(frozen=True)
class Arity:
    args: tuple[BinderArity, ...]
    target: Sort

    def sorts(self) -> Iterable[Sort]:
        for a in self.args:
            yield from a.bound
            yield a.sort
        yield self.target

    def __str__(self) -> str:
        return ", ".join(str(a) for a in self.args) + (" " if self.args else "") + "-> " + format_sort(self.target)


def arg(sort: Sort, *bound: Sort) -> BinderArity:
    return BinderArity(tuple(bound), sort)


def _format_param(p: Any) -> str:
    if isinstance(p, tuple):
        return "[" + ",".join(_format_param(x) for x in p) + "]"
    if isinstance(p, int):
        return str(p)
    return format_sort(p)


@dataclass(frozen=True)
class Op:
    """A constructor index: a name plus parameters (sorts, naturals, lists)."""

    name: str
    params: tuple = ()

    def __str__(self) -> str:
        if not self.params:
            return self.name
        return self.name + "{" + ",".join(_format_param(p) for p in self.params) + "}"


# ---------------------------------------------------------------- signatures

class Signature:
    """Base class: subclasses provide ``_arity`` and ``is_sort``.

    Arity lookups are cached per index, so repeated queries return the very
    same object.
    """

    name = "signature"

    def __init__(self) -> None:
        self._arity_cache: dict[Op, Arity] = {}

    @property
    def key(self) -> Hashable:
        return (type(self).__name__, self.name)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Signature) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"<Signature {self.name}>"

    def arity(self, op: Op) -> Arity:
        try:
            return self._arity_cache[op]
        except KeyError:
            pass
        except TypeError:
            raise SignatureError(f"unhashable constructor index {op!r}") from None
        ar = self._arity(op)
        self._arity_cache[op] = ar
        return ar

    def _arity(self, op: Op) -> Arity:  # pragma: no cover - abstract
        raise NotImplementedError

    def is_sort(self, s: Sort) -> bool:  # pragma: no cover - abstract
        raise NotImplementedError

    def probe(self) -> tuple[Op, ...]:
        """A finite default probe set used by validation and random generation."""
        return ()

    def sort_pool(self) -> tuple[Sort, ...]:
        """Sorts used to build random contexts and unknowns."""
        return ()

    def var_only(self, s: Sort) -> bool:
        """True when no constructor targets ``s`` (only variables inhabit it)."""
        return False

    def candidates(self, ctx: Sequence[Sort], sort: Sort) -> list[Op]:
        """Constructors producing ``sort`` that make sense in ``ctx`` (for generators)."""
        return [op for op in self.probe() if self.arity(op).target == sort]

    def resolve_op(self, name: str, params: list[str] | None, nargs: int,
                   expected: Sort, arg_sorts: Sequence[Sort | None]) -> Op:
        """Turn surface syntax ``name{params}`` into an index (term DSL hook)."""
        op = Op(name, tuple(params or ()))
        try:
            self.arity(op)
        except SignatureError:
            raise SignatureError(f"unknown constructor {name!r}") from None
        return op

    def render(self, op: Op, args: list[tuple[str, int]], binders: list[list[str]]) -> tuple[str, int] | None:
        """Optional readable rendering for the named pretty-printer."""
        return None


def _check_sort_text(sig: Signature, text: str) -> Sort:
    s = parse_sort(text)
    if not sig.is_sort(s):
        raise SignatureError(f"{text!r} is not a sort of {sig.name}")
    return s


def _nat(text: str) -> int:
    if not text.isdigit():
        raise SignatureError(f"expected a natural number, got {text!r}")
    return int(text)


def split_params(text: str) -> list[str]:
    """Split ``a,[b,c],d`` at top-level commas."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([<":
            depth += 1
        elif ch in ")]>" and not (ch == ">" and cur and cur[-1] == "-"):
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip() or out:
        out.append("".join(cur).strip())
    return out


def _paren(text: str, prec: int, limit: int) -> str:
    return text if prec <= limit else f"({text})"


class SimplyTypedSignature(Signature):
    """STLC: ``app{s,t}`` and ``lam{s,t}`` for all simple types s, t."""

    name = "stlc"

    def __init__(self, atoms: Sequence[str] = ("0",)):
        super().__init__()
        self.atoms = tuple(atoms)

    @property
    def key(self):
        return ("stlc", self.atoms)

    def is_sort(self, s: Sort) -> bool:
        if isinstance(s, Arrow):
            return self.is_sort(s.src) and self.is_sort(s.tgt)
        return isinstance(s, str) and s in self.atoms

    def _arity(self, op: Op) -> Arity:
        if op.name not in ("app", "lam") or len(op.params) != 2:
            raise SignatureError(f"unknown constructor {op}")
        s, t = op.params
        if op.name == "app":
            return Arity((arg(Arrow(s, t)), arg(s)), t)
        return Arity((arg(t, s),), Arrow(s, t))

    def sort_pool(self):
        base = list(self.atoms)
        small = [Arrow(a, b) for a in base for b in base]
        return tuple(base + small + [Arrow(Arrow(a, a), a) for a in base])

    def probe(self):
        pool = self.sort_pool()[: 2 * len(self.atoms) + 1]
        return tuple(Op(n, (s, t)) for n in ("app", "lam") for s in pool for t in pool)

    def candidates(self, ctx, sort):
        out = []
        if isinstance(sort, Arrow):
            out.append(Op("lam", (sort.src, sort.tgt)))
        heads = {s for s in ctx if isinstance(s, Arrow) and s.tgt == sort}
        for s in sorted(heads, key=format_sort):
            out.append(Op("app", (s.src, sort)))
        return out

    def resolve_op(self, name, params, nargs, expected, arg_sorts):
        ps = params or []
        if name == "lam":
            if ps:
                s, t = (_check_sort_text(self, p) for p in ps)
            elif isinstance(expected, Arrow):
                s, t = expected.src, expected.tgt
            else:
                raise SignatureError(f"lam cannot build sort {format_sort(expected)}")
            return Op("lam", (s, t))
        if name == "app":
            if len(ps) == 2:
                return Op("app", tuple(_check_sort_text(self, p) for p in ps))
            if len(ps) == 1:
                return Op("app", (_check_sort_text(self, ps[0]), expected))
            fun = arg_sorts[0] if arg_sorts else None
            if isinstance(fun, Arrow):
                return Op("app", (fun.src, fun.tgt))
            if len(arg_sorts) > 1 and arg_sorts[1] is not None:
                return Op("app", (arg_sorts[1], expected))
            raise SignatureError("app needs its argument sort: write app{s}")
        raise SignatureError(f"unknown constructor {name!r}")

    def render(self, op, args, binders):
        if op.name == "lam":
            body, _ = args[0]
            return f"λ{binders[0][0]}. {body}", 2
        (f, fp), (a, ap) = args
        return f"{_paren(f, fp, 1)} {_paren(a, ap, 0)}", 1


FOREST_CATEGORIES = ("v", "t", "e")


class UntypedForestSignature(Signature):
    """Sorts v, t, e; ``lam``, ``sum{n}`` and ``tup{k}``."""

    name = "untyped-forests"

    @property
    def key(self):
        return ("untyped-forests",)

    def is_sort(self, s):
        return isinstance(s, str) and s in FOREST_CATEGORIES

    def _arity(self, op):
        if op.name == "lam" and not op.params:
            return Arity((arg("t", "v"),), "t")
        if op.name in ("sum", "tup") and len(op.params) == 1 and _is_nat(op.params[0]):
            n = op.params[0]
            if op.name == "sum":
                return Arity(tuple(arg("e") for _ in range(n)), "t")
            return Arity((arg("v"),) + tuple(arg("t") for _ in range(n)), "e")
        raise SignatureError(f"unknown constructor {op}")

    def sort_pool(self):
        return FOREST_CATEGORIES

    def var_only(self, s):
        return s == "v"

    def probe(self):
        return (Op("lam"),) + tuple(Op("sum", (n,)) for n in range(3)) + tuple(Op("tup", (k,)) for k in range(3))

    def candidates(self, ctx, sort):
        if sort == "t":
            return [Op("lam"), Op("sum", (0,)), Op("sum", (1,)), Op("sum", (2,))]
        if sort == "e" and "v" in ctx:
            return [Op("tup", (0,)), Op("tup", (1,)), Op("tup", (2,))]
        return []

    def resolve_op(self, name, params, nargs, expected, arg_sorts):
        if name == "lam":
            return Op("lam")
        if name == "sum":
            return Op("sum", (_nat(params[0]) if params else nargs,))
        if name == "tup":
            return Op("tup", (_nat(params[0]) if params else max(nargs - 1, 0),))
        raise SignatureError(f"unknown constructor {name!r}")

    def render(self, op, args, binders):
        return _render_forest(op.name, args, binders)


def _render_forest(name, args, binders):
    if name == "lam":
        return f"λ{binders[0][0]}. {args[0][0]}", 2
    if name == "sum":
        return "Σ(" + ", ".join(a for a, _ in args) + ")", 0
    head = args[0][0]
    if len(args) == 1:
        return head, 0
    return head + "⟨" + ", ".join(a for a, _ in args[1:]) + "⟩", 0


def _is_nat(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 0


class TypedForestSignature(Signature):
    """Sorts are pairs (simple type, category).

    Indices: ``lam{s,t}``, ``sum{p,n}`` for an atom p, and
    ``tup{[B1,...,Bk],p}`` whose head variable has type ``B1->...->Bk->p``.
    """

    name = "typed-forests"

    def __init__(self, atoms: Sequence[str] = ("0",)):
        super().__init__()
        self.types = SimplyTypedSignature(atoms)
        self.atoms = self.types.atoms

    @property
    def key(self):
        return ("typed-forests", self.atoms)

    def is_sort(self, s):
        return (isinstance(s, tuple) and len(s) == 2 and s[1] in FOREST_CATEGORIES
                and self.types.is_sort(s[0]))

    def atotype(self, p: str) -> Sort:
        if p not in self.atoms:
            raise SignatureError(f"{p!r} is not an atom")
        return p

    def _arity(self, op):
        ps = op.params
        if op.name == "lam" and len(ps) == 2:
            s, t = ps
            return Arity((arg((t, "t"), (s, "v")),), (Arrow(s, t), "t"))
        if op.name == "sum" and len(ps) == 2 and _is_nat(ps[1]):
            p = self.atotype(ps[0])
            return Arity(tuple(arg((p, "e")) for _ in range(ps[1])), (p, "t"))
        if op.name == "tup" and len(ps) == 2 and isinstance(ps[0], tuple):
            bs, p = ps
            head = arrows(*bs, self.atotype(p))
            return Arity((arg((head, "v")),) + tuple(arg((b, "t")) for b in bs), (p, "e"))
        raise SignatureError(f"unknown constructor {op}")

    def sort_pool(self):
        return tuple((a, c) for a in self.types.sort_pool() for c in ("v", "t")) + tuple((p, "e") for p in self.atoms)

    def var_only(self, s):
        return isinstance(s, tuple) and s[1] == "v"

    def probe(self):
        pool = self.types.sort_pool()[:3]
        ops = [Op("lam", (s, t)) for s in pool for t in pool]
        ops += [Op("sum", (p, n)) for p in self.atoms for n in range(3)]
        for a in pool:
            bs, p = spine(a)
            ops.append(Op("tup", (bs, p)))
        return tuple(ops)

    def candidates(self, ctx, sort):
        typ, cat = sort
        if cat == "t":
            if isinstance(typ, Arrow):
                return [Op("lam", (typ.src, typ.tgt))]
            return [Op("sum", (typ, n)) for n in range(3)]
        if cat == "e":
            out = []
            for s in ctx:
                if isinstance(s, tuple) and s[1] == "v":
                    bs, p = spine(s[0])
                    if p == typ and Op("tup", (bs, p)) not in out:
                        out.append(Op("tup", (bs, p)))
            return out
        return []

    def resolve_op(self, name, params, nargs, expected, arg_sorts):
        typ = expected[0] if isinstance(expected, tuple) else None
        if name == "lam":
            if params:
                s, t = (_check_type(self, p) for p in params)
            elif isinstance(typ, Arrow):
                s, t = typ.src, typ.tgt
            else:
                raise SignatureError("lam needs an arrow sort")
            return Op("lam", (s, t))
        if name == "sum":
            if params:
                return Op("sum", (params[0], _nat(params[1]) if len(params) > 1 else nargs))
            return Op("sum", (typ, nargs))
        if name == "tup":
            if params:
                inner = params[0].strip()
                if not (inner.startswith("[") and inner.endswith("]")):
                    raise SignatureError("tup{[B1,...,Bk],p} expects a bracketed list")
                bs = tuple(_check_type(self, b) for b in split_params(inner[1:-1]))
                return Op("tup", (bs, params[1] if len(params) > 1 else typ))
            head = arg_sorts[0] if arg_sorts else None
            if isinstance(head, tuple) and head[1] == "v":
                bs, p = spine(head[0])
                return Op("tup", (bs, p))
            raise SignatureError("tup needs a variable head or explicit {[B1,...],p}")
        raise SignatureError(f"unknown constructor {name!r}")

    def render(self, op, args, binders):
        return _render_forest(op.name, args, binders)


def _check_type(sig: TypedForestSignature, text: str) -> Sort:
    s = parse_sort(text)
    if not sig.types.is_sort(s):
        raise SignatureError(f"{text!r} is not a simple type")
    return s


class FiniteSignature(Signature):
    """A finite signature over a declared enumeration of sorts (the DSL's model)."""

    def __init__(self, sorts: Sequence[str], ops: dict[str, Arity], name: str = "dsl"):
        super().__init__()
        self.sorts = tuple(sorts)
        self.ops = dict(ops)
        self.name = name

    @property
    def key(self):
        return ("finite", self.sorts, tuple(sorted((k, v) for k, v in self.ops.items())))

    def is_sort(self, s):
        return isinstance(s, str) and s in self.sorts

    def _arity(self, op):
        if op.params or op.name not in self.ops:
            raise SignatureError(f"unknown constructor {op}")
        return self.ops[op.name]

    def probe(self):
        return tuple(Op(n) for n in self.ops)

    def sort_pool(self):
        return self.sorts

    def var_only(self, s):
        return not any(a.target == s for a in self.ops.values())

    def candidates(self, ctx, sort):
        return [Op(n) for n, a in self.ops.items() if a.target == sort]

    def resolve_op(self, name, params, nargs, expected, arg_sorts):
        if params or name not in self.ops:
            raise SignatureError(f"unknown constructor {name!r}")
        return Op(name)


# ---------------------------------------------------------------- builtins

BUILTIN_NAMES = ("stlc", "untyped-forests", "typed-forests")


def builtin_signature(name: str, atoms: Sequence[str] = ("0",)) -> Signature:
    if name == "stlc":
        return SimplyTypedSignature(atoms)
    if name == "untyped-forests":
        return UntypedForestSignature()
    if name == "typed-forests":
        return TypedForestSignature(atoms)
    raise SignatureError(f"unknown built-in signature {name!r}")


# ---------------------------------------------------------------- validation

@dataclass
class ProbeResult:
    op: Op
    arity: Arity | None
    failures: list[str] = field(default_factory=list)


@dataclass
class ValidationReport:
    results: list[ProbeResult]

    @property
    def ok(self) -> bool:
        return all(not r.failures for r in self.results)

    def lines(self) -> list[str]:
        out = []
        for r in self.results:
            status = "ok" if not r.failures else "FAIL " + "; ".join(r.failures)
            ar = str(r.arity) if r.arity is not None else "?"
            out.append(f"{r.op} : {ar}  [{status}]")
        return out


def validate_signature(sig: Signature, probe: Iterable[Op] | None = None) -> ValidationReport:
    results = []
    for op in (sig.probe() if probe is None else probe):
        try:
            ar = sig.arity(op)
        except SignatureError as e:
            results.append(ProbeResult(op, None, [str(e)]))
            continue
        again = sig._arity(op)
        res = ProbeResult(op, ar)
        if again != ar:
            res.failures.append("arity is not a pure function")
        for s in ar.sorts():
            if not sig.is_sort(s):
                msg = f"undeclared sort {format_sort(s)}"
                if msg not in res.failures:
                    res.failures.append(msg)
        results.append(res)
    return ValidationReport(results)


# ---------------------------------------------------------------- DSL

class SignatureSyntaxError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


_DSL_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<comment>#[^\n]*)|(?P<arrow>->)|(?P<ident>[A-Za-z0-9_']+)|(?P<punct>[{};:,\[\]])")


def _tokenize(text: str):
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _DSL_TOKEN.match(text, pos)
        if not m:
            raise SignatureSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind not in ("ws", "comment"):
            toks.append((kind if kind != "punct" else val, val, line, col))
        for ch in val:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(("eof", "", line, col))
    return toks


class _SigParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise SignatureSyntaxError(f"expected {kind!r}, found {shown!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def keyword(self, word: str):
        tok = self.take("ident")
        if tok[1] != word:
            raise SignatureSyntaxError(f"expected {word!r}, found {tok[1]!r}", tok[2], tok[3])

    def parse(self) -> FiniteSignature:
        self.keyword("sorts")
        self.take("{")
        sorts: list[str] = []
        while self.peek()[0] == "ident":
            tok = self.take("ident")
            if tok[1] in sorts:
                raise SignatureSyntaxError(f"duplicate sort {tok[1]!r}", tok[2], tok[3])
            sorts.append(tok[1])
            self.take(";")
        self.take("}")
        if self.peek()[0] == ";":
            self.take(";")
        self.keyword("ops")
        self.take("{")
        ops: dict[str, Arity] = {}
        while self.peek()[0] == "ident":
            tok = self.take("ident")
            if tok[1] in ops:
                raise SignatureSyntaxError(f"duplicate constructor {tok[1]!r}", tok[2], tok[3])
            self.take(":")
            args = []
            if self.peek()[0] != "arrow":
                args.append(self.binder_arity(sorts))
                while self.peek()[0] == ",":
                    self.take(",")
                    args.append(self.binder_arity(sorts))
            self.take("arrow")
            target = self.sort_name(sorts)
            self.take(";")
            ops[tok[1]] = Arity(tuple(args), target)
        self.take("}")
        if self.peek()[0] == ";":
            self.take(";")
        self.take("eof")
        return FiniteSignature(sorts, ops)

    def binder_arity(self, sorts) -> BinderArity:
        bound = []
        if self.peek()[0] == "[":
            self.take("[")
            while self.peek()[0] == "ident":
                bound.append(self.sort_name(sorts))
            self.take("]")
        return BinderArity(tuple(bound), self.sort_name(sorts))

    def sort_name(self, sorts) -> str:
        tok = self.take("ident")
        if tok[1] not in sorts:
            raise SignatureSyntaxError(f"undeclared sort {tok[1]!r}", tok[2], tok[3])
        return tok[1]


def parse_signature(text: str) -> FiniteSignature:
    """Parse ``sorts { ... } ops { ... }`` text into a finite signature."""
    return _SigParser(text).parse()


def print_signature(sig: FiniteSignature) -> str:
    lines = ["sorts {"] + [f"  {s};" for s in sig.sorts] + ["}", "ops {"]
    for name, ar in sig.ops.items():
        lines.append(f"  {name} : {ar};")
    lines.append("}")
    return "\n".join(lines) + "\n"
