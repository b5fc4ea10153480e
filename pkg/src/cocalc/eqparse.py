"""Equation files: named surface syntax for guarded equation systems.

::

    # infinite Church body over f : 0->0, x : 0
    let S : 0 [f : 0->0, x : 0] = app f S;
    let C : (0->0)->0->0 = lam \\f. lam \\x. S

A statement ``let NAME : SORT [x1 : S1, ..., xn : Sn] = TERM`` declares an
unknown over the listed context (outermost variable first) and gives its
equation; the trailing ``;`` is optional.  Terms are constructor
applications by juxtaposition, ``op`` or ``op{params}`` for explicit
indices, ``\\x y. body`` for an argument that binds variables (``x`` is the
first variable of the binder list), parentheses, variable names, and
unknown names.  A reference to an unknown maps each of its declared
variables to the innermost visible variable of the same name;
``S@[x:=y]`` overrides that for the listed names.  ``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .coterm import ContextMorphism, SortError
from .signature import (Signature, SignatureError, Sort, SortSyntaxError, format_sort, parse_sort,
                        split_params)
from .system import EquationSystem, PCon, PRef, PVar

__all__ = ["EqSyntaxError", "EqSortError", "EqFile", "parse_equations"]


def _where(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class EqSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


class EqSortError(SortError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


# ---------------------------------------------------------------- surface AST

@dataclass
class _Name:
    name: str
    params: list[str] | None
    pos: int


@dataclass
class _Ref:
    name: str
    overrides: list[tuple[str, str, int]]
    pos: int


@dataclass
class _App:
    head: _Name
    args: list
    pos: int


@dataclass
class _Bind:
    names: list[str]
    body: object
    pos: int


@dataclass
class _Let:
    name: str
    sort: Sort
    ctx_names: list[str]
    ctx_sorts: list[Sort]
    body: object
    pos: int


@dataclass
class EqFile:
    system: EquationSystem
    names: dict = field(default_factory=dict)  # unknown -> variable names, outermost first

    @property
    def unknowns(self) -> list[str]:
        return list(self.system.decls)


# ---------------------------------------------------------------- parser

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789")
_IDENT = _IDENT_START | {"'"}


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text, self.sig, self.i = text, sig, 0

    def fail(self, msg, pos=None):
        line, col = _where(self.text, self.i if pos is None else pos)
        raise EqSyntaxError(msg, line, col)

    def skip(self):
        t = self.text
        while self.i < len(t):
            if t[self.i].isspace():
                self.i += 1
            elif t[self.i] == "#":
                nl = t.find("\n", self.i)
                self.i = len(t) if nl < 0 else nl
            else:
                break

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.i)

    def eat(self, s: str):
        if not self.peek(s):
            found = self.text[self.i:self.i + 8] or "end of input"
            self.fail(f"expected {s!r}, found {found!r}")
        self.i += len(s)

    def at_end(self) -> bool:
        self.skip()
        return self.i >= len(self.text)

    def ident(self) -> str:
        self.skip()
        j = self.i
        if j >= len(self.text) or self.text[j] not in _IDENT_START:
            self.fail("expected a name")
        while j < len(self.text) and self.text[j] in _IDENT:
            j += 1
        name, self.i = self.text[self.i:j], j
        return name

    def at_keyword(self, word: str) -> bool:
        self.skip()
        j = self.i + len(word)
        return self.text.startswith(word, self.i) and (j >= len(self.text) or self.text[j] not in _IDENT)

    def raw_until(self, stops: str) -> tuple[str, int]:
        """Raw text up to a top-level stop character (for sorts)."""
        self.skip()
        start, depth, t = self.i, 0, self.text
        while self.i < len(t):
            ch = t[self.i]
            if ch in "(<":
                depth += 1
            elif ch == ")" or (ch == ">" and t[self.i - 1] != "-"):
                depth -= 1
            elif depth == 0 and ch in stops:
                break
            self.i += 1
        return t[start:self.i].strip(), start

    def sort(self, stops: str) -> Sort:
        text, pos = self.raw_until(stops)
        if not text:
            self.fail("expected a sort", pos)
        try:
            s = parse_sort(text)
        except SortSyntaxError as e:
            self.fail(str(e), pos)
        if not self.sig.is_sort(s):
            self.fail(f"{text!r} is not a sort of {self.sig.name}", pos)
        return s

    def statements(self) -> list[_Let]:
        out = []
        while not self.at_end():
            if not self.at_keyword("let"):
                self.fail("expected 'let'")
            pos = self.i
            self.i += 3
            name = self.ident()
            self.eat(":")
            sort = self.sort("[=")
            names, sorts = [], []
            if self.peek("["):
                self.eat("[")
                if not self.peek("]"):
                    while True:
                        npos = self.i
                        n = self.ident()
                        if n in names:
                            self.fail(f"variable {n!r} declared twice", npos)
                        self.eat(":")
                        names.append(n)
                        sorts.append(self.sort(",]"))
                        if not self.peek(","):
                            break
                        self.eat(",")
                self.eat("]")
            self.eat("=")
            body = self.term()
            if self.peek(";"):
                self.eat(";")
            out.append(_Let(name, sort, names, sorts, body, pos))
        return out

    def starts_atom(self) -> bool:
        self.skip()
        if self.i >= len(self.text) or self.at_keyword("let"):
            return False
        ch = self.text[self.i]
        return ch in _IDENT_START or ch in "(\\λ"

    def term(self):
        self.skip()
        pos = self.i
        if self.text.startswith(("\\", "λ"), self.i):
            return self.binder()
        head = self.atom()
        args = []
        while self.starts_atom():
            args.append(self.atom())
        if not args:
            return head
        if not isinstance(head, _Name):
            self.fail("only a constructor can be applied to arguments", pos)
        return _App(head, args, pos)

    def binder(self):
        pos = self.i
        self.i += 1
        names = []
        while not self.peek("."):
            names.append(self.ident())
        if not names:
            self.fail("binder without variables", pos)
        self.eat(".")
        return _Bind(names, self.term(), pos)

    def atom(self):
        self.skip()
        pos = self.i
        if self.peek("("):
            self.eat("(")
            t = self.term()
            self.eat(")")
            return t
        if self.text.startswith(("\\", "λ"), self.i):
            return self.binder()
        name = self.ident()
        if self.text.startswith("{", self.i):
            end = self.text.find("}", self.i)
            if end < 0:
                self.fail("unclosed '{'")
            body = self.text[self.i + 1:end]
            self.i = end + 1
            return _Name(name, split_params(body), pos)
        if self.text.startswith("@", self.i):
            self.i += 1
            self.eat("[")
            overrides = []
            while not self.peek("]"):
                opos = self.i
                a = self.ident()
                self.eat(":=")
                b = self.ident()
                overrides.append((a, b, opos))
                if not self.peek(","):
                    break
                self.eat(",")
            self.eat("]")
            return _Ref(name, overrides, pos)
        return _Name(name, None, pos)


# ---------------------------------------------------------------- elaboration

class _Elab:
    def __init__(self, text: str, sig: Signature, lets: list[_Let]):
        self.text, self.sig = text, sig
        self.lets = {}
        for d in lets:
            if d.name in self.lets:
                self.syntax(f"unknown {d.name!r} defined twice", d.pos)
            self.lets[d.name] = d

    def syntax(self, msg, pos):
        raise EqSyntaxError(msg, *_where(self.text, pos))

    def sorting(self, msg, pos):
        raise EqSortError(msg, *_where(self.text, pos))

    @staticmethod
    def lookup(scope, name):
        for i, (n, s) in enumerate(scope):
            if n == name:
                return i, s
        return None

    def sort_of(self, node, scope):
        if isinstance(node, _Name) and node.params is None:
            hit = self.lookup(scope, node.name)
            if hit is not None:
                return hit[1]
            if node.name in self.lets:
                return self.lets[node.name].sort
        if isinstance(node, _Ref) and node.name in self.lets:
            return self.lets[node.name].sort
        return None

    def ref(self, name, overrides, scope, expected, pos):
        d = self.lets[name]
        if d.sort != expected:
            self.sorting(f"{name} has sort {format_sort(d.sort)}, expected {format_sort(expected)}", pos)
        table = {}
        for a, b, opos in overrides:
            if a not in d.ctx_names:
                self.syntax(f"{name} has no variable {a!r}", opos)
            table[a] = b
        source = tuple(reversed(d.ctx_sorts))
        names = list(reversed(d.ctx_names))
        mapping = []
        for n, s in zip(names, source):
            local = table.get(n, n)
            hit = self.lookup(scope, local)
            if hit is None:
                self.syntax(f"cannot infer the renaming for {name}: no variable {local!r} in scope; "
                            f"write {name}@[{n}:=...]", pos)
            if hit[1] != s:
                self.sorting(f"{name}: variable {n} : {format_sort(s)} cannot map to "
                             f"{local} : {format_sort(hit[1])}", pos)
            mapping.append(hit[0])
        ctx = tuple(s for _, s in scope)
        return PRef(name, ContextMorphism(source, ctx, tuple(mapping)))

    def term(self, node, scope, expected):
        if isinstance(node, _Bind):
            self.syntax("a binder can only be a constructor argument", node.pos)
        if isinstance(node, _Ref):
            if node.name not in self.lets:
                self.syntax(f"{node.name!r} is not an unknown", node.pos)
            return self.ref(node.name, node.overrides, scope, expected, node.pos)
        head, args = (node, []) if isinstance(node, _Name) else (node.head, node.args)
        if head.params is None:
            hit = self.lookup(scope, head.name)
            if hit is not None or head.name in self.lets:
                if args:
                    self.syntax(f"{head.name!r} is not a constructor and cannot take arguments", node.pos)
                if hit is not None:
                    if hit[1] != expected:
                        self.sorting(f"variable {head.name} has sort {format_sort(hit[1])}, "
                                     f"expected {format_sort(expected)}", node.pos)
                    return PVar(hit[0])
                return self.ref(head.name, [], scope, expected, node.pos)
        arg_sorts = [self.sort_of(a, scope) for a in args]
        try:
            op = self.sig.resolve_op(head.name, head.params, len(args), expected, arg_sorts)
            ar = self.sig.arity(op)
        except SignatureError as e:
            if head.params is None and not args:
                self.syntax(f"{head.name!r} is not a variable, unknown or constructor here", head.pos)
            self.syntax(str(e), head.pos)
        except SortSyntaxError as e:
            self.syntax(str(e), head.pos)
        if ar.target != expected:
            self.sorting(f"{op} builds {format_sort(ar.target)}, expected {format_sort(expected)}", node.pos)
        if len(args) != len(ar.args):
            self.sorting(f"{op} takes {len(ar.args)} arguments, got {len(args)}", node.pos)
        out = []
        for j, (a, ba) in enumerate(zip(args, ar.args)):
            k = len(ba.bound)
            if k:
                if not isinstance(a, _Bind):
                    self.syntax(f"argument {j + 1} of {op} binds {k} variable(s); write \\x. ...", node.pos)
                if len(a.names) != k:
                    self.syntax(f"argument {j + 1} of {op} binds {k} variable(s), not {len(a.names)}", a.pos)
                inner = list(zip(a.names, ba.bound)) + scope
                out.append(self.term(a.body, inner, ba.sort))
            else:
                if isinstance(a, _Bind):
                    self.syntax(f"argument {j + 1} of {op} binds no variables", a.pos)
                out.append(self.term(a, scope, ba.sort))
        return PCon(op, tuple(out))

    def run(self) -> EqFile:
        decls, rhs, names = {}, {}, {}
        for d in self.lets.values():
            decls[d.name] = (tuple(reversed(d.ctx_sorts)), d.sort)
            names[d.name] = tuple(d.ctx_names)
        for d in self.lets.values():
            scope = list(reversed(list(zip(d.ctx_names, d.ctx_sorts))))
            rhs[d.name] = self.term(d.body, scope, d.sort)
        return EqFile(EquationSystem(self.sig, decls, rhs), names)


def parse_equations(text: str, sig: Signature, check: bool = True) -> EqFile:
    """Parse and elaborate an equation file; ``check`` also runs the guardedness check."""
    lets = _Parser(text, sig).statements()
    if not lets:
        raise EqSyntaxError("no equations", 1, 1)
    eqs = _Elab(text, sig, lets).run()
    if check:
        eqs.system.check()
    return eqs
