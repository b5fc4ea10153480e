"""Inhabitation search forests for the simply typed λ-calculus.

The typing rules for long normal forms, read coinductively, are used as a
step function: a judgement ``Γ ⊢ B -> C`` unfolds to a λ-abstraction over
``Γ, B ⊢ C``; a judgement ``Γ ⊢ p`` at an atom unfolds to a sum with one
alternative per context entry ``x : B1 -> ... -> Bk -> p``, each a tuple
with head ``x`` and argument forests for ``Γ ⊢ Bi``.  The resulting coterm
in the typed-forest signature represents the whole search space, including
infinite "solutions".

Contexts ``Γ`` are given oldest entry first, as written; the coterm context
lists them the other way round (position 0 is the newest variable).
"""
from __future__ import annotations

import itertools
import re
from typing import Sequence

from .coterm import Con, CoTerm, FinTerm, Var, fcon, fvar, unfold_coterm, var
from .signature import (Arrow, Op, Sort, SortSyntaxError, TypedForestSignature, SimplyTypedSignature,
                        parse_sort, spine)

__all__ = ["parse_type", "parse_context", "atoms_of", "forest_signature", "forest_context",
           "generate_search_forest", "enumerate_inhabitants", "oracle_enumerate"]


def parse_type(text: str) -> Sort:
    """Simple types: identifiers as atoms, right-associative ``->``, parentheses."""
    s = parse_sort(text)
    _reject_pairs(s, text)
    return s


def _reject_pairs(s, text):
    if isinstance(s, tuple):
        raise SortSyntaxError(f"not a simple type: {text.strip()!r}")
    if isinstance(s, Arrow):
        _reject_pairs(s.src, text)
        _reject_pairs(s.tgt, text)


_ENTRY = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:(.*)$", re.S)


def parse_context(text: str) -> list[tuple[str, Sort]]:
    """``x:A, y:B`` into ``[("x", A), ("y", B)]``; empty text is the empty context."""
    out: list[tuple[str, Sort]] = []
    if not text.strip():
        return out
    depth, start, pieces = 0, 0, []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append((start, text[start:i]))
            start = i + 1
    pieces.append((start, text[start:]))
    seen = set()
    for offset, piece in pieces:
        m = _ENTRY.match(piece)
        if not m:
            raise SortSyntaxError(f"expected 'name : type' in context, got {piece.strip()!r}", offset)
        name = m.group(1)
        if name in seen:
            raise SortSyntaxError(f"variable {name!r} declared twice in context", offset)
        seen.add(name)
        try:
            out.append((name, parse_type(m.group(2))))
        except SortSyntaxError as e:
            raise SortSyntaxError(f"in the type of {name!r}: {e}", offset) from None
    return out


def atoms_of(*types: Sort) -> tuple[str, ...]:
    found: set[str] = set()

    def walk(s):
        if isinstance(s, Arrow):
            walk(s.src)
            walk(s.tgt)
        else:
            found.add(s)

    for t in types:
        walk(t)
    return tuple(sorted(found)) or ("0",)


def forest_signature(atoms: Sequence[str]) -> TypedForestSignature:
    return TypedForestSignature(tuple(atoms))


def forest_context(gamma: Sequence[Sort]) -> tuple:
    return tuple((b, "v") for b in reversed(tuple(gamma)))


def generate_search_forest(gamma: Sequence[Sort], goal: Sort,
                           sig: TypedForestSignature | None = None) -> CoTerm:
    """The lazily generated search forest for ``Γ ⊢ goal``, of sort ``(goal, t)``.

    States are ``("t", Γ, A)`` for terms and ``("e", Γ, j)`` for the
    alternative headed by the ``j``-th entry of ``Γ``.  Equal states share one
    coterm, so searches that revisit a judgement come out cyclic.
    """
    gamma = tuple(gamma)
    if sig is None:
        sig = forest_signature(atoms_of(goal, *gamma))

    def step(state):
        if state[0] == "t":
            _, g, a = state
            if isinstance(a, Arrow):
                return Con(Op("lam", (a.src, a.tgt)), (("t", g + (a.src,), a.tgt),))
            alts = tuple(("e", g, j) for j, b in enumerate(g) if spine(b)[1] == a)
            return Con(Op("sum", (a, len(alts))), alts)
        _, g, j = state
        bs, p = spine(g[j])
        head = var(sig, forest_context(g), len(g) - 1 - j)
        return Con(Op("tup", (bs, p)), (head,) + tuple(("t", g, b) for b in bs))

    return unfold_coterm(sig, forest_context(gamma), (goal, "t"), ("t", gamma, goal), step)


def enumerate_inhabitants(gamma: Sequence[Sort], goal: Sort, fuel: int) -> list[FinTerm]:
    """Inhabitants read off the search forest along paths of at most ``fuel`` forest layers.

    Each choice of one alternative per sum gives a finite subtree of the
    forest; those of height at most ``fuel`` are translated to STLC terms
    (tuples become iterated applications of their head).  The list is in
    forest order: alternatives by context position, oldest first.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    gamma = tuple(gamma)
    atoms = atoms_of(goal, *gamma)
    stlc = SimplyTypedSignature(atoms)
    forest = generate_search_forest(gamma, goal, forest_signature(atoms))
    memo: dict = {}

    def paths(t: CoTerm, f: int) -> list[FinTerm]:
        if f <= 0:
            return []
        key = (id(t), f)
        hit = memo.get(key)
        if hit is not None:
            return hit
        node = t.out()
        ctx = tuple(b for b, _ in t.ctx)
        if node.op.name == "lam":
            s, r = node.op.params
            out = [fcon(stlc, Op("lam", (s, r)), [b], ctx=ctx) for b in paths(node.args[0], f - 1)]
        elif node.op.name == "sum":
            out = [x for e in node.args for x in paths(e, f - 1)]
        else:
            head = node.args[0].out()
            choices = [paths(a, f - 1) for a in node.args[1:]]
            out = []
            for picked in itertools.product(*choices):
                acc = fvar(stlc, ctx, head.index)
                for a in picked:
                    fun = acc.sort
                    acc = fcon(stlc, Op("app", (fun.src, fun.tgt)), [acc, a], ctx=ctx)
                out.append(acc)
        memo[key] = out
        return out

    return paths(forest, fuel)


def oracle_enumerate(gamma: Sequence[Sort], goal: Sort, fuel: int) -> list[FinTerm]:
    """Direct proof search for long normal inhabitants, without building a forest.

    Costs mirror the forest encoding: an abstraction is one layer; using a
    variable at an atom is two (choice and tuple), with arguments searched
    at two layers less.
    """
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    stlc = SimplyTypedSignature(atoms_of(goal, *gamma))

    def target_and_args(b):
        args = []
        while isinstance(b, Arrow):
            args.append(b.src)
            b = b.tgt
        return b, args

    def search(g: tuple, a, f: int) -> list[FinTerm]:
        ctx = tuple(reversed(g))
        if f < 1:
            return []
        if isinstance(a, Arrow):
            return [FinTerm(stlc, ctx, a, Con(Op("lam", (a.src, a.tgt)), (body,)))
                    for body in search(g + (a.src,), a.tgt, f - 1)]
        if f < 2:
            return []
        found = []
        for j, b in enumerate(g):
            p, args = target_and_args(b)
            if p != a:
                continue
            arg_lists = [search(g, x, f - 2) for x in args]
            for picked in itertools.product(*arg_lists):
                term = FinTerm(stlc, ctx, b, Var(len(g) - 1 - j))
                for x in picked:
                    rest = term.sort
                    term = FinTerm(stlc, ctx, rest.tgt, Con(Op("app", (rest.src, rest.tgt)), (term, x)))
                found.append(term)
        return found

    return search(tuple(gamma), goal, fuel)
