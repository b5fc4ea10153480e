"""Coinductive syntax with binders: lazily unfolded well-scoped terms over
multi-sorted binding signatures, guarded equation systems, monadic
substitution, bisimilarity and inhabitation forests."""
from .bisim import RationalHandle, bisim_rational, bisim_to_depth, first_difference, pretty
from .coterm import (CUT, Con, ContextMorphism, CoTerm, FinTerm, SortError, Var, con, embed, extend,
                     fcon, fvar, truncate, unfold_coterm, var)
from .eqparse import parse_equations
from .inhabit import enumerate_inhabitants, generate_search_forest, oracle_enumerate, parse_type
from .laws import check_monad_laws
from .signature import (Arity, Arrow, Op, Signature, arg, builtin_signature, parse_signature,
                        parse_sort, validate_signature)
from .subst import Substitution, bind, bind_via_solve, compose, lift, rename, weaken
from .system import EquationSystem, GuardednessError, PCon, PEmbed, PRef, PVar, interpret, solve

__version__ = "0.1.0"
