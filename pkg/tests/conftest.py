import os
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from cocalc.coterm import CUT, Con, Var

settings.register_profile("default", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

SIG_NAMES = ("stlc", "untyped-forests", "typed-forests")


@pytest.fixture
def data_dir():
    return DATA


def rng_for(seed):
    return random.Random(seed)


# ---- independent oracles (plain recursion over unfoldings / trees)

def agree(a, b, d):
    """Depth-d agreement by naive recursion; nodes at depth d are wildcards."""
    if d <= 0:
        return True
    na, nb = a.out(), b.out()
    if isinstance(na, Var) or isinstance(nb, Var):
        return na == nb
    return na.op == nb.op and all(agree(p, q, d - 1) for p, q in zip(na.args, nb.args))


def tree_agree(x, y):
    """Truncation trees equal, with cuts matching anything."""
    if x is CUT or y is CUT:
        return True
    if isinstance(x, Var) or isinstance(y, Var):
        return x == y
    return x.op == y.op and all(tree_agree(p, q) for p, q in zip(x.args, y.args))


def rename_tree(sig, tree, env):
    """Apply a position map to a truncation tree, shifting under binders."""
    if tree is CUT:
        return CUT
    if isinstance(tree, Var):
        return Var(env[tree.index])
    ar = sig.arity(tree.op)
    kids = []
    for a, ba in zip(tree.args, ar.args):
        k = len(ba.bound)
        kids.append(rename_tree(sig, a, tuple(range(k)) + tuple(e + k for e in env)))
    return Con(tree.op, tuple(kids))


def con_layers(tree):
    if tree is CUT or isinstance(tree, Var):
        return 0
    return 1 + max((con_layers(a) for a in tree.args), default=0)
