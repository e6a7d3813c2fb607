"""Shared strategies and independent reference oracles for the test suite.

The oracles here deliberately avoid the library's evaluation code: they
work position by position on the infinite word and only rely on the fact
that a lasso with ``p + q`` positions repeats every suffix within ``p + q``
steps.
"""
from __future__ import annotations

import itertools
import re
from functools import lru_cache

import pytest
from hypothesis import strategies as st

from lioalba.buchi import BuchiAutomaton, guards_equivalent
from lioalba.ltl import (
    FF,
    TT,
    And,
    Always,
    Atom,
    Eventually,
    Ff,
    LassoWord,
    Next,
    Not,
    Or,
    Tt,
    Until,
)


def formulas(atoms=("a", "b"), max_leaves=8):
    """Hypothesis strategy for arbitrary (not necessarily positive) formulas."""
    leaves = st.sampled_from([TT, FF] + [Atom(a) for a in atoms])

    def extend(inner):
        return st.one_of(
            inner.map(Not),
            inner.map(Eventually),
            inner.map(Always),
            inner.map(Next),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(inner, inner).map(lambda t: And(*t)),
            st.tuples(inner, inner).map(lambda t: Until(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def letters(ap):
    return [frozenset(c) for n in range(len(ap) + 1) for c in itertools.combinations(ap, n)]


def all_lassos(ap, max_prefix, max_period):
    """Every lasso with prefix length <= max_prefix and period length in 1..max_period."""
    sigma = letters(ap)
    for p in range(max_prefix + 1):
        for q in range(1, max_period + 1):
            for prefix in itertools.product(sigma, repeat=p):
                for period in itertools.product(sigma, repeat=q):
                    yield LassoWord(prefix, period)


def naive_holds(f, w: LassoWord, i: int = 0) -> bool:
    """Direct recursive reading of the LTL semantics on ``w`` at position ``i``."""
    horizon = w.positions

    @lru_cache(maxsize=None)
    def norm(j):
        # positions beyond the prefix are identified modulo the period
        p, q = len(w.prefix), len(w.period)
        return j if j < p else p + (j - p) % q

    @lru_cache(maxsize=None)
    def holds(g, j):
        j = norm(j)
        if isinstance(g, Tt):
            return True
        if isinstance(g, Ff):
            return False
        if isinstance(g, Atom):
            return g.name in w.letter(j)
        if isinstance(g, Not):
            return not holds(g.arg, j)
        if isinstance(g, Or):
            return holds(g.left, j) or holds(g.right, j)
        if isinstance(g, And):
            return holds(g.left, j) and holds(g.right, j)
        if isinstance(g, Next):
            return holds(g.arg, j + 1)
        if isinstance(g, Eventually):
            return any(holds(g.arg, j + k) for k in range(horizon))
        if isinstance(g, Always):
            return all(holds(g.arg, j + k) for k in range(horizon))
        if isinstance(g, Until):
            for k in range(horizon):
                if holds(g.right, j + k):
                    return True
                if not holds(g.left, j + k):
                    return False
            return False
        raise TypeError(g)

    return holds(f, i)


_DOT_STMT = re.compile(
    r'^\s*(?:rankdir=\w+|node \[[^\]]*\]|"[^"]*"(?: -> "[^"]*")?(?: \[[^\]]*\])?);$'
)


def dot_well_formed(text: str) -> bool:
    lines = text.strip().splitlines()
    if not re.match(r'^digraph "[^"]*" \{$', lines[0]) or lines[-1] != "}":
        return False
    return all(_DOT_STMT.match(line) for line in lines[1:-1])


def structurally_equal(x: BuchiAutomaton, y: BuchiAutomaton) -> bool:
    if (x.ap, x.states, x.initial, x.accepting, x.annotations) != (
        y.ap, y.states, y.initial, y.accepting, y.annotations
    ):
        return False
    ex = {(t.src, t.dst): t.guard for t in x.transitions}
    ey = {(t.src, t.dst): t.guard for t in y.transitions}
    return ex.keys() == ey.keys() and all(guards_equivalent(ex[k], ey[k], x.ap) for k in ex)


@pytest.fixture
def lassos_2x2():
    return list(all_lassos(("a", "b"), 2, 2))
