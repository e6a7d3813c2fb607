"""Terminal components for GF-forms ``G alpha0 & GF alpha1 & ... & GF alphan``.

Three constructions are offered:

* ``CYCLE``: states w0..wn visited in order, one obligation per step
  (fewest transitions).
* ``SHORTCUT``: the same states, but a letter satisfying several pending
  obligations jumps as far ahead as it can (fewest states, shorter cycles).
* ``SUBSET``: one state per set of obligations already met in the current
  round (2^n states, shortest cycles).
"""
from __future__ import annotations

import enum
from typing import Optional, Sequence

from .buchi import BuchiAutomaton, GFAnnotation, GFForm, Transition
from .ltl import Always, And, Eventually, Formula, atoms, conj, neg


class ExpansionStrategy(enum.Enum):
    CYCLE = "cycle"
    SHORTCUT = "shortcut"
    SUBSET = "subset"


DEFAULT_STRATEGY = ExpansionStrategy.SHORTCUT


def gf_form_to_formula(rho: GFForm) -> Formula:
    out: Formula = Always(rho.alpha0)
    for a in rho.alphas:
        out = And(out, Always(Eventually(a)))
    return out


def gf_atoms(rho: GFForm) -> set[str]:
    out = atoms(rho.alpha0)
    for a in rho.alphas:
        out |= atoms(a)
    return out


def entry_state(rho: GFForm, strategy: ExpansionStrategy) -> str:
    """The "no progress yet" state, used as the component's entry."""
    return "{}" if strategy is ExpansionStrategy.SUBSET else "w0"


def _cycle(rho: GFForm) -> tuple[list[str], list[Transition], str]:
    n, a0, al = rho.n, rho.alpha0, rho.alphas
    names = [f"w{i}" for i in range(n + 1)]
    trans = []
    for i in range(n):
        trans.append(Transition(names[i], conj(a0, neg(al[i])), names[i]))
        trans.append(Transition(names[i], conj(a0, al[i]), names[i + 1]))
    trans.append(Transition(names[n], a0, names[0]))
    return names, trans, names[n]


def _shortcut(rho: GFForm) -> tuple[list[str], list[Transition], str]:
    n, a0, al = rho.n, rho.alpha0, rho.alphas
    names = [f"w{i}" for i in range(n + 1)]
    trans = []
    for i in range(n + 1):
        # from w_n the scan for the next round restarts at alpha1
        start = i if i < n else 0
        for j in range(start, n + 1):
            parts = [a0, *al[start:j]]
            if j < n:
                parts.append(neg(al[j]))
            trans.append(Transition(names[i], conj(*parts), names[j]))
    return names, trans, names[n]


def _subset_name(members: Sequence[int]) -> str:
    return "{" + ",".join(str(i) for i in members) + "}"


def _subset(rho: GFForm) -> tuple[list[str], list[Transition], str]:
    n, a0, al = rho.n, rho.alpha0, rho.alphas
    sets = [frozenset(i + 1 for i in range(n) if code >> i & 1) for code in range(1 << n)]
    name = {t: _subset_name(sorted(t)) for t in sets}
    full = frozenset(range(1, n + 1))
    trans = []
    for t in sets:
        base = frozenset() if t == full else t
        for t2 in sets:
            if not base <= t2:
                continue
            parts = [a0]
            for i in range(1, n + 1):
                if i in t2 and i not in base:
                    parts.append(al[i - 1])
                elif i not in t2:
                    parts.append(neg(al[i - 1]))
            trans.append(Transition(name[t], conj(*parts), name[t2]))
    return [name[t] for t in sets], trans, name[full]


_BUILDERS = {
    ExpansionStrategy.CYCLE: _cycle,
    ExpansionStrategy.SHORTCUT: _shortcut,
    ExpansionStrategy.SUBSET: _subset,
}


def expand(
    rho: GFForm,
    strategy: ExpansionStrategy = DEFAULT_STRATEGY,
    ap: Optional[Sequence[str]] = None,
) -> BuchiAutomaton:
    """Build the terminal component recognizing ``rho``.

    The result is annotated with ``rho``; its initial state is the entry
    state.  Unsatisfiable guards are kept as dead transitions.
    """
    names, trans, accepting = _BUILDERS[ExpansionStrategy(strategy)](rho)
    if ap is None:
        ap = sorted(gf_atoms(rho))
    return BuchiAutomaton(
        ap=tuple(ap),
        states=tuple(names),
        initial=entry_state(rho, ExpansionStrategy(strategy)),
        transitions=tuple(trans),
        accepting=frozenset([accepting]),
        annotations=(GFAnnotation(tuple(names), rho),),
    )
