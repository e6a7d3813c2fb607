"""Back-translation of (structurally) almost linear automata into LIO.

A state in an annotated terminal component stands for its GF-form.  Any
other state ``q`` must be a singleton SCC, and with loop guards ``a_i`` and
exits ``q -b_j-> q_j``

    phi(q) = (OR a_i) U OR (b_j & X phi(q_j))        [| G OR a_i  if q accepting]
"""
from __future__ import annotations

from .buchi import BuchiAutomaton, scc_decompose, trim_reachable
from .components import gf_form_to_formula
from .ltl import Always, And, Ff, Formula, Next, Or, Until, disj


class AlbaStructureError(ValueError):
    pass


def _non_terminal_formula(loops: list[Formula], exits: list[Formula], accepting: bool) -> Formula:
    stay = disj(loops)
    leave = disj(exits)
    out = leave if isinstance(stay, Ff) else Until(stay, leave)
    if accepting:
        out = Or(out, Always(stay))
    return out


def state_formulas(a: BuchiAutomaton, root: str | None = None) -> dict[str, Formula]:
    """``phi(q)`` for every state reachable from ``root`` (default: initial).

    States are processed in reverse topological order of the SCC
    condensation, so every exit target is already done.
    """
    root = a.initial if root is None else root
    dec = scc_decompose(a)
    reachable = {root}
    frontier = [root]
    while frontier:
        s = frontier.pop()
        for d in a.live_successors[s]:
            if d not in reachable:
                reachable.add(d)
                frontier.append(d)

    out: dict[str, Formula] = {}
    for comp, terminal in zip(dec.components, dec.terminal):
        for q in comp:
            if q not in reachable:
                continue
            ann = a.annotation_of(q)
            if ann is not None:
                out[q] = gf_form_to_formula(ann.form)
                continue
            if len(comp) > 1:
                kind = "terminal component" if terminal else "non-terminal component"
                problem = "has no GF annotation" if terminal else "has more than one state"
                raise AlbaStructureError(f"{kind} {list(comp)} {problem}")
            loops, exits = [], []
            for t in a.live_transitions:
                if t.src != q:
                    continue
                if t.dst == q:
                    loops.append(t.guard)
                else:
                    if t.dst not in out:
                        raise AlbaStructureError(f"state {t.dst!r} visited out of order")
                    exits.append(And(t.guard, Next(out[t.dst])))
            out[q] = _non_terminal_formula(loops, exits, q in a.accepting)
    return out


def state_formula(a: BuchiAutomaton, q: str) -> Formula:
    return state_formulas(a, q)[q]


def translate_automaton(a: BuchiAutomaton) -> Formula:
    """LIO formula for the language of ``a`` (trimmed to reachable states)."""
    a = trim_reachable(a)
    return state_formulas(a)[a.initial]
