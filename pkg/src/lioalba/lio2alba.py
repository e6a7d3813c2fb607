"""Direct translation of positive LIO formulas into almost linear Büchi
automata.

Every positive LIO formula ``phi`` is decomposed into guarded successor
obligations ``R(phi) = {(alpha, S), ...}`` with

    phi  ==  OR over (alpha, S) of  alpha & X AND(S)

States of the automaton are the obligation sets reachable from ``{phi}``.
Sets made only of ``G alpha`` and ``GF alpha`` formulas loop on themselves
under every pair; they become terminal components.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .buchi import BuchiAutomaton, GFAnnotation, GFForm, Transition, scc_decompose
from .components import DEFAULT_STRATEGY, ExpansionStrategy, expand
from .ltl import (
    FF,
    TT,
    Always,
    And,
    Eventually,
    Formula,
    Next,
    Or,
    Until,
    atoms,
    conj,
    disj,
    flatten,
    formula_key,
    is_lio,
    is_positive,
    is_propositional,
    sort_formulas,
    to_text,
)

log = logging.getLogger(__name__)

FormulaSet = frozenset
Pair = tuple[Formula, FormulaSet]

EMPTY: FormulaSet = frozenset()


class NotLIOError(ValueError):
    pass


def set_key(s: Iterable[Formula]) -> tuple:
    return tuple(formula_key(f) for f in sort_formulas(s))


def set_text(s: Iterable[Formula]) -> str:
    return "{" + ", ".join(to_text(f) for f in sort_formulas(s)) + "}"


def _pair_key(pair: Pair) -> tuple:
    return (set_key(pair[1]), formula_key(pair[0]))


@dataclass(frozen=True)
class RResult:
    """Guarded successor sets, in canonical order."""

    pairs: tuple[Pair, ...]

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def as_set(self) -> set[Pair]:
        return set(self.pairs)

    def __str__(self) -> str:
        return "{" + ", ".join(f"({to_text(a)}, {set_text(s)})" for a, s in self.pairs) + "}"


def _result(pairs: Iterable[Pair]) -> RResult:
    return RResult(tuple(sorted(set(pairs), key=_pair_key)))


def _product(xs: frozenset[Pair], ys: frozenset[Pair]) -> frozenset[Pair]:
    return frozenset((conj(a1, a2), s1 | s2) for a1, s1 in xs for a2, s2 in ys)


def _last(candidates: list[Formula]) -> Formula:
    return max(candidates, key=formula_key)


def _without(items: list[Formula], item: Formula) -> list[Formula]:
    out = list(items)
    out.remove(item)
    return out


def _regroup(items: list[Formula], combine) -> list[Formula]:
    """Collect the propositional members into one, so that rebuilding a
    flattened tree never costs more than the original in the size measure."""
    temporal = [f for f in items if not is_propositional(f)]
    props = [f for f in items if is_propositional(f)]
    return temporal + [combine(props)] if props else temporal


def _fail(f: Formula) -> NotLIOError:
    return NotLIOError(f"not a positive LIO formula: {to_text(f)}")


@lru_cache(maxsize=1 << 16)
def _r(f: Formula) -> frozenset[Pair]:
    if is_propositional(f):
        return frozenset([(f, EMPTY)])
    if isinstance(f, Or):
        return _r(f.left) | _r(f.right)
    if isinstance(f, And):
        return _product(_r(f.left), _r(f.right))
    if isinstance(f, Eventually):
        return frozenset([(TT, frozenset([f]))]) | _r(f.arg)
    if isinstance(f, Next):
        return frozenset([(TT, frozenset([f.arg]))])
    if isinstance(f, Until):
        if not is_propositional(f.left):
            raise _fail(f)
        return frozenset([(f.left, frozenset([f]))]) | _r(f.right)
    if isinstance(f, Always):
        return _r_always(f)
    raise _fail(f)


def _r_always(f: Always) -> frozenset[Pair]:
    body = f.arg
    if is_propositional(body):
        return frozenset([(body, frozenset([f]))])
    if isinstance(body, And):
        return _product(_r(Always(body.left)), _r(Always(body.right)))
    if isinstance(body, Eventually):
        return _r_always_eventually(f, body.arg)
    if isinstance(body, Or):
        return _r_always_or(f, body)
    if isinstance(body, Always):
        return _r(body)
    raise _fail(f)


def _r_always_eventually(f: Always, g: Formula) -> frozenset[Pair]:
    # f == G F g
    if is_propositional(g):
        return frozenset([(TT, frozenset([f]))])
    if isinstance(g, Or):
        return _r(Always(Eventually(g.left))) | _r(Always(Eventually(g.right)))
    if isinstance(g, Eventually):
        return _r(Always(Eventually(g.arg)))
    if isinstance(g, Always):
        return _r(Eventually(Always(g.arg)))
    if isinstance(g, And):
        conjuncts = flatten(g, And)
        temporal = [c for c in conjuncts if not is_propositional(c)]
        pick = _last(temporal)
        rest = conj(*_regroup(_without(conjuncts, pick), lambda ps: conj(*ps)))
        if isinstance(pick, Or):
            return _r(Always(Eventually(And(rest, pick.left)))) | _r(
                Always(Eventually(And(rest, pick.right)))
            )
        if isinstance(pick, Eventually):
            return _r(And(Always(Eventually(rest)), Always(Eventually(pick.arg))))
        if isinstance(pick, Always):
            return _r(And(Always(Eventually(rest)), Eventually(Always(pick.arg))))
    raise _fail(f)


def _r_always_or(f: Always, body: Or) -> frozenset[Pair]:
    disjuncts = flatten(body, Or)
    temporal = [d for d in disjuncts if not is_propositional(d)]
    splittable = [d for d in temporal if isinstance(d, (And, Eventually))]
    if splittable:
        pick = _last(splittable)
        rest = disj(_regroup(_without(disjuncts, pick), disj))
        if isinstance(pick, And):
            return _product(
                _r(Always(Or(rest, pick.left))), _r(Always(Or(rest, pick.right)))
            )
        # G(rest | F g) == G rest | tt U (g & X G rest) | G F g
        g = pick.arg
        return (
            _r(Always(rest))
            | _r(Until(TT, And(g, Next(Always(rest)))))
            | _r(Always(Eventually(g)))
        )
    if not all(isinstance(d, Always) for d in temporal):
        raise _fail(f)
    out = frozenset()
    for d in temporal:
        out |= _r(d)
    props = [d for d in disjuncts if is_propositional(d)]
    if not props:
        return out
    alpha = disj(props)
    out |= _r(Always(alpha))
    for d in temporal:
        # with a single G-disjunct the successor is f itself
        succ = f if len(temporal) == 1 else Always(Or(alpha, d))
        out |= frozenset([(alpha, frozenset([succ]))])
    return out


def _check(formulas: Iterable[Formula]) -> None:
    for f in formulas:
        if not is_positive(f) or not is_lio(f):
            raise _fail(f)


def r_of(formulas: Iterable[Formula]) -> RResult:
    """Decompose the conjunction of a set of positive LIO formulas."""
    members = sort_formulas(formulas)
    _check(members)
    acc: frozenset[Pair] = frozenset([(TT, EMPTY)])
    for f in members:
        acc = _product(acc, _r(f))
    return _result(acc)


def r_of_formula(f: Formula) -> RResult:
    _check([f])
    return _result(_r(f))


def is_gf_set(s: Iterable[Formula]) -> bool:
    """Only ``G alpha`` and ``GF alpha`` members (alpha modality-free)."""
    for f in s:
        if not isinstance(f, Always):
            return False
        body = f.arg
        if isinstance(body, Eventually):
            body = body.arg
        if not is_propositional(body):
            return False
    return True


def gf_label(s: Iterable[Formula]) -> GFForm:
    members = sort_formulas(s)
    safety = [f.arg for f in members if not isinstance(f.arg, Eventually)]
    liveness = [f.arg.arg for f in members if isinstance(f.arg, Eventually)]
    return GFForm(conj(*safety), tuple(liveness))


@dataclass(frozen=True)
class ConciseAutomaton:
    """Automaton over obligation sets; terminal components are still single
    states carrying their GF-form label."""

    formula: Formula
    ap: tuple[str, ...]
    states: tuple[FormulaSet, ...]
    initial: FormulaSet
    transitions: tuple[tuple[FormulaSet, Formula, FormulaSet], ...]
    labels: dict

    def name(self, s: FormulaSet) -> str:
        return set_text(s)

    def to_buchi(self) -> BuchiAutomaton:
        """The concise form with labelled states marked accepting and their
        labels stored as annotations."""
        n = self.name
        return BuchiAutomaton(
            ap=self.ap,
            states=tuple(n(s) for s in self.states),
            initial=n(self.initial),
            transitions=tuple(Transition(n(s), g, n(d)) for s, g, d in self.transitions),
            accepting=frozenset(n(s) for s in self.labels),
            annotations=tuple(GFAnnotation((n(s),), rho) for s, rho in self.labels.items()),
        )


def build_concise(phi: Formula) -> ConciseAutomaton:
    _check([phi])
    initial = frozenset([phi])
    states = [initial]
    seen = {initial}
    transitions = []
    labels = {}
    i = 0
    while i < len(states):
        s = states[i]
        i += 1
        if is_gf_set(s):
            labels[s] = gf_label(s)
        grouped: dict[FormulaSet, list[Formula]] = {}
        for alpha, succ in r_of(s):
            grouped.setdefault(succ, []).append(alpha)
        for succ, guards in grouped.items():
            transitions.append((s, disj(guards), succ))
            if succ not in seen:
                seen.add(succ)
                states.append(succ)
    log.debug("concise automaton for %s: %d states", to_text(phi), len(states))
    return ConciseAutomaton(
        formula=phi,
        ap=tuple(sorted(atoms(phi))),
        states=tuple(states),
        initial=initial,
        transitions=tuple(transitions),
        labels=labels,
    )


def expand_concise(
    concise: ConciseAutomaton, strategy: ExpansionStrategy = DEFAULT_STRATEGY
) -> BuchiAutomaton:
    """Replace each labelled state by its terminal component.

    Edges into a labelled state are redirected to the component's entry
    state.  Unlabelled states that end up in a terminal component (all their
    live edges are self-loops or none exist) accept nothing and are
    annotated with ``G ff``.
    """
    strategy = ExpansionStrategy(strategy)
    states: list[str] = []
    transitions: list[Transition] = []
    accepting: set[str] = set()
    annotations: list[GFAnnotation] = []
    entry: dict[FormulaSet, str] = {}
    for s in concise.states:
        name = concise.name(s)
        rho = concise.labels.get(s)
        if rho is None:
            states.append(name)
            entry[s] = name
            continue
        comp = expand(rho, strategy, concise.ap)
        if len(comp.states) == 1:
            rename = {comp.states[0]: name}
        else:
            rename = {q: f"{name}#{q}" for q in comp.states}
        states.extend(rename[q] for q in comp.states)
        transitions.extend(
            Transition(rename[t.src], t.guard, rename[t.dst]) for t in comp.transitions
        )
        accepting.update(rename[q] for q in comp.accepting)
        annotations.append(GFAnnotation(tuple(rename[q] for q in comp.states), rho))
        entry[s] = rename[comp.initial]
    for src, guard, dst in concise.transitions:
        if src in concise.labels:
            continue
        transitions.append(Transition(entry[src], guard, entry[dst]))

    a = BuchiAutomaton(
        concise.ap,
        tuple(states),
        entry[concise.initial],
        tuple(transitions),
        frozenset(accepting),
        tuple(annotations),
    )
    annotated = {q for ann in annotations for q in ann.states}
    dec = scc_decompose(a)
    extra = [
        GFAnnotation(comp, GFForm(FF))
        for comp, terminal in zip(dec.components, dec.terminal)
        if terminal and not annotated.intersection(comp)
    ]
    if extra:
        a = BuchiAutomaton(
            a.ap, a.states, a.initial, a.transitions, a.accepting, a.annotations + tuple(extra)
        )
    return a


def translate(
    phi: Formula, strategy: ExpansionStrategy = DEFAULT_STRATEGY
) -> BuchiAutomaton:
    """Translate a positive LIO formula into an ALBA."""
    return expand_concise(build_concise(phi), strategy)
