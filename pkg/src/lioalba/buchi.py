"""Büchi automata with guarded transitions.

Transitions are labelled with modality-free formulas; a transition labelled
``alpha`` stands for one edge per letter satisfying ``alpha``.  Graph
analyses (SCCs, reachability, terminal components) only look at *live*
transitions, i.e. those whose guard is satisfied by at least one letter.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .ltl import (
    Alphabet,
    Formula,
    LassoWord,
    atoms,
    disj,
    eval_letter,
    is_propositional,
    to_text,
)


@dataclass(frozen=True)
class GFForm:
    """``G alpha0 & GF alphas[0] & ... & GF alphas[n-1]``."""

    alpha0: Formula
    alphas: tuple[Formula, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(self.alphas))
        for a in (self.alpha0, *self.alphas):
            if not is_propositional(a):
                raise ValueError(f"GF-form members must be modality-free: {to_text(a)}")

    @property
    def n(self) -> int:
        return len(self.alphas)


@dataclass(frozen=True)
class Transition:
    src: str
    guard: Formula
    dst: str


@dataclass(frozen=True)
class GFAnnotation:
    """A terminal component together with the GF-form it recognizes."""

    states: tuple[str, ...]
    form: GFForm


@lru_cache(maxsize=1 << 16)
def guard_codes(guard: Formula, ap: tuple[str, ...]) -> frozenset[int]:
    """Codes of the letters over ``ap`` satisfying ``guard``.

    Letter code bit ``i`` is set iff ``ap[i]`` holds.
    """
    alphabet = Alphabet(ap)
    return frozenset(
        code for code, e in enumerate(alphabet.letters()) if eval_letter(guard, e)
    )


def guards_equivalent(g1: Formula, g2: Formula, ap: Sequence[str]) -> bool:
    """Truth-table equality over ``ap``."""
    ap = tuple(ap)
    return guard_codes(g1, ap) == guard_codes(g2, ap)


def letter_code(letter: Iterable[str], ap: Sequence[str]) -> int:
    return sum(1 << i for i, a in enumerate(ap) if a in letter)


@dataclass(frozen=True)
class BuchiAutomaton:
    ap: tuple[str, ...]
    states: tuple[str, ...]
    initial: str
    transitions: tuple[Transition, ...]
    accepting: frozenset[str]
    annotations: tuple[GFAnnotation, ...] = ()

    def __post_init__(self):
        ap = tuple(self.ap)
        states = tuple(self.states)
        Alphabet(ap)
        if len(set(states)) != len(states):
            raise ValueError("duplicate state identifiers")
        order = {s: i for i, s in enumerate(states)}
        if self.initial not in order:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        accepting = frozenset(self.accepting)
        if not accepting <= order.keys():
            raise ValueError(f"accepting states {sorted(accepting - order.keys())} unknown")

        merged: dict[tuple[str, str], list[Formula]] = {}
        for t in self.transitions:
            if not isinstance(t, Transition):
                t = Transition(*t)
            if t.src not in order or t.dst not in order:
                raise ValueError(f"transition endpoint not a state: {t}")
            if not is_propositional(t.guard):
                raise ValueError(f"guard is not modality-free: {to_text(t.guard)}")
            if not atoms(t.guard) <= set(ap):
                raise ValueError(f"guard {to_text(t.guard)} uses atoms outside {list(ap)}")
            guards = merged.setdefault((t.src, t.dst), [])
            if t.guard not in guards:
                guards.append(t.guard)
        transitions = tuple(
            Transition(src, disj(guards), dst)
            for (src, dst), guards in sorted(
                merged.items(), key=lambda kv: (order[kv[0][0]], order[kv[0][1]])
            )
        )

        annotations = []
        for ann in self.annotations:
            members = set(ann.states)
            if not members <= order.keys():
                raise ValueError(f"annotation names unknown states {sorted(members - order.keys())}")
            for a in (ann.form.alpha0, *ann.form.alphas):
                if not atoms(a) <= set(ap):
                    raise ValueError(f"annotation formula {to_text(a)} uses atoms outside {list(ap)}")
            annotations.append(
                GFAnnotation(tuple(sorted(members, key=order.__getitem__)), ann.form)
            )
        annotations.sort(key=lambda a: order[a.states[0]] if a.states else -1)

        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "annotations", tuple(annotations))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.ap)

    @cached_property
    def live_transitions(self) -> tuple[Transition, ...]:
        return tuple(t for t in self.transitions if guard_codes(t.guard, self.ap))

    @cached_property
    def live_successors(self) -> dict[str, list[str]]:
        succ: dict[str, list[str]] = {s: [] for s in self.states}
        for t in self.live_transitions:
            succ[t.src].append(t.dst)
        return succ

    def outgoing(self, state: str) -> list[Transition]:
        return [t for t in self.transitions if t.src == state]

    def with_initial(self, state: str) -> BuchiAutomaton:
        return BuchiAutomaton(
            self.ap, self.states, state, self.transitions, self.accepting, self.annotations
        )

    def annotation_of(self, state: str) -> Optional[GFAnnotation]:
        for ann in self.annotations:
            if state in ann.states:
                return ann
        return None


def rename_states(a: BuchiAutomaton, mapping: dict[str, str]) -> BuchiAutomaton:
    r = mapping.__getitem__
    return BuchiAutomaton(
        a.ap,
        tuple(r(s) for s in a.states),
        r(a.initial),
        tuple(Transition(r(t.src), t.guard, r(t.dst)) for t in a.transitions),
        frozenset(r(s) for s in a.accepting),
        tuple(GFAnnotation(tuple(r(s) for s in ann.states), ann.form) for ann in a.annotations),
    )


# ---------------------------------------------------------------------------
# strongly connected components


def strongly_connected_components(
    nodes: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]
) -> list[list[Hashable]]:
    """Iterative Tarjan.  Components come out in reverse topological order
    (every component precedes the components that reach it)."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


@dataclass(frozen=True)
class SCCDecomposition:
    components: tuple[tuple[str, ...], ...]
    component_of: dict[str, int] = field(hash=False)
    condensation: frozenset[tuple[int, int]]
    terminal: tuple[bool, ...]
    accepting: tuple[bool, ...]
    trivial: tuple[bool, ...]

    def component(self, state: str) -> tuple[str, ...]:
        return self.components[self.component_of[state]]


def scc_decompose(a: BuchiAutomaton) -> SCCDecomposition:
    """SCCs of the live transition graph, numbered in reverse topological
    order (terminal components first)."""
    order = {s: i for i, s in enumerate(a.states)}
    succ = a.live_successors
    raw = strongly_connected_components(a.states, succ.__getitem__)
    components = tuple(tuple(sorted(c, key=order.__getitem__)) for c in raw)
    component_of = {s: i for i, c in enumerate(components) for s in c}
    condensation = frozenset(
        (component_of[t.src], component_of[t.dst])
        for t in a.live_transitions
        if component_of[t.src] != component_of[t.dst]
    )
    leaving = {i for i, _ in condensation}
    loops = {t.src for t in a.live_transitions if t.src == t.dst}
    return SCCDecomposition(
        components=components,
        component_of=component_of,
        condensation=condensation,
        terminal=tuple(i not in leaving for i in range(len(components))),
        accepting=tuple(any(s in a.accepting for s in c) for c in components),
        trivial=tuple(len(c) == 1 and c[0] not in loops for c in components),
    )


# ---------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class AutomatonClass:
    terminal: bool
    weak: bool
    linear: bool
    min_k: Optional[int]
    structural_alba: bool

    def labels(self) -> list[str]:
        out = []
        if self.terminal:
            out.append("terminal")
        if self.weak:
            out.append(f"{self.min_k}-weak")
        if self.linear:
            out.append("linear")
        if self.structural_alba:
            out.append("ALBA(structural)")
        return out


def is_terminal_automaton(a: BuchiAutomaton) -> bool:
    """Every accepting state has, for every letter, a successor and all of
    its successors are accepting."""
    letters = range(1 << len(a.ap))
    for p in a.accepting:
        enabled: set[int] = set()
        for t in a.outgoing(p):
            codes = guard_codes(t.guard, a.ap)
            if codes and t.dst not in a.accepting:
                return False
            enabled |= codes
        if len(enabled) != len(letters):
            return False
    return True


def classify_automaton(a: BuchiAutomaton) -> AutomatonClass:
    dec = scc_decompose(a)
    weak = all(
        all(s in a.accepting for s in c) or not any(s in a.accepting for s in c)
        for c in dec.components
    )
    min_k = max(len(c) for c in dec.components) if weak else None
    structural = all(
        len(c) == 1 for c, term in zip(dec.components, dec.terminal) if not term
    )
    return AutomatonClass(
        terminal=is_terminal_automaton(a),
        weak=weak,
        linear=min_k == 1,
        min_k=min_k,
        structural_alba=structural,
    )


# ---------------------------------------------------------------------------
# acceptance of lasso words


def accepts_lasso(a: BuchiAutomaton, w: LassoWord) -> bool:
    """Does ``a`` have an accepting run over ``w``?

    Builds the product of states with lasso positions and looks for a
    reachable cycle through an accepting state.
    """
    codes = [letter_code(e, a.ap) for e in w.letters()]
    edges: dict[str, list[tuple[frozenset[int], str]]] = {s: [] for s in a.states}
    for t in a.live_transitions:
        edges[t.src].append((guard_codes(t.guard, a.ap), t.dst))

    def successors(node):
        s, i = node
        j = w.successor(i)
        return [(d, j) for g, d in edges[s] if codes[i] in g]

    seen = {(a.initial, 0)}
    frontier = [(a.initial, 0)]
    while frontier:
        node = frontier.pop()
        for nxt in successors(node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    for comp in strongly_connected_components(sorted(seen), successors):
        if not any(s in a.accepting for s, _ in comp):
            continue
        if len(comp) > 1 or comp[0] in successors(comp[0]):
            return True
    return False


def trim_reachable(a: BuchiAutomaton) -> BuchiAutomaton:
    """Drop states not reachable from the initial state."""
    seen = {a.initial}
    frontier = [a.initial]
    while frontier:
        s = frontier.pop()
        for d in a.live_successors[s]:
            if d not in seen:
                seen.add(d)
                frontier.append(d)
    if len(seen) == len(a.states):
        return a
    annotations = []
    for ann in a.annotations:
        kept = tuple(s for s in ann.states if s in seen)
        if kept:
            annotations.append(GFAnnotation(kept, ann.form))
    return BuchiAutomaton(
        a.ap,
        tuple(s for s in a.states if s in seen),
        a.initial,
        tuple(t for t in a.transitions if t.src in seen and t.dst in seen),
        a.accepting & seen,
        tuple(annotations),
    )
