"""Bounded semantic oracle over families of lasso words.

Two omega-regular languages that differ already differ on some ultimately
periodic word, so comparing membership on every lasso ``u v^omega`` with
``|u| <= P`` and ``1 <= |v| <= Q`` yields exact per-word verdicts and sound
counterexamples.  Agreement on a family is *not* a proof of equivalence.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .buchi import BuchiAutomaton, accepts_lasso, classify_automaton, scc_decompose, strongly_connected_components
from .components import gf_form_to_formula
from .ltl import (
    FF,
    TT,
    Alphabet,
    Always,
    And,
    Atom,
    Eventually,
    Ff,
    Formula,
    LassoWord,
    Letter,
    Next,
    Not,
    Or,
    Tt,
    Until,
    LassoVectors,
    atoms,
    eval_lasso,
    eval_letter,
    to_text,
)

Side = Union[Formula, BuchiAutomaton]

EQUIVALENT = "equivalent-on-family"
COUNTEREXAMPLE = "counterexample"


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class LassoFamily:
    alphabet: Alphabet
    max_prefix: int = 3
    max_period: int = 3

    def __post_init__(self):
        if not isinstance(self.alphabet, Alphabet):
            object.__setattr__(self, "alphabet", Alphabet(tuple(self.alphabet)))
        if self.max_period < 1:
            raise ValueError("max_period must be at least 1")
        if self.max_prefix < 0:
            raise ValueError("max_prefix must be non-negative")

    def __len__(self) -> int:
        k = len(self.alphabet)
        return sum(
            k ** (p + q)
            for p in range(self.max_prefix + 1)
            for q in range(1, self.max_period + 1)
        )

    def codes(self) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Letter-index presentations ``(prefix, period)`` in family order."""
        k = len(self.alphabet)
        for p in range(self.max_prefix + 1):
            for q in range(1, self.max_period + 1):
                for word in itertools.product(range(k), repeat=p + q):
                    yield word[:p], word[p:]

    def word(self, prefix: Sequence[int], period: Sequence[int]) -> LassoWord:
        letters = self.alphabet.letters()
        return LassoWord(tuple(letters[i] for i in prefix), tuple(letters[i] for i in period))

    def describe(self) -> dict:
        return {
            "ap": list(self.alphabet.ap),
            "max_prefix": self.max_prefix,
            "max_period": self.max_period,
            "size": len(self),
        }


def enumerate_lassos(family: LassoFamily) -> Iterator[LassoWord]:
    for prefix, period in family.codes():
        yield family.word(prefix, period)


def side_atoms(side: Side) -> set[str]:
    if isinstance(side, BuchiAutomaton):
        return set(side.ap)
    return atoms(side)


def family_for(*sides: Side, max_prefix: int = 3, max_period: int = 3) -> LassoFamily:
    """Family over the atoms of the given sides (automaton AP order first)."""
    ap: list[str] = []
    for s in sides:
        names = list(s.ap) if isinstance(s, BuchiAutomaton) else sorted(atoms(s))
        ap.extend(a for a in names if a not in ap)
    return LassoFamily(Alphabet(tuple(ap)), max_prefix, max_period)


# ---------------------------------------------------------------------------
# family evaluators: verdicts for every lasso of a family, sharing work
# between lassos with a common period or prefix


class _FormulaEvaluator:
    """Truth at the loop start is computed once per period; prefix letters
    are then absorbed backwards with the one-step expansion laws."""

    def __init__(self, f: Formula, letters: Sequence[Letter]):
        self.formula = f
        self.letters = letters
        order: list[Formula] = []
        index: dict[Formula, int] = {}

        def visit(g: Formula):
            if g in index:
                return
            for c in _children(g):
                visit(c)
            index[g] = len(order)
            order.append(g)

        visit(f)
        self.order = order
        self.index = index
        self.root_bit = 1 << index[f]
        self.loop_cache: dict[tuple[int, ...], int] = {}
        self.step_cache: dict[tuple[int, int], int] = {}

    def loop_state(self, period: tuple[int, ...]) -> int:
        state = self.loop_cache.get(period)
        if state is None:
            vec = LassoVectors(LassoWord((), tuple(self.letters[i] for i in period)))
            state = 0
            for i, g in enumerate(self.order):
                if vec.vector(g) & 1:
                    state |= 1 << i
            self.loop_cache[period] = state
        return state

    def step(self, letter: int, nxt: int) -> int:
        key = (letter, nxt)
        cur = self.step_cache.get(key)
        if cur is not None:
            return cur
        e = self.letters[letter]
        idx = self.index
        cur = 0
        for i, g in enumerate(self.order):
            if isinstance(g, Tt):
                v = True
            elif isinstance(g, Ff):
                v = False
            elif isinstance(g, Atom):
                v = g.name in e
            elif isinstance(g, Not):
                v = not cur >> idx[g.arg] & 1
            elif isinstance(g, Or):
                v = bool(cur >> idx[g.left] & 1 or cur >> idx[g.right] & 1)
            elif isinstance(g, And):
                v = bool(cur >> idx[g.left] & 1 and cur >> idx[g.right] & 1)
            elif isinstance(g, Next):
                v = bool(nxt >> idx[g.arg] & 1)
            elif isinstance(g, Eventually):
                v = bool(cur >> idx[g.arg] & 1 or nxt >> i & 1)
            elif isinstance(g, Always):
                v = bool(cur >> idx[g.arg] & 1 and nxt >> i & 1)
            else:
                v = bool(cur >> idx[g.right] & 1 or (cur >> idx[g.left] & 1 and nxt >> i & 1))
            if v:
                cur |= 1 << i
        self.step_cache[key] = cur
        return cur

    def __call__(self, prefix: tuple[int, ...], period: tuple[int, ...]) -> bool:
        state = self.loop_state(period)
        for letter in reversed(prefix):
            state = self.step(letter, state)
        return bool(state & self.root_bit)


def _children(g: Formula) -> tuple[Formula, ...]:
    if isinstance(g, (Not, Eventually, Always, Next)):
        return (g.arg,)
    if isinstance(g, (Or, And, Until)):
        return (g.left, g.right)
    return ()


class _AutomatonEvaluator:
    """States reached after the prefix are intersected with the states from
    which the period's product graph reaches an accepting cycle."""

    def __init__(self, a: BuchiAutomaton, letters: Sequence[Letter]):
        self.automaton = a
        idx = {s: i for i, s in enumerate(a.states)}
        self.n = len(a.states)
        self.accepting = [s in a.accepting for s in a.states]
        # succ[letter][state] = bitmask of successors
        self.succ = []
        for e in letters:
            row = [0] * self.n
            for t in a.live_transitions:
                if eval_letter(t.guard, e):
                    row[idx[t.src]] |= 1 << idx[t.dst]
            self.succ.append(row)
        self.init = 1 << idx[a.initial]
        self.reach_cache: dict[tuple[int, ...], int] = {(): self.init}
        self.good_cache: dict[tuple[int, ...], int] = {}

    def post(self, mask: int, letter: int) -> int:
        row = self.succ[letter]
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= row[i]
            mask >>= 1
            i += 1
        return out

    def reach(self, prefix: tuple[int, ...]) -> int:
        r = self.reach_cache.get(prefix)
        if r is None:
            r = self.post(self.reach(prefix[:-1]), prefix[-1])
            self.reach_cache[prefix] = r
        return r

    def good(self, period: tuple[int, ...]) -> int:
        g = self.good_cache.get(period)
        if g is not None:
            return g
        q = len(period)
        n = self.n

        def successors(node):
            s, j = node
            row = self.succ[period[j]][s]
            nj = (j + 1) % q
            return [(t, nj) for t in range(n) if row >> t & 1]

        nodes = [(s, j) for j in range(q) for s in range(n)]
        targets = set()
        for comp in strongly_connected_components(nodes, successors):
            if not any(self.accepting[s] for s, _ in comp):
                continue
            if len(comp) > 1 or comp[0] in successors(comp[0]):
                targets.update(comp)
        # backward closure to the accepting cycles
        preds: dict = {}
        for node in nodes:
            for nxt in successors(node):
                preds.setdefault(nxt, []).append(node)
        seen = set(targets)
        frontier = list(targets)
        while frontier:
            node = frontier.pop()
            for p in preds.get(node, ()):
                if p not in seen:
                    seen.add(p)
                    frontier.append(p)
        g = 0
        for s in range(n):
            if (s, 0) in seen:
                g |= 1 << s
        self.good_cache[period] = g
        return g

    def __call__(self, prefix: tuple[int, ...], period: tuple[int, ...]) -> bool:
        return bool(self.reach(prefix) & self.good(period))


def _evaluator(side: Side, family: LassoFamily):
    letters = family.alphabet.letters()
    missing = side_atoms(side) - set(family.alphabet.ap)
    if missing:
        raise AlphabetMismatch(
            f"atoms {sorted(missing)} are not in the family alphabet {list(family.alphabet.ap)}"
        )
    if isinstance(side, BuchiAutomaton):
        return _AutomatonEvaluator(side, letters)
    return _FormulaEvaluator(side, letters)


def member(side: Side, w: LassoWord) -> bool:
    """Reference membership test (no sharing between words)."""
    if isinstance(side, BuchiAutomaton):
        return accepts_lasso(side, w)
    return eval_lasso(side, w)


def verdicts(side: Side, family: LassoFamily) -> list[bool]:
    """Membership of every lasso of the family, in enumeration order."""
    ev = _evaluator(side, family)
    return [ev(u, v) for u, v in family.codes()]


# ---------------------------------------------------------------------------
# reports


@dataclass
class EquivReport:
    verdict: str
    family: LassoFamily
    checked: int
    witness: Optional[LassoWord] = None
    lhs_value: Optional[bool] = None
    rhs_value: Optional[bool] = None

    @property
    def equivalent(self) -> bool:
        return self.verdict == EQUIVALENT

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "family": self.family.describe(), "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["witness_text"] = str(self.witness)
            out["lhs"] = self.lhs_value
            out["rhs"] = self.rhs_value
        return out

    def __str__(self) -> str:
        if self.equivalent:
            return f"{self.verdict} ({self.checked} lassos)"
        return (
            f"{self.verdict}: {self.witness} (lhs={self.lhs_value}, rhs={self.rhs_value}, "
            f"after {self.checked} lassos)"
        )


def bounded_equiv(lhs: Side, rhs: Side, family: LassoFamily) -> EquivReport:
    """Compare membership of both sides on every lasso of the family; the
    first disagreement in enumeration order is returned as the witness."""
    left = _evaluator(lhs, family)
    right = _evaluator(rhs, family)
    checked = 0
    for u, v in family.codes():
        checked += 1
        lv, rv = left(u, v), right(u, v)
        if lv != rv:
            w = family.word(u, v)
            # the witness is re-checked with the reference procedures
            lref, rref = member(lhs, w), member(rhs, w)
            if (lref, rref) != (lv, rv):
                raise AssertionError(f"evaluator disagreement on {w}")
            return EquivReport(COUNTEREXAMPLE, family, checked, w, lref, rref)
    return EquivReport(EQUIVALENT, family, checked)


@dataclass
class AlbaReport:
    structural: bool
    semantic: bool
    bounded: bool = True
    details: list[str] = field(default_factory=list)

    @property
    def alba(self) -> bool:
        return self.structural and self.semantic

    def to_json(self) -> dict:
        return {
            "structural": self.structural,
            "semantic": self.semantic,
            "semantic_check": "bounded" if self.bounded else "complete",
            "details": self.details,
        }


def alba_check(a: BuchiAutomaton, family: LassoFamily) -> AlbaReport:
    """Structural ALBA condition plus a bounded check that every terminal
    component is language-homogeneous and matches its annotation."""
    structural = classify_automaton(a).structural_alba
    details: list[str] = []
    if not structural:
        details.append("a non-terminal SCC has more than one state")
    dec = scc_decompose(a)
    cache: dict[str, list[bool]] = {}

    def state_verdicts(q: str) -> list[bool]:
        if q not in cache:
            cache[q] = verdicts(a.with_initial(q), family)
        return cache[q]

    semantic = True
    for comp, terminal in zip(dec.components, dec.terminal):
        if not terminal:
            continue
        first = state_verdicts(comp[0])
        for q in comp[1:]:
            if state_verdicts(q) != first:
                semantic = False
                details.append(f"states {comp[0]!r} and {q!r} of a terminal component differ")
    for ann in a.annotations:
        rho = gf_form_to_formula(ann.form)
        expected = verdicts(rho, family)
        for q in ann.states:
            if state_verdicts(q) != expected:
                semantic = False
                details.append(f"state {q!r} does not recognize {to_text(rho)}")
    return AlbaReport(structural, semantic, True, details)


# ---------------------------------------------------------------------------
# random positive LIO formulas


def _literal(rng: random.Random, names: Sequence[str]) -> Formula:
    r = rng.random()
    if r < 0.04:
        return TT
    if r < 0.06:
        return FF
    a = Atom(rng.choice(names))
    return Not(a) if r < 0.35 else a


def _prop(rng: random.Random, names: Sequence[str]) -> Formula:
    r = rng.random()
    if r < 0.8:
        return _literal(rng, names)
    op = And if r < 0.9 else Or
    return op(_literal(rng, names), _literal(rng, names))


def _split(rng: random.Random, budget: int) -> tuple[int, int]:
    left = rng.randint(1, budget - 2)
    return left, budget - 1 - left


def _fg(rng: random.Random, budget: int, names: Sequence[str]) -> Formula:
    if budget < 2:
        return _prop(rng, names)
    kinds = ["prop", "F", "G", "G", "F"]
    if budget >= 3:
        kinds += ["and", "or", "or"]
    kind = rng.choice(kinds)
    if kind == "prop":
        return _prop(rng, names)
    if kind == "F":
        return Eventually(_fg(rng, budget - 1, names))
    if kind == "G":
        return Always(_fg(rng, budget // 2, names))
    b1, b2 = _split(rng, budget)
    op = And if kind == "and" else Or
    return op(_fg(rng, b1, names), _fg(rng, b2, names))


def _lio(rng: random.Random, budget: int, names: Sequence[str]) -> Formula:
    if budget < 2:
        return _prop(rng, names)
    kinds = ["fg", "fg", "X", "U", "U", "F"]
    if budget >= 3:
        kinds += ["and", "or"]
    kind = rng.choice(kinds)
    if kind == "fg":
        return _fg(rng, budget, names)
    if kind == "X":
        return Next(_lio(rng, budget - 1, names))
    if kind == "U":
        return Until(_prop(rng, names), _lio(rng, budget - 1, names))
    if kind == "F":
        return Eventually(_lio(rng, budget - 1, names))
    b1, b2 = _split(rng, budget)
    op = And if kind == "and" else Or
    return op(_lio(rng, b1, names), _lio(rng, b2, names))


def random_lio(seed: int, max_size: int = 14, atoms: Sequence[str] = ("a", "b")) -> Formula:
    """Seeded random positive LIO formula of size at most ``max_size``."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if not atoms:
        raise ValueError("need at least one atom")
    return _lio(random.Random(seed), max_size, list(atoms))
