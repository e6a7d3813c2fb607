import random

import pytest

from conftest import all_lassos
from lioalba.buchi import (
    BuchiAutomaton,
    GFForm,
    Transition,
    accepts_lasso,
    classify_automaton,
    guards_equivalent,
    rename_states,
    scc_decompose,
    strongly_connected_components,
    trim_reachable,
)
from lioalba.components import ExpansionStrategy, expand
from lioalba.equivalence import LassoFamily, verdicts
from lioalba.lio2alba import build_concise
from lioalba.ltl import Alphabet, Atom, LassoWord, eval_lasso, parse_formula

P = parse_formula


def automaton(ap, edges, accepting=(), initial=None, states=None):
    """Build from ``(src, "guard text", dst)`` triples."""
    if states is None:
        states = []
        for s, _, d in edges:
            for q in (s, d):
                if q not in states:
                    states.append(q)
    return BuchiAutomaton(
        tuple(ap),
        tuple(states),
        initial if initial is not None else states[0],
        tuple(Transition(s, P(g), d) for s, g, d in edges),
        frozenset(accepting),
    )


SINK = automaton(["a"], [("q", "tt", "q")], ["q"])
FIG1 = expand(GFForm(P("tt"), (P("a1"), P("a2"))), ExpansionStrategy.CYCLE)


class TestConstruction:
    def test_rejects_bad_initial(self):
        with pytest.raises(ValueError):
            BuchiAutomaton(("a",), ("p",), "q", (), frozenset())

    def test_rejects_modal_guard(self):
        with pytest.raises(ValueError):
            automaton(["a"], [("p", "F a", "p")])

    def test_rejects_foreign_atoms(self):
        with pytest.raises(ValueError):
            automaton(["a"], [("p", "b", "p")])

    def test_parallel_edges_merged(self):
        a = automaton(["a", "b"], [("p", "a", "q"), ("p", "b", "q"), ("q", "tt", "q")], ["q"])
        assert len(a.transitions) == 2
        (t,) = a.outgoing("p")
        assert guards_equivalent(t.guard, P("a | b"), a.ap)

    def test_merge_preserves_language(self):
        split = automaton(["a", "b"], [("p", "a & b", "q"), ("p", "a & !b", "q"), ("p", "!a", "p"),
                                       ("q", "b", "q"), ("q", "!b", "p")], ["q"])
        merged = automaton(["a", "b"], [("p", "a", "q"), ("p", "!a", "p"),
                                        ("q", "b", "q"), ("q", "!b", "p")], ["q"])
        for w in all_lassos(("a", "b"), 2, 2):
            assert accepts_lasso(split, w) == accepts_lasso(merged, w)


class TestSCC:
    def test_single_loop(self):
        dec = scc_decompose(SINK)
        assert dec.components == (("q",),) and dec.terminal == (True,)

    def test_two_cycle(self):
        a = automaton(["a"], [("p", "a", "q"), ("q", "a", "p")])
        assert scc_decompose(a).components == (("p", "q"),)

    def test_fig1_single_terminal_component(self):
        dec = scc_decompose(FIG1)
        assert len(dec.components) == 1 and len(dec.components[0]) == 3 and dec.terminal[0]

    def test_reverse_topological_order(self):
        a = automaton(["a"], [("p", "a", "p"), ("p", "!a", "q"), ("q", "tt", "r"), ("r", "tt", "r")])
        dec = scc_decompose(a)
        pos = {c[0]: i for i, c in enumerate(dec.components)}
        assert pos["r"] < pos["q"] < pos["p"]
        for i, j in dec.condensation:
            assert j < i
        assert dec.trivial[pos["q"]] and not dec.trivial[pos["p"]]

    def test_dead_edges_ignored(self):
        a = automaton(["a"], [("p", "a & !a", "q"), ("q", "tt", "p"), ("p", "tt", "p")])
        dec = scc_decompose(a)
        assert len(dec.components) == 2

    def test_partition_on_random_graphs(self):
        rng = random.Random(3)
        for _ in range(200):
            n = rng.randint(1, 8)
            succ = {i: [j for j in range(n) if rng.random() < 0.25] for i in range(n)}
            comps = strongly_connected_components(range(n), succ.__getitem__)
            assert sorted(s for c in comps for s in c) == list(range(n))
            reach = {i: _reach(i, succ) for i in range(n)}
            for c in comps:
                for x in c:
                    for y in c:
                        assert y in reach[x]
            index = {s: k for k, c in enumerate(comps) for s in c}
            for i in range(n):
                for j in succ[i]:
                    assert index[j] <= index[i]


def _reach(i, succ):
    seen, todo = {i}, [i]
    while todo:
        for j in succ[todo.pop()]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return seen


class TestClassify:
    def test_sink(self):
        k = classify_automaton(SINK)
        assert (k.terminal, k.weak, k.linear, k.min_k, k.structural_alba) == (True, True, True, 1, True)

    def test_fig1(self):
        k = classify_automaton(FIG1)
        assert not k.weak and k.structural_alba and k.min_k is None

    def test_non_terminal_cycle_is_not_alba(self):
        a = automaton(["a"], [("p", "a", "q"), ("q", "!a", "p"), ("q", "a", "r"), ("r", "tt", "r")], ["r"])
        assert not classify_automaton(a).structural_alba

    def test_terminal_requires_totality(self):
        a = automaton(["a"], [("p", "a", "p")], ["p"])
        assert not classify_automaton(a).terminal

    def test_invariant_under_renaming(self):
        for a in (SINK, FIG1, expand(GFForm(P("tt"), (P("a"), P("b"))), ExpansionStrategy.SUBSET)):
            m = {s: f"s{i}" for i, s in enumerate(reversed(a.states))}
            assert classify_automaton(rename_states(a, m)) == classify_automaton(a)

    def test_linear_means_only_self_loops(self):
        rng = random.Random(11)
        found = 0
        for _ in range(300):
            n = rng.randint(1, 5)
            edges = [(f"q{i}", rng.choice(["a", "!a", "tt"]), f"q{j}")
                     for i in range(n) for j in range(n) if rng.random() < 0.35]
            if not edges:
                continue
            a = automaton(["a"], edges, [e[0] for e in edges if rng.random() < 0.3])
            if classify_automaton(a).linear:
                found += 1
                for comp in scc_decompose(a).components:
                    assert len(comp) == 1
        assert found > 10


class TestAcceptance:
    def test_sink_accepts_everything(self):
        for w in all_lassos(("a",), 2, 2):
            assert accepts_lasso(SINK, w)

    def test_fig1_examples(self):
        a1, a2 = frozenset({"a1"}), frozenset({"a2"})
        assert accepts_lasso(FIG1, LassoWord((), (a1, a2)))
        assert not accepts_lasso(FIG1, LassoWord((), (a1,)))

    def test_fig1_agrees_with_formula(self):
        phi = P("G F a1 & G F a2")
        for w in all_lassos(("a1", "a2"), 2, 2):
            assert accepts_lasso(FIG1, w) == eval_lasso(phi, w)

    def test_accepting_state_off_cycle_does_not_count(self):
        a = automaton(["a"], [("p", "tt", "q"), ("q", "tt", "q")], ["p"])
        assert not accepts_lasso(a, LassoWord((), (frozenset(),)))

    def test_fast_evaluator_matches_reference(self):
        fam = LassoFamily(Alphabet(("a", "b")), 2, 2)
        words = list(all_lassos(("a", "b"), 2, 2))
        for text in ("a U b", "G F a & F G b", "X (a | G b)", "F a & F b"):
            a = build_concise(P(text)).to_buchi()
            assert verdicts(a, fam) == [accepts_lasso(a, w) for w in words]


class TestTrim:
    def test_isolated_state_removed(self):
        a = automaton(["a"], [("q", "tt", "q")], ["q"], states=["q", "z"])
        t = trim_reachable(a)
        assert t.states == ("q",) and t.transitions == a.transitions

    def test_fixpoint(self):
        assert trim_reachable(FIG1) == FIG1

    def test_injected_unreachable_state(self):
        a = build_concise(P("a U b")).to_buchi()
        bigger = BuchiAutomaton(a.ap, a.states + ("{G a}",), a.initial,
                                a.transitions + (Transition("{G a}", Atom("a"), "{G a}"),),
                                a.accepting, a.annotations)
        t = trim_reachable(bigger)
        assert len(t.states) == 2
        for w in all_lassos(("a", "b"), 2, 2):
            assert accepts_lasso(t, w) == accepts_lasso(bigger, w)
