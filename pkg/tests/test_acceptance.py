"""Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.

Run under pytest, or directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import dot_well_formed, structurally_equal  # noqa: E402
from lioalba.alba2lio import translate_automaton  # noqa: E402
from lioalba.buchi import (  # noqa: E402
    BuchiAutomaton,
    GFForm,
    Transition,
    classify_automaton,
    guards_equivalent,
)
from lioalba.components import ExpansionStrategy, expand  # noqa: E402
from lioalba.corpus import corpus_report, sample_corpus_path  # noqa: E402
from lioalba.equivalence import (  # noqa: E402
    LassoFamily,
    alba_check,
    bounded_equiv,
    enumerate_lassos,
    random_lio,
)
from lioalba.formats import dumps_json, loads_json, parse_hoa, to_dot, to_hoa  # noqa: E402
from lioalba.lio2alba import build_concise, is_gf_set, r_of, translate  # noqa: E402
from lioalba.ltl import (  # noqa: E402
    Alphabet,
    classify_fragment,
    conj,
    eval_lasso_all,
    eval_letter,
    less_than,
    parse_formula,
    size_of,
    size_of_set,
)

P = parse_formula
AB = Alphabet(("a", "b"))


# ---------------------------------------------------------------------------
# criteria; each returns (passed, detail)


def criterion_1():
    """Lemmas 1, 3 and 4 on 500 random formulas (size <= 14, 3 atoms), < 60 s."""
    start = time.perf_counter()
    violations = 0
    sets_checked = 0
    for seed in range(500):
        phi = random_lio(seed, 14, ("a", "b", "c"))
        for _, succ in r_of([phi]):
            violations += sum(1 for psi in succ if not (psi == phi or size_of(psi) < size_of(phi)))
        for s in build_concise(phi).states:
            sets_checked += 1
            result = r_of(s)
            size = size_of_set(s)
            violations += sum(
                1 for _, succ in result if not (succ == s or less_than(size_of_set(succ), size))
            )
            if is_gf_set(s) != all(succ == s for _, succ in result):
                violations += 1
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 60
    return ok, f"{violations} violations over 500 formulas / {sets_checked} sets in {elapsed:.1f}s"


def criterion_2():
    """phi == OR (alpha & X AND S) on all lassos p <= 2, q <= 2 over 2 atoms."""
    words = list(enumerate_lassos(LassoFamily(AB, 2, 2)))
    mismatches = 0
    for seed in range(200):
        phi = random_lio(seed, 14)
        result = list(r_of([phi]))
        succs = [conj(*s) for _, s in result]
        for w in words:
            lhs = eval_lasso_all([phi], w)[0]
            tails = eval_lasso_all(succs, w.shift())
            rhs = any(eval_letter(g, w.letter(0)) and t for (g, _), t in zip(result, tails))
            mismatches += lhs != rhs
    return mismatches == 0, f"{mismatches} mismatches over 200 formulas x {len(words)} lassos"


def criterion_3():
    """translate(phi) equivalent to phi on p, q <= 3 and structurally ALBA, < 5 min."""
    start = time.perf_counter()
    fam = LassoFamily(AB, 3, 3)
    failures, non_alba = [], 0
    for seed in range(200):
        phi = random_lio(seed, 14)
        a = translate(phi)
        if not bounded_equiv(phi, a, fam).equivalent:
            failures.append(seed)
        if not classify_automaton(a).structural_alba:
            non_alba += 1
    elapsed = time.perf_counter() - start
    ok = not failures and non_alba == 0 and elapsed < 300
    return ok, (f"{len(failures)} counterexamples, {non_alba} non-ALBA outputs, "
                f"{len(fam)} lassos each, {elapsed:.1f}s")


def _edges(a):
    return {(t.src, t.dst): t.guard for t in a.transitions}


def _matches(a, expected):
    got = _edges(a)
    want = {(s, d): P(g) for s, g, d in expected}
    return got.keys() == want.keys() and all(guards_equivalent(got[k], want[k], a.ap) for k in want)


FIGURES = {
    ExpansionStrategy.CYCLE: [
        ("w0", "!a1", "w0"), ("w0", "a1", "w1"), ("w1", "!a2", "w1"), ("w1", "a2", "w2"),
        ("w2", "tt", "w0"),
    ],
    ExpansionStrategy.SHORTCUT: [
        ("w0", "!a1", "w0"), ("w0", "a1 & !a2", "w1"), ("w0", "a1 & a2", "w2"),
        ("w1", "!a2", "w1"), ("w1", "a2", "w2"),
        ("w2", "!a1", "w0"), ("w2", "a1 & !a2", "w1"), ("w2", "a1 & a2", "w2"),
    ],
    ExpansionStrategy.SUBSET: [
        (src, g, d)
        for src in ("{}", "{1,2}")
        for g, d in [("!a1 & !a2", "{}"), ("a1 & !a2", "{1}"), ("!a1 & a2", "{2}"), ("a1 & a2", "{1,2}")]
    ] + [("{1}", "!a2", "{1}"), ("{1}", "a2", "{1,2}"), ("{2}", "!a1", "{2}"), ("{2}", "a1", "{1,2}")],
}
FIGURE_STATES = {ExpansionStrategy.CYCLE: 3, ExpansionStrategy.SHORTCUT: 3, ExpansionStrategy.SUBSET: 4}


def criterion_4():
    """Figure-exact expansions of G tt & GF a1 & GF a2, pairwise equivalent."""
    rho = GFForm(P("tt"), (P("a1"), P("a2")))
    autos = {s: expand(rho, s) for s in ExpansionStrategy}
    problems = []
    for s, a in autos.items():
        if len(a.states) != FIGURE_STATES[s]:
            problems.append(f"{s.value}: {len(a.states)} states")
        if not _matches(a, FIGURES[s]):
            problems.append(f"{s.value}: edges differ")
    fam = LassoFamily(Alphabet(("a1", "a2")), 2, 3)
    for x, y in itertools.combinations(ExpansionStrategy, 2):
        if not bounded_equiv(autos[x], autos[y], fam).equivalent:
            problems.append(f"{x.value} vs {y.value} differ")
    counts = ", ".join(f"{s.value}={len(a.states)}" for s, a in autos.items())
    return not problems, f"states {counts}; " + ("; ".join(problems) or "edges match, pairwise equivalent")


def criterion_5():
    """translate_automaton(translate(phi)) equivalent to phi on p, q <= 3."""
    fam = LassoFamily(AB, 3, 3)
    failures = 0
    not_lio = 0
    for seed in range(200):
        phi = random_lio(seed, 14)
        back = translate_automaton(translate(phi))
        not_lio += not classify_fragment(back).lio
        failures += not bounded_equiv(phi, back, fam).equivalent
    return failures == 0 and not_lio == 0, f"{failures} counterexamples, {not_lio} non-LIO results"


def criterion_6():
    """G(G(a | F b) | G(c | F d)) translates to a structural ALBA, equivalent on p, q <= 2."""
    phi = P("G (G (a | F b) | G (c | F d))")
    a = translate(phi)
    fam = LassoFamily(Alphabet(("a", "b", "c", "d")), 2, 2)
    structural = classify_automaton(a).structural_alba
    equiv = bounded_equiv(phi, a, fam)
    semantic = alba_check(a, LassoFamily(fam.alphabet, 1, 2)).semantic
    ok = structural and equiv.equivalent and semantic
    return ok, (f"{len(a.states)} states, structural_alba={structural}, semantic={semantic}, "
                f"{equiv.verdict} on {len(fam)} lassos")


def _auto(ap, edges, accepting, states=None):
    if states is None:
        states = list(dict.fromkeys(q for s, _, d in edges for q in (s, d)))
    return BuchiAutomaton(tuple(ap), tuple(states), states[0],
                          tuple(Transition(s, P(g), d) for s, g, d in edges), frozenset(accepting))


HIERARCHY = {
    # non-accepting 2-cycle feeding an accepting total sink
    "terminal-not-linear": (
        _auto(["a"], [("p", "a", "q"), ("q", "a", "p"), ("q", "!a", "r"), ("r", "tt", "r")], ["r"]),
        dict(terminal=True, weak=True, linear=False, min_k=2, structural_alba=False),
    ),
    # F G a style: accepting state with a partial self-loop
    "linear-not-terminal": (
        _auto(["a"], [("p", "tt", "p"), ("p", "a", "q"), ("q", "a", "q")], ["q"]),
        dict(terminal=False, weak=True, linear=True, min_k=1, structural_alba=True),
    ),
    # accepting 3-cycle
    "weak-not-1-weak": (
        _auto(["a"], [("p", "a", "q"), ("q", "a", "r"), ("r", "a", "p"), ("p", "!a", "p")], ["p", "q", "r"]),
        dict(terminal=False, weak=True, linear=False, min_k=3, structural_alba=True),
    ),
    # accepting 2-cycle left through a non-accepting state
    "2-weak": (
        _auto(["a"], [("p", "a", "q"), ("q", "a", "p"), ("q", "!a", "r"), ("r", "a", "r")], ["p", "q"]),
        dict(terminal=False, weak=True, linear=False, min_k=2, structural_alba=False),
    ),
    "ALBA-structural-not-weak": (
        translate(P("G F a")),
        dict(terminal=False, weak=False, linear=False, min_k=None, structural_alba=True),
    ),
    # mixed non-terminal 2-cycle
    "general": (
        _auto(["a", "b"], [("p", "a", "q"), ("q", "tt", "p"), ("q", "b", "r"), ("r", "tt", "r")], ["q"]),
        dict(terminal=False, weak=False, linear=False, min_k=None, structural_alba=False),
    ),
}


def criterion_7():
    """classify_automaton reproduces the expected flags on six hand-built automata."""
    wrong = []
    for name, (a, expected) in HIERARCHY.items():
        k = classify_automaton(a)
        got = {key: getattr(k, key) for key in expected}
        if got != expected:
            wrong.append(f"{name}: {got}")
    return not wrong, "; ".join(wrong) or f"{len(HIERARCHY)} automata classified as expected"


def criterion_8():
    """The bundled 20-formula sample has at least one negation that is not LIO."""
    report = corpus_report(sample_corpus_path())
    non_lio = [r.line for r in report.records if r.error is None and not r.flags.lio]
    ok = report.total == 20 and len(non_lio) >= 1
    return ok, (f"negation LIO after positive form: {report.lio_count}/{report.total} "
                f"({report.fraction_text()}); non-LIO lines {non_lio}")


def criterion_9():
    """100 seeded translations re-parse from HOA and JSON; DOT is well-formed."""
    bad = []
    strategies = list(ExpansionStrategy)
    for seed in range(100):
        a = translate(random_lio(seed, 14, ("a", "b", "c")), strategies[seed % 3])
        if loads_json(dumps_json(a)) != a:
            bad.append(f"json:{seed}")
        if not structurally_equal(parse_hoa(to_hoa(a)), a):
            bad.append(f"hoa:{seed}")
        if not dot_well_formed(to_dot(a)):
            bad.append(f"dot:{seed}")
    return not bad, f"{len(bad)} failures" + (f": {bad[:5]}" if bad else " over 100 automata x 3 formats")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def _line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for n, criterion in enumerate(CRITERIA, start=1):
        ok, detail = criterion()
        results.append(ok)
        print(_line(n, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
