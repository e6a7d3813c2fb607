"""Command line entry point.

Exit codes: 0 success / equivalent, 1 semantic negative (counterexample,
failed ``--expect``), 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .alba2lio import AlbaStructureError, translate_automaton
from .buchi import GFForm, classify_automaton
from .components import ExpansionStrategy, expand
from .corpus import CorpusError, corpus_report, sample_corpus_path
from .equivalence import AlphabetMismatch, LassoFamily, alba_check, bounded_equiv, family_for, random_lio
from .formats import FormatError, dumps, load_automaton
from .lio2alba import NotLIOError, build_concise, expand_concise
from .ltl import (
    Alphabet,
    FormulaSyntaxError,
    classify_fragment,
    parse_formula,
    to_positive_form,
    to_text,
)

log = logging.getLogger("lioalba")

_STRATEGIES = [s.value for s in ExpansionStrategy]
_FRAGMENTS = {
    "ltl0": "propositional",
    "fg": "fg",
    "lio": "lio",
    "flat": "flat_ux",
}
_CLASSES = ("terminal", "weak", "linear", "alba")


class UsageError(Exception):
    pass


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _formula_arg(args) -> str:
    if args.formula is not None:
        return args.formula
    if args.file is not None:
        with open(args.file) as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) != 1:
            raise UsageError(f"{args.file}: expected exactly one formula line, found {len(lines)}")
        return lines[0]
    raise UsageError("one of --formula or --file is required")


def _side(text: str):
    if os.path.isfile(text):
        return load_automaton(text)
    return parse_formula(text)


def cmd_translate(args) -> int:
    phi = to_positive_form(parse_formula(_formula_arg(args)))
    concise = build_concise(phi)
    log.info("concise automaton: %d states", len(concise.states))
    if args.concise:
        a = concise.to_buchi()
    else:
        a = expand_concise(concise, ExpansionStrategy(args.strategy))
    _emit(dumps(a, args.format or "json"), args.out)
    return 0


def cmd_to_formula(args) -> int:
    a = load_automaton(args.automaton)
    phi = translate_automaton(a)
    if args.format == "json":
        data = {"formula": to_text(phi), "fragments": classify_fragment(phi).labels()}
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        _emit(to_text(phi) + "\n", args.out)
    return 0


def cmd_classify(args) -> int:
    if args.automaton is not None:
        a = load_automaton(args.automaton)
        cls = classify_automaton(a)
        data = {
            "terminal": cls.terminal,
            "weak": cls.weak,
            "linear": cls.linear,
            "min_k": cls.min_k,
            "structural_alba": cls.structural_alba,
        }
        if args.max_prefix is not None:
            fam = LassoFamily(a.alphabet, args.max_prefix, args.max_period)
            data["alba_check"] = alba_check(a, fam).to_json()
        flags = {**data, "alba": cls.structural_alba}
        if args.expect is not None and args.expect not in _CLASSES:
            raise UsageError(f"--expect for automata must be one of {', '.join(_CLASSES)}")
    else:
        phi = parse_formula(_formula_arg(args))
        strict = classify_fragment(phi)
        normalized = classify_fragment(to_positive_form(phi))
        data = {
            "formula": to_text(phi),
            "fragments": strict.labels(),
            "positive_form": to_text(to_positive_form(phi)),
            "fragments_after_pnf": normalized.labels(),
        }
        if args.expect is not None and args.expect not in _FRAGMENTS:
            raise UsageError(f"--expect for formulas must be one of {', '.join(_FRAGMENTS)}")
        flags = {k: getattr(strict, v) for k, v in _FRAGMENTS.items()}
    if args.format == "json":
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        lines = [f"{k}: {v}" for k, v in data.items()]
        if "fragments" in data and "LIO" not in data["fragments"]:
            lines.append("not LIO (as written)")
        _emit("\n".join(lines) + "\n", args.out)
    if args.expect is not None and not flags[args.expect]:
        return 1
    return 0


def cmd_expand(args) -> int:
    rho = GFForm(parse_formula(args.alpha0), tuple(parse_formula(x) for x in args.alpha or ()))
    a = expand(rho, ExpansionStrategy(args.strategy))
    _emit(dumps(a, args.format or "json"), args.out)
    return 0


def cmd_equiv(args) -> int:
    lhs, rhs = _side(args.lhs), _side(args.rhs)
    fam = family_for(lhs, rhs, max_prefix=args.max_prefix, max_period=args.max_period)
    extra = [a for a in args.atoms or () if a not in fam.alphabet.ap]
    if extra:
        fam = LassoFamily(Alphabet(fam.alphabet.ap + tuple(extra)), fam.max_prefix, fam.max_period)
    report = bounded_equiv(lhs, rhs, fam)
    if args.format == "json":
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    else:
        _emit(str(report) + "\n", args.out)
    return 0 if report.equivalent else 1


def cmd_corpus(args) -> int:
    report = corpus_report(args.file or sample_corpus_path(), keep_going=args.keep_going)
    if args.format == "json":
        _emit(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    else:
        _emit(report.to_text(), args.out)
    return 0


def cmd_random(args) -> int:
    atoms = args.atoms or ["a", "b"]
    lines = [
        to_text(random_lio(args.seed + i, args.max_size, atoms)) for i in range(args.count)
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "hoa", "dot"], default=None)
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="lioalba", description="LIO formulas <-> almost linear Büchi automata"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def formula_source(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--formula", help="formula text")
        g.add_argument("--file", help="file holding one formula")

    p = sub.add_parser("translate", parents=[common], help="LIO formula -> ALBA")
    formula_source(p)
    p.add_argument("--strategy", choices=_STRATEGIES, default="shortcut")
    p.add_argument("--concise", action="store_true", help="emit the labelled concise form")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("to-formula", parents=[common], help="annotated ALBA -> LIO formula")
    p.add_argument("--automaton", required=True, help="automaton file (JSON or HOA)")
    p.set_defaults(func=cmd_to_formula)

    p = sub.add_parser("classify", parents=[common], help="fragment or automaton class")
    formula_source(p)
    p.add_argument("--automaton", help="automaton file (JSON or HOA)")
    p.add_argument("--expect", help="exit 1 unless this flag holds "
                   f"(formulas: {', '.join(_FRAGMENTS)}; automata: {', '.join(_CLASSES)})")
    p.add_argument("--max-prefix", type=int, default=None,
                   help="also run the bounded semantic ALBA check")
    p.add_argument("--max-period", type=int, default=2)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("expand", parents=[common], help="GF-form -> terminal component")
    p.add_argument("--alpha0", default="tt")
    p.add_argument("--alpha", action="append", help="repeatable GF obligation")
    p.add_argument("--strategy", choices=_STRATEGIES, default="shortcut")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("equiv", parents=[common], help="bounded lasso equivalence")
    p.add_argument("--lhs", required=True, help="formula text or automaton file")
    p.add_argument("--rhs", required=True, help="formula text or automaton file")
    p.add_argument("--max-prefix", type=int, default=3)
    p.add_argument("--max-period", type=int, default=3)
    p.add_argument("--atoms", nargs="*", help="extra atoms for the alphabet")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("corpus", parents=[common], help="fragment survey of negated formulas")
    p.add_argument("--file", help="one formula per line, # comments (default: bundled sample)")
    p.add_argument("--keep-going", action="store_true", help="skip unparsable lines")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("random", parents=[common], help="seeded random positive LIO formulas")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-size", type=int, default=14)
    p.add_argument("--atoms", nargs="*")
    p.set_defaults(func=cmd_random)
    return parser


_STAGE_ERRORS = (
    FormulaSyntaxError,
    FormatError,
    NotLIOError,
    AlbaStructureError,
    AlphabetMismatch,
    CorpusError,
    UsageError,
    OSError,
    ValueError,
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except _STAGE_ERRORS as exc:
        stage = type(exc).__name__
        print(f"lioalba {args.command}: {stage}: {exc}", file=sys.stderr)
        return 2


run = main


if __name__ == "__main__":
    sys.exit(main())
