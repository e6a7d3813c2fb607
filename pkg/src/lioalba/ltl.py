"""LTL formulas: syntax tree, text syntax, positive form, size measure,
fragment membership and exact evaluation over letters and lasso words.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Letter = frozenset  # set of atom names that hold at one position


class Formula:
    """Base class of the syntax tree.  Nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Tt(Formula):
    def __repr__(self) -> str:
        return "Tt()"


@dataclass(frozen=True, repr=False)
class Ff(Formula):
    def __repr__(self) -> str:
        return "Ff()"


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


TT = Tt()
FF = Ff()

_UNARY = (Not, Eventually, Always, Next)
_BINARY = (Or, And, Until)
_MODAL = (Eventually, Always, Next, Until)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


# ---------------------------------------------------------------------------
# construction helpers


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; drops ``tt`` and collapses on ``ff``."""
    kept = []
    for p in parts:
        if isinstance(p, Ff):
            return FF
        if not isinstance(p, Tt):
            kept.append(p)
    if not kept:
        return TT
    out = kept[0]
    for p in kept[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``ff``."""
    parts = list(parts)
    if not parts:
        return FF
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def neg(f: Formula) -> Formula:
    if isinstance(f, Tt):
        return FF
    if isinstance(f, Ff):
        return TT
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, _UNARY):
        return (f.arg,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def flatten(f: Formula, kind: type) -> list[Formula]:
    """Operands of a nested ``kind`` (And or Or) chain, left to right."""
    if isinstance(f, kind):
        return flatten(f.left, kind) + flatten(f.right, kind)
    return [f]


# ---------------------------------------------------------------------------
# text syntax

_TOKEN = re.compile(r"\s*(?:(->)|([()!&|])|([A-Za-z_][A-Za-z0-9_]*))")
_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_OPS = {"F": Eventually, "G": Always, "X": Next}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        tok = m.group(m.lastindex)
        if m.lastindex == 3 and tok not in ("F", "G", "X", "U", "tt", "ff"):
            if not _ATOM.match(tok):
                # glued unary prefixes such as ``GFa``
                k = len(tok) - len(tok.lstrip("FGX"))
                if k == 0 or not _ATOM.match(tok[k:]):
                    raise FormulaSyntaxError(f"unknown token {tok!r}", start)
                tokens.extend((op, start + i) for i, op in enumerate(tok[:k]))
                tok, start = tok[k:], start + k
        tokens.append((tok, start))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        tok, pos = self.tokens[self.i]
        found = repr(tok) if tok else "end of input"
        raise FormulaSyntaxError(f"{message}, found {found}", pos)

    def parse(self) -> Formula:
        f = self.implication()
        if self.peek() != "":
            self.error("expected end of input")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Or(Not(left), self.implication())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok in _OPS:
            self.take()
            return _OPS[tok](self.unary())
        if tok == "(":
            self.take()
            f = self.implication()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return f
        if tok == "tt":
            self.take()
            return TT
        if tok == "ff":
            self.take()
            return FF
        if tok and _ATOM.match(tok):
            self.take()
            return Atom(tok)
        self.error("expected a formula")


def parse_formula(text: str) -> Formula:
    """Parse the ASCII syntax.

    Precedence, tightest first: ``! F G X``, ``U`` (right associative),
    ``&``, ``|``, ``->`` (right associative, sugar for ``!a | b``).
    """
    return _Parser(text).parse()


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return 1
    if isinstance(f, And):
        return 2
    if isinstance(f, Until):
        return 3
    return 4


def _wrap(f: Formula, paren: bool) -> str:
    s = to_text(f)
    return f"({s})" if paren else s


@lru_cache(maxsize=1 << 16)
def to_text(f: Formula) -> str:
    """Print with the minimal parentheses that reparse to the same tree."""
    if isinstance(f, Tt):
        return "tt"
    if isinstance(f, Ff):
        return "ff"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.arg, _prec(f.arg) < 4)
    if isinstance(f, (Eventually, Always, Next)):
        op = {Eventually: "F", Always: "G", Next: "X"}[type(f)]
        return f"{op} " + _wrap(f.arg, _prec(f.arg) < 4)
    if isinstance(f, Or):
        return f"{to_text(f.left)} | {_wrap(f.right, _prec(f.right) <= 1)}"
    if isinstance(f, And):
        left = _wrap(f.left, _prec(f.left) < 2)
        return f"{left} & {_wrap(f.right, _prec(f.right) <= 2)}"
    if isinstance(f, Until):
        left = _wrap(f.left, _prec(f.left) <= 3)
        return f"{left} U {_wrap(f.right, _prec(f.right) < 3)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# positive form


def to_positive_form(f: Formula) -> Formula:
    """Push negations down to atoms and constants."""
    if isinstance(f, Not):
        return _negated(f.arg)
    if isinstance(f, (Tt, Ff, Atom)):
        return f
    if isinstance(f, _BINARY):
        return type(f)(to_positive_form(f.left), to_positive_form(f.right))
    return type(f)(to_positive_form(f.arg))


def _negated(f: Formula) -> Formula:
    if isinstance(f, Tt):
        return FF
    if isinstance(f, Ff):
        return TT
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return to_positive_form(f.arg)
    if isinstance(f, Or):
        return And(_negated(f.left), _negated(f.right))
    if isinstance(f, And):
        return Or(_negated(f.left), _negated(f.right))
    if isinstance(f, Eventually):
        return Always(_negated(f.arg))
    if isinstance(f, Always):
        return Eventually(_negated(f.arg))
    if isinstance(f, Next):
        return Next(_negated(f.arg))
    if isinstance(f, Until):
        # !(a U b) == (!b U (!a & !b)) | G !b
        nl, nr = _negated(f.left), _negated(f.right)
        return Or(Until(nr, And(nl, nr)), Always(nr))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# fragments


@lru_cache(maxsize=1 << 16)
def is_propositional(f: Formula) -> bool:
    """Membership in LTL(): no temporal operator at all."""
    if isinstance(f, _MODAL):
        return False
    return all(is_propositional(c) for c in children(f))


def is_positive(f: Formula) -> bool:
    """No temporal operator in the scope of a negation."""
    if isinstance(f, Not):
        return is_propositional(f.arg)
    return all(is_positive(c) for c in children(f))


def is_fg(f: Formula) -> bool:
    """Membership in LTL(F,G)."""
    if isinstance(f, (Next, Until)):
        return False
    return all(is_fg(c) for c in children(f))


@lru_cache(maxsize=1 << 16)
def is_lio(f: Formula) -> bool:
    """Syntactic LIO membership of ``f`` as written.

    ``F g`` is read as ``tt U g``, so it is accepted over any LIO body.
    """
    if is_fg(f):
        return True
    if isinstance(f, (Or, And)):
        return is_lio(f.left) and is_lio(f.right)
    if isinstance(f, (Next, Eventually)):
        return is_lio(f.arg)
    if isinstance(f, Until):
        return is_propositional(f.left) and is_lio(f.right)
    return False


def is_flat_ux(f: Formula) -> bool:
    """Membership in flat LTL+(U,X), again reading ``F g`` as ``tt U g``."""
    if is_propositional(f):
        return True
    if isinstance(f, (Or, And)):
        return is_flat_ux(f.left) and is_flat_ux(f.right)
    if isinstance(f, (Next, Eventually)):
        return is_flat_ux(f.arg)
    if isinstance(f, Until):
        return is_propositional(f.left) and is_flat_ux(f.right)
    return False


@dataclass(frozen=True)
class FragmentClass:
    propositional: bool
    fg: bool
    lio: bool
    flat_ux: bool

    def labels(self) -> list[str]:
        names = [
            (self.propositional, "LTL()"),
            (self.fg, "LTL(F,G)"),
            (self.lio, "LIO"),
            (self.flat_ux, "flatLTL+(U,X)"),
        ]
        return [name for flag, name in names if flag]

    def __str__(self) -> str:
        return "{" + ", ".join(self.labels()) + "}"


def classify_fragment(f: Formula) -> FragmentClass:
    return FragmentClass(
        propositional=is_propositional(f),
        fg=is_fg(f),
        lio=is_lio(f),
        flat_ux=is_flat_ux(f),
    )


def classify_after_pnf(f: Formula) -> FragmentClass:
    """Fragment flags of the positive form of ``f``: the "expressible as"
    reading used for corpus queries."""
    return classify_fragment(to_positive_form(f))


# ---------------------------------------------------------------------------
# size measure


@lru_cache(maxsize=1 << 16)
def size_of(f: Formula) -> int:
    """Size measure on positive formulas; every LTL() formula counts 1."""
    if is_propositional(f):
        return 1
    if isinstance(f, (Or, And)):
        return size_of(f.left) + 1 + size_of(f.right)
    if isinstance(f, (Eventually, Next)):
        return 1 + size_of(f.arg)
    if isinstance(f, Always):
        return 2 * size_of(f.arg)
    if isinstance(f, Until):
        return 1 + size_of(f.right)
    raise ValueError(f"size is defined on positive formulas only: {to_text(f)}")


@dataclass(frozen=True)
class SetSize:
    """Size of a formula set: the maximal element size ``k`` and the counts
    of elements of size k, k-1, ..., 1."""

    k: int
    histogram: tuple[int, ...]

    def __lt__(self, other: SetSize) -> bool:
        return less_than(self, other)

    def __str__(self) -> str:
        if self.k == 0:
            return "(0,-)"
        return f"({self.k},({','.join(map(str, self.histogram))}))"


EMPTY_SET_SIZE = SetSize(0, ())


def size_of_set(formulas: Iterable[Formula]) -> SetSize:
    sizes = [size_of(f) for f in set(formulas)]
    if not sizes:
        return EMPTY_SET_SIZE
    k = max(sizes)
    return SetSize(k, tuple(sizes.count(j) for j in range(k, 0, -1)))


def less_than(x: SetSize, y: SetSize) -> bool:
    if x.k != y.k:
        return x.k < y.k
    return x.histogram < y.histogram


def formula_key(f: Formula) -> tuple[int, str]:
    """Canonical total order: size, then printed text."""
    try:
        s = size_of(f)
    except ValueError:
        s = sum(1 for _ in subformulas(f))
    return (s, to_text(f))


def sort_formulas(formulas: Iterable[Formula]) -> list[Formula]:
    return sorted(set(formulas), key=formula_key)


# ---------------------------------------------------------------------------
# semantics


@dataclass(frozen=True)
class Alphabet:
    ap: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "ap", tuple(self.ap))
        if len(set(self.ap)) != len(self.ap):
            raise ValueError(f"duplicate atoms in alphabet {self.ap}")

    def letters(self) -> list[Letter]:
        """All 2^|AP'| letters, ordered by binary counting over ``ap``."""
        return [
            frozenset(a for i, a in enumerate(self.ap) if code >> i & 1)
            for code in range(1 << len(self.ap))
        ]

    def __len__(self) -> int:
        return 1 << len(self.ap)

    def contains(self, letter: Iterable[str]) -> bool:
        return set(letter) <= set(self.ap)


def letter_text(letter: Iterable[str]) -> str:
    return "{" + ",".join(sorted(letter)) + "}"


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``prefix . period^omega``."""

    prefix: tuple[Letter, ...]
    period: tuple[Letter, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(e) for e in self.prefix))
        object.__setattr__(self, "period", tuple(frozenset(e) for e in self.period))
        if not self.period:
            raise ValueError("lasso period must be non-empty")

    @property
    def positions(self) -> int:
        return len(self.prefix) + len(self.period)

    @property
    def loop_start(self) -> int:
        return len(self.prefix)

    def letter(self, i: int) -> Letter:
        """Letter at position ``i`` of the infinite word."""
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.period[(i - p) % len(self.period)]

    def successor(self, i: int) -> int:
        """Next node of the lasso graph (positions 0..p+q-1)."""
        return i + 1 if i + 1 < self.positions else self.loop_start

    def letters(self) -> tuple[Letter, ...]:
        return self.prefix + self.period

    def shift(self) -> LassoWord:
        """The suffix starting at position 1."""
        if self.prefix:
            return LassoWord(self.prefix[1:], self.period)
        return LassoWord((), self.period[1:] + self.period[:1])

    def __str__(self) -> str:
        pre = "".join(letter_text(e) for e in self.prefix)
        per = "".join(letter_text(e) for e in self.period)
        return f"{pre}({per})^w"

    def to_json(self) -> dict:
        return {
            "prefix": [sorted(e) for e in self.prefix],
            "period": [sorted(e) for e in self.period],
        }


def eval_letter(alpha: Formula, letter: Iterable[str]) -> bool:
    """Truth of a modality-free formula on a single letter."""
    if not is_propositional(alpha):
        raise ValueError(f"not an LTL() formula: {to_text(alpha)}")
    return _eval_prop(alpha, frozenset(letter))


def _eval_prop(f: Formula, letter: frozenset) -> bool:
    if isinstance(f, Tt):
        return True
    if isinstance(f, Ff):
        return False
    if isinstance(f, Atom):
        return f.name in letter
    if isinstance(f, Not):
        return not _eval_prop(f.arg, letter)
    if isinstance(f, Or):
        return _eval_prop(f.left, letter) or _eval_prop(f.right, letter)
    return _eval_prop(f.left, letter) and _eval_prop(f.right, letter)


class LassoVectors:
    """Truth vectors (bit i = position i) of subformulas on one lasso."""

    def __init__(self, w: LassoWord):
        self.n = w.positions
        self.p = w.loop_start
        self.full = (1 << self.n) - 1
        self.letters = w.letters()
        self.memo: dict[Formula, int] = {}

    def next(self, m: int) -> int:
        return (m >> 1) | (((m >> self.p) & 1) << (self.n - 1))

    def until(self, hold: int, goal: int) -> int:
        # least fixpoint of Z = goal | (hold & X Z)
        z = goal
        while True:
            nz = goal | (hold & self.next(z))
            if nz == z:
                return z
            z = nz

    def always(self, m: int) -> int:
        # greatest fixpoint of Z = m & X Z
        z = m
        while True:
            nz = m & self.next(z)
            if nz == z:
                return z
            z = nz

    def vector(self, f: Formula) -> int:
        v = self.memo.get(f)
        if v is not None:
            return v
        if isinstance(f, Tt):
            v = self.full
        elif isinstance(f, Ff):
            v = 0
        elif isinstance(f, Atom):
            v = 0
            for i, e in enumerate(self.letters):
                if f.name in e:
                    v |= 1 << i
        elif isinstance(f, Not):
            v = self.full & ~self.vector(f.arg)
        elif isinstance(f, Or):
            v = self.vector(f.left) | self.vector(f.right)
        elif isinstance(f, And):
            v = self.vector(f.left) & self.vector(f.right)
        elif isinstance(f, Next):
            v = self.next(self.vector(f.arg))
        elif isinstance(f, Eventually):
            v = self.until(self.full, self.vector(f.arg))
        elif isinstance(f, Always):
            v = self.always(self.vector(f.arg))
        elif isinstance(f, Until):
            v = self.until(self.vector(f.left), self.vector(f.right))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[f] = v
        return v


def eval_lasso(f: Formula, w: LassoWord) -> bool:
    """Decide ``prefix . period^omega |= f`` exactly."""
    return bool(LassoVectors(w).vector(f) & 1)


def eval_lasso_all(fs: Sequence[Formula], w: LassoWord) -> list[bool]:
    """Evaluate several formulas on one lasso, sharing subformula vectors."""
    vec = LassoVectors(w)
    return [bool(vec.vector(f) & 1) for f in fs]
