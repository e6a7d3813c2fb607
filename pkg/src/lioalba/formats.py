"""Automaton serialization: JSON (read/write), HOA v1 (read/write), DOT (write).

JSON schema::

    {"ap": [...], "states": [...], "initial": s,
     "transitions": [{"src": s, "guard": "<formula>", "dst": t}, ...],
     "accepting": [...],
     "gf_annotations": [{"states": [...], "alpha0": "<formula>", "alphas": [...]}]}

HOA output uses state-based Büchi acceptance.  GF annotations travel in
the tool-specific header item ``gf-annotation:`` (state indices followed
by the quoted alpha0 and alphas).
"""
from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any

from .buchi import BuchiAutomaton, GFAnnotation, GFForm, Transition
from .ltl import FF, TT, And, Atom, Ff, Formula, Not, Or, Tt, parse_formula, to_text


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# JSON


def automaton_to_json(a: BuchiAutomaton) -> dict[str, Any]:
    return {
        "ap": list(a.ap),
        "states": list(a.states),
        "initial": a.initial,
        "transitions": [
            {"src": t.src, "guard": to_text(t.guard), "dst": t.dst} for t in a.transitions
        ],
        "accepting": [s for s in a.states if s in a.accepting],
        "gf_annotations": [
            {
                "states": list(ann.states),
                "alpha0": to_text(ann.form.alpha0),
                "alphas": [to_text(x) for x in ann.form.alphas],
            }
            for ann in a.annotations
        ],
    }


def automaton_from_json(data: dict[str, Any]) -> BuchiAutomaton:
    try:
        return BuchiAutomaton(
            ap=tuple(data["ap"]),
            states=tuple(str(s) for s in data["states"]),
            initial=str(data["initial"]),
            transitions=tuple(
                Transition(str(t["src"]), parse_formula(t["guard"]), str(t["dst"]))
                for t in data.get("transitions", [])
            ),
            accepting=frozenset(str(s) for s in data.get("accepting", [])),
            annotations=tuple(
                GFAnnotation(
                    tuple(str(s) for s in ann["states"]),
                    GFForm(
                        parse_formula(ann.get("alpha0", "tt")),
                        tuple(parse_formula(x) for x in ann.get("alphas", [])),
                    ),
                )
                for ann in data.get("gf_annotations", [])
            ),
        )
    except KeyError as exc:
        raise FormatError(f"automaton JSON is missing field {exc}") from None
    except (TypeError, AttributeError) as exc:
        raise FormatError(f"malformed automaton JSON: {exc}") from None
    except ValueError as exc:
        raise FormatError(f"invalid automaton: {exc}") from None


def dumps_json(a: BuchiAutomaton) -> str:
    return json.dumps(automaton_to_json(a), indent=2) + "\n"


def loads_json(text: str) -> BuchiAutomaton:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("automaton JSON must be an object")
    return automaton_from_json(data)


# ---------------------------------------------------------------------------
# HOA


def _label(f: Formula, index: dict[str, int]) -> str:
    if isinstance(f, Tt):
        return "t"
    if isinstance(f, Ff):
        return "f"
    if isinstance(f, Atom):
        return str(index[f.name])
    if isinstance(f, Not):
        inner = _label(f.arg, index)
        return "!" + (f"({inner})" if isinstance(f.arg, (And, Or)) else inner)
    if isinstance(f, Or):
        right = _label(f.right, index)
        return f"{_label(f.left, index)} | " + (f"({right})" if isinstance(f.right, Or) else right)
    if isinstance(f, And):
        left = _label(f.left, index)
        if isinstance(f.left, Or):
            left = f"({left})"
        right = _label(f.right, index)
        if isinstance(f.right, (And, Or)):
            right = f"({right})"
        return f"{left} & {right}"
    raise FormatError(f"guard is not modality-free: {to_text(f)}")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_hoa(a: BuchiAutomaton, name: str | None = None) -> str:
    index = {s: i for i, s in enumerate(a.states)}
    ap_index = {p: i for i, p in enumerate(a.ap)}
    lines = ["HOA: v1"]
    if name is not None:
        lines.append(f"name: {_quote(name)}")
    lines.append(f"States: {len(a.states)}")
    lines.append(f"Start: {index[a.initial]}")
    lines.append(" ".join([f"AP: {len(a.ap)}", *(_quote(p) for p in a.ap)]))
    lines.append("acc-name: Buchi")
    lines.append("Acceptance: 1 Inf(0)")
    lines.append("properties: trans-labels explicit-labels state-acc")
    for ann in a.annotations:
        items = [str(index[s]) for s in ann.states]
        items.append(_quote(to_text(ann.form.alpha0)))
        items.extend(_quote(to_text(x)) for x in ann.form.alphas)
        lines.append("gf-annotation: " + " ".join(items))
    lines.append("--BODY--")
    for s in a.states:
        acc = " {0}" if s in a.accepting else ""
        lines.append(f"State: {index[s]} {_quote(s)}{acc}")
        for t in a.transitions:
            if t.src == s:
                lines.append(f"  [{_label(t.guard, ap_index)}] {index[t.dst]}")
    lines.append("--END--")
    return "\n".join(lines) + "\n"


_HOA_TOKEN = re.compile(
    r"""\s*(?:
        (?P<comment>/\*.*?\*/)
      | (?P<header>[A-Za-z_][A-Za-z0-9_-]*:)
      | (?P<body>--BODY--) | (?P<end>--END--) | (?P<abort>--ABORT--)
      | (?P<string>"(?:[^"\\]|\\.)*")
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_-]*)
      | (?P<punct>[\[\]{}()!&|])
    )""",
    re.VERBOSE | re.DOTALL,
)


def _hoa_tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _HOA_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FormatError(f"HOA: unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "comment":
            continue
        value = m.group(kind)
        if kind == "string":
            value = re.sub(r"\\(.)", r"\1", value[1:-1])
        out.append((kind, value))
    return out


class _HoaParser:
    def __init__(self, text: str):
        self.tokens = _hoa_tokens(text)
        self.i = 0

    def peek(self) -> tuple[str, str]:
        return self.tokens[self.i] if self.i < len(self.tokens) else ("eof", "")

    def take(self, kind: str | None = None, value: str | None = None) -> str:
        k, v = self.peek()
        if (kind is not None and k != kind) or (value is not None and v != value):
            want = value or kind
            raise FormatError(f"HOA: expected {want}, found {v or k!r}")
        self.i += 1
        return v

    # label-expr := conj ('|' conj)* ; conj := unary ('&' unary)*
    def label(self, ap: list[str]) -> Formula:
        f = self.label_conj(ap)
        while self.peek() == ("punct", "|"):
            self.take()
            f = Or(f, self.label_conj(ap))
        return f

    def label_conj(self, ap: list[str]) -> Formula:
        f = self.label_unary(ap)
        while self.peek() == ("punct", "&"):
            self.take()
            f = And(f, self.label_unary(ap))
        return f

    def label_unary(self, ap: list[str]) -> Formula:
        k, v = self.peek()
        if (k, v) == ("punct", "!"):
            self.take()
            return Not(self.label_unary(ap))
        if (k, v) == ("punct", "("):
            self.take()
            f = self.label(ap)
            self.take("punct", ")")
            return f
        if k == "ident" and v in ("t", "f"):
            self.take()
            return TT if v == "t" else FF
        if k == "int":
            self.take()
            i = int(v)
            if i >= len(ap):
                raise FormatError(f"HOA: AP index {i} out of range")
            return Atom(ap[i])
        raise FormatError(f"HOA: bad label token {v!r}")

    def parse(self) -> BuchiAutomaton:
        headers: dict[str, list[list[tuple[str, str]]]] = {}
        if self.peek() != ("header", "HOA:"):
            raise FormatError("HOA: document must start with 'HOA: v1'")
        while self.peek()[0] == "header":
            name = self.take()[:-1]
            values = []
            while self.peek()[0] in ("string", "int", "ident", "punct"):
                values.append(self.tokens[self.i])
                self.i += 1
            headers.setdefault(name, []).append(values)
        self.take("body")

        if headers["HOA"][0] != [("ident", "v1")]:
            raise FormatError("HOA: only version v1 is supported")
        ap_items = headers.get("AP", [[("int", "0")]])[0]
        ap = [v for k, v in ap_items[1:]]
        if int(ap_items[0][1]) != len(ap):
            raise FormatError("HOA: AP count does not match the listed names")
        acc = "".join(v for _, v in headers.get("Acceptance", [[]])[0])
        if acc != "1Inf(0)":
            raise FormatError(f"HOA: unsupported acceptance condition {acc!r}")
        n_states = int(headers["States"][0][0][1]) if "States" in headers else None
        starts = headers.get("Start", [])
        if len(starts) != 1 or len(starts[0]) != 1:
            raise FormatError("HOA: exactly one initial state is required")
        start = int(starts[0][0][1])

        names: dict[int, str] = {}
        accepting: set[int] = set()
        edges: list[tuple[int, Formula, int]] = []
        while self.peek() == ("header", "State:"):
            self.take()
            label = None
            if self.peek() == ("punct", "["):
                raise FormatError("HOA: state labels are not supported")
            idx = int(self.take("int"))
            if idx in names:
                raise FormatError(f"HOA: state {idx} declared twice")
            names[idx] = self.take() if self.peek()[0] == "string" else str(idx)
            if self.peek() == ("punct", "{"):
                self.take()
                while self.peek()[0] == "int":
                    if self.take() != "0":
                        raise FormatError("HOA: only acceptance set 0 exists")
                    accepting.add(idx)
                self.take("punct", "}")
            while self.peek() == ("punct", "["):
                self.take()
                label = self.label(ap)
                self.take("punct", "]")
                dst = int(self.take("int"))
                if self.peek() == ("punct", "{"):
                    raise FormatError("HOA: transition-based acceptance is not supported")
                edges.append((idx, label, dst))
        self.take("end")
        if self.peek()[0] != "eof":
            raise FormatError("HOA: trailing content after --END--")

        count = n_states if n_states is not None else len(names)
        if set(names) != set(range(count)):
            raise FormatError("HOA: body does not declare states 0..States-1")
        for src, _, dst in edges:
            if dst >= count:
                raise FormatError(f"HOA: edge target {dst} out of range")
        state = [names[i] for i in range(count)]

        annotations = []
        for values in headers.get("gf-annotation", []):
            idxs = [int(v) for k, v in values if k == "int"]
            texts = [v for k, v in values if k == "string"]
            if not texts:
                raise FormatError("HOA: gf-annotation needs alpha0")
            annotations.append(
                GFAnnotation(
                    tuple(state[i] for i in idxs),
                    GFForm(parse_formula(texts[0]), tuple(parse_formula(x) for x in texts[1:])),
                )
            )
        return BuchiAutomaton(
            ap=tuple(ap),
            states=tuple(state),
            initial=state[start],
            transitions=tuple(Transition(state[s], g, state[d]) for s, g, d in edges),
            accepting=frozenset(state[i] for i in accepting),
            annotations=tuple(annotations),
        )


def parse_hoa(text: str) -> BuchiAutomaton:
    """Parse the HOA v1 subset emitted by :func:`to_hoa` (state-based Büchi
    acceptance, explicit edge labels)."""
    return _HoaParser(text).parse()


# ---------------------------------------------------------------------------
# DOT


def _dot_id(s: str) -> str:
    return _quote(s)


def to_dot(a: BuchiAutomaton, name: str = "automaton") -> str:
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=LR;", "  node [shape=circle];"]
    lines.append('  "__init" [shape=point, label=""];')
    for s in a.states:
        shape = "doublecircle" if s in a.accepting else "circle"
        lines.append(f"  {_dot_id(s)} [shape={shape}];")
    lines.append(f'  "__init" -> {_dot_id(a.initial)};')
    for t in a.transitions:
        lines.append(f"  {_dot_id(t.src)} -> {_dot_id(t.dst)} [label={_quote(to_text(t.guard))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def dumps(a: BuchiAutomaton, fmt: str) -> str:
    if fmt == "json":
        return dumps_json(a)
    if fmt == "hoa":
        return to_hoa(a)
    if fmt == "dot":
        return to_dot(a)
    raise FormatError(f"unknown format {fmt!r}")


def loads(text: str) -> BuchiAutomaton:
    """Read JSON or HOA, deciding by the first non-blank character."""
    if text.lstrip().startswith("HOA:"):
        return parse_hoa(text)
    return loads_json(text)


def load_automaton(path: str | Path) -> BuchiAutomaton:
    return loads(Path(path).read_text())
