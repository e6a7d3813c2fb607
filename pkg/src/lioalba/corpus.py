"""Fragment survey of specification formulas.

For every formula ``phi`` of a corpus the negation ``!phi`` is brought into
positive form and classified.  The summary is the fraction of formulas
whose negation is *syntactically* LIO after that normalization.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .ltl import FormulaSyntaxError, FragmentClass, Not, classify_fragment, parse_formula, to_positive_form, to_text


class CorpusError(ValueError):
    pass


@dataclass
class CorpusRecord:
    line: int
    text: str
    negation: Optional[str] = None
    flags: Optional[FragmentClass] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {"line": self.line, "formula": self.text}
        if self.error is not None:
            out["error"] = self.error
        else:
            out["negation_pnf"] = self.negation
            out["negation_fragments"] = self.flags.labels()
            out["negation_lio"] = self.flags.lio
        return out


@dataclass
class CorpusReport:
    records: list[CorpusRecord] = field(default_factory=list)

    @property
    def parsed(self) -> list[CorpusRecord]:
        return [r for r in self.records if r.error is None]

    @property
    def total(self) -> int:
        return len(self.parsed)

    @property
    def lio_count(self) -> int:
        return sum(r.flags.lio for r in self.parsed)

    @property
    def fraction(self) -> Optional[float]:
        return self.lio_count / self.total if self.total else None

    def fraction_text(self) -> str:
        f = self.fraction
        return "n/a" if f is None else f"{f:.1%}"

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "negation_lio_after_pnf": self.lio_count,
            "fraction": self.fraction,
            "records": [r.to_json() for r in self.records],
        }

    def to_text(self) -> str:
        lines = []
        for r in self.records:
            if r.error is not None:
                lines.append(f"{r.line:4d}  ERROR  {r.text}  ({r.error})")
            else:
                mark = "LIO " if r.flags.lio else "----"
                lines.append(f"{r.line:4d}  {mark}  {r.text}   ==>  !phi = {r.negation}")
        lines.append(
            f"negation syntactically LIO after positive form: "
            f"{self.lio_count}/{self.total} ({self.fraction_text()})"
        )
        return "\n".join(lines) + "\n"


def corpus_report_lines(lines: Iterable[str], keep_going: bool = False) -> CorpusReport:
    report = CorpusReport()
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        try:
            phi = parse_formula(text)
        except FormulaSyntaxError as exc:
            if not keep_going:
                raise CorpusError(f"line {number}: {exc}") from None
            report.records.append(CorpusRecord(number, text, error=str(exc)))
            continue
        negation = to_positive_form(Not(phi))
        report.records.append(
            CorpusRecord(number, text, to_text(negation), classify_fragment(negation))
        )
    return report


def corpus_report(path: str | Path, keep_going: bool = False) -> CorpusReport:
    with open(path) as fh:
        return corpus_report_lines(fh, keep_going)


def sample_corpus_path() -> Path:
    """The bundled 20-formula sample of common specification shapes."""
    return Path(str(resources.files("lioalba") / "data" / "patterns.ltl"))
