"""Adams spectral sequence charts: data model, text format, E-infinity.

Chart text format, one directive per line::

    window n0 n1 s0 s1
    class n s [name] [@alias]
    line h0|h1|h2 (n,s,i) (n',s',i')
    d r (n,s,i) (n',s',i')
    # comment

Classes sharing a bidegree are numbered 0, 1, ... in declaration order; a
reference ``(n,s)`` means index 0.  ``@alias`` names the homotopy element a
class detects (written without braces in synthetic output, e.g. ``@rho55``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

MULTIPLIERS = {"h0": 0, "h1": 1, "h2": 3}


class ChartParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<chart>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.source = source


@dataclass(frozen=True)
class ClassName:
    text: str
    alias: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty class name")

    def synthetic(self) -> str:
        """How the synthetic lift is written: the alias as-is, else {text}."""
        return self.alias if self.alias else "{" + self.text + "}"


@dataclass(frozen=True)
class ChartClass:
    n: int
    s: int
    index: int = 0
    name: Optional[ClassName] = None
    lineno: int = field(default=0, compare=False)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.n, self.s, self.index)

    @property
    def label(self) -> str:
        return self.name.text if self.name else f"({self.n},{self.s},{self.index})"


@dataclass(frozen=True)
class StructLine:
    multiplier: str
    source: tuple[int, int, int]
    target: tuple[int, int, int]
    lineno: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Differential:
    page: int
    source: tuple[int, int, int]
    target: tuple[int, int, int]
    lineno: int = field(default=0, compare=False)


@dataclass
class Chart:
    window: Optional[tuple[int, int, int, int]] = None
    classes: list[ChartClass] = field(default_factory=list)
    structlines: list[StructLine] = field(default_factory=list)
    differentials: list[Differential] = field(default_factory=list)

    def by_key(self) -> dict[tuple[int, int, int], ChartClass]:
        return {c.key: c for c in self.classes}

    def __getitem__(self, key) -> ChartClass:
        if len(key) == 2:
            key = (key[0], key[1], 0)
        return self.by_key()[tuple(key)]

    def find(self, name: str) -> ChartClass:
        for c in self.classes:
            if c.name and (c.name.text == name or c.name.alias == name):
                return c
        raise KeyError(name)

    def cell(self, n: int, s: int) -> list[ChartClass]:
        return [c for c in self.classes if (c.n, c.s) == (n, s)]

    def __len__(self) -> int:
        return len(self.classes) + len(self.structlines) + len(self.differentials)


_REF = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\)")
_INT = re.compile(r"-?\d+$")


def _int(tok: str, lineno: int, col: int, src: str) -> int:
    if not _INT.match(tok):
        raise ChartParseError(f"malformed coordinate {tok!r}", lineno, col, src)
    return int(tok)


def parse_chart(text: str, source: str = "<chart>") -> Chart:
    chart = Chart()
    counts: dict[tuple[int, int], int] = {}
    known: set = set()
    pending: list[tuple[str, object, int, list]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col0 = len(line) - len(line.lstrip()) + 1
        head, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        rest_col = line.find(rest, col0 - 1 + len(head)) + 1 if rest else len(line) + 1

        if head == "class":
            toks = rest.split()
            if len(toks) < 2:
                raise ChartParseError("class needs 'n s'", lineno, rest_col, source)
            n = _int(toks[0], lineno, rest_col, source)
            s = _int(toks[1], lineno, rest_col, source)
            name = alias = None
            for tok in toks[2:]:
                if tok.startswith("@"):
                    alias = tok[1:]
                elif name is None:
                    name = tok
                else:
                    raise ChartParseError(f"unexpected token {tok!r}", lineno, line.find(tok) + 1, source)
            if alias and not name:
                name = alias
            idx = counts.get((n, s), 0)
            counts[(n, s)] = idx + 1
            cname = ClassName(name, alias) if name else None
            chart.classes.append(ChartClass(n, s, idx, cname, lineno))
            known.add((n, s, idx))
        elif head in ("line", "d"):
            toks = rest.split(None, 1)
            if len(toks) < 2:
                raise ChartParseError(f"{head} needs a tag and two references", lineno, rest_col, source)
            tag = toks[0]
            refs_text = toks[1]
            refs = list(_REF.finditer(refs_text))
            leftover = _REF.sub("", refs_text).strip()
            if len(refs) != 2 or leftover:
                raise ChartParseError("expected two references '(n,s[,i])'", lineno, line.find(refs_text) + 1, source)
            keys = []
            for m in refs:
                n, s, i = m.group(1), m.group(2), m.group(3)
                keys.append((int(n), int(s), int(i) if i is not None else 0))
            cols = [line.find(refs_text) + 1 + m.start() for m in refs]
            if head == "line":
                if tag not in MULTIPLIERS:
                    raise ChartParseError(f"unknown multiplier {tag!r}", lineno, rest_col, source)
                obj = StructLine(tag, keys[0], keys[1], lineno)
                chart.structlines.append(obj)
            else:
                r = _int(tag, lineno, rest_col, source)
                obj = Differential(r, keys[0], keys[1], lineno)
                chart.differentials.append(obj)
            pending.append((head, obj, lineno, list(zip(keys, cols))))
        elif head == "window":
            toks = rest.split()
            if len(toks) != 4:
                raise ChartParseError("window needs 'n0 n1 s0 s1'", lineno, rest_col, source)
            chart.window = tuple(_int(t, lineno, rest_col, source) for t in toks)
        else:
            raise ChartParseError(f"unknown directive {head!r}", lineno, col0, source)

    for head, obj, lineno, refs in pending:
        for key, col in refs:
            if key not in known:
                raise ChartParseError(f"dangling reference {key} in {head}", lineno, col, source)
    return chart


def format_ref(key: tuple[int, int, int]) -> str:
    return f"({key[0]},{key[1]},{key[2]})"


def print_chart(chart: Chart) -> str:
    """Canonical text form; parse_chart(print_chart(c)) == c up to line numbers."""
    out = []
    if chart.window:
        out.append("window " + " ".join(map(str, chart.window)))
    for c in chart.classes:
        parts = ["class", str(c.n), str(c.s)]
        if c.name:
            if c.name.alias and c.name.alias == c.name.text:
                parts.append("@" + c.name.alias)
            else:
                parts.append(c.name.text)
                if c.name.alias:
                    parts.append("@" + c.name.alias)
        out.append(" ".join(parts))
    for sl in chart.structlines:
        out.append(f"line {sl.multiplier} {format_ref(sl.source)} {format_ref(sl.target)}")
    for d in chart.differentials:
        out.append(f"d {d.page} {format_ref(d.source)} {format_ref(d.target)}")
    return "\n".join(out) + ("\n" if out else "")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0

    def __str__(self) -> str:
        loc = f"line {self.line}: " if self.line else ""
        return f"{loc}{self.code}: {self.message}"


def validate_chart(chart: Chart) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    seen: dict = {}
    for c in chart.classes:
        if c.n < 0 or c.s < 0 or c.index < 0:
            diags.append(Diagnostic("negative-coordinate", f"class {format_ref(c.key)}", c.lineno))
        if c.key in seen:
            diags.append(Diagnostic("duplicate-cell", f"class {format_ref(c.key)} declared twice", c.lineno))
        seen[c.key] = c
    names: dict = {}
    for c in chart.classes:
        if c.name:
            k = (c.n, c.s, c.name.text)
            if k in names:
                diags.append(Diagnostic("duplicate-name", f"{c.name.text!r} twice in cell ({c.n},{c.s})", c.lineno))
            names[k] = c

    for sl in chart.structlines:
        missing = [k for k in (sl.source, sl.target) if k not in seen]
        if missing:
            diags.append(Diagnostic("dangling-reference", f"structline to {format_ref(missing[0])}", sl.lineno))
            continue
        dn = sl.target[0] - sl.source[0]
        ds = sl.target[1] - sl.source[1]
        if (dn, ds) != (MULTIPLIERS.get(sl.multiplier, -99), 1):
            diags.append(Diagnostic(
                "invalid-multiplier",
                f"{sl.multiplier} line {format_ref(sl.source)} -> {format_ref(sl.target)} has offset ({dn},{ds})",
                sl.lineno))

    sources: dict = {}
    targets: dict = {}
    for d in chart.differentials:
        missing = [k for k in (d.source, d.target) if k not in seen]
        if missing:
            diags.append(Diagnostic("dangling-reference", f"differential to {format_ref(missing[0])}", d.lineno))
            continue
        if d.page < 2:
            diags.append(Diagnostic("bad-page", f"d_{d.page} from {format_ref(d.source)}", d.lineno))
        want = (d.source[0] - 1, d.source[1] + d.page)
        if (d.target[0], d.target[1]) != want:
            diags.append(Diagnostic(
                "bad-differential-degree",
                f"d_{d.page} from {format_ref(d.source)} must land in ({want[0]},{want[1]}), "
                f"not {format_ref(d.target)}",
                d.lineno))
        if d.source in sources:
            diags.append(Diagnostic("multiple-differentials", f"{format_ref(d.source)} supports two differentials", d.lineno))
        if d.target in targets:
            diags.append(Diagnostic("multiple-differentials", f"{format_ref(d.target)} is hit twice", d.lineno))
        sources[d.source] = d
        targets[d.target] = d
    for k in sources:
        if k in targets:
            diags.append(Diagnostic("source-and-target", f"{format_ref(k)} both supports and is hit by differentials", sources[k].lineno))
    return diags


def einfinity(chart: Chart) -> tuple[list[ChartClass], dict[tuple[int, int, int], int]]:
    """Surviving classes and, for each hit class, the page of the differential hitting it."""
    sources = {d.source for d in chart.differentials}
    hit = {d.target: d.page for d in chart.differentials}
    survivors = [c for c in chart.classes if c.key not in sources and c.key not in hit]
    return survivors, hit


def load_chart(path) -> Chart:
    from pathlib import Path

    p = Path(path)
    return parse_chart(p.read_text(), source=str(p))
