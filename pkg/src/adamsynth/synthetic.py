"""Chart-level passage from an Adams chart to F2-synthetic homotopy.

Boundaries are removed.  A surviving class is tau-free; a class hit by a
d_r becomes tau^(r-1)-torsion.  Sources of differentials disappear.  A class
in stem n and filtration s sits in bidegree (a, b) = (n, n + s).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .chart import Chart, ChartClass, StructLine, einfinity


class HomogeneityError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticGenerator:
    cls: ChartClass
    torsion: Optional[int] = None  # None: tau-free; k: tau^k-torsion

    @property
    def stem(self) -> int:
        return self.cls.n

    @property
    def filtration(self) -> int:
        return self.cls.s

    @property
    def weight(self) -> int:
        return self.cls.n + self.cls.s

    @property
    def key(self) -> tuple[int, int, int]:
        return self.cls.key

    @property
    def symbol(self) -> str:
        if self.cls.name:
            return self.cls.name.synthetic()
        return "{" + f"x{self.cls.n}_{self.cls.s}_{self.cls.index}" + "}"

    @property
    def label(self) -> str:
        return self.cls.label

    def torsion_text(self) -> str:
        if self.torsion is None:
            return "tau-free"
        return "tau-torsion" if self.torsion == 1 else f"tau^{self.torsion}-torsion"

    def contributes(self, a: int, b: int) -> Optional[int]:
        """tau-power j with tau^j·self a nonzero element of pi_{a,b}, else None."""
        if self.stem != a:
            return None
        j = self.filtration - (b - a)
        if j < 0:
            return None
        if self.torsion is not None and j >= self.torsion:
            return None
        return j


def translate(chart: Chart) -> list[SyntheticGenerator]:
    survivors, hit = einfinity(chart)
    alive = {c.key for c in survivors}
    out = []
    for c in chart.classes:
        if c.key in alive:
            out.append(SyntheticGenerator(c))
        elif c.key in hit:
            out.append(SyntheticGenerator(c, hit[c.key] - 1))
    return sorted(out, key=lambda g: g.key)


def format_listing(gens: Iterable[SyntheticGenerator]) -> str:
    return "".join(f"{g.label} : {g.torsion_text()} at ({g.stem},{g.filtration})\n" for g in gens)


def tau_power(j: int) -> str:
    if j == 0:
        return ""
    return "tau" if j == 1 else f"tau^{j}"


def element_text(g: SyntheticGenerator, j: int) -> str:
    t = tau_power(j)
    sym = g.symbol
    if not t:
        return sym
    return f"{t}{sym}" if sym.startswith("{") else f"{t} {sym}"


@dataclass(frozen=True)
class ExtensionFact:
    """2~·{source} = tau^tau_power·{target}: a multiplicative extension by 2~."""

    source: tuple[int, int, int]
    target: tuple[int, int, int]
    tau_power: int = 0

    def check(self, gens: dict) -> None:
        src, tgt = gens.get(self.source), gens.get(self.target)
        if src is None or tgt is None:
            raise HomogeneityError(f"extension {self} refers to a class that is not a synthetic generator")
        lhs = (src.stem, src.weight + 1)
        rhs = (tgt.stem, tgt.weight - self.tau_power)
        if lhs != rhs:
            raise HomogeneityError(f"extension {self}: left side in degree {lhs}, right side in degree {rhs}")


_EXT_RE = re.compile(
    r"^\s*ext\s+\(\s*(\d+)\s*,\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s+"
    r"(?:tau(?:\^(\d+))?\s*)?\(\s*(\d+)\s*,\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*$"
)


def parse_extension_facts(text: str) -> list[ExtensionFact]:
    """Lines ``ext (n,s,i) [tau^m] (n',s',i')`` meaning 2~{x} = tau^m{y}."""
    facts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _EXT_RE.match(line)
        if not m:
            raise ValueError(f"line {lineno}: expected 'ext (n,s,i) [tau^m] (n,s,i)'")
        g = m.groups()
        tau = g[3]
        power = int(tau) if tau is not None else (1 if "tau" in line else 0)
        facts.append(ExtensionFact(
            (int(g[0]), int(g[1]), int(g[2] or 0)),
            (int(g[4]), int(g[5]), int(g[6] or 0)),
            power))
    return facts


@dataclass
class BigradedGroup:
    a: int
    b: int
    summands: list[tuple[int, str]]  # (order, generator expression)
    warnings: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        out = 1
        for o, _ in self.summands:
            out *= o
        return out

    def orders(self) -> list[int]:
        return sorted(o for o, _ in self.summands)

    def __str__(self) -> str:
        if not self.summands:
            return f"pi {self.a} {self.b} = 0"
        body = " + ".join(f"Z/{o}<{e}>" for o, e in self.summands)
        return f"pi {self.a} {self.b} = {body}"


def _vanishing_bound(a: int) -> int:
    # Ext^{s,t} vanishes for 0 < t-s < 2s-3
    return (a + 3) // 2 + 1


def bigraded_group(
    gens: Sequence[SyntheticGenerator],
    structlines: Iterable[StructLine],
    facts: Iterable[ExtensionFact],
    a: int,
    b: int,
    window: Optional[tuple[int, int, int, int]] = None,
) -> BigradedGroup:
    """Reconstruct pi_{a,b} from tau-multiples of the generators in stem a.

    Every contributing tau^j{x} is an order-2 element; maximal chains of h0
    structlines between tau-free contributors, together with any supplied
    2~-extensions, assemble into cyclic 2-groups generated by their bottoms.
    """
    by_key = {g.key: g for g in gens}
    facts = list(facts)
    for f in facts:
        f.check(by_key)

    contrib = {}
    for g in gens:
        j = g.contributes(a, b)
        if j is not None:
            contrib[g.key] = j

    up: dict = {}
    down: dict = {}

    def link(x, y, why):
        if x in up or y in down:
            raise HomogeneityError(f"{why}: multiplication by 2 is not single-valued at {x} -> {y}")
        up[x] = y
        down[y] = x

    for sl in structlines:
        if sl.multiplier != "h0":
            continue
        x, y = sl.source, sl.target
        if x in contrib and y in contrib and by_key[x].torsion is None and by_key[y].torsion is None:
            link(x, y, "h0 line")
    for f in facts:
        if f.source in contrib and f.target in contrib:
            link(f.source, f.target, "extension")

    summands = []
    for k in sorted(contrib):
        if k in down:
            continue
        length = 1
        cur = k
        while cur in up:
            cur = up[cur]
            length += 1
        summands.append((1 << length, element_text(by_key[k], contrib[k])))
    summands.sort(key=lambda t: (t[0], t[1]))

    warnings = []
    if window is not None:
        n0, n1, s0, s1 = window
        if not n0 <= a <= n1:
            warnings.append(f"window-incomplete: stem {a} outside window stems {n0}..{n1}")
        lowest = max(b - a, 0)
        if s0 > lowest:
            warnings.append(f"window-incomplete: filtrations below {s0} not charted")
        if s1 < _vanishing_bound(a):
            warnings.append(f"window-incomplete: filtrations above {s1} not charted")
    return BigradedGroup(a, b, summands, warnings)


def group_for_chart(chart: Chart, a: int, b: int, facts: Iterable[ExtensionFact] = ()) -> BigradedGroup:
    return bigraded_group(translate(chart), chart.structlines, facts, a, b, chart.window)
