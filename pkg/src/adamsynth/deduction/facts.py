"""Facts, the fact-file format, and the FactSystem container.

Fact file directives (one per line, ``#`` starts a note kept for traces)::

    deg <name> <stem> <weight>
    unknown a_1 a_2 ...
    basis <stem> <weight> : m1, m2, ...
    ann tau^k <monomial>                 tau^k x = 0
    rel <monomial> = <sum>|0             product relation in synthetic homotopy
    ctau <monomial> = <sum>|0            product relation after reducing mod tau
    tfree <stem> <weight>                pi_{stem,weight} has no tau-torsion
    nonzero [tauinv] <monomial>          nonzero (after inverting tau)
    ansatz <monomial> = a_i*<m> + ...    expansion over the declared basis
    oneof a_i a_j ...                    at least one unknown is 1
    multiply <ansatz lhs> by <monomial>  derive a new ansatz
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Union

from .terms import (
    ONE, TAU, TWO, UNIT, UNKNOWN_RE, DegreeError, Lin, Monomial, parse_linear_term,
    parse_monomial, sort_unknowns, split_sum,
)

MAX_CASE_SPLIT = 4


class FactParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1, source: str = "<facts>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.line = line
        self.column = column


class BasisMissingError(DegreeError):
    pass


class CaseSplitError(ValueError):
    pass


@dataclass(frozen=True)
class _Base:
    lineno: int = field(default=0, compare=False, kw_only=True)
    note: str = field(default="", compare=False, kw_only=True)

    def cite(self) -> str:
        loc = f"line {self.lineno}: " if self.lineno else ""
        if getattr(self, "derived_from", ""):
            loc += f"({self.derived_from}) "
        note = f"  # {self.note}" if self.note else ""
        return f"{loc}{self.text()}{note}"


@dataclass(frozen=True)
class DegreeDecl(_Base):
    name: str
    stem: int
    weight: int
    kind = "degree"

    def text(self) -> str:
        return f"deg {self.name} {self.stem} {self.weight}"


@dataclass(frozen=True)
class UnknownDecl(_Base):
    names: tuple[str, ...]
    kind = "unknown"

    def text(self) -> str:
        return "unknown " + " ".join(self.names)


@dataclass(frozen=True)
class BasisDecl(_Base):
    stem: int
    weight: int
    monomials: tuple[Monomial, ...]
    kind = "basis"

    def text(self) -> str:
        return f"basis {self.stem} {self.weight} : " + ", ".join(m.ascii() for m in self.monomials)


@dataclass(frozen=True)
class Annihilation(_Base):
    power: int
    element: Monomial
    kind = "annihilation"

    def text(self) -> str:
        return f"ann tau^{self.power} {self.element.ascii()}"


def _sum_text(ms: Iterable[Monomial]) -> str:
    ms = list(ms)
    return " + ".join(m.ascii() for m in ms) if ms else "0"


@dataclass(frozen=True)
class ProductRelation(_Base):
    lhs: Monomial
    rhs: tuple[Monomial, ...]
    ctau: bool = False
    kind = "product"

    def text(self) -> str:
        return f"{'ctau' if self.ctau else 'rel'} {self.lhs.ascii()} = {_sum_text(self.rhs)}"


@dataclass(frozen=True)
class TorsionFree(_Base):
    stem: int
    weight: int
    kind = "torsion-free"

    def text(self) -> str:
        return f"tfree {self.stem} {self.weight}"


@dataclass(frozen=True)
class NonVanishing(_Base):
    element: Monomial
    tau_inverted: bool = False
    kind = "nonvanishing"

    def text(self) -> str:
        return f"nonzero {'tauinv ' if self.tau_inverted else ''}{self.element.ascii()}"


@dataclass(frozen=True)
class Ansatz(_Base):
    lhs: Monomial
    terms: tuple[tuple[Lin, Monomial], ...]
    derived_from: str = field(default="", compare=False)
    kind = "ansatz"

    def text(self) -> str:
        parts = []
        for c, m in self.terms:
            if c == ONE:
                parts.append(m.ascii())
            else:
                parts.append(f"{c}*{m.ascii()}" if len(c.vars) == 1 and not c.const else f"({c})*{m.ascii()}")
        return f"ansatz {self.lhs.ascii()} = " + (" + ".join(parts) if parts else "0")

    @property
    def unknowns(self) -> set[str]:
        out: set[str] = set()
        for c, _ in self.terms:
            out |= c.vars
        return out


@dataclass(frozen=True)
class Disjunction(_Base):
    unknowns: tuple[str, ...]
    kind = "disjunction"

    def text(self) -> str:
        return "oneof " + " ".join(self.unknowns)


@dataclass(frozen=True)
class Multiply(_Base):
    lhs: Monomial
    by: Monomial
    kind = "multiply"

    def text(self) -> str:
        return f"multiply {self.lhs.ascii()} by {self.by.ascii()}"


Fact = Union[DegreeDecl, UnknownDecl, BasisDecl, Annihilation, ProductRelation, TorsionFree,
             NonVanishing, Ansatz, Disjunction, Multiply]

BUILTIN_DEGREES = {TAU: (0, -1), TWO: (0, 1)}


@dataclass(frozen=True)
class FactSystem:
    """An immutable collection of facts; ``add_fact`` returns a new system."""

    facts: tuple = ()
    tau_inverted: bool = False

    # -- derived views ------------------------------------------------------
    @property
    def degrees(self) -> dict[str, tuple[int, int]]:
        out = dict(BUILTIN_DEGREES)
        for f in self.facts:
            if isinstance(f, DegreeDecl):
                out[f.name] = (f.stem, f.weight)
        return out

    @property
    def bases(self) -> dict[tuple[int, int], tuple[Monomial, ...]]:
        return {(f.stem, f.weight): f.monomials for f in self.facts if isinstance(f, BasisDecl)}

    @property
    def unknowns(self) -> list[str]:
        seen: dict[str, None] = {}
        for f in self.facts:
            if isinstance(f, UnknownDecl):
                seen.update(dict.fromkeys(f.names))
            elif isinstance(f, Ansatz):
                seen.update(dict.fromkeys(sort_unknowns(f.unknowns)))
            elif isinstance(f, Disjunction):
                seen.update(dict.fromkeys(f.unknowns))
        return sort_unknowns(seen)

    def of_kind(self, cls) -> list:
        return [f for f in self.facts if isinstance(f, cls)]

    def ansatze(self) -> list[Ansatz]:
        return self.of_kind(Ansatz)

    def degree(self, m: Monomial, degrees: Optional[dict] = None) -> tuple[int, int]:
        degrees = degrees if degrees is not None else self.degrees
        stem = 0
        weight = -m.tau
        for name, e in m.factors:
            if name not in degrees:
                raise DegreeError(f"no degree declared for {name!r}")
            a, b = degrees[name]
            stem += e * a
            weight += e * b
        return (stem, weight)

    # -- mutation -----------------------------------------------------------
    def add_fact(self, f: Fact) -> "FactSystem":
        if f in self.facts:
            return self
        self._check(f)
        return replace(self, facts=self.facts + (f,))

    def _check(self, f: Fact) -> None:
        deg = self.degree
        if isinstance(f, DegreeDecl):
            old = self.degrees.get(f.name)
            if old is not None and old != (f.stem, f.weight):
                raise DegreeError(f"{f.name} already has degree {old}")
        elif isinstance(f, BasisDecl):
            for m in f.monomials:
                if deg(m) != (f.stem, f.weight):
                    raise DegreeError(f"basis element {m.ascii()} has degree {deg(m)}, not {(f.stem, f.weight)}")
            if len(set(f.monomials)) != len(f.monomials):
                raise DegreeError("repeated basis element")
            if (f.stem, f.weight) in self.bases:
                raise DegreeError(f"basis for {(f.stem, f.weight)} declared twice")
        elif isinstance(f, Annihilation):
            if f.power < 1:
                raise ValueError("annihilation needs tau^k with k >= 1")
            deg(f.element)
        elif isinstance(f, ProductRelation):
            left = deg(f.lhs)
            for m in f.rhs:
                if deg(m) != left:
                    raise DegreeError(
                        f"relation {f.text()}: left side has degree {left}, right side {m.ascii()} has degree {deg(m)}")
        elif isinstance(f, NonVanishing):
            deg(f.element)
        elif isinstance(f, Ansatz):
            left = deg(f.lhs)
            basis = self.bases.get(left)
            for c, m in f.terms:
                if deg(m) != left:
                    raise DegreeError(
                        f"ansatz for {f.lhs.ascii()}: left side has degree {left}, term {m.ascii()} has degree {deg(m)}")
                if not f.derived_from:
                    if basis is None:
                        raise BasisMissingError(f"no basis declared in degree {left}")
                    if m not in basis:
                        raise BasisMissingError(f"{m.ascii()} is not in the declared basis of {left}")
        elif isinstance(f, Disjunction):
            if len(f.unknowns) > MAX_CASE_SPLIT:
                raise CaseSplitError(
                    f"oneof over {len(f.unknowns)} unknowns exceeds the case-split width {MAX_CASE_SPLIT}")
            if not f.unknowns:
                raise ValueError("empty oneof")
        elif isinstance(f, Multiply):
            from .engine import multiply_ansatz

            try:
                multiply_ansatz(self, f.lhs, f.by)
            except KeyError as e:
                raise ValueError(e.args[0]) from None

    def extend(self, facts: Iterable[Fact]) -> "FactSystem":
        out = self
        for f in facts:
            out = out.add_fact(f)
        return out

    def text(self) -> str:
        return "".join(f.text() + (f"  # {f.note}" if f.note else "") + "\n" for f in self.facts)


def add_fact(system: FactSystem, f: Fact) -> FactSystem:
    return system.add_fact(f)


def invert_tau(system: FactSystem) -> FactSystem:
    """Classical shadow: tau becomes a unit, so tau-torsion and C-tau data are lost."""
    keep = []
    for f in system.facts:
        if isinstance(f, (Annihilation, TorsionFree)):
            continue
        if isinstance(f, ProductRelation) and f.ctau:
            continue
        if isinstance(f, NonVanishing) and f.tau_inverted:
            f = replace(f, tau_inverted=False)
        keep.append(f)
    return FactSystem(tuple(keep), tau_inverted=True)


# -- parsing -------------------------------------------------------------------

_TAUK = re.compile(r"^tau(?:\^(\d+))?\s+(.+)$")


def _sum(text: str) -> tuple[Monomial, ...]:
    text = text.strip()
    if text == "0":
        return ()
    return tuple(parse_monomial(p) for p in split_sum(text))


def parse_fact(line: str, lineno: int = 0, note: str = "") -> Fact:
    head, _, rest = line.strip().partition(" ")
    rest = rest.strip()
    kw = {"lineno": lineno, "note": note}
    if head == "deg":
        name, stem, weight = rest.split()
        return DegreeDecl(name, int(stem), int(weight), **kw)
    if head == "unknown":
        names = tuple(rest.split())
        bad = [n for n in names if not UNKNOWN_RE.match(n)]
        if bad:
            raise ValueError(f"bad unknown name {bad[0]!r}")
        return UnknownDecl(names, **kw)
    if head == "basis":
        left, sep, right = rest.partition(":")
        if not sep:
            raise ValueError("basis needs 'stem weight : m1, m2, ...'")
        stem, weight = left.split()
        monos = tuple(parse_monomial(p) for p in right.split(",") if p.strip())
        return BasisDecl(int(stem), int(weight), monos, **kw)
    if head == "ann":
        m = _TAUK.match(rest)
        if not m:
            raise ValueError("ann needs 'tau^k <monomial>'")
        return Annihilation(int(m.group(1) or 1), parse_monomial(m.group(2)), **kw)
    if head in ("rel", "ctau"):
        left, sep, right = rest.partition("=")
        if not sep:
            raise ValueError(f"{head} needs '<monomial> = <sum>|0'")
        return ProductRelation(parse_monomial(left), _sum(right), ctau=head == "ctau", **kw)
    if head == "tfree":
        stem, weight = rest.split()
        return TorsionFree(int(stem), int(weight), **kw)
    if head == "nonzero":
        inv = False
        if rest.startswith("tauinv "):
            inv = True
            rest = rest[len("tauinv "):]
        return NonVanishing(parse_monomial(rest), inv, **kw)
    if head == "ansatz":
        left, sep, right = rest.partition("=")
        if not sep:
            raise ValueError("ansatz needs '<monomial> = <terms>'")
        right = right.strip()
        terms = () if right == "0" else tuple(parse_linear_term(p) for p in split_sum(right))
        return Ansatz(parse_monomial(left), terms, **kw)
    if head == "oneof":
        names = tuple(rest.split())
        bad = [n for n in names if not UNKNOWN_RE.match(n)]
        if bad:
            raise ValueError(f"bad unknown name {bad[0]!r}")
        return Disjunction(names, **kw)
    if head == "multiply":
        left, sep, right = rest.partition(" by ")
        if not sep:
            raise ValueError("multiply needs '<monomial> by <monomial>'")
        return Multiply(parse_monomial(left), parse_monomial(right), **kw)
    raise ValueError(f"unknown directive {head!r}")


def parse_facts(text: str, source: str = "<facts>") -> FactSystem:
    system = FactSystem()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body, _, note = raw.partition("#")
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        try:
            f = parse_fact(body, lineno, note.strip())
            system = system.add_fact(f)
        except (ValueError, DegreeError) as e:
            raise FactParseError(str(e), lineno, col, source) from None
    return system


def load_facts(path) -> FactSystem:
    p = Path(path)
    return parse_facts(p.read_text(), source=str(p))
