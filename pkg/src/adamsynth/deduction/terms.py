"""Monomials in named synthetic elements, GF(2) linear forms, pretty printing."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

TAU = "tau"
TWO = "2~"


class DegreeError(ValueError):
    """Inhomogeneous expression or undeclared name."""


@dataclass(frozen=True)
class Monomial:
    """Commutative product of named elements times a power of tau.

    ``factors`` is sorted (name, exponent) pairs; ``order`` remembers the order
    names were written in, for display only.
    """

    factors: tuple[tuple[str, int], ...] = ()
    tau: int = 0
    order: tuple[str, ...] = ()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.factors == other.factors and self.tau == other.tau

    def __hash__(self) -> int:
        return hash((self.factors, self.tau))

    @classmethod
    def make(cls, counts: Mapping[str, int], tau: int = 0, order: Iterable[str] = ()) -> "Monomial":
        counts = {k: v for k, v in counts.items() if v}
        order = tuple(dict.fromkeys(n for n in order if n in counts))
        order += tuple(sorted(n for n in counts if n not in order))
        return cls(tuple(sorted(counts.items())), tau, order)

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.factors)

    def is_unit(self) -> bool:
        return not self.factors and self.tau == 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        c = self.counts
        for k, v in other.factors:
            c[k] = c.get(k, 0) + v
        return Monomial.make(c, self.tau + other.tau, self.order + other.order)

    def times_tau(self, k: int) -> "Monomial":
        return Monomial(self.factors, self.tau + k, self.order)

    def without_tau(self) -> "Monomial":
        return Monomial(self.factors, 0, self.order)

    def divides(self, other: "Monomial", ignore_tau: bool = False) -> bool:
        oc = other.counts
        if any(oc.get(k, 0) < v for k, v in self.factors):
            return False
        return ignore_tau or self.tau <= other.tau

    def quotient(self, divisor: "Monomial") -> "Monomial":
        c = self.counts
        for k, v in divisor.factors:
            c[k] -= v
        return Monomial.make(c, self.tau - divisor.tau, self.order)

    def submonomials(self) -> Iterator["Monomial"]:
        """Every divisor with tau-power 0 (including the unit)."""
        items = self.factors

        def rec(i: int, acc: dict):
            if i == len(items):
                yield Monomial.make(acc, 0, self.order)
                return
            name, e = items[i]
            for k in range(e + 1):
                if k:
                    acc[name] = k
                else:
                    acc.pop(name, None)
                yield from rec(i + 1, acc)
            acc.pop(name, None)

        yield from rec(0, {})

    def ascii(self) -> str:
        parts = []
        c = self.counts
        for n in self.order:
            parts.append(n if c[n] == 1 else f"{n}^{c[n]}")
        if self.tau:
            parts.append(TAU if self.tau == 1 else f"{TAU}^{self.tau}")
        return "*".join(parts) if parts else "1"

    def pretty(self) -> str:
        if self.is_unit():
            return "1"
        c = self.counts
        out = "".join(pretty_name(n) + superscript(c[n]) for n in self.order)
        if self.tau:
            out += "τ" + superscript(self.tau)
        return out

    def __str__(self) -> str:
        return self.ascii()


UNIT = Monomial()

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")
_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
GREEK = {
    "2~": "2̃",
    "eta": "η",
    "nu": "ν",
    "sigma": "σ",
    "eps": "ε",
    "kappa": "κ",
    "kbar": "κ̄",
    "theta4.5": "θ₄.₅",
    "tau": "τ",
}


def superscript(k: int) -> str:
    return "" if k == 1 else str(k).translate(_SUP)


def pretty_class(text: str) -> str:
    """h0h5i -> h₀h₅i, D2h2g -> Δ²h₂g, d0g^2 -> d₀g²."""
    text = re.sub(r"^D2", "Δ²", text)
    text = re.sub(r"^D", "Δ", text)
    text = re.sub(r"\^(\d+)", lambda m: m.group(1).translate(_SUP), text)
    return re.sub(r"(?<=[hdecgQ])(\d+)", lambda m: m.group(1).translate(_SUB), text)


def pretty_name(name: str) -> str:
    if name.startswith("{") and name.endswith("}"):
        return "{" + pretty_class(name[1:-1]) + "}"
    if name.startswith("δ[") and name.endswith("]"):
        return name
    return GREEK.get(name, name)


_NAME = r"\{[^}]+\}|δ\[[^\]]+\]|[A-Za-z0-9_.~]+"
_FACTOR = re.compile(rf"^\s*({_NAME})\s*(?:\^\s*(-?\d+))?\s*$")
UNKNOWN_RE = re.compile(r"^[A-Za-z]_\d+$")


def parse_monomial(text: str) -> Monomial:
    text = text.strip()
    if text == "1":
        return UNIT
    counts: dict[str, int] = {}
    order = []
    tau = 0
    for part in text.split("*"):
        m = _FACTOR.match(part)
        if not m:
            raise ValueError(f"bad factor {part.strip()!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name == "1":
            continue
        if name == TAU:
            tau += exp
            continue
        if UNKNOWN_RE.match(name):
            raise ValueError(f"unknown coefficient {name!r} inside a monomial")
        counts[name] = counts.get(name, 0) + exp
        order.append(name)
    return Monomial.make(counts, tau, order)


@dataclass(frozen=True)
class Lin:
    """Affine GF(2) form: const + sum of unknowns."""

    vars: frozenset = frozenset()
    const: int = 0

    @classmethod
    def var(cls, name: str) -> "Lin":
        return cls(frozenset([name]), 0)

    @classmethod
    def constant(cls, c: int) -> "Lin":
        return cls(frozenset(), c & 1)

    def __add__(self, other: "Lin") -> "Lin":
        return Lin(self.vars ^ other.vars, self.const ^ other.const)

    def is_zero(self) -> bool:
        return not self.vars and not self.const

    def evaluate(self, values: Mapping[str, int]) -> int:
        v = self.const
        for x in self.vars:
            v ^= values[x]
        return v

    def __str__(self) -> str:
        parts = sorted(self.vars, key=_unknown_key)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


def _unknown_key(name: str):
    head, _, num = name.partition("_")
    return (head, int(num)) if num.isdigit() else (head, 0)


ZERO = Lin()
ONE = Lin.constant(1)


def sort_unknowns(names: Iterable[str]) -> list[str]:
    return sorted(names, key=_unknown_key)


def parse_linear_term(text: str) -> tuple[Lin, Monomial]:
    """``a_3*kappa*kbar^2*tau^2`` -> (a_3, kappa*kbar^2*tau^2)."""
    parts = [p.strip() for p in text.split("*")]
    coeff = ONE
    rest = []
    for p in parts:
        if UNKNOWN_RE.match(p):
            if coeff != ONE:
                raise ValueError(f"nonlinear coefficient in {text.strip()!r}")
            coeff = Lin.var(p)
        else:
            rest.append(p)
    mono = parse_monomial("*".join(rest)) if rest else UNIT
    return coeff, mono


def split_sum(text: str) -> list[str]:
    """Split on top-level '+' (braces may contain '+')."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [p.strip() for p in out if p.strip()]
