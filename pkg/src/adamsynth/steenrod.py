"""The mod-2 Steenrod algebra in the Milnor basis.

A Milnor monomial ``Sq(r1, r2, ...)`` is a plain tuple of exponents with
trailing zeros trimmed; the unit is ``()``.  Elements are sums of monomials
of one degree, stored as a frozenset (coefficient 1 iff present).
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

Monomial = tuple  # tuple[int, ...], trailing zeros trimmed


def trim(r: Sequence[int]) -> Monomial:
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    if any(x < 0 for x in r):
        raise ValueError(f"negative Milnor exponent in {tuple(r)}")
    return tuple(r)


def degree(r: Monomial) -> int:
    return sum(x * ((1 << (i + 1)) - 1) for i, x in enumerate(r))


def format_monomial(r: Monomial) -> str:
    return "Sq(" + ",".join(map(str, r)) + ")"


_SQ_RE = re.compile(r"^\s*Sq\(\s*([0-9,\s]*)\)\s*$")


def parse_monomial(text: str) -> Monomial:
    m = _SQ_RE.match(text)
    if not m:
        raise ValueError(f"not a Milnor monomial: {text!r}")
    body = m.group(1).strip()
    return trim(int(x) for x in body.split(",")) if body else ()


class MilnorElement:
    """A homogeneous element of the Steenrod algebra."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Monomial] = ()):
        self.terms = frozenset(trim(t) for t in terms)
        degs = {degree(t) for t in self.terms}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous Milnor element, degrees {sorted(degs)}")

    @classmethod
    def unit(cls) -> "MilnorElement":
        return cls([()])

    @classmethod
    def parse(cls, text: str) -> "MilnorElement":
        text = text.strip()
        if text == "0":
            return cls()
        out = cls()
        for part in text.split("+"):
            out = out + cls([parse_monomial(part)])
        return out

    @property
    def degree(self) -> int | None:
        return degree(next(iter(self.terms))) if self.terms else None

    def sorted_terms(self) -> list[Monomial]:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "MilnorElement") -> "MilnorElement":
        return MilnorElement(self.terms ^ other.terms)

    def __mul__(self, other: "MilnorElement") -> "MilnorElement":
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= milnor_product_terms(a, b)
        return MilnorElement(acc)

    def __eq__(self, other) -> bool:
        if isinstance(other, MilnorElement):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self.sorted_terms())

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(format_monomial(t) for t in self.sorted_terms())

    __repr__ = __str__


def Sq(*r: int) -> MilnorElement:
    return MilnorElement([trim(r)])


@lru_cache(maxsize=None)
def basis_in_degree(n: int) -> tuple[Monomial, ...]:
    """All Milnor monomials of degree n, in lexicographic order."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    out: list[Monomial] = []

    def rec(remaining: int, k: int, suffix: tuple) -> None:
        # choose r_k for k = top index down to 1
        if k == 0:
            if remaining == 0:
                out.append(trim(suffix))
            return
        w = (1 << k) - 1
        for rk in range(remaining // w + 1):
            rec(remaining - rk * w, k - 1, (rk,) + suffix)

    top = max(1, n.bit_length())
    rec(n, top, ())
    return tuple(sorted(set(out)))


def dimension(n: int) -> int:
    return len(basis_in_degree(n))


def _binom_odd(n: int, k: int) -> bool:
    return 0 <= k <= n and (k & (n - k)) == 0


def _matrices(r: Monomial, s: Monomial) -> Iterator[list[list[int]]]:
    """Milnor matrices x[i][j] with weighted row sums r and column sums s."""
    rows = len(r)
    cols = len(s)

    def rec(i: int, colrem: list[int], acc: list[list[int]]) -> Iterator[list[list[int]]]:
        if i > rows:
            yield [list(colrem)] + acc  # row 0: x[0][j] = s_j - sum_i x[i][j]
            return
        target = r[i - 1]

        def fill(j: int, left: int, row: list[int]):
            if j > cols:
                yield [left] + row
                return
            wt = 1 << j
            for x in range(min(left // wt, colrem[j - 1]) + 1):
                colrem[j - 1] -= x
                yield from fill(j + 1, left - x * wt, row + [x])
                colrem[j - 1] += x

        for row in fill(1, target, []):
            saved = list(colrem)
            yield from rec(i + 1, colrem, acc + [row])
            colrem[:] = saved

    for m in rec(1, list(s), []):
        top = m[0]
        m[0] = [0] + top
        yield m


@lru_cache(maxsize=1 << 20)
def milnor_product_terms(r: Monomial, s: Monomial) -> frozenset:
    if not r:
        return frozenset([s])
    if not s:
        return frozenset([r])
    out: set = set()
    rows, cols = len(r), len(s)
    for x in _matrices(r, s):
        t = []
        ok = True
        for n in range(1, rows + cols + 1):
            acc = 0
            total = 0
            for i in range(max(0, n - cols), min(rows, n) + 1):
                v = x[i][n - i]
                if acc & v:
                    ok = False
                    break
                acc |= v
                total += v
            if not ok:
                break
            t.append(total)
        if ok:
            out ^= {trim(t)}
    return frozenset(out)


def milnor_product(a: Monomial, b: Monomial) -> MilnorElement:
    """Product of two Milnor monomials."""
    return MilnorElement(milnor_product_terms(trim(a), trim(b)))


# -- Adem relations: independent route used for cross-checks -------------

def _adem(a: int, b: int) -> list[tuple[int, ...]]:
    """Sq^a Sq^b for a < 2b as a list of admissible words (mod 2)."""
    out = []
    for c in range(a // 2 + 1):
        if _binom_odd(b - c - 1, a - 2 * c):
            out.append(tuple(x for x in (a + b - c, c) if x))
    return out


@lru_cache(maxsize=None)
def admissible_form(word: tuple[int, ...]) -> frozenset:
    """Rewrite a word in the Sq^i to a sum of admissible words via Adem relations."""
    word = tuple(i for i in word if i)
    for k in range(len(word) - 1):
        a, b = word[k], word[k + 1]
        if a < 2 * b:
            acc: set = set()
            for mid in _adem(a, b):
                acc ^= admissible_form(word[:k] + mid + word[k + 2 :])
            return frozenset(acc)
    return frozenset([word])


def adem_reduce(word: Sequence[int]) -> MilnorElement:
    """Image of Sq^{i1} Sq^{i2} ... in the Milnor basis, via the admissible basis."""
    if any(i < 1 for i in word):
        raise ValueError("Sq^i generators need i >= 1")
    total = MilnorElement()
    for adm in admissible_form(tuple(word)):
        elt = MilnorElement.unit()
        for i in adm:
            elt = elt * Sq(i)
        total = total + elt
    return total


def is_admissible(word: Sequence[int]) -> bool:
    return all(word[k] >= 2 * word[k + 1] for k in range(len(word) - 1))
