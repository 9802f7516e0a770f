"""Rewriting, constraint compilation and the GF(2) solver.

Every ansatz and every derived product is rewritten into a Representation:
exact coordinates over the declared basis plus opaque terms.  An opaque term
stands for an element we cannot name (a C-tau error term, or a product that no
fact reduces); it is only known to lie in tau^p times the group, so it may
touch basis elements whose tau-power is at least p.  Bases are assumed
tau-adapted in this sense.  With tau inverted an opaque term may touch
anything.

Two representations of the same element give, per basis coordinate c, the
clause  L_1 or ... or L_k or (x_c + y_c + 1)  where L_i are the coefficients
of opaque terms touching c.  With no opaque terms this is the linear equation
x_c = y_c.  Clauses are disjunctions of affine forms, each asserting form = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from operator import or_
from typing import Iterable, Optional

import numpy as np

from ..f2linalg import F2Matrix, rref
from .facts import (
    Annihilation, Ansatz, BasisMissingError, CaseSplitError, Disjunction, FactSystem, Multiply,
    NonVanishing, ProductRelation, TorsionFree,
)
from .terms import ONE, TWO, ZERO, DegreeError, Lin, Monomial, sort_unknowns

MAX_REWRITES = 64
MAX_COMPONENT = 20


class InconsistentSystem(ValueError):
    def __init__(self, report: "DerivationTrace"):
        super().__init__("inconsistent fact system\n" + str(report))
        self.report = report


# -- representations -------------------------------------------------------------

@dataclass(frozen=True)
class Opaque:
    """An unnamed element lying in tau^floor times its group (floor None: anywhere)."""

    expr: Monomial
    floor: Optional[int]
    torsion: bool = False

    def touches(self, b: Monomial) -> bool:
        return self.floor is None or b.tau >= self.floor

    def text(self) -> str:
        return "[" + self.expr.ascii() + "]"


def _mono_key(m: Monomial):
    return (m.tau, m.ascii())


@dataclass(frozen=True)
class Representation:
    lhs: Monomial
    coords: tuple[tuple[Monomial, Lin], ...]
    opaque: tuple[tuple[Lin, Opaque], ...]
    facts: tuple = field(default=(), compare=False)
    source: Optional[Ansatz] = field(default=None, compare=False)
    label: str = field(default="", compare=False)

    def coord(self, b: Monomial) -> Lin:
        for m, c in self.coords:
            if m == b:
                return c
        return ZERO

    def is_zero(self) -> bool:
        return not self.coords and not self.opaque

    @property
    def unknowns(self) -> set[str]:
        out: set[str] = set()
        for _, c in self.coords:
            out |= c.vars
        for c, _ in self.opaque:
            out |= c.vars
        return out

    def rhs_text(self, pretty: bool = False) -> str:
        parts = []
        items = [(c, m, False) for m, c in self.coords] + [(c, o.expr, True) for c, o in self.opaque]
        for c, m, opq in items:
            body = m.pretty() if pretty else m.ascii()
            if opq:
                body = "[" + body + "]"
            if c == ONE:
                parts.append(body)
            else:
                ctext = _lin_text(c, pretty)
                if len(c.vars) + c.const > 1:
                    ctext = "(" + ctext + ")"
                parts.append(ctext + ("" if pretty else "*") + body)
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return f"{self.lhs.ascii()} = {self.rhs_text()}"


def _lin_text(c: Lin, pretty: bool) -> str:
    if not pretty:
        return str(c)
    return " + ".join(_pretty_unknown(v) for v in sort_unknowns(c.vars)) + (" + 1" if c.const and c.vars else "")


_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _pretty_unknown(name: str) -> str:
    head, _, num = name.partition("_")
    return head + num.translate(_SUB)


class Rewriter:
    """Applies rel/ann/tfree/ctau facts to monomials of a fixed system."""

    def __init__(self, system: FactSystem):
        self.system = system
        self.degrees = system.degrees
        self.bases = system.bases
        self.inv = system.tau_inverted
        self.ann = system.of_kind(Annihilation)
        self.rels = [f for f in system.of_kind(ProductRelation) if not f.ctau]
        self.ctau = [] if self.inv else [f for f in system.of_kind(ProductRelation) if f.ctau]
        self.tfree = [] if self.inv else system.of_kind(TorsionFree)

    def degree(self, m: Monomial) -> tuple[int, int]:
        return self.system.degree(m, self.degrees)

    def torsion_facts(self, m: Monomial) -> list:
        return [a for a in self.ann if a.element.divides(m, ignore_tau=True)]

    def is_torsion(self, m: Monomial) -> bool:
        return not self.inv and bool(self.torsion_facts(m))

    def basis_match(self, m: Monomial) -> Optional[Monomial]:
        basis = self.bases.get(self.degree(m))
        if basis is None and self.inv:
            for (n, _), bs in self.bases.items():
                if n == self.degree(m)[0]:
                    for b in bs:
                        if b.without_tau() == m.without_tau():
                            return b
            return None
        for b in basis or ():
            if b == m or (self.inv and b.without_tau() == m.without_tau()):
                return b
        return None

    def rewrite(self, m: Monomial, used: set) -> tuple[dict, list]:
        """-> (basis monomial -> parity, [Opaque]) with the facts applied added to ``used``."""
        return self._rw(m, used, 0)

    def _rw(self, m: Monomial, used: set, depth: int) -> tuple[dict, list]:
        if depth > MAX_REWRITES:
            raise DegreeError(f"rewriting {m.ascii()} does not terminate")
        b = self.basis_match(m)
        if b is not None:
            return {b: 1}, []
        if not self.inv:
            for a in self.ann:
                x = a.element
                if x.divides(m) and m.tau >= x.tau + a.power:
                    used.add(a)
                    return {}, []
            for tf in self.tfree:
                for sub in m.submonomials():
                    if sub.is_unit() or self.degree(sub) != (tf.stem, tf.weight):
                        continue
                    tors = self.torsion_facts(sub)
                    if tors:
                        used.add(tf)
                        used.update(tors[:1])
                        return {}, []
        for r in self.rels:
            if r.lhs.divides(m, ignore_tau=self.inv):
                used.add(r)
                q = m.quotient(r.lhs)
                return self._sum([t * q for t in r.rhs], used, depth)
        for r in self.ctau:
            if r.lhs.divides(m):
                used.add(r)
                q = m.quotient(r.lhs)
                exact, opq = self._sum([t * q for t in r.rhs], used, depth)
                delta = Monomial.make({"δ[" + r.lhs.ascii() + "]": 1}, 1) * q
                return exact, opq + [Opaque(delta, 1 + q.tau)]
        return {}, [Opaque(m, None if self.inv else m.tau, self.is_torsion(m))]

    def _sum(self, ms, used, depth):
        exact: dict = {}
        opq: list = []
        for t in ms:
            e, o = self._rw(t, used, depth + 1)
            for k in e:
                exact[k] = exact.get(k, 0) ^ 1
            opq += o
        return {k: 1 for k, v in exact.items() if v}, opq

    def represent(self, ansatz: Ansatz, label: str = "", extra_facts: Iterable = ()) -> Representation:
        used: set = set()
        coords: dict = {}
        opaque: list = []
        for c, m in ansatz.terms:
            exact, opq = self.rewrite(m, used)
            for b in exact:
                coords[b] = coords.get(b, ZERO) + c
            opaque += [(c, o) for o in opq]
        coords = {b: c for b, c in coords.items() if not c.is_zero()}
        opaque = [(c, o) for c, o in opaque if not c.is_zero()]
        head = [] if ansatz.derived_from == "rewrite" else [ansatz]
        facts = tuple(dict.fromkeys(head + list(extra_facts) + sorted(used, key=lambda f: f.lineno)))
        return Representation(
            ansatz.lhs,
            tuple(sorted(coords.items(), key=lambda kv: _mono_key(kv[0]))),
            tuple(sorted(opaque, key=lambda co: (_mono_key(co[1].expr), str(co[0])))),
            facts, ansatz, label or ansatz.text())


def _find_ansatz(system: FactSystem, lhs: Monomial) -> tuple[Ansatz, tuple]:
    """Declared ansatz for ``lhs`` or one derived by an earlier multiply fact."""
    for a in system.ansatze():
        if a.lhs == lhs:
            return a, ()
    for mf in system.of_kind(Multiply):
        if mf.lhs * mf.by == lhs:
            src, chain = _find_ansatz(system, mf.lhs)
            return _product(src, mf.by, mf), chain + (mf,)
    raise KeyError(f"no ansatz for {lhs.ascii()}")


def _product(src: Ansatz, by: Monomial, origin=None) -> Ansatz:
    text = origin.text() if origin is not None else f"multiply {src.lhs.ascii()} by {by.ascii()}"
    return Ansatz(src.lhs * by, tuple((c, m * by) for c, m in src.terms), derived_from=text,
                  lineno=getattr(origin, "lineno", 0))


def multiply_ansatz(system: FactSystem, lhs, multiplier) -> Representation:
    """Multiply the ansatz for ``lhs`` by ``multiplier`` and rewrite every term."""
    if isinstance(lhs, Ansatz):
        src, chain = lhs, ()
    else:
        src, chain = _find_ansatz(system, lhs)
    system.degree(multiplier)
    origin = next((f for f in system.of_kind(Multiply) if f.lhs == src.lhs and f.by == multiplier), None)
    prod = _product(src, multiplier, origin)
    rw = Rewriter(system)
    rep = rw.represent(prod, label=prod.derived_from, extra_facts=(src,) + chain)
    if not rep.is_zero():
        deg = rw.degree(prod.lhs)
        if deg not in system.bases and not system.tau_inverted:
            raise BasisMissingError(
                f"{prod.lhs.ascii()} lands in degree {deg}, which has no declared basis")
    return rep


# -- constraints -----------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """At least one form evaluates to 1 (a single form is a linear equation)."""

    forms: tuple[Lin, ...]
    facts: tuple = field(default=(), compare=False)
    why: str = field(default="", compare=False)

    def holds(self, values) -> bool:
        return any(f.evaluate(values) for f in self.forms)

    @property
    def unknowns(self) -> set[str]:
        out: set[str] = set()
        for f in self.forms:
            out |= f.vars
        return out

    def text(self) -> str:
        if not self.forms:
            return "0 != 0 (contradiction)"
        return " or ".join(_form_text(f) for f in self.forms)


def _form_text(f: Lin) -> str:
    names = sort_unknowns(f.vars)
    if not names:
        return "true" if f.const else "false"
    if len(names) == 1:
        return f"{names[0]} = {1 - f.const}"
    return " + ".join(names) + f" = {1 - f.const}"


def _clause(forms: Iterable[Lin], facts, why: str) -> Optional[Constraint]:
    forms = [f for f in forms if f != ZERO]
    if any(f == ONE for f in forms):
        return None
    return Constraint(tuple(dict.fromkeys(forms)), tuple(facts), why)


def representations(system: FactSystem) -> dict[Monomial, list[Representation]]:
    rw = Rewriter(system)
    reps: dict[Monomial, list[Representation]] = {}

    def add(rep: Representation):
        lst = reps.setdefault(rep.lhs, [])
        if rep not in lst:
            lst.append(rep)

    for a in system.ansatze():
        add(rw.represent(a))
    for mf in system.of_kind(Multiply):
        add(multiply_ansatz(system, mf.lhs, mf.by))
    targets = list(reps) + [f.element for f in system.of_kind(NonVanishing)]
    for lhs in dict.fromkeys(targets):
        used: set = set()
        exact, opq = rw.rewrite(lhs, used)
        if not exact and len(opq) == 1 and opq[0].expr == lhs:
            continue  # nothing known beyond the element itself
        direct = Ansatz(lhs, ((ONE, lhs),), derived_from="rewrite")
        add(rw.represent(direct, label=f"rewrite of {lhs.ascii()}"))
    return reps


def compile_constraints(system: FactSystem) -> list[Constraint]:
    rw = Rewriter(system)
    reps = representations(system)
    out: list[Constraint] = []

    def push(c: Optional[Constraint]):
        if c is not None and c not in out:
            out.append(c)

    for lhs, lst in reps.items():
        deg = rw.degree(lhs)
        basis = system.bases.get(deg, ())
        for i in range(len(lst)):
            for j in range(i + 1, len(lst)):
                r1, r2 = lst[i], lst[j]
                facts = tuple(dict.fromkeys(r1.facts + r2.facts))
                coords = list(basis) + [b for b, _ in r1.coords + r2.coords if b not in basis]
                for b in dict.fromkeys(coords):
                    forms = [c for c, o in r1.opaque + r2.opaque if o.touches(b)]
                    forms.append(r1.coord(b) + r2.coord(b) + ONE)
                    push(_clause(forms, facts, f"coefficient of {b.ascii()} in {lhs.ascii()}"))

    for nv in system.of_kind(NonVanishing):
        drop_torsion = nv.tau_inverted and not system.tau_inverted
        for rep in reps.get(nv.element, []):
            forms = [c for b, c in rep.coords if not (drop_torsion and rw.is_torsion(b))]
            forms += [c for c, o in rep.opaque if not (drop_torsion and o.torsion)]
            c = _clause(forms, (nv,) + rep.facts, f"{nv.element.ascii()} is nonzero")
            if c is not None or not forms:
                push(c if c is not None else Constraint((), (nv,) + rep.facts, f"{nv.element.ascii()} is nonzero"))
        if not reps.get(nv.element):
            used: set = set()
            exact, opq = rw.rewrite(nv.element, used)
            if not exact and not opq:
                push(Constraint((), (nv, *used), f"{nv.element.ascii()} rewrites to 0"))

    for d in system.of_kind(Disjunction):
        if len(d.unknowns) > 4:
            raise CaseSplitError(f"oneof over {len(d.unknowns)} unknowns exceeds the case-split width 4")
        push(_clause([Lin.var(u) for u in d.unknowns], (d,), "disjunction"))
    return out


# -- solving ---------------------------------------------------------------------

def _solve(unknowns: list[str], constraints: list[Constraint]) -> Optional[dict[str, Optional[int]]]:
    """Exact solution set summary: value per unknown (None if it varies); None if unsatisfiable."""
    names = list(dict.fromkeys(list(unknowns) + sort_unknowns(set().union(*[c.unknowns for c in constraints]))))
    col = {u: i for i, u in enumerate(names)}
    n = len(names)
    if any(not c.forms for c in constraints):
        return None
    eqs = [c.forms[0] for c in constraints if len(c.forms) == 1]
    clauses = [c.forms for c in constraints if len(c.forms) > 1]

    # x_u = const + sum of free variables (bitmask over names)
    if eqs:
        dense = np.zeros((len(eqs), n + 1), dtype=np.uint8)
        for r, f in enumerate(eqs):
            for v in f.vars:
                dense[r, col[v]] = 1
            dense[r, n] = 1 ^ f.const
        red, pivots = rref(F2Matrix.from_dense(dense))
        if n in pivots:
            return None
        red = red.to_dense()
    else:
        red, pivots = np.zeros((0, n + 1), dtype=np.uint8), []
    pivset = set(pivots)
    expr: dict[int, tuple[int, int]] = {}
    for r, p in enumerate(pivots):
        mask = 0
        for j in range(n):
            if j != p and red[r, j] and j not in pivset:
                mask |= 1 << j
        expr[p] = (mask, int(red[r, n]))
    for j in range(n):
        if j not in pivset:
            expr[j] = (1 << j, 0)

    def subst(f: Lin) -> tuple[int, int]:
        mask, const = 0, f.const
        for v in f.vars:
            m, c = expr[col[v]]
            mask ^= m
            const ^= c
        return mask, const

    sclauses = [[subst(f) for f in forms] for forms in clauses]
    sclauses = [cl for cl in sclauses if not any(m == 0 and c == 1 for m, c in cl)]
    sclauses = [[(m, c) for m, c in cl if m] for cl in sclauses]
    if any(not cl for cl in sclauses):
        return None

    # components of free variables linked by clauses
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def bits(mask):
        return [j for j in range(n) if mask >> j & 1]

    for cl in sclauses:
        vs = bits(reduce(or_, [m for m, _ in cl]))
        for v in vs[1:]:
            parent[find(v)] = find(vs[0])
    comps: dict[int, list[int]] = {}
    for cl in sclauses:
        for v in bits(reduce(or_, [m for m, _ in cl])):
            comps.setdefault(find(v), [])
    for j in range(n):
        if j not in pivset and find(j) in comps:
            comps[find(j)].append(j)

    comp_sols: dict[int, tuple[list[int], np.ndarray]] = {}
    for root, vs in comps.items():
        if len(vs) > MAX_COMPONENT:
            raise CaseSplitError(f"{len(vs)} coupled unknowns exceed the enumeration limit {MAX_COMPONENT}")
        k = len(vs)
        assign = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(np.uint8)
        ok = np.ones(1 << k, dtype=bool)
        pos = {v: i for i, v in enumerate(vs)}
        for cl in sclauses:
            if find(bits(cl[0][0])[0]) != root:
                continue
            sat = np.zeros(1 << k, dtype=bool)
            for m, c in cl:
                idx = [pos[v] for v in bits(m)]
                sat |= (assign[:, idx].sum(axis=1) & 1) ^ c == 1
            ok &= sat
        if not ok.any():
            return None
        comp_sols[root] = (vs, assign[ok])

    values: dict[str, Optional[int]] = {}
    for u in names:
        mask, const = expr[col[u]]
        value: Optional[int] = const
        for j in bits(mask):
            if find(j) not in comp_sols:
                value = None
                break
        if value is not None:
            for root, (vs, sols) in comp_sols.items():
                idx = [i for i, v in enumerate(vs) if mask >> v & 1]
                if not idx:
                    continue
                contrib = sols[:, idx].sum(axis=1) & 1
                if contrib.min() != contrib.max():
                    value = None
                    break
                value ^= int(contrib[0])
        values[u] = value
    return values


@dataclass(frozen=True)
class TraceStep:
    facts: tuple
    consequence: str

    def __str__(self) -> str:
        lines = [f.cite() for f in self.facts]
        return "\n".join(lines + ["  => " + self.consequence])


@dataclass(frozen=True)
class DerivationTrace:
    unknown: str
    value: Optional[int]
    steps: tuple[TraceStep, ...] = ()
    constraints: tuple[Constraint, ...] = ()

    @property
    def determined(self) -> bool:
        return self.value is not None

    def cites(self, pred) -> bool:
        return any(pred(f) for s in self.steps for f in s.facts)

    def __str__(self) -> str:
        if self.unknown == "":
            head = "contradiction"
        elif self.value is None:
            return f"{self.unknown}: undetermined"
        else:
            head = f"{self.unknown} = {self.value}"
        body = []
        for i, s in enumerate(self.steps, 1):
            text = str(s).replace("\n", "\n    ")
            body.append(f"  [{i}] {text}")
        return "\n".join([head] + body)


def replay(trace: DerivationTrace) -> Optional[int]:
    """Re-solve the constraints a trace cites; returns the value they force."""
    vals = _solve([trace.unknown] if trace.unknown else [], list(trace.constraints))
    if vals is None:
        return None
    return vals.get(trace.unknown)


def _minimize(constraints: list[Constraint], keep) -> list[Constraint]:
    cur = list(constraints)
    for c in reversed(constraints):
        trial = [x for x in cur if x is not c]
        if keep(trial):
            cur = trial
    return cur


def _trace(unknown: str, value: Optional[int], cons: list[Constraint]) -> DerivationTrace:
    cons = sorted(cons, key=lambda c: min([f.lineno for f in c.facts] or [0]))
    steps = tuple(TraceStep(c.facts, c.text()) for c in cons)
    return DerivationTrace(unknown, value, steps, tuple(cons))


@dataclass
class Solution:
    system: FactSystem
    values: dict[str, Optional[int]]
    constraints: list[Constraint]
    _traces: dict = field(default_factory=dict, repr=False)

    @property
    def determined(self) -> dict[str, int]:
        return {u: v for u, v in self.values.items() if v is not None}

    @property
    def undetermined(self) -> list[str]:
        return [u for u, v in self.values.items() if v is None]

    def explain(self, unknown: str) -> DerivationTrace:
        if unknown not in self.values:
            raise KeyError(unknown)
        if unknown not in self._traces:
            value = self.values[unknown]
            if value is None:
                self._traces[unknown] = DerivationTrace(unknown, None)
            else:
                def keep(cs):
                    v = _solve([unknown], cs)
                    return v is not None and v.get(unknown) == value
                self._traces[unknown] = _trace(unknown, value, _minimize(self.constraints, keep))
        return self._traces[unknown]

    def conclusions(self, pretty: bool = True) -> list[str]:
        """Each declared ansatz with the determined coefficients substituted."""
        out = []
        for a in self.system.ansatze():
            parts = []
            for c, m in a.terms:
                val = c.const
                rest = set()
                for v in c.vars:
                    x = self.values.get(v)
                    if x is None:
                        rest.add(v)
                    else:
                        val ^= x
                body = m.pretty() if pretty else m.ascii()
                if rest:
                    coef = Lin(frozenset(rest), val)
                    ctext = _lin_text(coef, pretty)
                    if len(rest) + val > 1:
                        ctext = "(" + ctext + ")"
                    parts.append(ctext + ("" if pretty else "*") + body)
                elif val:
                    parts.append(body)
            lhs = a.lhs.pretty() if pretty else a.lhs.ascii()
            out.append(f"{lhs} = " + (" + ".join(parts) if parts else "0"))
        return out

    def corollaries(self, pretty: bool = True) -> list[str]:
        """Divisibility read off from fully determined ansatze of the form 2~*x = ...

        Multiplying by a power of tau that kills every tau-torsion term on the
        right leaves a single term t with tau^K t = 2~ tau^K x; inverting tau,
        t is divisible by 2.
        """
        if self.system.tau_inverted:
            return []
        rw = Rewriter(self.system)
        two = Monomial.make({TWO: 1})
        out = []
        for a in self.system.ansatze():
            if not two.divides(a.lhs):
                continue
            terms = []
            for c, m in a.terms:
                if any(self.values.get(v) is None for v in c.vars):
                    break
                if c.const ^ sum(self.values[v] for v in c.vars) % 2:
                    terms.append(m)
            else:
                free, need = [], 0
                for m in terms:
                    kill = [f.element.tau + f.power - m.tau for f in rw.torsion_facts(m)]
                    if kill:
                        need = max(need, min(kill))
                    else:
                        free.append(m)
                if len(free) != 1 or two.divides(free[0]):
                    continue
                t = free[0]
                tk = Monomial.make({}, need)
                show = (lambda m: m.pretty()) if pretty else (lambda m: m.ascii())
                out.append(f"{show(t * tk)} = {show(a.lhs * tk)}")
                out.append(f"hence {show(t.without_tau())} is divisible by 2")
        return out

    def report(self, pretty: bool = True) -> str:
        lines = []
        for u, v in self.values.items():
            name = _pretty_unknown(u) if pretty else u
            lines.append(f"{name} = {v}" if v is not None else f"{name} undetermined")
        lines.append("")
        lines += self.conclusions(pretty)
        extra = self.corollaries(pretty)
        if extra:
            lines += [""] + extra
        return "\n".join(lines) + "\n"


def solve(system: FactSystem) -> Solution:
    constraints = compile_constraints(system)
    unknowns = sort_unknowns(set(system.unknowns).union(*[c.unknowns for c in constraints]))
    values = _solve(unknowns, constraints)
    if values is None:
        core = _minimize(constraints, lambda cs: _solve([], cs) is None)
        raise InconsistentSystem(_trace("", None, core))
    return Solution(system, {u: values[u] for u in unknowns}, constraints)


def explain(system: FactSystem, unknown: str, solution: Optional[Solution] = None) -> DerivationTrace:
    return (solution or solve(system)).explain(unknown)
