import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsynth.deduction import (
    Annihilation, BasisMissingError, DegreeError, FactParseError, FactSystem,
    InconsistentSystem, Lin, Monomial, ProductRelation, UNIT, invert_tau, load_facts, multiply_ansatz,
    parse_fact, parse_facts, parse_monomial, replay, solve,
)
from adamsynth.deduction.terms import parse_linear_term, pretty_class, split_sum

import oracles
from conftest import DATA

M = parse_monomial


@pytest.fixture(scope="module")
def thm1():
    return load_facts(DATA / "thm1.facts")


@pytest.fixture(scope="module")
def solved(thm1):
    return solve(thm1)


def test_thm1_values(solved):
    assert solved.determined == {"a_1": 1, "a_2": 0, "a_3": 1, "a_4": 1, "a_7": 0, "a_8": 0, "a_9": 1}
    assert solved.undetermined == ["a_5", "a_6"]


def test_thm1_conclusion(solved):
    assert solved.conclusions()[0] == "2̃{h₀h₅i} = η{h₅Pd₀} + κκ̄²τ²"
    assert solved.conclusions(pretty=False)[0] == "2~*{h0h5i} = eta*{h5Pd0} + kappa*kbar^2*tau^2"


def test_a1_trace_cites_ext_relation(solved):
    trace = solved.explain("a_1")
    assert trace.value == 1
    assert trace.cites(lambda f: isinstance(f, ProductRelation) and f.ctau and "h0^2 h5i = h1 Pd0 h5" in f.note)
    assert replay(trace) == 1


def test_a8_trace_uses_h0h2_relation(solved):
    trace = solved.explain("a_8")
    assert trace.cites(lambda f: isinstance(f, ProductRelation) and "D2h2g" in f.text())


def test_every_trace_replays(solved):
    for u, v in solved.determined.items():
        assert replay(solved.explain(u)) == v


def test_undetermined_explain(solved):
    trace = solved.explain("a_5")
    assert not trace.determined
    assert str(trace) == "a_5: undetermined"
    with pytest.raises(KeyError):
        solved.explain("a_99")


def test_tau_inverted_loses_a3(thm1):
    inv = invert_tau(thm1)
    assert inv.tau_inverted
    assert not inv.of_kind(Annihilation)
    sol = solve(inv)
    assert sol.values["a_3"] is None


def test_multiply_by_kbar(thm1):
    rep = multiply_ansatz(thm1, M("2~*{h0h5i}"), M("kbar"))
    assert rep.rhs_text() == "a_2*eta*{MP}*kbar*tau + a_3*kappa*kbar^3*tau^2"
    assert rep.rhs_text(pretty=True) == "a₂η{MP}κ̄τ + a₃κκ̄³τ²"


def test_multiply_by_2(thm1):
    rep = multiply_ansatz(thm1, M("kbar*{h0h5i}"), M("2~"))
    assert not rep.coords
    ((coef, opaque),) = rep.opaque
    assert coef == Lin.var("a_4")
    assert opaque.floor == 2  # 2~nu{D2h2g} is tau-divisible, times tau


def test_multiply_by_unit(thm1):
    from adamsynth.deduction.engine import Rewriter

    a = thm1.ansatze()[0]
    assert multiply_ansatz(thm1, a.lhs, UNIT) == Rewriter(thm1).represent(a)


def test_multiply_zero_ansatz():
    sys_ = parse_facts("deg x 1 1\ndeg y 2 2\nansatz x = 0\n")
    assert multiply_ansatz(sys_, M("x"), M("y")).is_zero()


def test_multiply_needs_basis():
    text = "deg x 1 1\ndeg b 1 1\ndeg y 2 2\nbasis 1 1 : b\nunknown a_1\nansatz x = a_1*b\nmultiply x by y\n"
    with pytest.raises(FactParseError) as e:
        parse_facts(text)
    assert e.value.line == 7
    with pytest.raises(BasisMissingError):
        multiply_ansatz(parse_facts(text.rsplit("multiply", 1)[0]), M("x"), M("y"))


def test_add_fact_annihilation_degree(thm1):
    fact = parse_fact("ann tau^2 {h5Pd0}")
    assert thm1.add_fact(fact) is thm1  # already present
    assert thm1.degree(M("{h5Pd0}*tau^2")) == (53, 60)
    assert thm1.degree(M("2~*{h0h5i}")) == (54, 64)
    assert thm1.degree(M("kbar*eta*{h5Pd0}")) == (74, 88)
    assert thm1.degree(M("eta*{h5Pd0}")) == (54, 64)
    assert thm1.degree(M("kappa*kbar^3")) == (74, 90)


def test_inhomogeneous_relation_names_both_degrees():
    sys_ = parse_facts("deg x 1 2\ndeg y 3 4\n")
    with pytest.raises(DegreeError) as e:
        sys_.add_fact(parse_fact("rel x = y"))
    assert "(1, 2)" in str(e.value) and "(3, 4)" in str(e.value)


def test_undeclared_name():
    with pytest.raises(FactParseError) as e:
        parse_facts("deg x 1 1\nnonzero x*z\n")
    assert e.value.line == 2


def test_duplicate_is_idempotent():
    sys_ = parse_facts("deg x 1 1\nann tau x\n")
    again = sys_.add_fact(parse_fact("ann tau x"))
    assert again.facts == sys_.facts


def test_empty_system():
    assert solve(FactSystem()).values == {}
    sol = solve(parse_facts("unknown a_1 a_2\n"))
    assert sol.values == {"a_1": None, "a_2": None}


def test_oneof_width():
    parse_facts("oneof a_1 a_2 a_3 a_4\n")
    with pytest.raises(FactParseError):
        parse_facts("oneof a_1 a_2 a_3 a_4 a_5\n")


def test_inconsistency_report():
    text = "deg x 1 1\ndeg b 1 1\nbasis 1 1 : b\nunknown a_1\nansatz x = a_1*b\nansatz x = b\noneof a_1\nnonzero x\n" \
           "ansatz x = 0\n"
    with pytest.raises(InconsistentSystem) as e:
        solve(parse_facts(text))
    report = e.value.report
    assert report.steps
    assert "contradiction" in str(report)


def test_nonzero_forces_single_coefficient():
    text = "deg x 1 1\ndeg b 1 1\ndeg c 1 1\nbasis 1 1 : b, c\nann tau c\nunknown a_1 a_2\n" \
           "ansatz x = a_1*b + a_2*c\nnonzero tauinv x\n"
    sol = solve(parse_facts(text))
    assert sol.values == {"a_1": 1, "a_2": None}


@pytest.mark.parametrize("line", [
    "ansatz x = a_1*a_2*b",
    "ann x",
    "rel x",
    "basis 1 1 b",
    "oneof b",
    "unknown x",
    "frob x",
    "multiply x y",
])
def test_bad_lines(line):
    with pytest.raises((ValueError, DegreeError)):
        parse_fact(line)


def test_monomial_parsing_and_printing():
    m = M("kappa*kbar^2*tau^2")
    assert m.counts == {"kappa": 1, "kbar": 2}
    assert m.tau == 2
    assert m.ascii() == "kappa*kbar^2*tau^2"
    assert m.pretty() == "κκ̄²τ²"
    assert M("nu*{D2h2g}*tau").pretty() == "ν{Δ²h₂g}τ"
    assert pretty_class("d0g^2") == "d₀g²"
    assert M("1") == UNIT
    assert M("kbar*kappa") == M("kappa*kbar")
    with pytest.raises(ValueError):
        M("a_1*x")
    assert parse_linear_term("a_3*kappa") == (Lin.var("a_3"), M("kappa"))
    assert split_sum("{a+b} + c") == ["{a+b}", "c"]


names = st.sampled_from(["eta", "nu", "kappa", "kbar", "{x}", "2~"])
monomials = st.builds(
    lambda fs, t: Monomial.make({n: e for n, e in fs}, t),
    st.lists(st.tuples(names, st.integers(1, 3)), max_size=4, unique_by=lambda x: x[0]),
    st.integers(0, 4))


@settings(max_examples=200, deadline=None)
@given(monomials, monomials)
def test_degree_is_additive(a, b):
    sys_ = parse_facts("deg eta 1 2\ndeg nu 3 4\ndeg kappa 14 18\ndeg kbar 20 24\ndeg {x} 5 7\n")
    da, db = sys_.degree(a), sys_.degree(b)
    assert sys_.degree(a * b) == (da[0] + db[0], da[1] + db[1])
    assert (a * b).quotient(b) == a
    assert b.divides(a * b)


@settings(max_examples=200, deadline=None)
@given(monomials)
def test_monomial_text_roundtrip(m):
    assert M(m.ascii()) == m


def test_solver_matches_brute_force_small():
    rng = random.Random(11)
    for _ in range(60):
        text, model = oracles.random_fact_system(rng, max_unknowns=6)
        sols = oracles.brute_force(model)
        system = parse_facts(text)
        if not sols:
            with pytest.raises(InconsistentSystem):
                solve(system)
            continue
        sol = solve(system)
        assert sol.values == oracles.determined_from(sols, model["unknowns"])
        for u in sol.determined:
            assert replay(sol.explain(u)) == sol.values[u]


def test_ascii_report(solved):
    report = solved.report(pretty=False)
    assert "a_5 undetermined" in report
    assert "2~*{h0h5i} = eta*{h5Pd0} + kappa*kbar^2*tau^2" in report


def test_ansatz_terms_must_be_basis():
    with pytest.raises(FactParseError):
        parse_facts("deg x 1 1\ndeg b 1 1\ndeg c 1 1\nbasis 1 1 : b\nansatz x = a_1*c\n")


def test_fact_system_text_reparses(thm1):
    again = parse_facts(thm1.text())
    assert again.facts == thm1.facts
    assert solve(again).values == solve(thm1).values


def test_divisibility_corollary(solved, thm1):
    lines = solved.corollaries()
    assert lines[:2] == ["κκ̄²τ⁴ = 2̃{h₀h₅i}τ²", "hence κκ̄² is divisible by 2"]
    assert solve(invert_tau(thm1)).corollaries() == []
