import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsynth.chart import load_chart, parse_chart
from adamsynth.synthetic import (
    ExtensionFact, HomogeneityError, bigraded_group, format_listing, group_for_chart, parse_extension_facts,
    translate,
)

from conftest import DATA, read_synthetic_table


@pytest.fixture(scope="module")
def fig1():
    return load_chart(DATA / "fig1.chart")


def in_window(g, window):
    n0, n1, s0, s1 = window
    return n0 <= g.stem <= n1 and s0 <= g.filtration <= s1


def test_matches_synthetic_table(fig1):
    got = {
        (g.stem, g.filtration, g.cls.name.text if g.cls.name else None, g.torsion)
        for g in translate(fig1) if in_window(g, fig1.window)
    }
    assert got == read_synthetic_table()


def test_named_torsion(fig1):
    by_name = {g.label: g for g in translate(fig1)}
    assert by_name["h5Pd0"].torsion == 2
    assert by_name["il"].torsion == 4
    assert by_name["h0Q2"].torsion == 1
    assert by_name["h0h5i"].torsion is None
    assert "h5i" not in by_name  # supports a d3


def test_listing(fig1):
    text = format_listing(translate(fig1))
    assert "il : tau^4-torsion at (55,14)\n" in text
    assert "h0h5i : tau-free at (54,9)\n" in text
    assert "h0Q2 : tau-torsion at (57,8)\n" in text


def test_weight(fig1):
    g = next(g for g in translate(fig1) if g.label == "h0h5i")
    assert (g.stem, g.weight) == (54, 63)


def test_group_55_66():
    chart = load_chart(DATA / "stem55.chart")
    grp = group_for_chart(chart, 55, 66)
    assert grp.orders() == [2, 16]
    assert str(grp) == "pi 55 66 = Z/2<tau^3{il}> + Z/16<tau^14 rho55>"
    assert grp.order == 32


def test_window_warning(fig1):
    grp = group_for_chart(fig1, 55, 66)
    assert any("window-incomplete" in w for w in grp.warnings)
    assert group_for_chart(fig1, 60, 70).warnings


def test_zero_group():
    chart = parse_chart("class 3 1\n")
    assert str(group_for_chart(chart, 3, 10)) == "pi 3 10 = 0"


def test_tau_multiples_stop_at_torsion():
    chart = parse_chart("class 1 0\nclass 0 3\nd 3 (1,0) (0,3)\n")
    (g,) = translate(chart)
    assert g.torsion == 2
    assert g.contributes(0, 3) == 0
    assert g.contributes(0, 2) == 1
    assert g.contributes(0, 1) is None
    assert g.contributes(0, 4) is None


def test_h0_tower_and_extension():
    chart = parse_chart("class 0 0\nclass 0 1\nclass 0 2\nline h0 (0,0) (0,1)\nline h0 (0,1) (0,2)\nclass 0 4\n")
    assert bigraded_group(translate(chart), chart.structlines, [], 0, 0).orders() == [2, 8]
    # hidden 2~ extension from (0,2) to (0,4) jumps one filtration
    fact = ExtensionFact((0, 2, 0), (0, 4, 0), 1)
    grp = bigraded_group(translate(chart), chart.structlines, [fact], 0, 0)
    assert grp.orders() == [16]


def test_extension_homogeneity():
    chart = parse_chart("class 0 0\nclass 0 4\n")
    with pytest.raises(HomogeneityError):
        bigraded_group(translate(chart), [], [ExtensionFact((0, 0, 0), (0, 4, 0), 0)], 0, 0)
    with pytest.raises(HomogeneityError):
        bigraded_group(translate(chart), [], [ExtensionFact((0, 0, 0), (9, 9, 0), 0)], 0, 0)


def test_parse_extension_facts():
    facts = parse_extension_facts("ext (0,2) tau (0,4)\next (1,1,0) (1,2,0)  # plain\n\next (1,1) tau^3 (1,5)\n")
    assert facts == [ExtensionFact((0, 2, 0), (0, 4, 0), 1), ExtensionFact((1, 1, 0), (1, 2, 0), 0),
                     ExtensionFact((1, 1, 0), (1, 5, 0), 3)]
    with pytest.raises(ValueError):
        parse_extension_facts("ext 0 2\n")


@st.composite
def towers(draw):
    """A stem-0 chart: a tower with some classes hit by differentials from stem 1."""
    height = draw(st.integers(1, 8))
    lines = [f"class 0 {s}" for s in range(height)]
    lines += [f"line h0 (0,{s}) (0,{s + 1})" for s in range(height - 1)]
    hits = draw(st.lists(st.tuples(st.integers(0, height - 1), st.integers(2, 6)), unique_by=lambda x: x[0]))
    for s, r in hits:
        if s - r >= 0:
            lines.append(f"class 1 {s - r}")
            lines.append(f"d {r} (1,{s - r},0) (0,{s})")
    return parse_chart("\n".join(lines) + "\n"), height


@settings(max_examples=100, deadline=None)
@given(towers(), st.integers(-2, 10))
def test_group_order_counts_tau_multiples(chart_height, b):
    chart, height = chart_height
    gens = translate(chart)
    grp = bigraded_group(gens, chart.structlines, [], 0, b)
    # oracle: every charted class in stem 0 contributes tau^j x for 0 <= j < torsion, j = s - b
    expected = 0
    survivors = {c.key for c in chart.classes}
    hit = {d.target: d.page for d in chart.differentials}
    for c in chart.classes:
        if c.n != 0:
            continue
        j = c.s - b
        if j < 0:
            continue
        if c.key in hit and j >= hit[c.key] - 1:
            continue
        expected += 1
    assert grp.order == 2 ** expected
