import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adamsynth.chart import (
    Chart, ChartClass, ChartParseError, ClassName, Differential, StructLine, einfinity, load_chart, parse_chart,
    print_chart, validate_chart,
)

from conftest import DATA


def codes(text):
    return sorted(d.code for d in validate_chart(parse_chart(text)))


def test_fixture_is_clean():
    chart = load_chart(DATA / "fig1.chart")
    assert validate_chart(chart) == []
    assert chart.window == (53, 57, 6, 14)
    assert len(chart.classes) == 46
    assert chart.find("h0h5i").key == (54, 9, 0)
    assert chart.find("h0Q2").key == (57, 8, 1)


def test_stem55_fixture_adds_tower():
    chart = load_chart(DATA / "stem55.chart")
    assert validate_chart(chart) == []
    rho = chart.find("rho55")
    assert rho.key == (55, 25, 0)
    assert rho.name.synthetic() == "rho55"
    assert chart.find("il").name.synthetic() == "{il}"


def test_empty_chart():
    chart = parse_chart("")
    assert len(chart) == 0
    assert validate_chart(chart) == []
    assert einfinity(chart) == ([], {})


def test_indices_per_bidegree():
    chart = parse_chart("class 1 1 a\nclass 1 1 b\nclass 2 2\n")
    assert [c.key for c in chart.classes] == [(1, 1, 0), (1, 1, 1), (2, 2, 0)]
    assert chart[(1, 1)].name.text == "a"
    assert chart[(1, 1, 1)].name.text == "b"
    assert chart.cell(1, 1) == chart.classes[:2]


def test_dangling_reference_has_column():
    text = "class 1 1\nline h0 (1,1) (1,2)\n"
    with pytest.raises(ChartParseError) as e:
        parse_chart(text, source="x.chart")
    assert e.value.line == 2
    assert e.value.column == text.splitlines()[1].index("(1,2)") + 1
    assert str(e.value).startswith("x.chart:2:")


@pytest.mark.parametrize("text", [
    "class a 1\n",
    "frobnicate 1 2\n",
    "line h0 (1,1)\n",
    "window 1 2 3\n",
    "line h7 (1,1) (1,2)\nclass 1 1\nclass 1 2\n",
])
def test_parse_errors(text):
    with pytest.raises(ChartParseError):
        parse_chart(text)


def test_validation_codes():
    assert codes("class 0 0\nclass 1 1\nline h1 (0,0) (1,1)\n") == []
    assert codes("class 0 0\nclass 2 1\nline h1 (0,0) (2,1)\n") == ["invalid-multiplier"]
    assert codes("class 1 0\nclass 0 3\nd 3 (1,0) (0,3)\n") == []
    assert codes("class 1 0\nclass 0 2\nd 3 (1,0) (0,2)\n") == ["bad-differential-degree"]
    assert codes("class 1 0\nclass 0 1\nd 1 (1,0) (0,1)\n") == ["bad-page"]
    assert codes("class 1 0\nclass 1 0\nclass 0 2\nd 2 (1,0) (0,2)\nd 2 (1,0,1) (0,2)\n") == ["multiple-differentials"]
    assert codes("class 2 0\nclass 1 2\nclass 0 4\nd 2 (2,0) (1,2)\nd 2 (1,2) (0,4)\n") == ["source-and-target"]
    assert codes("class 1 1 x\nclass 1 1 x\n") == ["duplicate-name"]
    assert codes("class -1 0\n") == ["negative-coordinate"]


def test_programmatic_validation():
    chart = Chart(classes=[ChartClass(0, 0), ChartClass(0, 0)],
                  structlines=[StructLine("h0", (0, 0, 0), (0, 1, 0))],
                  differentials=[Differential(2, (1, 0, 0), (0, 2, 0))])
    got = sorted(d.code for d in validate_chart(chart))
    assert got == ["dangling-reference", "dangling-reference", "duplicate-cell"]


def test_einfinity():
    chart = parse_chart("class 1 0\nclass 0 3\nclass 0 5\nd 3 (1,0) (0,3)\n")
    survivors, hit = einfinity(chart)
    assert [c.key for c in survivors] == [(0, 5, 0)]
    assert hit == {(0, 3, 0): 3}


def test_class_name_rules():
    with pytest.raises(ValueError):
        ClassName("")
    assert ClassName("h0h5i").synthetic() == "{h0h5i}"


def test_fixture_roundtrip():
    for name in ("fig1.chart", "stem55.chart"):
        chart = load_chart(DATA / name)
        assert parse_chart(print_chart(chart)) == chart


names = st.one_of(st.none(), st.from_regex(r"[a-z][a-z0-9]{0,4}", fullmatch=True))


@st.composite
def charts(draw):
    cells = draw(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), names), max_size=12))
    text = []
    keys = {}
    for n, s, name in cells:
        text.append(f"class {n} {s}" + (f" {name}" if name else ""))
        keys.setdefault((n, s), 0)
        keys[(n, s)] += 1
    allkeys = [(n, s, i) for (n, s), c in keys.items() for i in range(c)]
    if allkeys:
        for _ in range(draw(st.integers(0, 5))):
            a, b = draw(st.sampled_from(allkeys)), draw(st.sampled_from(allkeys))
            if draw(st.booleans()):
                text.append(f"line {draw(st.sampled_from(['h0', 'h1', 'h2']))} ({a[0]},{a[1]},{a[2]}) ({b[0]},{b[1]},{b[2]})")
            else:
                text.append(f"d {draw(st.integers(2, 5))} ({a[0]},{a[1]},{a[2]}) ({b[0]},{b[1]},{b[2]})")
    return parse_chart("\n".join(text) + "\n")


@settings(max_examples=100, deadline=None)
@given(charts())
def test_roundtrip_property(chart):
    again = parse_chart(print_chart(chart))
    assert again == chart
    assert print_chart(again) == print_chart(chart)


@settings(max_examples=100, deadline=None)
@given(charts())
def test_einfinity_partitions_classes(chart):
    survivors, hit = einfinity(chart)
    sources = {d.source for d in chart.differentials}
    keys = {c.key for c in chart.classes}
    alive = {c.key for c in survivors}
    assert alive | set(hit) | sources >= keys
    assert not alive & (set(hit) | sources)
