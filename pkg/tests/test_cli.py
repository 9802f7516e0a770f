import subprocess
import sys

import pytest

from adamsynth.cli import Config, CliError, data_path, run
from adamsynth.resolution import load_cache, parse_chart_data


def test_translate(capsys):
    assert run(["translate", "fig1.chart"]) == 0
    out = capsys.readouterr().out
    assert "il : tau^4-torsion at (55,14)" in out


def test_groups(capsys):
    assert run(["groups", "55", "66"]) == 0
    assert capsys.readouterr().out.strip() == "pi 55 66 = Z/2<tau^3{il}> + Z/16<tau^14 rho55>"


def test_deduce(capsys):
    assert run(["deduce", "thm1.facts", "--no-traces"]) == 0
    out = capsys.readouterr().out
    assert "2̃{h₀h₅i} = η{h₅Pd₀} + κκ̄²τ²" in out


def test_deduce_explain_ascii(capsys):
    assert run(["deduce", "thm1.facts", "--ascii", "--explain", "a_1"]) == 0
    out = capsys.readouterr().out
    assert "h0^2 h5i = h1 Pd0 h5" in out
    assert "κ" not in out


def test_deduce_inverted(capsys):
    assert run(["deduce", "thm1.facts", "--invert-tau", "--no-traces", "--ascii"]) == 0
    assert "a_3 undetermined" in capsys.readouterr().out


def test_deduce_inconsistent(tmp_path, capsys):
    p = tmp_path / "bad.facts"
    p.write_text("deg x 1 1\ndeg b 1 1\nbasis 1 1 : b\nansatz x = b\nansatz x = 0\n")
    assert run(["deduce", str(p)]) == 1
    assert "inconsistent" in capsys.readouterr().err


def test_fact_parse_error_location(tmp_path, capsys):
    p = tmp_path / "bad.facts"
    p.write_text("deg x 1 1\n\nann tau^ x\n")
    assert run(["deduce", str(p)]) == 2
    err = capsys.readouterr().err
    assert f"{p}:3:" in err


def test_chart_parse_error_location(tmp_path, capsys):
    p = tmp_path / "bad.chart"
    p.write_text("class 1 1\nline h0 (1,1) (9,9)\n")
    assert run(["translate", str(p)]) == 2
    assert f"{p}:2:" in capsys.readouterr().err


def test_chart_check(tmp_path, capsys):
    assert run(["chart", "check", "fig1.chart"]) == 0
    assert "0 diagnostics" in capsys.readouterr().out
    p = tmp_path / "empty.chart"
    p.write_text("")
    assert run(["chart", "check", str(p)]) == 0
    assert capsys.readouterr().out.startswith("0 classes")


def test_render(tmp_path):
    out = tmp_path / "c.svg"
    assert run(["render", "fig1.chart", "-o", str(out), "--synthetic", "--high-torsion-color", "orange"]) == 0
    first = out.read_text()
    assert first.startswith("<svg")
    assert run(["render", "fig1.chart", "-o", str(out), "--synthetic"]) == 0
    assert out.read_text() == first


def test_missing_file(capsys):
    assert run(["translate", "no/such.chart"]) == 2
    assert "no such file" in capsys.readouterr().err


def test_bad_usage():
    assert run([]) == 2
    assert run(["resolve", "--s-max", "x"]) == 2


def test_config_validation():
    with pytest.raises(CliError):
        Config(s_max=-1)
    with pytest.raises(CliError):
        Config(workers=0)
    with pytest.raises(CliError):
        Config(budget=-2.0)


def test_data_path_fallback():
    assert data_path("thm1.facts").is_file()
    with pytest.raises(CliError):
        data_path("nowhere/thm1.facts")


def test_resolve_with_cache(tmp_path, capsys):
    cache = tmp_path / "res.bin"
    assert run(["resolve", "--s-max", "3", "--t-max", "10", "--out", str(tmp_path), "--cache", str(cache),
                "--alias", "x_1_1_0=h0"]) == 0
    assert load_cache(cache).dims(3, 10)
    data = parse_chart_data((tmp_path / "ext.chart").read_text())
    assert data.name(1, 1, 0) == "h0"
    # resume from the cache into a larger range
    assert run(["resolve", "--s-max", "4", "--t-max", "12", "--out", str(tmp_path), "--cache", str(cache)]) == 0
    assert "wrote" in capsys.readouterr().out


def test_resolve_budget(tmp_path, capsys):
    cache = tmp_path / "res.bin"
    rc = run(["resolve", "--s-max", "8", "--t-max", "40", "--budget", "0", "--out", str(tmp_path),
              "--cache", str(cache)])
    assert rc == 3
    assert "budget exceeded" in capsys.readouterr().err
    assert cache.exists()


def test_resolve_bad_alias(tmp_path, capsys):
    assert run(["resolve", "--s-max", "1", "--t-max", "2", "--no-cache", "--out", str(tmp_path),
                "--alias", "h0"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "adamsynth", "groups", "55", "66"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "Z/16" in proc.stdout
