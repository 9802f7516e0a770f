"""Command-line entry point: ``adamsynth <command> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .chart import ChartParseError, load_chart, validate_chart
from .deduction import FactParseError, InconsistentSystem, invert_tau, load_facts, solve
from .deduction.terms import DegreeError
from .render import RenderStyle, render_svg
from .resolution import (
    ResolutionBudgetExceeded, Resolution, default_cache_dir, export_chart_data, load_cache,
)
from .synthetic import HomogeneityError, format_listing, group_for_chart, parse_extension_facts, translate

log = logging.getLogger("adamsynth")


class CliError(Exception):
    pass


@dataclass
class Config:
    s_max: int = 12
    t_max: int = 30
    workers: int = 1
    budget: Optional[float] = None
    window: Optional[tuple[int, int, int, int]] = None
    inputs: list[Path] = field(default_factory=list)
    output: Optional[Path] = None
    cache: Optional[Path] = None

    def __post_init__(self):
        if self.s_max < 0 or self.t_max < 0:
            raise CliError("resolution budget must be non-negative")
        if self.workers < 1:
            raise CliError("--workers must be at least 1")
        if self.budget is not None and self.budget < 0:
            raise CliError("--budget must be non-negative")
        for p in self.inputs + [x for x in (self.output, self.cache) if x is not None]:
            if not str(p):
                raise CliError("empty path")


def data_path(name: str) -> Path:
    """A path as given, falling back to the fixtures shipped with the package."""
    p = Path(name)
    if p.exists():
        return p
    packaged = resources.files("adamsynth") / "data" / p.name
    if p.parent == Path(".") and packaged.is_file():
        return Path(str(packaged))
    raise CliError(f"{name}: no such file")


def _chart(path: str):
    return load_chart(data_path(path))


def cmd_resolve(args) -> int:
    cfg = Config(args.s_max, args.t_max, args.workers, args.budget, output=Path(args.out),
                 cache=None if args.no_cache else Path(args.cache or default_cache_dir() / "resolution.bin"))
    res = None
    if cfg.cache is not None and cfg.cache.exists():
        try:
            res = load_cache(cfg.cache)
            log.info("resuming from %s", cfg.cache)
        except (ValueError, OSError) as e:
            print(f"{cfg.cache}: ignoring unreadable cache ({e})", file=sys.stderr)
    if res is None:
        res = Resolution()
    if cfg.cache is not None:
        cfg.cache.parent.mkdir(parents=True, exist_ok=True)
    try:
        res.extend(cfg.s_max, cfg.t_max, budget_seconds=cfg.budget, cache_path=cfg.cache, workers=cfg.workers)
    except ResolutionBudgetExceeded as e:
        print(f"budget exceeded at (s,t)={e.frontier}; partial result cached", file=sys.stderr)
        return 3
    aliases = {}
    for item in args.alias or ():
        key, sep, name = item.partition("=")
        parts = key.split("_")
        if not sep or len(parts) != 4 or parts[0] != "x" or not all(p.isdigit() for p in parts[1:]):
            raise CliError(f"--alias expects x_s_t_i=name, got {item!r}")
        aliases[tuple(int(p) for p in parts[1:])] = name
    ext, prod = export_chart_data(res, cfg.s_max, cfg.t_max, cfg.output, aliases=aliases)
    print(f"wrote {ext}")
    print(f"wrote {prod}")
    return 0


def cmd_chart_check(args) -> int:
    chart = _chart(args.file)
    diags = validate_chart(chart)
    for d in diags:
        print(f"{args.file}:{d}", file=sys.stderr)
    print(f"{len(chart.classes)} classes, {len(chart.structlines)} structlines, "
          f"{len(chart.differentials)} differentials, {len(diags)} diagnostics")
    return 1 if diags else 0


def _checked_chart(path: str):
    chart = _chart(path)
    diags = validate_chart(chart)
    if diags:
        for d in diags:
            print(f"{path}:{d}", file=sys.stderr)
        raise CliError(f"{path}: chart has {len(diags)} problems")
    return chart


def cmd_translate(args) -> int:
    chart = _checked_chart(args.file)
    sys.stdout.write(format_listing(translate(chart)))
    return 0


def cmd_groups(args) -> int:
    chart = _checked_chart(args.chart)
    facts = []
    if args.ext:
        p = data_path(args.ext)
        try:
            facts = parse_extension_facts(p.read_text())
        except ValueError as e:
            raise CliError(f"{p}: {e}") from None
    group = group_for_chart(chart, args.a, args.b, facts)
    for w in group.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(group)
    return 0


def cmd_deduce(args) -> int:
    system = load_facts(data_path(args.file))
    if args.invert_tau:
        system = invert_tau(system)
    pretty = not args.ascii
    try:
        sol = solve(system)
    except InconsistentSystem as e:
        print(f"{args.file}: inconsistent facts", file=sys.stderr)
        print(e.report, file=sys.stderr)
        return 1
    sys.stdout.write(sol.report(pretty))
    if not args.no_traces:
        wanted = args.explain or list(sol.determined)
        for u in wanted:
            print()
            print(sol.explain(u))
    return 0


def cmd_render(args) -> int:
    chart = _checked_chart(args.file)
    style = RenderStyle(high_torsion=args.high_torsion_color, labels=not args.no_labels)
    svg = render_svg(chart, style, synthetic=args.synthetic)
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adamsynth", description="Ext, Adams charts and synthetic extensions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("resolve", help="extend the minimal resolution and export Ext data")
    r.add_argument("--s-max", type=int, default=12)
    r.add_argument("--t-max", type=int, default=30)
    r.add_argument("--out", default=".", help="directory for ext.chart and products.txt")
    r.add_argument("--cache", help="checkpoint file (default: $ADAMSYNTH_CACHE/resolution.bin)")
    r.add_argument("--no-cache", action="store_true")
    r.add_argument("--budget", type=float, help="wall-clock seconds before stopping")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--alias", action="append", metavar="x_s_t_i=NAME")
    r.set_defaults(func=cmd_resolve)

    c = sub.add_parser("chart", help="chart utilities")
    csub = c.add_subparsers(dest="chart_command", required=True)
    cc = csub.add_parser("check", help="parse and validate a chart file")
    cc.add_argument("file")
    cc.set_defaults(func=cmd_chart_check)

    t = sub.add_parser("translate", help="list synthetic generators and their tau-torsion")
    t.add_argument("file")
    t.set_defaults(func=cmd_translate)

    g = sub.add_parser("groups", help="reconstruct pi_{a,b}")
    g.add_argument("a", type=int)
    g.add_argument("b", type=int)
    g.add_argument("--chart", default="stem55.chart")
    g.add_argument("--ext", help="file of 'ext (n,s,i) [tau^m] (n,s,i)' extension facts")
    g.set_defaults(func=cmd_groups)

    d = sub.add_parser("deduce", help="solve a fact file")
    d.add_argument("file")
    d.add_argument("--invert-tau", action="store_true", help="drop tau-torsion and C-tau facts first")
    d.add_argument("--ascii", action="store_true")
    d.add_argument("--explain", action="append", metavar="a_i")
    d.add_argument("--no-traces", action="store_true")
    d.set_defaults(func=cmd_deduce)

    v = sub.add_parser("render", help="draw a chart as SVG")
    v.add_argument("file")
    v.add_argument("-o", "--output")
    v.add_argument("--synthetic", action="store_true", help="draw the synthetic translation")
    v.add_argument("--high-torsion-color", default="orange")
    v.add_argument("--no-labels", action="store_true")
    v.set_defaults(func=cmd_render)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ChartParseError, FactParseError) as e:
        print(e, file=sys.stderr)
    except (CliError, HomogeneityError, DegreeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
    except OSError as e:
        print(f"error: {e.filename or ''}: {e.strerror}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
