# %% [markdown]
# SVG pictures of the chart and of its synthetic translation.

# %%
from importlib import resources
from pathlib import Path

from adamsynth.chart import load_chart
from adamsynth.render import RenderStyle, render_svg

chart = load_chart(resources.files("adamsynth") / "data" / "fig1.chart")
out = Path("renders")
out.mkdir(exist_ok=True)

# %%
(out / "adams.svg").write_text(render_svg(chart))
(out / "synthetic.svg").write_text(render_svg(chart, synthetic=True))

# %% Without labels and with a different colour for tau^5 and beyond
style = RenderStyle(labels=False, high_torsion="#cc6600")
(out / "synthetic_plain.svg").write_text(render_svg(chart, style, synthetic=True))
print(sorted(p.name for p in out.iterdir()))
