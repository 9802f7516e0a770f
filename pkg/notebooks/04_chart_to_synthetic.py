# %% [markdown]
# From an Adams chart near kappa kbar^2 to synthetic generators: a class hit
# by a d_r becomes tau^(r-1)-torsion, everything surviving untouched is
# tau-free.

# %%
from importlib import resources

from adamsynth.chart import einfinity, load_chart, validate_chart
from adamsynth.synthetic import format_listing, group_for_chart, translate

data = resources.files("adamsynth") / "data"
chart = load_chart(data / "fig1.chart")
print(len(chart.classes), "classes;", validate_chart(chart) or "no diagnostics")

# %%
survivors, hit_by = einfinity(chart)
print(len(survivors), "survive,", len(hit_by), "hit")

# %%
print(format_listing(translate(chart)))

# %% The group pi_{55,66}, with the extra rho tower of stem 55
big = load_chart(data / "stem55.chart")
print(group_for_chart(big, 55, 66))
