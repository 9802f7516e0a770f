# %% [markdown]
# Solving for the unknown coefficients of three ansatze in stems 54 and 74.
# The first one decides whether kappa kbar^2 is divisible by 2.

# %%
from importlib import resources

from adamsynth.deduction import invert_tau, load_facts, multiply_ansatz, parse_monomial, solve

facts = load_facts(resources.files("adamsynth") / "data" / "thm1.facts")
print(facts.text())

# %% Multiplying the first ansatz by kbar
print(multiply_ansatz(facts, parse_monomial("2~*{h0h5i}"), parse_monomial("kbar")))

# %%
sol = solve(facts)
print(sol.report())

# %% Why a_1 = 1
print(sol.explain("a_1"))

# %% Why a_3 = 1
print(sol.explain("a_3"))

# %% With tau inverted the torsion information is gone and a_3 is lost
print(solve(invert_tau(facts)).report())
