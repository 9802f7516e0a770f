# %% [markdown]
# The mod 2 Steenrod algebra in the Milnor basis, with Adem relations as an
# independent check.

# %%
from adamsynth.steenrod import Sq, adem_reduce, basis_in_degree, dimension, milnor_product

print([dimension(n) for n in range(16)])
print(basis_in_degree(8))

# %% Sq^2 Sq^2 = Sq^3 Sq^1, in Milnor form
print(Sq(2) * Sq(2))
print(adem_reduce([2, 2]))
print(adem_reduce([3, 1]))

# %% The product formula on two larger monomials
print(milnor_product((4, 2), (2, 1)))

# %% Associativity spot check
a, b, c = Sq(3, 1), Sq(0, 2), Sq(5)
assert (a * b) * c == a * (b * c)
