# %% [markdown]
# Bit-packed linear algebra over F2.  Rows are packed into uint64 words, so a
# row operation is one vectorised XOR.

# %%
import numpy as np

from adamsynth.f2linalg import F2Matrix, kernel_basis, rank, rref, solve

rng = np.random.default_rng(0)
m = F2Matrix.from_dense(rng.integers(0, 2, size=(6, 10), dtype=np.uint8))
print(m.to_text())

# %%
red, pivots = rref(m)
print("pivots", pivots, "rank", rank(m))
print(red.to_text())

# %% Kernel vectors really are killed by m
K = kernel_basis(m)
print(K.dim, "kernel vectors")
assert all(not m.apply(v).any() for v in K)

# %% Solving m x = b for a b in the image
x0 = rng.integers(0, 2, size=10, dtype=np.uint8)
b = [int(v) for v in m.apply(x0)]
x = solve(m, b)
print(b, "<-", x)

# %% Wide matrices span several words per row
wide = F2Matrix.from_dense(rng.integers(0, 2, size=(200, 300), dtype=np.uint8))
print(wide.shape, rank(wide))
