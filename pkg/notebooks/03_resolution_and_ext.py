# %% [markdown]
# A minimal resolution of F2 over A and the resulting Ext chart.

# %%
import time

from adamsynth.resolution import ext_basis_element, hi, lift_product, resolve

t0 = time.perf_counter()
res = resolve(8, 24)
print(f"resolved in {time.perf_counter() - t0:.2f}s")

# %% Generator counts by stem n = t - s
for s in range(8, -1, -1):
    row = "".join(str(res.ngens(s, n + s)) if n + s <= 24 and res.ngens(s, n + s) else "." for n in range(17))
    print(f"{s:2d} {row}")

# %% Yoneda products: h0 h1 = 0, h1^3 = h0^2 h2
h0, h1, h2 = hi(res, 0), hi(res, 1), hi(res, 2)
print(lift_product(res, h0, h1).is_zero())
lhs = lift_product(res, lift_product(res, h1, h1), h1)
rhs = lift_product(res, lift_product(res, h0, h0), h2)
print(lhs == rhs, lhs)

# %% c0 sits in stem 8, filtration 3; h1 c0 is nonzero
c0 = ext_basis_element(res, 3, 11, 0)
print(lift_product(res, h1, c0))
