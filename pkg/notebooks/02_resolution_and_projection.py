# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Why the record has to be long enough
#
# A fundamental rarely sits exactly on a grid component. Writing it as
# `f_m = G[i] + b` with `0 <= b < delta_G`, the `beta`-th harmonic divided by
# `G[i]` is `beta + beta * b / G[i]`, so its fractional part stays below
# `beta / alpha` with `alpha = G[i] / delta_G`. That bound is only useful
# while it is below 1, which holds for every harmonic up to Nyquist when
# `delta_s < 2 f_low**2 / fs`.

# %%
import math

import numpy as np

from bearing_sios import accepts_harmonic, check_resolution_condition, make_grid

fs, f_low = 12000.0, 100.0
for n in (2**12, 2**13, 2**14, 2**15, 2**18):
    rc = check_resolution_condition(fs, f_low, fs / n)
    print(f"{n:7d} samples: delta_s={fs / n:.4f}  margin={rc.margin:.3f}  {'ok' if rc else 'too coarse'}")
print("shortest passing record:", check_resolution_condition(fs, f_low, 1.0).required_samples)

# %% [markdown]
# ## Near misses
#
# Take fundamentals just off the grid and check every harmonic below
# Nyquist. With the resolution condition met none is lost.

# %%
grid = make_grid(100.0, 200.0, 10, fs / 2**15)
rng = np.random.default_rng(1)
lost = 0
for _ in range(1000):
    i = int(rng.integers(len(grid)))
    fm = grid.G[i] + rng.uniform(0, grid.delta_G)
    betas = np.arange(1, math.floor(fs / (2 * fm)) + 1)
    lost += int(np.count_nonzero(~accepts_harmonic(betas * fm, grid, i, betas)))
print("harmonics lost:", lost)

# %% [markdown]
# With a record far too short the fraction bound exceeds 1 for high orders
# and the test accepts anything, so the counts stop meaning "harmonics".

# %%
coarse = make_grid(100.0, 200.0, 10, fs / 2**10)
print("largest beta / alpha:", max(math.floor(fs / (2 * g)) / coarse.alpha(i)
                                   for i, g in enumerate(coarse.G)))
