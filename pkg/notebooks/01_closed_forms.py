# %% [markdown]
# # Closed-form solutions
#
# The dome solution for each absorption regime, and how the two sides of
# c = 3/2 approach the exponential solution that sits on the boundary.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collapse_sim.selfsimilar import (
    ExponentialLimitSolution,
    SelfSimilarSolution,
    classify,
    eval_collapse,
    eval_decay,
    eval_exponential,
    h_max,
    half_width,
    limit_consistency_check,
    mu_of_c,
)

# %%
for c in (0.5, 1.0, 1.25, 1.5, 1.75, 3.0):
    print(f"c = {c:<5} regime = {classify(c).regime.value}")

# %% [markdown]
# The exponent as a function of c. It blows up at c = 3/2 and tends to 1/2
# for large c.

# %%
cs = np.linspace(1.52, 10, 200)
plt.plot(cs, [mu_of_c(c) for c in cs])
plt.xlabel("c")
plt.ylabel("mu")
plt.savefig("mu_of_c.png", dpi=120)

# %% [markdown]
# Collapsing dome for c = 1.75, B = 1, t0 = 1: the width goes as
# (t0 - t)^1.5 and the height as (t0 - t)^2.

# %%
sol = SelfSimilarSolution.create(1.75, 1.0, 1.0)
fig, ax = plt.subplots()
for t in (0.0, 0.3, 0.6, 0.8):
    x = np.linspace(-1.0, 1.0, 401)
    ax.plot(x, eval_collapse(sol, x, t), label=f"t = {t}")
ax.legend()
fig.savefig("collapse_profiles.png", dpi=120)
print(half_width(sol, 0.75), h_max(sol, 0.75))

# %%
decay = SelfSimilarSolution.create(1.25, 1.0, 1.0)
x = np.linspace(-3, 3, 7)
print(eval_decay(decay, x, 2.0))

# %% [markdown]
# Near c = 3/2 the domes approach the exponential solution. The gap
# shrinks roughly in proportion to eps from either side.

# %%
lim = ExponentialLimitSolution(C=1.0, Theta=1.0)
print(eval_exponential(lim, np.array([0.0, 0.5]), 0.5))
for eps in (1e-2, 1e-3, 1e-4):
    above = limit_consistency_check(eps, side=+1)
    below = limit_consistency_check(eps, side=-1)
    print(f"eps = {eps:.0e}: above {above:.3e}, below {below:.3e}")
