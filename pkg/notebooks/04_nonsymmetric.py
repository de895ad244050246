# %% [markdown]
# # A lopsided initial level
#
# The initial condition is skewed. The dome forgets the skew as it
# collapses, and the centre drifts to a fixed point.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collapse_sim.config import load_preset
from collapse_sim.diagnostics import asymmetry, fit_series
from collapse_sim.pde_solver import run

# %%
cfg = load_preset("figure3")
series = run(cfg.initial_condition(), cfg.c, cfg.scheme_config())
print(series.stop_reason, series.final.t)

# %%
fig, ax = plt.subplots()
for snap in series.snapshots[::2]:
    ax.plot(snap.x_phys(), snap.h / snap.h.max(), label=f"t = {snap.t:.3f}")
ax.legend(fontsize=7)
fig.savefig("nonsym_profiles.png", dpi=120)

# %%
for snap in series.snapshots:
    print(f"t = {snap.t:.3f}: asymmetry {asymmetry(snap):.4f}, centre {snap.x_0:.4f}")

# %%
fit = fit_series(series, cfg.c)
print(fit)
print("centre at the end:", series.x_0[-1])
