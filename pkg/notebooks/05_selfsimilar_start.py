# %% [markdown]
# # Starting from the exact dome
#
# With the exact solution as initial data the solver should keep the shape
# and follow the closed-form width and height.

# %%
import numpy as np

from collapse_sim.diagnostics import fit_series, profile_collapse_error
from collapse_sim.pde_solver import SchemeConfig, StopRule, make_selfsimilar_ic, run

# %%
ic = make_selfsimilar_ic(B=1.0, t0=1.0, c=1.75)
series = run(ic, 1.75, SchemeConfig(snapshot_every=5000))
print(series.stop_reason, series.final.t, series.h_max[0] / series.h_max[-1])

# %%
tau = 1.0 - series.t
print("width error", np.max(np.abs(series.x_f / tau**1.5 - 1)))
print("height error", np.max(np.abs(series.h_max / tau**2 - 1)))
print("profile error", max(profile_collapse_error(s) for s in series.snapshots))
print(fit_series(series, 1.75))

# %% [markdown]
# Doubling N and quartering dt.

# %%
for N, dt in ((102, 4e-5), (202, 1e-5), (404, 2.5e-6)):
    s = run(ic, 1.75, SchemeConfig(N=N, dt=dt, stop=StopRule(max_time=0.6)))
    tau = 1.0 - s.t
    print(N, dt, np.max(np.abs(s.x_f / tau**1.5 - 1)), np.max(np.abs(s.h_max / tau**2 - 1)))
