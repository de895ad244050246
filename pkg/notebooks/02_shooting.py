# %% [markdown]
# # Recovering the exponent by shooting
#
# The profile equation is integrated inward from the interface for trial
# values of mu. The right mu makes F'(0) vanish.

# %%
import matplotlib.pyplot as plt
import numpy as np

from collapse_sim.eigenproblem import ShootingConfig, find_roots, integrate_from_interface, solve_eigenvalue
from collapse_sim.selfsimilar import mu_of_c

# %% [markdown]
# Shots for c = 1.75 with mu on both sides of 1.5.

# %%
cfg = ShootingConfig(c=1.75)
fig, ax = plt.subplots()
for mu in (1.3, 1.5, 1.8):
    xs, Fs, Gs, G0 = integrate_from_interface(1.75, mu, cfg)
    ax.plot(xs, Fs, label=f"mu = {mu}, F'(0) = {G0:+.3f}")
ax.legend()
fig.savefig("shots.png", dpi=120)

# %%
print(find_roots(cfg))

# %% [markdown]
# Recovery across the range.

# %%
for c in (1.6, 1.75, 2.0, 3.0, 5.0, 10.0, 50.0):
    sol = solve_eigenvalue(c)
    F_err = np.max(np.abs(sol.profile - (1 - sol.xi**2) / (2 * (c - 1))))
    print(f"c = {c:5}: mu = {sol.mu_numeric:.10f}, error {abs(sol.mu_numeric - mu_of_c(c)):.1e}, profile {F_err:.1e}")

# %% [markdown]
# Moving the start point closer to the interface hardly changes the answer.

# %%
for delta in (1e-3, 3e-4, 1e-4):
    sol = solve_eigenvalue(3.0, ShootingConfig(c=3.0, start_offset=delta, ode_step=delta / 10))
    print(delta, sol.mu_numeric - mu_of_c(3.0))
