# %% [markdown]
# # Faint laser vs conventional vs multiplexed heralded source
#
# Single-photon fraction per pulse at the optimal rate nbar = 1.

# %%
from heraldmux import optimal_mean, source_comparison
from heraldmux.statistics import Kind

for name, p in source_comparison(nbar=1.0, eta=1.0, num_delays=8).items():
    print(f"{name:>25s}  {p:.4f}")

# %% [markdown]
# The unconditional single-photon probability peaks at nbar = 1 for every
# N_D, and for the Poisson source as well.

# %%
for nd in (1, 2, 4, 8):
    print(nd, optimal_mean(1.0, nd), optimal_mean(1.0, nd, Kind.POISSON))

# %% [markdown]
# Efficiency matters for the heralded sources only.

# %%
for eta in (0.25, 0.5, 0.75, 1.0):
    table = source_comparison(1.0, eta, 8)
    print(eta, round(table["conventional_heralded"], 4), round(table["multiplexed_heralded"], 4))
