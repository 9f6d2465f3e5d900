# %% [markdown]
# # Checking the closed forms against simulation
#
# The simulator draws each mode's photon number, thins it with the detector
# efficiency, and records the first line that clicks. Estimates carry
# binomial standard errors.

# %%
from heraldmux import MultiplexConfig, SimulationSpec, run_delay_multiplexed
from heraldmux import model

cfg = MultiplexConfig(nbar=1.0, eta=0.5, num_delays=8)
result = run_delay_multiplexed(SimulationSpec(cfg, trials=1_000_000, seed=7), workers=4)

for e in result.estimates:
    if e.name == "certification":
        exact = model.certification(cfg, e.delay)
    elif e.name == "delay_fire_prob":
        exact = model.delay_fire_prob(cfg, e.delay)
    else:
        exact = getattr(model, e.name)(cfg)
    print(f"{e.name:>34s}[{e.delay}]  mc {e.estimate:.5f} +- {e.standard_error:.5f}  exact {exact:.5f}"
          f"  z {e.z_score(exact):.2f}")

# %% [markdown]
# The same seed always reproduces the same counts, however many workers run
# the chunks.

# %%
again = run_delay_multiplexed(SimulationSpec(cfg, trials=1_000_000, seed=7))
print((again.counts.events == result.counts.events).all())
