# %% [markdown]
# # Switched array with optical losses
#
# Eight downconverters, each with its own herald detector. The lowest-index
# heralded channel is routed to the single output through a 3-stage binary
# switch tree (4 coated surfaces per stage). The crystal and delay add 3 more
# surfaces, 15 in total at 0.995 each.

# %%
from heraldmux import MultiplexConfig, SimulationSpec, loss_budget, run_switched_array
from heraldmux.model import reference_loss_model

switch, rest = reference_loss_model(8)
print("net transmittance, loss:", loss_budget(switch + rest))

spec = SimulationSpec(MultiplexConfig(1.0, 1.0, 8), trials=1_000_000, seed=11, mode="array",
                      switch_transmittance=switch.transmittance, output_transmittance=rest.transmittance)
result = run_switched_array(spec)
for e in result.estimates:
    print(f"{e.name:>32s}  {e.estimate:.4f} +- {e.standard_error:.4f}")
print("emitted-photon histogram:", result.histogram)
