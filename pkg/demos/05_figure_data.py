# %% [markdown]
# # Regenerating the figure data
#
# Each sweep returns rows (nbar, eta, nd, delay, quantity, analytic, ...).
# They can be written as CSV or drawn as a small SVG line chart.

# %%
from pathlib import Path

from heraldmux.sweep import emit_plot, emit_table, sweep_fig3a, sweep_fig3b, sweep_fig4, sweep_fig5

out = Path("figure_data")
out.mkdir(exist_ok=True)
for name, rows in [("fig3a", sweep_fig3a()), ("fig3b", sweep_fig3b()),
                   ("fig4", sweep_fig4()), ("fig5", sweep_fig5())]:
    (out / f"{name}.csv").write_bytes(emit_table(rows, "csv"))
    (out / f"{name}.svg").write_bytes(emit_plot(rows, name, title=name))
    print(name, len(rows), "rows")

# %% [markdown]
# Fig. 5 peaks: the maximum of every curve sits at nbar = 1.

# %%
rows = sweep_fig5()
for nd in range(1, 9):
    best = max((r for r in rows if r.nd == nd), key=lambda r: r.analytic)
    print(nd, best.nbar, round(best.analytic, 4))
