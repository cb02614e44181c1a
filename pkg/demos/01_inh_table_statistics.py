# %% [markdown]
# # Indoor hotspot point data at 6.75 and 16.95 GHz
#
# Load the bundled InH table, fit close-in path-loss exponents per
# frequency and link state, and summarize the omnidirectional delay spread.

# %%
import numpy as np

from pointdata import LinkState, empirical_cdf, fit_dataset_ple, group_summary, load_inh_table
from pointdata.stats import summaries_to_text

ds = load_inh_table()
print(f"{len(ds)} records from {ds.metadata.contributor} ({ds.metadata.environment})")

# %% [markdown]
# ## Close-in path loss, V-V omni
# The fit is anchored at free-space loss at 1 m, so only the slope is free.

# %%
for f in (6.75, 16.95):
    for state in (LinkState.LOS, LinkState.NLOS):
        fit = fit_dataset_ple(ds, f, state)
        print(f"{f:6.2f} GHz {state.value:4s}  n={fit.ple:.2f}  sigma={fit.sigma_sf_db:.1f} dB  "
              f"({fit.n_points} links)")

# %%
fit = fit_dataset_ple(ds, 6.75, LinkState.NLOS)
d = np.array([10.0, 20.0, 40.0])
print("predicted NLOS loss at", d, "m:", np.round(fit.predict(d), 1), "dB")

# %% [markdown]
# ## Delay spread summaries
# Both the arithmetic and the log-domain mean are reported; spreads are
# roughly lognormal, so the two can differ noticeably.

# %%
print(summaries_to_text(group_summary(ds, "omni_ds_ns")))

# %%
los_ds = [r.omni_ds_ns for r in ds.select(6.75, LinkState.LOS)]
for value, p in empirical_cdf(los_ds):
    print(f"{value:7.1f} ns  {p:.3f}")
