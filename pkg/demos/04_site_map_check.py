# %% [markdown]
# # Checking reported separations against a site map
#
# The bundled map only names the points (no coordinates were digitized), so
# every link comes back unresolved. A small map with coordinates shows the
# actual check.

# %%
from pointdata import SiteMap, check_separations, load_inh_sitemap, load_inh_table

ds = load_inh_table()
placeholder = check_separations(ds, load_inh_sitemap())
print(f"{placeholder.checked} checked, {len(placeholder.unresolved)} unresolved")
print("points lacking coordinates:", placeholder.missing_points())

# %%
site = SiteMap("toy", "InH", {"TX1": (0.0, 0.0, 2.5), "RX1": (24.0, 5.0, 1.5),
                              "RX2": (10.0, 0.0, 1.5)})
result = check_separations(ds.select(6.75), site, tolerance_m=0.5)
for m in result.mismatches:
    print(f"{m.tx_id}-{m.rx_id}: table {m.reported_m} m, map {m.map_m:.1f} m")
print("ok" if result.ok else f"{len(result.mismatches)} mismatch(es)")
