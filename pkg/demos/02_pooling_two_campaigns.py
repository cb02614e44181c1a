# %% [markdown]
# # Pooling two campaigns
#
# A second (made-up) lab contributes three links at 6.75 GHz. Only setups that
# meet a shared baseline are pooled; the report says why others were left out.

# %%
from pointdata import (BaselineSpec, CampaignMetadata, LinkState, ThresholdPolicy,
                       fit_dataset_ple, load_inh_table, merge, parse_point_table)

nyu = load_inh_table()

lab_b_csv = """freq_ghz,tx,rx,loc,tr_sep_m,omni_pl_vv_db,omni_pl_vh_db,mean_dir_ds_ns,omni_ds_ns,mean_lobe_asa_deg,omni_asa_deg,mean_lobe_asd_deg,omni_asd_deg,mean_lobe_zsa_deg,omni_zsa_deg,mean_lobe_zsd_deg,omni_zsd_deg
6.75,TX7,RX1,LOS,8.2,66.1,--,6.1,18.0,12.0,48.0,11.0,44.0,3.0,9.0,2.5,8.0
,,RX2,NLOS,19.5,84.0,--,20.0,52.0,14.0,61.0,13.0,55.0,4.0,10.0,3.1,9.2
,TX8,RX3,NLOS,31.0,90.2,--,16.0,44.5,10.0,40.0,9.5,38.0,2.2,7.5,2.0,6.9
"""

def lab_meta(threshold):
    return CampaignMetadata(contributor="Lab B", environment="InH", bandwidth_mhz=800.0,
                            tx_hpbw_deg=20.0, rx_hpbw_deg=40.0, threshold=threshold)

lab_b = parse_point_table(lab_b_csv, lab_meta(ThresholdPolicy(25.0, 5.0)), source_id="lab_b.csv")
lab_c = parse_point_table(lab_b_csv.replace("TX7", "TX9").replace("TX8", "TX10"),
                          lab_meta(ThresholdPolicy(20.0, 5.0)), source_id="lab_c.csv")

# %%
baseline = BaselineSpec(min_bandwidth_mhz=500.0, max_hpbw_deg=45.0)
pooled, report = merge([nyu, lab_b, lab_c], baseline)
print(report.to_text())
print("provenance:", pooled.provenance)

# %% [markdown]
# Records from the second lab keep their owner in the pooled table.

# %%
owners = {pooled.contributor_of(r) for r in pooled}
print("contributors:", sorted(owners))
fit = fit_dataset_ple(pooled, 6.75, LinkState.NLOS)
print(f"pooled 6.75 GHz NLOS PLE {fit.ple:.2f} over {fit.n_points} links")
