from dataclasses import replace

from pointdata.core import CampaignMetadata, Dataset, LinkState, PointRecord, ThresholdPolicy

SYNTH_ROWS = [
    ("TX7", "RX1", LinkState.LOS, 14.2, 72.5, 21.3),
    ("TX7", "RX2", LinkState.NLOS, 31.0, 95.1, 44.0),
    ("TX7", "RX3", LinkState.NLOS, 22.7, 88.4, 52.9),
    ("TX8", "RX1", LinkState.LOS, 40.5, 78.9, 30.2),
    ("TX8", "RX2", LinkState.NLOS, 18.9, 84.0, 61.7),
]


def synthetic_meta(**kw) -> CampaignMetadata:
    base = dict(contributor="Lab B", environment="InH", bandwidth_mhz=800.0, tx_hpbw_deg=20.0,
                rx_hpbw_deg=40.0, threshold=ThresholdPolicy(25.0, 5.0))
    base.update(kw)
    return CampaignMetadata(**base)


def synthetic_dataset(**kw) -> Dataset:
    """Five InH links at 6.75 GHz from a second contributor."""
    recs = tuple(PointRecord(6.75, tx, rx, loc, d, omni_pl_vv_db=pl, omni_ds_ns=ds)
                 for tx, rx, loc, d, pl, ds in SYNTH_ROWS)
    return Dataset(synthetic_meta(**kw), recs, (("lab_b.csv", len(recs)),))


def relabel(ds: Dataset, contributor: str) -> Dataset:
    return replace(ds, metadata=replace(ds.metadata, contributor=contributor))
