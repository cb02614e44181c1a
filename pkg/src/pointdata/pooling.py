"""Pooling point-data from several contributors.

A dataset joins the pool only if its measurement setup meets a common
baseline: enough bandwidth, beams no coarser than allowed, and the same
PDP threshold policy. Accepted datasets are appended row by row; rejected
ones contribute nothing and are listed in the report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .core import CampaignMetadata, Dataset, PointRecord, RecordKey, ThresholdPolicy

BANDWIDTH = "bandwidth"
TX_HPBW = "tx beamwidth"
RX_HPBW = "rx beamwidth"
THRESHOLD = "threshold policy mismatch"


class PoolingError(ValueError):
    pass


class DuplicateKeyAcrossSources(PoolingError):
    def __init__(self, key: RecordKey, first: str, second: str):
        self.key = key
        self.sources = (first, second)
        freq, tx, rx, who = key
        super().__init__(f"record ({who}, {freq:g} GHz, {tx}, {rx}) appears in both "
                         f"{first!r} and {second!r}")


class AllSourcesRejected(PoolingError):
    def __init__(self, report: "CompatibilityReport"):
        self.report = report
        super().__init__("no dataset meets the baseline:\n" + report.to_text())


@dataclass(frozen=True)
class BaselineSpec:
    """Minimum measurement specification every pooled dataset must meet."""

    min_bandwidth_mhz: float
    max_hpbw_deg: float
    threshold: ThresholdPolicy = field(default_factory=ThresholdPolicy)

    def __post_init__(self):
        for name in ("min_bandwidth_mhz", "max_hpbw_deg"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "BaselineSpec":
        defaults = ThresholdPolicy()
        try:
            return cls(
                float(doc["min_bandwidth_mhz"]),
                float(doc["max_hpbw_deg"]),
                ThresholdPolicy(float(doc.get("threshold_rel_db", defaults.rel_below_peak_db)),
                                float(doc.get("threshold_abs_db", defaults.abs_above_noise_db))),
            )
        except KeyError as exc:
            raise ValueError(f"baseline field {exc.args[0]!r} is required") from None

    @classmethod
    def from_json(cls, text: str) -> "BaselineSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Verdict:
    source: str
    reasons: tuple[str, ...] = ()
    details: tuple[str, ...] = ()

    @property
    def accepted(self) -> bool:
        return not self.reasons


def check_compatibility(metadata: CampaignMetadata, baseline: BaselineSpec,
                        source: Optional[str] = None) -> Verdict:
    """Compare one campaign's setup with the baseline; lists every failed rule."""
    reasons, details = [], []
    if metadata.bandwidth_mhz < baseline.min_bandwidth_mhz:
        reasons.append(BANDWIDTH)
        details.append(f"{metadata.bandwidth_mhz:g} MHz < required {baseline.min_bandwidth_mhz:g} MHz")
    if metadata.tx_hpbw_deg > baseline.max_hpbw_deg:
        reasons.append(TX_HPBW)
        details.append(f"TX HPBW {metadata.tx_hpbw_deg:g} deg > allowed {baseline.max_hpbw_deg:g} deg")
    if metadata.rx_hpbw_deg > baseline.max_hpbw_deg:
        reasons.append(RX_HPBW)
        details.append(f"RX HPBW {metadata.rx_hpbw_deg:g} deg > allowed {baseline.max_hpbw_deg:g} deg")
    if metadata.threshold != baseline.threshold:
        reasons.append(THRESHOLD)
        details.append(f"{metadata.threshold} != required {baseline.threshold}")
    return Verdict(source or metadata.contributor, tuple(reasons), tuple(details))


@dataclass(frozen=True)
class CompatibilityReport:
    baseline: BaselineSpec
    verdicts: tuple[Verdict, ...]
    # Lowest common denominator over the accepted datasets; None if none accepted.
    pooled_bandwidth_mhz: Optional[float] = None
    pooled_tx_hpbw_deg: Optional[float] = None
    pooled_rx_hpbw_deg: Optional[float] = None

    @property
    def accepted(self) -> list[str]:
        return [v.source for v in self.verdicts if v.accepted]

    @property
    def rejected(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.accepted]

    def to_dict(self) -> dict:
        return {
            "baseline": {
                "min_bandwidth_mhz": self.baseline.min_bandwidth_mhz,
                "max_hpbw_deg": self.baseline.max_hpbw_deg,
                "threshold_rel_db": self.baseline.threshold.rel_below_peak_db,
                "threshold_abs_db": self.baseline.threshold.abs_above_noise_db,
            },
            "verdicts": [
                {"source": v.source, "accepted": v.accepted,
                 "reasons": list(v.reasons), "details": list(v.details)}
                for v in self.verdicts
            ],
            "pooled_spec": {
                "bandwidth_mhz": self.pooled_bandwidth_mhz,
                "tx_hpbw_deg": self.pooled_tx_hpbw_deg,
                "rx_hpbw_deg": self.pooled_rx_hpbw_deg,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        b = self.baseline
        lines = [f"baseline: bandwidth >= {b.min_bandwidth_mhz:g} MHz, HPBW <= {b.max_hpbw_deg:g} deg, "
                 f"threshold {b.threshold}"]
        for v in self.verdicts:
            if v.accepted:
                lines.append(f"  ACCEPT {v.source}")
            else:
                lines.append(f"  REJECT {v.source}: {', '.join(v.reasons)}")
                lines.extend(f"         {d}" for d in v.details)
        if self.pooled_bandwidth_mhz is not None:
            lines.append(f"pooled spec: bandwidth {self.pooled_bandwidth_mhz:g} MHz, "
                         f"TX HPBW {self.pooled_tx_hpbw_deg:g} deg, "
                         f"RX HPBW {self.pooled_rx_hpbw_deg:g} deg")
        return "\n".join(lines) + "\n"


def _common(values):
    values = set(values)
    return values.pop() if len(values) == 1 else None


def pooled_metadata(metas: Sequence[CampaignMetadata], baseline: BaselineSpec) -> CampaignMetadata:
    """Metadata describing a pool: the coarsest setup among its members."""
    contributors = sorted({m.contributor for m in metas})
    return CampaignMetadata(
        contributor=contributors[0] if len(contributors) == 1 else " + ".join(contributors),
        environment=_common(m.environment for m in metas) or "mixed",
        bandwidth_mhz=min(m.bandwidth_mhz for m in metas),
        tx_hpbw_deg=max(m.tx_hpbw_deg for m in metas),
        rx_hpbw_deg=max(m.rx_hpbw_deg for m in metas),
        tx_gain_dbi=_common(m.tx_gain_dbi for m in metas),
        rx_gain_dbi=_common(m.rx_gain_dbi for m in metas),
        threshold=baseline.threshold,
        map_ref=_common(m.map_ref for m in metas),
        date_range=_common(m.date_range for m in metas),
        notes=_common(m.notes for m in metas),
    )


def merge(datasets: Sequence[Dataset], baseline: BaselineSpec,
          source_ids: Optional[Sequence[str]] = None) -> tuple[Dataset, CompatibilityReport]:
    """Pool the compatible datasets.

    Records keep their input order (dataset by dataset); provenance entries
    are sorted by source id so the result does not depend on input order
    beyond record ordering. Records whose contributor differs from the pooled
    contributor are tagged with their owner.

    Raises
    ------
    AllSourcesRejected
        No dataset meets the baseline.
    DuplicateKeyAcrossSources
        Two accepted sources hold the same (contributor, frequency, TX, RX).
    """
    if not datasets:
        raise ValueError("merge needs at least one dataset")
    if source_ids is None:
        source_ids = [_source_name(ds) for ds in datasets]
    if len(source_ids) != len(datasets):
        raise ValueError("one source id per dataset is required")

    verdicts = tuple(check_compatibility(ds.metadata, baseline, sid)
                     for ds, sid in zip(datasets, source_ids))
    accepted = [(ds, sid) for ds, sid, v in zip(datasets, source_ids, verdicts) if v.accepted]
    if not accepted:
        raise AllSourcesRejected(CompatibilityReport(baseline, verdicts))

    meta = pooled_metadata([ds.metadata for ds, _ in accepted], baseline)
    report = CompatibilityReport(baseline, verdicts, meta.bandwidth_mhz,
                                 meta.tx_hpbw_deg, meta.rx_hpbw_deg)

    records: list[PointRecord] = []
    provenance: list[tuple[str, int]] = []
    owners: dict[RecordKey, str] = {}
    for ds, sid in accepted:
        for rec in ds.records:
            who = ds.contributor_of(rec)
            key = (rec.frequency_ghz, rec.tx_id, rec.rx_id, who)
            if key in owners:
                raise DuplicateKeyAcrossSources(key, owners[key], sid)
            owners[key] = sid
            records.append(replace(rec, contributor=None if who == meta.contributor else who))
        provenance.extend(ds.provenance or ((sid, len(ds.records)),))
    return Dataset(meta, tuple(records), tuple(sorted(provenance))), report


def _source_name(ds: Dataset) -> str:
    if len(ds.provenance) == 1:
        return ds.provenance[0][0]
    return ds.metadata.contributor
