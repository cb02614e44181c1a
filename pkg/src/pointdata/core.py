"""Domain types for point-data tables of large-scale channel statistics.

Everything here is an immutable value. Validation of measurement values is
reported as data (:func:`validate_record`) rather than raised, so a table with
bad rows can still be loaded and inspected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator, Optional

SPEED_OF_LIGHT = 299_792_458.0  # m/s

KNOWN_ENVIRONMENTS = ("InH", "InF", "UMi")


class LinkState(str, Enum):
    LOS = "LOS"
    NLOS = "NLOS"
    OUTAGE = "OUTAGE"

    @classmethod
    def parse(cls, text: str) -> "LinkState":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown link state {text!r}") from None


# (table column, PointRecord attribute); order is the canonical header order.
COLUMNS: tuple[tuple[str, str], ...] = (
    ("freq_ghz", "frequency_ghz"),
    ("tx", "tx_id"),
    ("rx", "rx_id"),
    ("loc", "link_state"),
    ("tr_sep_m", "tr_separation_m"),
    ("omni_pl_vv_db", "omni_pl_vv_db"),
    ("omni_pl_vh_db", "omni_pl_vh_db"),
    ("mean_dir_ds_ns", "mean_dir_ds_ns"),
    ("omni_ds_ns", "omni_ds_ns"),
    ("mean_lobe_asa_deg", "mean_lobe_asa_deg"),
    ("omni_asa_deg", "omni_asa_deg"),
    ("mean_lobe_asd_deg", "mean_lobe_asd_deg"),
    ("omni_asd_deg", "omni_asd_deg"),
    ("mean_lobe_zsa_deg", "mean_lobe_zsa_deg"),
    ("omni_zsa_deg", "omni_zsa_deg"),
    ("mean_lobe_zsd_deg", "mean_lobe_zsd_deg"),
    ("omni_zsd_deg", "omni_zsd_deg"),
)
CANONICAL_HEADER = tuple(col for col, _ in COLUMNS)
COLUMN_TO_ATTR = dict(COLUMNS)

PATH_LOSS_COLUMNS = ("omni_pl_vv_db", "omni_pl_vh_db")
SPREAD_COLUMNS = CANONICAL_HEADER[7:]
MEASUREMENT_COLUMNS = PATH_LOSS_COLUMNS + SPREAD_COLUMNS
# Columns a statistic can be computed over.
NUMERIC_COLUMNS = ("freq_ghz", "tr_sep_m") + MEASUREMENT_COLUMNS


def fspl_db(frequency_ghz: float, distance_m: float = 1.0) -> float:
    """Free-space path loss 20*log10(4*pi*f*d/c) in dB."""
    return 20.0 * math.log10(4.0 * math.pi * frequency_ghz * 1e9 * distance_m / SPEED_OF_LIGHT)


@dataclass(frozen=True)
class PointRecord:
    """One row of a point-data table: a single (frequency, TX, RX) link.

    Measurement fields are ``None`` when the table reports no value.
    ``contributor`` is only set on pooled records whose owner differs from the
    dataset-level contributor.
    """

    frequency_ghz: float
    tx_id: str
    rx_id: str
    link_state: LinkState
    tr_separation_m: float
    omni_pl_vv_db: Optional[float] = None
    omni_pl_vh_db: Optional[float] = None
    mean_dir_ds_ns: Optional[float] = None
    omni_ds_ns: Optional[float] = None
    mean_lobe_asa_deg: Optional[float] = None
    omni_asa_deg: Optional[float] = None
    mean_lobe_asd_deg: Optional[float] = None
    omni_asd_deg: Optional[float] = None
    mean_lobe_zsa_deg: Optional[float] = None
    omni_zsa_deg: Optional[float] = None
    mean_lobe_zsd_deg: Optional[float] = None
    omni_zsd_deg: Optional[float] = None
    contributor: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.link_state, LinkState):
            object.__setattr__(self, "link_state", LinkState.parse(str(self.link_state)))

    def value(self, column: str):
        """Return the value stored under a table column name."""
        return getattr(self, COLUMN_TO_ATTR[column])

    def measurements(self) -> dict[str, Optional[float]]:
        return {col: self.value(col) for col in MEASUREMENT_COLUMNS}


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


def validate_record(record: PointRecord, floor_tolerance_db: float = 0.0) -> list[Violation]:
    """Check a record against the point-data invariants.

    Path losses are compared against the free-space loss at 1 m evaluated at
    the record's own frequency; a value below ``floor - floor_tolerance_db``
    is a violation. Returns an empty list for a valid record.
    """
    out: list[Violation] = []
    f = record.frequency_ghz
    if not (isinstance(f, (int, float)) and math.isfinite(f) and f > 0):
        out.append(Violation("frequency_ghz", "frequency_ghz > 0", f"must be positive and finite, got {f!r}"))
        f = None
    d = record.tr_separation_m
    if not (isinstance(d, (int, float)) and math.isfinite(d) and d > 0):
        out.append(Violation("tr_separation_m", "tr_separation_m > 0", f"must be positive and finite, got {d!r}"))
    if not record.tx_id:
        out.append(Violation("tx_id", "non-empty", "missing TX label"))
    if not record.rx_id:
        out.append(Violation("rx_id", "non-empty", "missing RX label"))

    if record.link_state is LinkState.OUTAGE:
        for col, value in record.measurements().items():
            if value is not None:
                out.append(Violation(COLUMN_TO_ATTR[col], "outage has no measurements",
                                     f"OUTAGE record carries a value ({value!r})"))
        return out

    floor = fspl_db(f) if f is not None else None
    for col in PATH_LOSS_COLUMNS:
        value = record.value(col)
        if value is None:
            continue
        if not math.isfinite(value):
            out.append(Violation(col, "finite", f"non-finite path loss {value!r}"))
        elif floor is not None and value < floor - floor_tolerance_db:
            out.append(Violation(col, "fspl floor", f"{value:g} dB below 1 m FSPL floor ({floor:.2f} dB)"))
    for col in SPREAD_COLUMNS:
        value = record.value(col)
        if value is None:
            continue
        if not math.isfinite(value) or value < 0:
            out.append(Violation(col, "spread >= 0", f"spread must be finite and non-negative, got {value!r}"))
    return out


@dataclass(frozen=True)
class ThresholdPolicy:
    """PDP thresholding rule: keep taps above the greater of the two levels."""

    rel_below_peak_db: float = 25.0
    abs_above_noise_db: float = 5.0

    def __post_init__(self):
        for name in ("rel_below_peak_db", "abs_above_noise_db"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")

    def __str__(self) -> str:
        return f"max(peak - {self.rel_below_peak_db:g} dB, noise + {self.abs_above_noise_db:g} dB)"


def normalize_environment(name: str) -> str:
    """Map case variants of InH/InF/UMi to their canonical spelling.

    Any other non-empty name is kept verbatim as a custom environment.
    """
    name = name.strip()
    if not name:
        raise ValueError("environment must be non-empty")
    for env in KNOWN_ENVIRONMENTS:
        if name.lower() == env.lower():
            return env
    return name


@dataclass(frozen=True)
class CampaignMetadata:
    contributor: str
    environment: str
    bandwidth_mhz: float
    tx_hpbw_deg: float
    rx_hpbw_deg: float
    tx_gain_dbi: Optional[float] = None
    rx_gain_dbi: Optional[float] = None
    threshold: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    map_ref: Optional[str] = None
    date_range: Optional[str] = None
    notes: Optional[str] = None

    def __post_init__(self):
        if not self.contributor:
            raise ValueError("contributor must be non-empty")
        object.__setattr__(self, "environment", normalize_environment(self.environment))
        if not (math.isfinite(self.bandwidth_mhz) and self.bandwidth_mhz > 0):
            raise ValueError(f"bandwidth_mhz must be positive, got {self.bandwidth_mhz!r}")
        for name in ("tx_hpbw_deg", "rx_hpbw_deg"):
            value = getattr(self, name)
            if not (0 < value <= 360):
                raise ValueError(f"{name} must lie in (0, 360], got {value!r}")


RecordKey = tuple[float, str, str, str]


@dataclass(frozen=True)
class Dataset:
    """Ordered records of one campaign (or a pool of campaigns).

    Keys ``(frequency, tx, rx, contributor)`` must be unique; the contributor
    of a record defaults to ``metadata.contributor``. Measurement invariants
    are not enforced here, see :meth:`violations`.
    """

    metadata: CampaignMetadata
    records: tuple[PointRecord, ...] = ()
    provenance: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        object.__setattr__(self, "provenance", tuple((str(s), int(n)) for s, n in self.provenance))
        seen: set[RecordKey] = set()
        for rec in self.records:
            key = self.key(rec)
            if key in seen:
                raise DuplicateKeyError(key)
            seen.add(key)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[PointRecord]:
        return iter(self.records)

    def contributor_of(self, record: PointRecord) -> str:
        return record.contributor or self.metadata.contributor

    def key(self, record: PointRecord) -> RecordKey:
        return (record.frequency_ghz, record.tx_id, record.rx_id, self.contributor_of(record))

    def violations(self) -> list[tuple[int, Violation]]:
        """All (record index, violation) pairs, in record order."""
        return [(i, v) for i, rec in enumerate(self.records) for v in validate_record(rec)]

    def append(self, records: Iterable[PointRecord], source_id: Optional[str] = None) -> "Dataset":
        """Return a new dataset with ``records`` added after the existing ones."""
        records = tuple(records)
        provenance = self.provenance
        if records:
            provenance = provenance + ((source_id or self.metadata.contributor, len(records)),)
        return replace(self, records=self.records + records, provenance=provenance)

    def select(self, frequency_ghz: Optional[float] = None,
               link_state: Optional[LinkState] = None) -> list[PointRecord]:
        """Records matching all given filters (frequency compared with isclose)."""
        out = []
        for rec in self.records:
            if frequency_ghz is not None and not math.isclose(rec.frequency_ghz, frequency_ghz,
                                                              rel_tol=1e-9, abs_tol=1e-9):
                continue
            if link_state is not None and rec.link_state is not LinkState(link_state):
                continue
            out.append(rec)
        return out


class DuplicateKeyError(ValueError):
    def __init__(self, key: RecordKey):
        self.key = key
        freq, tx, rx, who = key
        super().__init__(f"duplicate record key ({freq:g} GHz, {tx}, {rx}, {who})")


class EmptyLobeSet(ValueError):
    pass


class NonPositiveSpread(ValueError):
    pass


@dataclass(frozen=True)
class LobeSpreadSet:
    """Per-spatial-lobe angular spreads (degrees) of one PAS."""

    spreads_deg: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.spreads_deg)
        if not values:
            raise EmptyLobeSet("at least one lobe spread is required")
        bad = [v for v in values if not (math.isfinite(v) and v > 0)]
        if bad:
            raise NonPositiveSpread(f"lobe spreads must be positive and finite, got {bad}")
        object.__setattr__(self, "spreads_deg", values)

    def __len__(self) -> int:
        return len(self.spreads_deg)
