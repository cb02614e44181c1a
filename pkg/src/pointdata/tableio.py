"""Reading and writing point-data tables and their metadata sidecars.

The table is comma-delimited UTF-8 text with the canonical header of
:data:`pointdata.core.CANONICAL_HEADER` (any order, any case). Empty
``freq_ghz``/``tx`` cells inherit the value above, mirroring merged cells in
typeset tables. Missing measurements are written as ``--``.

The metadata sidecar is a JSON object; see :func:`parse_metadata`.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import IO, Optional, Union

from .core import (
    CANONICAL_HEADER,
    COLUMN_TO_ATTR,
    MEASUREMENT_COLUMNS,
    CampaignMetadata,
    Dataset,
    LinkState,
    PointRecord,
    ThresholdPolicy,
    validate_record,
)

MISSING = "--"
CONTRIBUTOR_COLUMN = "contributor"
CARRY_DOWN = ("freq_ghz", "tx")

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class TableError(ValueError):
    """Malformed point-data table; ``row`` is the 1-based file line."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"line {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class EmptyTable(TableError):
    pass


class UnknownColumn(TableError):
    pass


class MissingRequiredColumn(TableError):
    pass


class NonNumericValue(TableError):
    pass


class MissingValue(TableError):
    pass


class DuplicateKey(TableError):
    pass


class InvalidRecord(TableError):
    pass


class MetadataError(ValueError):
    pass


class MissingField(MetadataError):
    pass


class InvalidValue(MetadataError):
    pass


def _as_text(source: Union[str, IO[str]]) -> str:
    text = source if isinstance(source, str) else source.read()
    return text.lstrip("\ufeff")


def parse_number(text: str, row: int, column: str) -> float:
    """Strict decimal parse: period separator, no locale commas, no nan/inf."""
    s = text.strip()
    if not _NUMBER.fullmatch(s):
        raise NonNumericValue(f"not a number: {text!r}", row, column)
    return float(s)


def parse_point_table(source: Union[str, IO[str]], metadata: CampaignMetadata,
                      source_id: Optional[str] = None, strict: bool = True) -> Dataset:
    """Parse a point-data table into a :class:`Dataset`.

    With ``strict`` (the default) any record violating the point-data
    invariants raises :class:`InvalidRecord`; with ``strict=False`` such
    records are kept and can be listed via :meth:`Dataset.violations`.
    Structural problems (columns, numbers, duplicate keys) always raise.
    """
    rows = [(n, row) for n, row in enumerate(csv.reader(io.StringIO(_as_text(source))), start=1)
            if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyTable("table is empty")
    header_line, header = rows[0]
    names = [h.strip().lower() for h in header]
    allowed = set(CANONICAL_HEADER) | {CONTRIBUTOR_COLUMN}
    for name in names:
        if name not in allowed:
            raise UnknownColumn("unknown column", header_line, name)
    seen = set()
    for name in names:
        if name in seen:
            raise TableError("repeated column", header_line, name)
        seen.add(name)
    for name in CANONICAL_HEADER:
        if name not in seen:
            raise MissingRequiredColumn("required column absent", header_line, name)
    if len(rows) == 1:
        raise EmptyTable("table has a header but no data rows")

    records = []
    keys: dict[tuple, int] = {}
    carried: dict[str, Optional[str]] = {c: None for c in CARRY_DOWN}
    for line, row in rows[1:]:
        if len(row) != len(names):
            raise TableError(f"expected {len(names)} cells, found {len(row)}", line)
        cells = {name: cell.strip() for name, cell in zip(names, row)}
        for name in CARRY_DOWN:
            if cells[name]:
                carried[name] = cells[name]
            elif carried[name] is None:
                raise MissingValue("empty cell with no value above to inherit", line, name)
            else:
                cells[name] = carried[name]
        for name in ("rx", "loc", "tr_sep_m"):
            if not cells[name] or cells[name] == MISSING:
                raise MissingValue("required value is empty", line, name)
        try:
            link_state = LinkState.parse(cells["loc"])
        except ValueError as exc:
            raise TableError(str(exc), line, "loc") from None
        values = {
            "frequency_ghz": parse_number(cells["freq_ghz"], line, "freq_ghz"),
            "tx_id": cells["tx"],
            "rx_id": cells["rx"],
            "link_state": link_state,
            "tr_separation_m": parse_number(cells["tr_sep_m"], line, "tr_sep_m"),
        }
        for name in MEASUREMENT_COLUMNS:
            cell = cells[name]
            values[COLUMN_TO_ATTR[name]] = (None if cell in ("", MISSING)
                                            else parse_number(cell, line, name))
        contributor = cells.get(CONTRIBUTOR_COLUMN) or None
        if contributor == metadata.contributor:
            contributor = None
        rec = PointRecord(**values, contributor=contributor)

        key = (rec.frequency_ghz, rec.tx_id, rec.rx_id, contributor or metadata.contributor)
        if key in keys:
            raise DuplicateKey(
                f"({key[0]:g} GHz, {key[1]}, {key[2]}) already defined on line {keys[key]}", line)
        keys[key] = line
        if strict:
            problems = validate_record(rec)
            if problems:
                raise InvalidRecord("; ".join(map(str, problems)), line)
        records.append(rec)

    return Dataset(metadata, tuple(records), ((source_id or metadata.contributor, len(records)),))


def format_number(value: Optional[float]) -> str:
    if value is None:
        return MISSING
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value!r}")
    # repr is the shortest string that round-trips, and keeps a decimal point.
    return repr(float(value))


def write_point_table(dataset: Dataset, out: Optional[IO[str]] = None) -> str:
    """Serialize ``dataset`` in canonical column order, one explicit row per record.

    A trailing ``contributor`` column is added only when some record belongs
    to a contributor other than the dataset's own. Returns the text, and also
    writes it to ``out`` when given.
    """
    with_owner = any(rec.contributor for rec in dataset.records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CANONICAL_HEADER + ((CONTRIBUTOR_COLUMN,) if with_owner else ()))
    for rec in dataset.records:
        row = [format_number(rec.frequency_ghz), rec.tx_id, rec.rx_id, rec.link_state.value,
               format_number(rec.tr_separation_m)]
        row += [format_number(rec.value(name)) for name in MEASUREMENT_COLUMNS]
        if with_owner:
            row.append(dataset.contributor_of(rec))
        w.writerow(row)
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


_META_REQUIRED = ("contributor", "environment", "bandwidth_mhz", "tx_hpbw_deg", "rx_hpbw_deg")
_META_NUMERIC = ("bandwidth_mhz", "tx_hpbw_deg", "rx_hpbw_deg", "tx_gain_dbi", "rx_gain_dbi",
                 "threshold_rel_db", "threshold_abs_db")
_META_TEXT = ("contributor", "environment", "map_ref", "date_range", "notes")
META_KEYS = _META_TEXT + _META_NUMERIC


def parse_metadata(source: Union[str, IO[str]]) -> CampaignMetadata:
    """Parse a JSON metadata sidecar.

    Required keys: contributor, environment, bandwidth_mhz, tx_hpbw_deg,
    rx_hpbw_deg. Optional: tx_gain_dbi, rx_gain_dbi, threshold_rel_db
    (default 25), threshold_abs_db (default 5), map_ref, date_range, notes.
    """
    try:
        doc = json.loads(_as_text(source))
    except json.JSONDecodeError as exc:
        raise InvalidValue(f"metadata is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidValue("metadata must be a JSON object")
    unknown = sorted(set(doc) - set(META_KEYS))
    if unknown:
        raise InvalidValue(f"unknown metadata keys: {', '.join(unknown)}")
    for key in _META_REQUIRED:
        if doc.get(key) is None:
            raise MissingField(f"metadata field {key!r} is required")
    for key in _META_NUMERIC:
        value = doc.get(key)
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))
                                  or not math.isfinite(value)):
            raise InvalidValue(f"{key} must be a finite number, got {value!r}")
    for key in _META_TEXT:
        value = doc.get(key)
        if value is not None and not isinstance(value, str):
            raise InvalidValue(f"{key} must be a string, got {value!r}")

    defaults = ThresholdPolicy()
    try:
        threshold = ThresholdPolicy(
            float(doc.get("threshold_rel_db", defaults.rel_below_peak_db)),
            float(doc.get("threshold_abs_db", defaults.abs_above_noise_db)),
        )
        return CampaignMetadata(
            contributor=doc["contributor"],
            environment=doc["environment"],
            bandwidth_mhz=float(doc["bandwidth_mhz"]),
            tx_hpbw_deg=float(doc["tx_hpbw_deg"]),
            rx_hpbw_deg=float(doc["rx_hpbw_deg"]),
            tx_gain_dbi=_opt_float(doc.get("tx_gain_dbi")),
            rx_gain_dbi=_opt_float(doc.get("rx_gain_dbi")),
            threshold=threshold,
            map_ref=doc.get("map_ref"),
            date_range=doc.get("date_range"),
            notes=doc.get("notes"),
        )
    except ValueError as exc:
        raise InvalidValue(str(exc)) from None


def _opt_float(value) -> Optional[float]:
    return None if value is None else float(value)


def metadata_to_dict(metadata: CampaignMetadata) -> dict:
    doc = {
        "contributor": metadata.contributor,
        "environment": metadata.environment,
        "bandwidth_mhz": metadata.bandwidth_mhz,
        "tx_hpbw_deg": metadata.tx_hpbw_deg,
        "rx_hpbw_deg": metadata.rx_hpbw_deg,
        "tx_gain_dbi": metadata.tx_gain_dbi,
        "rx_gain_dbi": metadata.rx_gain_dbi,
        "threshold_rel_db": metadata.threshold.rel_below_peak_db,
        "threshold_abs_db": metadata.threshold.abs_above_noise_db,
        "map_ref": metadata.map_ref,
        "date_range": metadata.date_range,
        "notes": metadata.notes,
    }
    return {k: v for k, v in doc.items() if v is not None}


def write_metadata(metadata: CampaignMetadata) -> str:
    return json.dumps(metadata_to_dict(metadata), indent=2) + "\n"


def sidecar_path(table_path: Union[str, Path]) -> Path:
    """``data/foo.csv`` -> ``data/foo.meta.json``."""
    p = Path(table_path)
    return p.with_name(p.stem + ".meta.json")


def load_dataset(table_path: Union[str, Path], metadata_path: Union[str, Path, None] = None,
                 strict: bool = True) -> Dataset:
    """Read a table and its sidecar (defaulting to :func:`sidecar_path`)."""
    table_path = Path(table_path)
    meta = parse_metadata(Path(metadata_path or sidecar_path(table_path)).read_text(encoding="utf-8"))
    text = table_path.read_text(encoding="utf-8")
    return parse_point_table(text, meta, source_id=table_path.name, strict=strict)
