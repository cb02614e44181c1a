"""Command-line front end: ``pointdata {validate,fit,cdf,summary,merge,mapcheck}``.

Exit codes: 0 success, 1 data problems (violations, rejected sources, empty
selections, map mismatches), 2 usage or unreadable/ill-formed input.
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import LinkState, PATH_LOSS_COLUMNS, Dataset, PointRecord
from .fixtures import FIXTURE_ENV, fixture_path
from .pooling import AllSourcesRejected, BaselineSpec, DuplicateKeyAcrossSources, merge
from .sitemap import DEFAULT_TOLERANCE_M, SiteMap, check_separations
from .stats import (
    PARAMETERS,
    TooFewPoints,
    cdf_to_text,
    empirical_cdf,
    fit_ci_ple,
    group_summary,
    parameter_value,
    summaries_to_text,
)
from .tableio import (
    EmptyTable,
    MetadataError,
    TableError,
    load_dataset,
    sidecar_path,
    write_metadata,
    write_point_table,
)

OK, DATA_ERROR, USAGE_ERROR = 0, 1, 2


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class Outcome:
    """Exit code plus a machine-readable document and a human-readable report."""

    def __init__(self, code: int, doc: dict, text: str):
        self.code = code
        self.doc = doc
        self.text = text


def _load(table: Optional[str], meta: Optional[str] = None, strict: bool = True) -> Dataset:
    path = Path(table) if table else fixture_path()
    try:
        return load_dataset(path, meta, strict=strict)
    except EmptyTable as exc:
        raise CommandError(f"{path}: {exc}", DATA_ERROR) from None
    except FileNotFoundError as exc:
        raise CommandError(f"cannot read {exc.filename}", USAGE_ERROR) from None
    except (OSError, TableError, MetadataError, UnicodeDecodeError) as exc:
        raise CommandError(f"{path}: {exc}", USAGE_ERROR) from None


def _filter(ds: Dataset, args) -> list[PointRecord]:
    if getattr(args, "env", None) and args.env.lower() != ds.metadata.environment.lower():
        return []
    loc = LinkState.parse(args.loc) if getattr(args, "loc", None) else None
    return ds.select(getattr(args, "freq", None), loc)


def _filters_doc(args) -> dict:
    return {k: getattr(args, k, None) for k in ("freq", "loc", "env")}


def _fmt(x: Optional[float], digits: int = 4) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.{digits}f}"


def cmd_validate(args) -> Outcome:
    ds = _load(args.table, args.metadata, strict=False)
    found = ds.violations()
    lines = []
    for i, v in found:
        rec = ds.records[i]
        lines.append(f"record {i + 1} ({rec.frequency_ghz:g} GHz, {rec.tx_id}-{rec.rx_id}): {v}")
    lines.append(f"{len(ds)} records, {len(found)} violations")
    doc = {
        "records": len(ds),
        "violations": [{"record": i + 1, "field": v.field, "rule": v.rule, "message": v.message}
                       for i, v in found],
    }
    return Outcome(DATA_ERROR if found else OK, doc, "\n".join(lines))


def cmd_fit(args) -> Outcome:
    ds = _load(args.table, args.meta)
    records = [r for r in _filter(ds, args) if r.value(args.param) is not None]
    if not records:
        raise CommandError("no matching records", DATA_ERROR)
    try:
        fit = fit_ci_ple([(r.tr_separation_m, r.value(args.param)) for r in records], args.freq)
    except TooFewPoints as exc:
        raise CommandError(str(exc), DATA_ERROR) from None
    doc = {"model": args.model, "parameter": args.param, "filters": _filters_doc(args),
           "ple": fit.ple, "sigma_sf_db": fit.sigma_sf_db, "n_points": fit.n_points,
           "fspl_1m_db": fit.fspl_1m_db}
    text = (f"ple={fit.ple:.4f} sigma_sf_db={fit.sigma_sf_db:.4f} "
            f"n_points={fit.n_points} fspl_1m_db={fit.fspl_1m_db:.4f}")
    return Outcome(OK, doc, text)


def cmd_cdf(args) -> Outcome:
    ds = _load(args.table, args.meta)
    values = [v for v in (parameter_value(r, args.param) for r in _filter(ds, args)) if v is not None]
    if not values:
        raise CommandError("no matching records", DATA_ERROR)
    cdf = empirical_cdf(values)
    n = len(values)
    median = statistics.median(values)
    body = cdf_to_text(cdf)
    if args.out:
        Path(args.out).write_text(body, encoding="utf-8")
    doc = {"parameter": args.param, "filters": _filters_doc(args), "count": n, "median": median,
           "cdf": [[v, p] for v, p in cdf]}
    text = f"count={n} median={median!r}"
    if not args.out:
        text = body + text
    return Outcome(OK, doc, text)


def cmd_summary(args) -> Outcome:
    ds = _load(args.table, args.meta)
    groupby = tuple(g for g in args.groupby.split(",") if g and g != "none")
    bad = set(groupby) - {"freq", "loc"}
    if bad:
        raise CommandError(f"cannot group by {', '.join(sorted(bad))}; use freq,loc", USAGE_ERROR)
    groups = group_summary(_filter(ds, args), args.param, groupby)
    if not groups:
        raise CommandError("no matching records", DATA_ERROR)
    doc = {"parameter": args.param, "groupby": list(groupby), "filters": _filters_doc(args),
           "groups": [g.as_dict() for g in groups]}
    lines = [f"{'freq_ghz':>8} {'loc':>6} {'count':>5} {'missing':>7} {'mean':>9} {'median':>9} "
             f"{'std':>9} {'log_mean':>9} {'log_std':>8}"]
    for g in groups:
        freq = "all" if g.frequency_ghz is None else f"{g.frequency_ghz:g}"
        loc = "all" if g.link_state is None else g.link_state.value
        lines.append(f"{freq:>8} {loc:>6} {g.count:>5} {g.n_missing:>7} {_fmt(g.arithmetic_mean):>9} "
                     f"{_fmt(g.median):>9} {_fmt(g.std):>9} {_fmt(g.log_mean):>9} {_fmt(g.log_std):>8}")
    if args.out:
        Path(args.out).write_text(summaries_to_text(groups), encoding="utf-8")
    return Outcome(OK, doc, "\n".join(lines))


def cmd_merge(args) -> Outcome:
    try:
        baseline = BaselineSpec.from_json(Path(args.baseline).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CommandError(f"baseline {args.baseline}: {exc}", USAGE_ERROR) from None
    datasets = [_load(t) for t in args.tables]
    try:
        pooled, report = merge(datasets, baseline, [Path(t).name for t in args.tables])
    except DuplicateKeyAcrossSources as exc:
        raise CommandError(str(exc), USAGE_ERROR) from None
    except AllSourcesRejected as exc:
        return Outcome(DATA_ERROR, exc.report.to_dict(), exc.report.to_text().rstrip("\n"))
    if args.out:
        out = Path(args.out)
        out.write_text(write_point_table(pooled), encoding="utf-8")
        sidecar_path(out).write_text(write_metadata(pooled.metadata), encoding="utf-8")
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    doc = report.to_dict()
    doc["records"] = len(pooled)
    doc["provenance"] = [list(p) for p in pooled.provenance]
    text = report.to_text() + f"pooled {len(pooled)} records from {len(report.accepted)} source(s)"
    return Outcome(DATA_ERROR if report.rejected else OK, doc, text)


def cmd_mapcheck(args) -> Outcome:
    ds = _load(args.table, args.meta)
    try:
        site = SiteMap.from_json(Path(args.map).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise CommandError(f"cannot read {exc.filename}", USAGE_ERROR) from None
    except (OSError, ValueError, KeyError) as exc:
        raise CommandError(f"site map {args.map}: {exc}", USAGE_ERROR) from None
    result = check_separations(ds, site, args.tolerance)
    lines = [f"record {m.index + 1} ({m.frequency_ghz:g} GHz, {m.tx_id}-{m.rx_id}): "
             f"map {m.map_m:.2f} m vs reported {m.reported_m:g} m (off by {m.error_m:.2f} m)"
             for m in result.mismatches]
    if result.unresolved:
        print(f"warning: {len(result.unresolved)} of {len(ds)} records reference points without "
              f"map coordinates: {', '.join(result.missing_points())}", file=sys.stderr)
    lines.append(f"{result.checked} records checked, {len(result.mismatches)} mismatches, "
                 f"{len(result.unresolved)} unresolvable")
    doc = {
        "map_id": site.map_id, "tolerance_m": args.tolerance, "checked": result.checked,
        "mismatches": [{"record": m.index + 1, "freq_ghz": m.frequency_ghz, "tx": m.tx_id,
                        "rx": m.rx_id, "reported_m": m.reported_m, "map_m": m.map_m,
                        "error_m": m.error_m} for m in result.mismatches],
        "unresolved": [{"record": u.index + 1, "freq_ghz": u.frequency_ghz, "tx": u.tx_id,
                        "rx": u.rx_id, "missing": list(u.missing)} for u in result.unresolved],
    }
    return Outcome(OK if result.ok else DATA_ERROR, doc, "\n".join(lines))


def _add_common(p: argparse.ArgumentParser, table_optional: bool = True) -> None:
    if table_optional:
        p.add_argument("table", nargs="?",
                       help=f"point-data CSV (default: bundled InH table, or ${FIXTURE_ENV})")
        p.add_argument("--meta", help="metadata sidecar (default: <table>.meta.json)")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   help="output style on stdout")


def _add_filters(p: argparse.ArgumentParser, freq_required: bool = False) -> None:
    p.add_argument("--freq", type=float, required=freq_required, help="carrier frequency, GHz")
    p.add_argument("--loc", choices=[s.value for s in LinkState], type=str.upper,
                   help="link state")
    p.add_argument("--env", help="environment (InH, InF, UMi, ...)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pointdata",
        description="Validate, pool and analyse point-data channel statistics tables. "
                    "Filters --freq/--loc/--env combine with AND.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a table against the point-data invariants")
    p.add_argument("table")
    p.add_argument("metadata", nargs="?", help="metadata sidecar (default: <table>.meta.json)")
    _add_common(p, table_optional=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fit", help="close-in path-loss exponent fit (1 m FSPL anchor)")
    _add_common(p)
    _add_filters(p, freq_required=True)
    p.add_argument("--model", choices=("ci",), default="ci")
    p.add_argument("--param", choices=PATH_LOSS_COLUMNS, default="omni_pl_vv_db")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cdf", help="empirical CDF of one column")
    _add_common(p)
    _add_filters(p)
    p.add_argument("--param", required=True, choices=PARAMETERS)
    p.add_argument("--out", help="write value,probability rows here instead of stdout")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("summary", help="per-group summary statistics of one column")
    _add_common(p)
    _add_filters(p)
    p.add_argument("--param", required=True, choices=PARAMETERS)
    p.add_argument("--groupby", default="freq,loc", help="comma list from freq,loc (or 'none')")
    p.add_argument("--out", help="also write the summary rows as CSV")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("merge", help="pool tables that meet a baseline specification")
    p.add_argument("tables", nargs="+", help="tables, each with a <table>.meta.json sidecar")
    p.add_argument("--baseline", required=True, help="baseline JSON document")
    p.add_argument("--out", help="pooled table path (sidecar written alongside)")
    p.add_argument("--report", help="write the compatibility report as JSON")
    _add_common(p, table_optional=False)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("mapcheck", help="compare reported TR separations with a site map")
    p.add_argument("table")
    p.add_argument("map")
    p.add_argument("--meta", help="metadata sidecar (default: <table>.meta.json)")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE_M, help="meters")
    _add_common(p, table_optional=False)
    p.set_defaults(func=cmd_mapcheck)
    return parser


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if args.format == "json":
        print(json.dumps(_json_safe(outcome.doc), indent=2, sort_keys=True))
    else:
        print(outcome.text)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
