"""Derived statistics over point-data columns and raw channel measurements.

Covers the close-in (CI) path-loss fit with a 1 m free-space anchor, RMS
delay spread of a thresholded PDP, the 3GPP circular angular spread, the
log-domain mean over spatial lobes, empirical CDFs and per-group summaries.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import (
    NUMERIC_COLUMNS,
    Dataset,
    LinkState,
    LobeSpreadSet,
    PointRecord,
    ThresholdPolicy,
    fspl_db,
)

XPD_PARAMETER = "xpd_db"
PARAMETERS = NUMERIC_COLUMNS + (XPD_PARAMETER,)


class NonPositiveFrequency(ValueError):
    pass


class TooFewPoints(ValueError):
    pass


class DistanceBelowReference(ValueError):
    pass


class AllTapsBelowThreshold(ValueError):
    pass


class DegenerateSpectrum(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class UnknownParameter(KeyError):
    def __str__(self) -> str:
        return f"unknown parameter {self.args[0]!r}; expected one of {', '.join(PARAMETERS)}"


def fspl_1m(frequency_ghz: float) -> float:
    """Free-space path loss at the 1 m close-in reference distance, in dB."""
    if not frequency_ghz > 0:
        raise NonPositiveFrequency(f"frequency must be positive, got {frequency_ghz!r}")
    return fspl_db(frequency_ghz, 1.0)


# ---------------------------------------------------------------------------
# CI path-loss model


@dataclass(frozen=True)
class CiFitResult:
    ple: float
    sigma_sf_db: float
    n_points: int
    fspl_1m_db: float

    def predict(self, distance_m):
        """Path loss in dB predicted by the fitted CI model."""
        return self.fspl_1m_db + 10.0 * self.ple * np.log10(distance_m)


def fit_ci_ple(points: Iterable[tuple[float, float]], frequency_ghz: float) -> CiFitResult:
    """Least-squares path-loss exponent with the intercept pinned at FSPL(1 m).

    Parameters
    ----------
    points : iterable of (distance_m, path_loss_db)
    frequency_ghz : float
        Carrier frequency used for the free-space anchor.

    Returns
    -------
    CiFitResult
        ``sigma_sf_db`` is the population (1/N) standard deviation of the
        dB residuals about the fitted line. The residual mean is not forced
        to zero by the pinned intercept, and it is removed before taking the
        deviation.
    """
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise TooFewPoints(f"CI fit needs at least 2 points, got {len(pts)}")
    d, pl = pts[:, 0], pts[:, 1]
    if np.any(d < 1.0):
        raise DistanceBelowReference(f"distances must be >= 1 m, got min {d.min():g} m")
    anchor = fspl_1m(frequency_ghz)
    a = pl - anchor
    b = 10.0 * np.log10(d)
    bb = np.dot(b, b)
    if bb == 0.0:
        raise DistanceBelowReference("all distances sit at the 1 m reference; slope undefined")
    ple = float(np.dot(a, b) / bb)
    resid = a - ple * b
    return CiFitResult(ple=ple, sigma_sf_db=float(np.std(resid)),
                       n_points=len(pts), fspl_1m_db=anchor)


def fit_dataset_ple(dataset: Dataset, frequency_ghz: float,
                    link_state: Optional[LinkState] = None,
                    column: str = "omni_pl_vv_db") -> CiFitResult:
    """CI fit over the records of one frequency (and optional link state)."""
    points = [(r.tr_separation_m, r.value(column))
              for r in dataset.select(frequency_ghz, link_state)
              if r.value(column) is not None]
    return fit_ci_ple(points, frequency_ghz)


# ---------------------------------------------------------------------------
# Delay and angular spreads


@dataclass(frozen=True)
class PowerDelayProfile:
    """Tap delays (ns) and linear powers (mW), optionally with a noise floor."""

    delays_ns: tuple[float, ...]
    powers_mw: tuple[float, ...]
    noise_floor_mw: Optional[float] = None

    def __post_init__(self):
        delays = tuple(float(t) for t in self.delays_ns)
        powers = tuple(float(p) for p in self.powers_mw)
        if not delays or len(delays) != len(powers):
            raise ValueError("need one power per delay and at least one tap")
        if delays[0] < 0 or any(b <= a for a, b in zip(delays, delays[1:])):
            raise ValueError("delays must be non-negative and strictly increasing")
        if any(not (math.isfinite(p) and p > 0) for p in powers):
            raise ValueError("tap powers must be positive")
        if self.noise_floor_mw is not None and not self.noise_floor_mw > 0:
            raise ValueError("noise floor must be positive when given")
        object.__setattr__(self, "delays_ns", delays)
        object.__setattr__(self, "powers_mw", powers)

    @classmethod
    def from_taps(cls, taps: Iterable[tuple[float, float]],
                  noise_floor_mw: Optional[float] = None) -> "PowerDelayProfile":
        taps = list(taps)
        return cls(tuple(t for t, _ in taps), tuple(p for _, p in taps), noise_floor_mw)

    def threshold_db(self, policy: ThresholdPolicy) -> float:
        """Power level (dBm) below which taps are discarded."""
        level = 10.0 * math.log10(max(self.powers_mw)) - policy.rel_below_peak_db
        if self.noise_floor_mw is not None:
            level = max(level, 10.0 * math.log10(self.noise_floor_mw) + policy.abs_above_noise_db)
        return level


def rms_delay_spread(pdp: PowerDelayProfile, policy: Optional[ThresholdPolicy] = None) -> float:
    """RMS delay spread in ns over the taps that survive ``policy``.

    Taps whose power in dB is at or above the threshold are kept.
    """
    policy = policy or ThresholdPolicy()
    delays = np.asarray(pdp.delays_ns)
    powers = np.asarray(pdp.powers_mw)
    keep = 10.0 * np.log10(powers) >= pdp.threshold_db(policy)
    if not keep.any():
        raise AllTapsBelowThreshold(
            f"no tap reaches the {pdp.threshold_db(policy):.2f} dB threshold ({policy})")
    tau, p = delays[keep], powers[keep]
    mean_delay = np.dot(p, tau) / p.sum()
    return float(np.sqrt(np.dot(p, (tau - mean_delay) ** 2) / p.sum()))


@dataclass(frozen=True)
class AngularPowerSample:
    angles_deg: tuple[float, ...]
    powers_mw: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles_deg)
        powers = tuple(float(p) for p in self.powers_mw)
        if not angles or len(angles) != len(powers):
            raise ValueError("need one power per angle and at least one sample")
        if any(not (math.isfinite(p) and p > 0) for p in powers):
            raise ValueError("sample powers must be positive")
        object.__setattr__(self, "angles_deg", angles)
        object.__setattr__(self, "powers_mw", powers)

    @classmethod
    def from_samples(cls, samples: Iterable[tuple[float, float]]) -> "AngularPowerSample":
        samples = list(samples)
        return cls(tuple(a for a, _ in samples), tuple(p for _, p in samples))


def angular_spread_3gpp(pas: AngularPowerSample) -> float:
    """Circular angular spread sqrt(-2 ln r) in degrees (3GPP TR 38.901 Annex A).

    ``r`` is the magnitude of the power-weighted mean unit phasor. Raises
    :class:`DegenerateSpectrum` when the phasors cancel (r < 1e-12).
    """
    theta = np.deg2rad(np.asarray(pas.angles_deg))
    p = np.asarray(pas.powers_mw)
    r = abs(np.dot(p, np.exp(1j * theta))) / p.sum()
    if r < 1e-12:
        raise DegenerateSpectrum(f"resultant length {r:.3g} is zero; spread is unbounded")
    return float(np.rad2deg(np.sqrt(-2.0 * np.log(min(r, 1.0)))))


def mean_lobe_spread(lobes: Union[LobeSpreadSet, Sequence[float]]) -> float:
    """Log-domain mean 10**(mean(log10(spread_l))) of per-lobe spreads.

    Serves the ASA, ASD, ZSA and ZSD variants alike.
    """
    if not isinstance(lobes, LobeSpreadSet):
        lobes = LobeSpreadSet(tuple(lobes))
    return float(10.0 ** np.mean(np.log10(lobes.spreads_deg)))


def cross_pol_discrimination(record: PointRecord) -> Optional[float]:
    """V-H minus V-V omni path loss in dB, or None if either is missing."""
    if record.omni_pl_vh_db is None or record.omni_pl_vv_db is None:
        return None
    return record.omni_pl_vh_db - record.omni_pl_vv_db


# ---------------------------------------------------------------------------
# CDFs and summaries


def empirical_cdf(values: Iterable[float]) -> list[tuple[float, float]]:
    """Empirical CDF with plotting position i/N.

    Tied values collapse to one point carrying the highest probability.

    >>> empirical_cdf([3, 1, 2])[0]
    (1.0, 0.3333333333333333)
    """
    x = np.sort(np.asarray(list(values), dtype=float))
    if x.size == 0:
        raise EmptyInput("empirical CDF needs at least one value")
    if not np.all(np.isfinite(x)):
        raise ValueError("empirical CDF values must be finite")
    n = x.size
    last = np.append(x[1:] != x[:-1], True)
    return [(float(v), (i + 1) / n) for i, v in enumerate(x) if last[i]]


def cdf_to_text(cdf: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["value", "probability"])
    for v, p in cdf:
        w.writerow([repr(v), repr(p)])
    return buf.getvalue()


@dataclass(frozen=True)
class GroupSummary:
    """Six summary statistics of one parameter within one group.

    ``frequency_ghz`` / ``link_state`` are None when not grouped on. Log
    statistics use log10 of the native column unit, over strictly positive
    values only; ``n_nonpositive`` counts the values they skip. A log10(s)
    mean for a ns column is ``log10(log_mean) - 9``.
    """

    parameter: str
    frequency_ghz: Optional[float]
    link_state: Optional[LinkState]
    count: int
    n_missing: int
    arithmetic_mean: float
    median: float
    std: float
    log_mean: float
    log_std: float
    minimum: float
    maximum: float
    n_nonpositive: int = 0

    def as_dict(self) -> dict:
        d = asdict(self)
        d["link_state"] = self.link_state.value if self.link_state else None
        return d


def parameter_value(record: PointRecord, parameter: str) -> Optional[float]:
    if parameter == XPD_PARAMETER:
        return cross_pol_discrimination(record)
    if parameter not in NUMERIC_COLUMNS:
        raise UnknownParameter(parameter)
    return record.value(parameter)


def summarize(values: Sequence[float], parameter: str = "",
              frequency_ghz: Optional[float] = None,
              link_state: Optional[LinkState] = None, n_missing: int = 0) -> GroupSummary:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise EmptyInput("cannot summarize an empty group")
    pos = x[x > 0]
    if pos.size:
        logs = np.log10(pos)
        log_mean, log_std = float(10.0 ** logs.mean()), float(logs.std())
    else:
        log_mean = log_std = math.nan
    return GroupSummary(
        parameter=parameter, frequency_ghz=frequency_ghz, link_state=link_state,
        count=int(x.size), n_missing=n_missing,
        arithmetic_mean=float(x.mean()), median=float(np.median(x)), std=float(x.std()),
        log_mean=log_mean, log_std=log_std,
        minimum=float(x.min()), maximum=float(x.max()),
        n_nonpositive=int(x.size - pos.size),
    )


_LINK_ORDER = {s: i for i, s in enumerate(LinkState)}


def group_summary(dataset: Union[Dataset, Iterable[PointRecord]], parameter: str,
                  groupby: Sequence[str] = ("freq", "loc")) -> list[GroupSummary]:
    """One :class:`GroupSummary` per non-empty group.

    ``groupby`` is any subset of ``("freq", "loc")``; an empty tuple pools all
    records. Groups come back sorted by frequency, then LOS/NLOS/OUTAGE.
    Groups whose records are all missing the parameter are dropped.
    """
    if parameter not in PARAMETERS:
        raise UnknownParameter(parameter)
    unknown = set(groupby) - {"freq", "loc"}
    if unknown:
        raise ValueError(f"cannot group by {sorted(unknown)}; use freq and/or loc")
    groups: dict[tuple, list] = {}
    missing: dict[tuple, int] = {}
    for rec in dataset:
        key = (rec.frequency_ghz if "freq" in groupby else None,
               rec.link_state if "loc" in groupby else None)
        value = parameter_value(rec, parameter)
        groups.setdefault(key, [])
        missing.setdefault(key, 0)
        if value is None:
            missing[key] += 1
        else:
            groups[key].append(value)

    def order(key):
        f, s = key
        return (f if f is not None else -1.0, _LINK_ORDER[s] if s is not None else -1)

    return [summarize(groups[k], parameter, k[0], k[1], missing[k])
            for k in sorted(groups, key=order) if groups[k]]


SUMMARY_FIELDS = ("parameter", "frequency_ghz", "link_state", "count", "n_missing",
                  "arithmetic_mean", "median", "std", "log_mean", "log_std",
                  "minimum", "maximum", "n_nonpositive")


def summaries_to_text(summaries: Sequence[GroupSummary]) -> str:
    """Delimited text, one row per group."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for s in summaries:
        d = s.as_dict()
        w.writerow(["" if d[k] is None else (repr(d[k]) if isinstance(d[k], float) else d[k])
                    for k in SUMMARY_FIELDS])
    return buf.getvalue()
