"""Named TX/RX locations on a site map and separation consistency checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .core import Dataset

DEFAULT_TOLERANCE_M = 0.5

Coordinates = tuple[float, float, Optional[float]]


class UnknownPoint(KeyError):
    def __str__(self) -> str:
        return f"point {self.args[0]!r} is not on the map"


class MissingCoordinates(UnknownPoint):
    def __str__(self) -> str:
        return f"point {self.args[0]!r} has no coordinates"


@dataclass(frozen=True)
class SiteMap:
    """Named points in meters.

    A point mapped to ``None`` is known by name only (e.g. a placeholder map
    for a floor plan whose coordinates were never digitized).
    """

    map_id: str
    environment: Optional[str] = None
    points: Mapping[str, Optional[Coordinates]] = field(default_factory=dict)
    image: Optional[str] = None
    meters_per_pixel: Optional[float] = None

    def __post_init__(self):
        clean = {}
        for name, xyz in self.points.items():
            if xyz is not None:
                x, y, *rest = xyz
                z = rest[0] if rest else None
                coords = (float(x), float(y), None if z is None else float(z))
                if not all(math.isfinite(c) for c in coords if c is not None):
                    raise ValueError(f"point {name!r} has non-finite coordinates {xyz!r}")
                xyz = coords
            clean[str(name)] = xyz
        object.__setattr__(self, "points", clean)

    def coordinates(self, name: str) -> Coordinates:
        if name not in self.points:
            raise UnknownPoint(name)
        xyz = self.points[name]
        if xyz is None:
            raise MissingCoordinates(name)
        return xyz

    def resolve_rx(self, tx_id: str, rx_id: str) -> str:
        """Map name for an RX label; a TX-scoped ``"TX1/RX1"`` entry wins over ``"RX1"``."""
        scoped = f"{tx_id}/{rx_id}"
        return scoped if scoped in self.points else rx_id

    @classmethod
    def from_dict(cls, doc: dict) -> "SiteMap":
        points = {}
        for entry in doc.get("points", []):
            name = entry["name"]
            if name in points:
                raise ValueError(f"duplicate point name {name!r}")
            x, y = entry.get("x_m"), entry.get("y_m")
            points[name] = None if x is None or y is None else (x, y, entry.get("z_m"))
        return cls(map_id=doc["map_id"], environment=doc.get("environment"), points=points,
                   image=doc.get("image"), meters_per_pixel=doc.get("meters_per_pixel"))

    @classmethod
    def from_json(cls, text: str) -> "SiteMap":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        pts = []
        for name, xyz in self.points.items():
            entry = {"name": name, "x_m": None, "y_m": None}
            if xyz is not None:
                entry["x_m"], entry["y_m"] = xyz[0], xyz[1]
                if xyz[2] is not None:
                    entry["z_m"] = xyz[2]
            pts.append(entry)
        return {"map_id": self.map_id, "environment": self.environment, "image": self.image,
                "meters_per_pixel": self.meters_per_pixel, "points": pts}


def point_distance(site: SiteMap, a: str, b: str) -> float:
    """Straight-line distance in meters; planar if either point lacks a height."""
    xa, ya, za = site.coordinates(a)
    xb, yb, zb = site.coordinates(b)
    if za is None or zb is None:
        return math.hypot(xb - xa, yb - ya)
    return math.hypot(xb - xa, yb - ya, zb - za)


@dataclass(frozen=True)
class Mismatch:
    index: int
    frequency_ghz: float
    tx_id: str
    rx_id: str
    reported_m: float
    map_m: float

    @property
    def error_m(self) -> float:
        return abs(self.map_m - self.reported_m)


@dataclass(frozen=True)
class Unresolved:
    index: int
    frequency_ghz: float
    tx_id: str
    rx_id: str
    missing: tuple[str, ...]


@dataclass(frozen=True)
class SeparationCheck:
    mismatches: tuple[Mismatch, ...]
    unresolved: tuple[Unresolved, ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def missing_points(self) -> list[str]:
        return sorted({name for u in self.unresolved for name in u.missing})


def check_separations(dataset: Dataset | Iterable, site: SiteMap,
                      tolerance_m: float = DEFAULT_TOLERANCE_M) -> SeparationCheck:
    """Compare each record's reported TR separation with the map distance.

    Records whose TX or RX cannot be located are listed as unresolved and
    are not counted as mismatches.
    """
    mismatches, unresolved = [], []
    checked = 0
    for i, rec in enumerate(dataset):
        rx_name = site.resolve_rx(rec.tx_id, rec.rx_id)
        missing = []
        for name in (rec.tx_id, rx_name):
            try:
                site.coordinates(name)
            except UnknownPoint:
                missing.append(name)
        if missing:
            unresolved.append(Unresolved(i, rec.frequency_ghz, rec.tx_id, rec.rx_id, tuple(missing)))
            continue
        checked += 1
        d = point_distance(site, rec.tx_id, rx_name)
        if abs(d - rec.tr_separation_m) > tolerance_m:
            mismatches.append(Mismatch(i, rec.frequency_ghz, rec.tx_id, rec.rx_id,
                                       rec.tr_separation_m, d))
    return SeparationCheck(tuple(mismatches), tuple(unresolved), checked)
