"""Bundled reference data: the NYU WIRELESS InH point-data table (6.75 and
16.95 GHz, 20 links each), its metadata sidecar and a placeholder site map."""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .core import Dataset
from .sitemap import SiteMap
from .tableio import load_dataset

FIXTURE_ENV = "POINTDATA_FIXTURE"

_DATA = resources.files("pointdata") / "data"


def fixture_path() -> Path:
    """Path of the reference table, overridable through ``$POINTDATA_FIXTURE``."""
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(str(_DATA / "inh_nyu_table1.csv"))


def sitemap_path() -> Path:
    return Path(str(_DATA / "inh_nyu_sitemap.json"))


def load_inh_table() -> Dataset:
    return load_dataset(fixture_path())


def load_inh_sitemap() -> SiteMap:
    return SiteMap.from_json(sitemap_path().read_text(encoding="utf-8"))
