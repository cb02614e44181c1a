"""Point-data tables of large-scale radio channel statistics.

Parse and validate per-link tables, pool contributions from several
measurement campaigns, and compute path-loss fits, spread statistics and
CDFs over them.
"""

from .core import (
    CANONICAL_HEADER,
    CampaignMetadata,
    Dataset,
    LinkState,
    LobeSpreadSet,
    PointRecord,
    ThresholdPolicy,
    Violation,
    validate_record,
)
from .fixtures import fixture_path, load_inh_sitemap, load_inh_table
from .pooling import BaselineSpec, CompatibilityReport, check_compatibility, merge
from .sitemap import SiteMap, check_separations, point_distance
from .stats import (
    AngularPowerSample,
    CiFitResult,
    GroupSummary,
    PowerDelayProfile,
    angular_spread_3gpp,
    cross_pol_discrimination,
    empirical_cdf,
    fit_ci_ple,
    fit_dataset_ple,
    fspl_1m,
    group_summary,
    mean_lobe_spread,
    rms_delay_spread,
)
from .tableio import load_dataset, parse_metadata, parse_point_table, write_point_table

__version__ = "0.1.0"
