"""Simultaneous change-point screening for high-dimensional panels.

Coordinate-wise self-normalized CUSUM statistics, change-robust scale
estimation, simultaneous critical values (closed form, Monte Carlo, or
block multiplier bootstrap), and a scikit-learn style detector that
partitions coordinates into stable and unstable sets with estimated
change times.
"""

__version__ = "0.1.0"

from .bootstrap import (
    BootstrapDraws,
    CenteredBlocks,
    FilteredBlocks,
    block_bounds,
    block_partials,
    boot_stat_1,
    boot_stat_2,
    boot_stat_3,
    bootstrap_quantile,
    build_centered_blocks,
    build_filtered_blocks,
    run_bootstrap,
)
from .cusum import (
    ChangeTimeEstimate,
    CusumProfile,
    cusum_profile,
    cusum_stat,
    estimate_change_time,
    estimate_change_times,
    panel_max_stat,
)
from .detector import (
    DetectionReport,
    UniformChangeDetector,
    detection_bandwidth,
    panel_scales,
)
from .errors import (
    ConfigError,
    CusumHdError,
    DegenerateFiltering,
    DegenerateVariance,
    IngestError,
    InsufficientReplicates,
    InvalidBandwidth,
    InvalidLag,
    InvalidLayout,
    InvalidLevel,
    InvalidPlan,
    InvalidTrim,
    SplitTooShort,
    TooShort,
    UnstableModel,
)
from .lrv import (
    LrvConfig,
    LrvEstimate,
    SplitEstimates,
    autocovariance,
    combine_split,
    default_bandwidth,
    plain_lrv,
    plain_lrv_raw,
    split_lrv,
)
from .panel import BlockLayout, Panel, as_panel, load_csv, partition_blocks
from .quantiles import (
    Threshold,
    asymptotic_threshold,
    conservative_level,
    gumbel_quantile,
    limit_quantile,
    parametric_quantile,
    parametric_quantiles,
    per_coordinate_level,
)
from .simulate import (
    ChangePlan,
    EvalMetrics,
    arma_panel,
    evaluate_detection,
    factor_panel,
    garch_panel,
    inject_changes,
    linear_matrix_panel,
    quintile_plan,
    spatial_ma_panel,
)

__all__ = [name for name in dir() if not name.startswith("_")]
