from src.series.kernel import (
    CertifiedSum,
    certified_log_sum,
    homogeneous_sym,
    homogeneous_table,
    log_series_M,
    log_series_M_batch,
    log_series_ratio,
    series_M,
    series_M_shifted,
    series_tail_bound,
)
from src.series.params import (
    DEFAULT_ACCURACY,
    AlphaVector,
    SeriesAccuracy,
    SeriesParams,
    check_convergence,
)

__all__ = [
    "AlphaVector",
    "CertifiedSum",
    "DEFAULT_ACCURACY",
    "SeriesAccuracy",
    "SeriesParams",
    "certified_log_sum",
    "check_convergence",
    "homogeneous_sym",
    "homogeneous_table",
    "log_series_M",
    "log_series_M_batch",
    "log_series_ratio",
    "series_M",
    "series_M_shifted",
    "series_tail_bound",
]
