from src.distribution.moments import (
    expected_inverse_total,
    expected_log_total,
    factorial_moment,
    factorial_moment_closed,
    marginal_mean,
    marginal_means,
    mgf,
    pgf,
    raw_moment,
    stirling_first,
    variance,
)
from src.distribution.params import CountVector, UGATParams
from src.distribution.pmf import (
    conditional_expectation,
    conditional_pmf,
    joint_cdf_exact,
    joint_cdf_product,
    joint_pmf,
    log_joint_pmf,
    log_marginal_ccdf,
    log_marginal_pmf,
    marginal_ccdf,
    marginal_cdf,
    marginal_pmf,
    totals_pmf,
)
from src.distribution.sampling import sample

__all__ = [
    "CountVector",
    "UGATParams",
    "conditional_expectation",
    "conditional_pmf",
    "expected_inverse_total",
    "expected_log_total",
    "factorial_moment",
    "factorial_moment_closed",
    "joint_cdf_exact",
    "joint_cdf_product",
    "joint_pmf",
    "log_joint_pmf",
    "log_marginal_ccdf",
    "log_marginal_pmf",
    "marginal_ccdf",
    "marginal_cdf",
    "marginal_mean",
    "marginal_means",
    "marginal_pmf",
    "mgf",
    "pgf",
    "raw_moment",
    "sample",
    "stirling_first",
    "totals_pmf",
    "variance",
]
