from src.fit.information import (
    Covariance,
    InformationMatrix,
    confidence_intervals,
    covariance_from_information,
    information_criteria,
    observed_information,
)
from src.fit.likelihood import Objective, ParameterLayout, neg_log_likelihood, score
from src.fit.mle import DEFAULT_S_GRID, FitConfig, FitResult, fit_mle

__all__ = [
    "Covariance",
    "DEFAULT_S_GRID",
    "FitConfig",
    "FitResult",
    "InformationMatrix",
    "Objective",
    "ParameterLayout",
    "confidence_intervals",
    "covariance_from_information",
    "fit_mle",
    "information_criteria",
    "neg_log_likelihood",
    "observed_information",
    "score",
]
