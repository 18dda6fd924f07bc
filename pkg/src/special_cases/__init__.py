from src.special_cases.model_config import MODEL_PARAMETERS, ModelName, Support
from src.special_cases.models import (
    ShiftedDistribution,
    display_pmf,
    make_discrete_pareto,
    make_geometric,
    make_good,
    make_hurwitz_lerch_zeta,
    make_hurwitz_zeta,
    make_lerch,
    make_model,
    make_zipf_mandelbrot,
)

__all__ = [
    "MODEL_PARAMETERS",
    "ModelName",
    "ShiftedDistribution",
    "Support",
    "display_pmf",
    "make_discrete_pareto",
    "make_geometric",
    "make_good",
    "make_hurwitz_lerch_zeta",
    "make_hurwitz_zeta",
    "make_lerch",
    "make_model",
    "make_zipf_mandelbrot",
]
