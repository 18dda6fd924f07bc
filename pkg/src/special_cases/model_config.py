"""Model configuration module"""

from enum import Enum


class ModelName(Enum):
    """Models accepted by --model"""

    LERCH = "lerch"
    HURWITZ_LERCH_ZETA = "hlz"
    GOOD = "good"
    HURWITZ_ZETA = "hzeta"
    ZIPF_MANDELBROT = "zipf"
    DISCRETE_PARETO = "dpareto"
    GEOMETRIC = "geom"
    UGAT = "ugat"


class Support(Enum):
    """Support of a one-dimensional model"""

    N0 = "N0"
    N = "N"


# Parameter names of each named sub-model, in constructor order
MODEL_PARAMETERS = {
    ModelName.LERCH: ("p", "a", "c"),
    ModelName.HURWITZ_LERCH_ZETA: ("theta", "a", "s"),
    ModelName.GOOD: ("theta", "s"),
    ModelName.HURWITZ_ZETA: ("b", "sigma"),
    ModelName.ZIPF_MANDELBROT: ("a", "c"),
    ModelName.DISCRETE_PARETO: ("c",),
    ModelName.GEOMETRIC: ("p",),
    ModelName.UGAT: ("alpha", "beta", "s"),
}
