from src.reliability.aging import (
    AgingKind,
    AgingVerdict,
    Verdict,
    aging_class_check,
)
from src.reliability.report import (
    ReliabilityReport,
    box_grid,
    build_reliability_report,
    hazard_consistency,
)
from src.reliability.survival import (
    hazard_component,
    hazard_vector,
    joint_survival,
    log_joint_survival,
    mmrl_component,
    mmrl_vector,
    residual_survival,
    total_residual_survival,
)

__all__ = [
    "AgingKind",
    "AgingVerdict",
    "ReliabilityReport",
    "Verdict",
    "aging_class_check",
    "box_grid",
    "build_reliability_report",
    "hazard_component",
    "hazard_consistency",
    "hazard_vector",
    "joint_survival",
    "log_joint_survival",
    "mmrl_component",
    "mmrl_vector",
    "residual_survival",
    "total_residual_survival",
]
