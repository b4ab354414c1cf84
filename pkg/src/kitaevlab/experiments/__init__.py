from kitaevlab.experiments.families import (
    exp_diag_shift,
    exp_phase_step,
    exp_toeplitz_hh,
    kitaev_condition_report,
)
from kitaevlab.experiments.hall import (
    GapTooSmall,
    HofstadterConfig,
    RadiusTooLarge,
    exp_hofstadter_chern,
    kitaev_local_marker,
)
from kitaevlab.experiments.report import ExperimentReport, StepProfile

__all__ = [
    "ExperimentReport",
    "GapTooSmall",
    "HofstadterConfig",
    "RadiusTooLarge",
    "StepProfile",
    "exp_diag_shift",
    "exp_hofstadter_chern",
    "exp_phase_step",
    "exp_toeplitz_hh",
    "kitaev_condition_report",
    "kitaev_local_marker",
]
