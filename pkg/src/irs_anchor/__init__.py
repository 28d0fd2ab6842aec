"""Anchor-assisted channel estimation for IRS-aided multiuser uplinks.

Phase I uses two anchor nodes near the IRS to learn the BS-IRS channel up to a
per-column sign; Phase II then estimates every user's cascaded BS-IRS-user
channel with far fewer pilots than per-user training.
"""
from .baseline import BenchmarkEstimate, run_benchmark
from .errors import ConditioningError, ConfigError, DegenerateChannelError, EstimationError
from .harness import (ExperimentConfig, TrialResult, normalized_mse, run_sweep, run_trial,
                      training_overhead)
from .model import (ChannelRealization, NoiseModel, PathLossModel, SystemGeometry, cascade,
                    db_to_linear, draw_channels, draw_rayleigh_channel, los_channel,
                    path_loss_gain, synthesize_rx)
from .phase1 import (Phase1Estimate, build_W, hadamard_recover, los_recover_Hbs,
                     ls_estimate_a2, ls_estimate_anchor, principal_sqrt, run_phase1)
from .phase2 import (EstimateSet, estimate_case1, estimate_case2, estimate_direct,
                     recover_cascaded, remove_direct, run_phase2)
from .pilots import (GroupingPlan, PilotPlan, build_B, dft_reflection_matrix, make_grouping,
                     plan_benchmark, plan_phase1, plan_phase2, theta_grid)

__version__ = "0.1.0"
