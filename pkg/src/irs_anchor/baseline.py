"""Conventional per-user training: every user sends N+1 DFT-patterned pilots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ChannelRealization, NoiseModel, synthesize_rx
from .phase1 import ls_estimate_anchor, training_matrix
from .pilots import PilotPlan, plan_benchmark


@dataclass
class BenchmarkEstimate:
    h_bu_hat: np.ndarray
    H_bsu_hat: np.ndarray
    slots_used: int
    scheme_tag: str = "benchmark"


def run_benchmark(channels: ChannelRealization, p, noise: NoiseModel | None,
                  plan: PilotPlan | None = None):
    """LS estimate of each user's direct and cascaded channels, user by user."""
    K, M, N = channels.K, channels.M, channels.N
    plan = plan or plan_benchmark(N, K)
    h_bu_hat = np.zeros((K, M), dtype=complex)
    H_bsu_hat = np.zeros((K, M, N), dtype=complex)
    for k in range(K):
        user_slots = [s for s in plan.slots if k in s.tx]
        sub = PilotPlan(user_slots, plan.phase_tag)
        Y = np.stack([synthesize_rx(channels, s.reflection, s.tx, p, noise) for s in user_slots],
                     axis=1)
        h_bu_hat[k], H_bsu_hat[k] = ls_estimate_anchor(Y, training_matrix(sub), p)
    return BenchmarkEstimate(h_bu_hat=h_bu_hat, H_bsu_hat=H_bsu_hat, slots_used=len(plan))
