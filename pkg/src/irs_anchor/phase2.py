"""On-line user training given the off-line W surrogate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError
from .model import ChannelRealization, NoiseModel, synthesize_rx
from .phase1 import LOS, Phase1Estimate
from .pilots import MAX_CONDITION, PHASE2_CASCADED, PHASE2_DIRECT, PilotPlan, build_B

CASE1 = "proposed-case1"
CASE2 = "proposed-case2"
PROPOSED_LOS = "proposed-los"


def ls_solve(A, y, max_cond=MAX_CONDITION):
    """Least-squares solution of ``A x = y`` through the thin SVD.

    Raises ConditioningError when cond(A) exceeds ``max_cond`` or A is
    rank deficient.
    """
    if A.shape[0] < A.shape[1]:
        raise ConditioningError(np.inf, max_cond, "system is underdetermined")
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    cond = s[0] / s[-1] if s[-1] > 0 else np.inf
    if not cond <= max_cond:
        raise ConditioningError(cond, max_cond)
    return Vh.conj().T @ ((U.conj().T @ y) / (s if np.ndim(y) == 1 else s[:, None]))


def estimate_direct(y, p):
    if p <= 0:
        raise ValueError("pilot power must be positive")
    return np.asarray(y) / np.sqrt(p)


def remove_direct(y, tx, h_bu_hat, p):
    """Subtract the estimated direct-path contribution of the active users."""
    y_bar = np.array(y, dtype=complex)
    for k, x in tx.items():
        y_bar -= np.sqrt(p) * h_bu_hat[k] * x
    return y_bar


def estimate_case1(W, y_bar, p):
    """IRS-user channel of one user from a single slot with all elements at 1."""
    return ls_solve(np.asarray(W), np.asarray(y_bar)) / np.sqrt(p)


def estimate_case2(W, y_bar_stack, B, p):
    """Joint IRS-user channels of a user group; returns (group size, N)."""
    N = np.shape(W)[1]
    h = ls_solve(np.asarray(B), np.asarray(y_bar_stack).ravel()) / np.sqrt(p)
    return h.reshape(-1, N)


def recover_cascaded(W, h_su_hat):
    """``W @ diag(h)``; for stacked (K, N) input returns (K, M, N)."""
    h = np.asarray(h_su_hat)
    if h.ndim == 1:
        return np.asarray(W) * h[np.newaxis, :]
    return np.asarray(W)[np.newaxis] * h[:, np.newaxis, :]


@dataclass
class EstimateSet:
    h_bu_hat: np.ndarray
    h_su_hat: np.ndarray
    H_bsu_hat: np.ndarray
    scheme_tag: str
    slots_used: int


def run_phase2(channels: ChannelRealization, phase1_estimate: Phase1Estimate,
               plan: PilotPlan, p_online, noise: NoiseModel | None, genie_direct=False):
    """Direct step, direct-path removal and per-group cascaded estimation.

    ``genie_direct`` substitutes the true direct channels for the removal step
    (the direct estimates are still produced and reported).
    """
    W = phase1_estimate.W
    M, N = W.shape
    K = channels.K
    p = p_online

    h_bu_hat = np.zeros((K, M), dtype=complex)
    for slot in plan.slots:
        if slot.tag != PHASE2_DIRECT:
            continue
        (k, x) = next(iter(slot.tx.items()))
        y = synthesize_rx(channels, slot.reflection, slot.tx, p, noise)
        h_bu_hat[k] = estimate_direct(y, p) / x
    removal = channels.h_bu if genie_direct else h_bu_hat

    h_su_hat = np.zeros((K, N), dtype=complex)
    for group in plan.groups:
        slots = plan.slots[group.start:group.start + group.n_slots]
        if any(s.tag != PHASE2_CASCADED for s in slots):
            raise ValueError("group schedule does not point at cascaded slots")
        y_bar = [remove_direct(synthesize_rx(channels, s.reflection, s.tx, p, noise),
                               s.tx, removal, p) for s in slots]
        if M >= N:
            (k,) = group.users
            scale = group.X[0, 0]
            h_su_hat[k] = estimate_case1(W * group.V[0][np.newaxis, :], y_bar[0], p) / scale
        else:
            B = build_B(W, group.V, group.X)
            h_su_hat[list(group.users)] = estimate_case2(W, np.concatenate(y_bar), B, p)

    if phase1_estimate.mode == LOS:
        tag = PROPOSED_LOS
    else:
        tag = CASE1 if M >= N else CASE2
    return EstimateSet(h_bu_hat=h_bu_hat, h_su_hat=h_su_hat,
                       H_bsu_hat=recover_cascaded(W, h_su_hat), scheme_tag=tag,
                       slots_used=len(plan))
