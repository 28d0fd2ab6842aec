"""Pilot schedules: reflection patterns and pilot symbols slot by slot."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError
from .model import ANCHOR_1, ANCHOR_2, ANCHOR_LOS

PHASE1_A1 = "PhaseI-A1"
PHASE1_A2 = "PhaseI-A2"
PHASE1_LOS = "PhaseI-A"
PHASE2_DIRECT = "PhaseII-direct"
PHASE2_CASCADED = "PhaseII-cascaded"
BENCHMARK = "Benchmark"

MAX_CONDITION = 1e6


@dataclass(frozen=True)
class PilotSlot:
    reflection: np.ndarray | None  # None: IRS switched off
    tx: dict
    tag: str


@dataclass(frozen=True)
class GroupSchedule:
    """Users sharing a block of slots, with their pilot grid and reflections.

    ``X`` is (slots, group size) and ``V`` is (slots, N): row i holds the
    pilot symbols and the reflection pattern used in slot ``start + i``.
    """

    users: tuple
    start: int
    X: np.ndarray
    V: np.ndarray

    @property
    def n_slots(self):
        return self.X.shape[0]


@dataclass
class PilotPlan:
    slots: list
    phase_tag: str
    groups: list = field(default_factory=list)

    def __len__(self):
        return len(self.slots)

    def tagged(self, tag):
        return [s for s in self.slots if s.tag == tag]


@dataclass(frozen=True)
class GroupingPlan:
    groups: tuple
    L1: int
    M1: int
    N1: int


def dft_reflection_matrix(N):
    """(N+1) x (N+1) DFT training matrix; its inverse is ``V.conj().T / (N+1)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    idx = np.arange(N + 1)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / (N + 1))


def theta_grid(rows, cols, theta):
    """Grid with entry (r, c) = exp(-j r c theta), zero-based indices."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be >= 1")
    if theta == 0:
        raise ValueError("theta must be nonzero")
    return np.exp(-1j * theta * np.outer(np.arange(rows), np.arange(cols)))


def make_grouping(K, M, N):
    """Split K users into ceil(K/M) groups of M, the last holding M1 <= M."""
    if K < 1 or M < 1 or N < 1:
        raise ValueError("K, M and N must be >= 1")
    L1 = -(-K // M)
    M1 = K - (L1 - 1) * M
    N1 = -(-M1 * N // M) if M1 < M else N
    groups = tuple(tuple(range(g * M, min((g + 1) * M, K))) for g in range(L1))
    return GroupingPlan(groups=groups, L1=L1, M1=M1, N1=N1)


def build_B(basis, V, X, max_cond=MAX_CONDITION, check=True):
    """Stacked system matrix of a user group.

    Block (i, k) is ``basis @ diag(V[i]) * X[i, k]``; rows of ``V`` and ``X``
    are slots. The result has shape (M * slots, group_size * N).
    """
    basis = np.asarray(basis)
    V = np.atleast_2d(V)
    X = np.atleast_2d(X)
    M, N = basis.shape
    slots, size = X.shape
    if V.shape != (slots, N):
        raise ValueError(f"V must be ({slots}, {N}), got {V.shape}")
    blocks = basis[None, None] * V[:, None, None, :] * X[:, :, None, None]
    B = blocks.transpose(0, 2, 1, 3).reshape(slots * M, size * N)
    if check:
        cond = np.linalg.cond(B)
        if not cond <= max_cond:
            raise ConditioningError(cond, max_cond, "choose a different theta")
    return B


def _dft_slots(N, sender, tag):
    Vt = dft_reflection_matrix(N)
    # Row 0 of each column multiplies the direct path; rows 1..N drive the IRS.
    return [PilotSlot(Vt[1:, i].copy(), {sender: 1.0}, tag) for i in range(N + 1)]


def plan_phase1(N, mode="two-anchor"):
    """Off-line anchor schedules: (A1, A2) plans, or a 1-tuple in LoS mode."""
    if mode == "two-anchor":
        return (PilotPlan(_dft_slots(N, ANCHOR_1, PHASE1_A1), PHASE1_A1),
                PilotPlan(_dft_slots(N, ANCHOR_2, PHASE1_A2), PHASE1_A2))
    if mode == "los":
        return (PilotPlan(_dft_slots(N, ANCHOR_LOS, PHASE1_LOS), PHASE1_LOS),)
    raise ValueError(f"unknown phase-1 mode {mode!r}")


def plan_phase2(M, N, K, grouping=None, theta=None):
    """On-line schedule: K direct slots, then the cascaded-channel slots.

    For M >= N each user sends one pilot with all elements at unit reflection.
    Otherwise users are grouped and each group uses a theta-grid design
    (theta defaults to 2 pi / N, i.e. DFT-based pilots and reflections).
    """
    slots = [PilotSlot(None, {k: 1.0}, PHASE2_DIRECT) for k in range(K)]
    groups = []
    if M >= N:
        ones = np.ones(N, dtype=complex)
        for k in range(K):
            groups.append(GroupSchedule((k,), len(slots), np.ones((1, 1), complex), ones[None, :]))
            slots.append(PilotSlot(ones, {k: 1.0}, PHASE2_CASCADED))
        return PilotPlan(slots, PHASE2_CASCADED, groups)

    grouping = grouping or make_grouping(K, M, N)
    if sum(len(g) for g in grouping.groups) != K:
        raise ValueError("grouping does not cover all K users")
    theta = 2 * np.pi / N if theta is None else theta
    for users in grouping.groups:
        n_slots = N if len(users) == M else grouping.N1
        X = theta_grid(n_slots, len(users), theta)
        V = theta_grid(n_slots, N, theta)
        groups.append(GroupSchedule(tuple(users), len(slots), X, V))
        for i in range(n_slots):
            tx = {k: X[i, j] for j, k in enumerate(users)}
            slots.append(PilotSlot(V[i].copy(), tx, PHASE2_CASCADED))
    return PilotPlan(slots, PHASE2_CASCADED, groups)


def plan_benchmark(N, K):
    """Per-user DFT training, K (N + 1) slots."""
    slots = []
    for k in range(K):
        slots.extend(_dft_slots(N, k, BENCHMARK))
    return PilotPlan(slots, BENCHMARK)

