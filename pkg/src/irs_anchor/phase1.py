"""Off-line anchor training: recovering the BS-IRS channel up to column signs.

Two anchors give the elementwise square of the BS-IRS channel; the ratios of
the BS-IRS-A1 cascade within each column then pin every entry of a column to a
single common sign. In the LoS variant one anchor with a known IRS link gives
the BS-IRS channel directly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError
from .model import ANCHOR_2, ChannelRealization, NoiseModel, synthesize_rx

TWO_ANCHOR = "two-anchor"
LOS = "los"

DIV_TOL = 1e-12


def _guard_divisor(d, what):
    mag = np.abs(d)
    limit = DIV_TOL * mag.max() if mag.size else 0.0
    bad = np.flatnonzero(mag.ravel() <= limit)
    if bad.size:
        idx = np.unravel_index(bad[0], d.shape)
        raise DegenerateChannelError(what, idx[0] if len(idx) == 1 else idx)


def _apply_inverse(Y, Vt, p):
    if p <= 0:
        raise ValueError("pilot power must be positive")
    Vt = np.asarray(Vt)
    n = Vt.shape[0]
    if Vt.shape != (n, n) or np.shape(Y)[-1] != n:
        raise ValueError(f"training matrix {Vt.shape} does not match observations {np.shape(Y)}")
    if np.allclose(Vt @ Vt.conj().T, n * np.eye(n), atol=1e-10 * n):
        est = np.asarray(Y) @ Vt.conj().T / n
    else:
        # Y = X Vt  =>  X^T = solve(Vt^T, Y^T)
        est = np.linalg.solve(Vt.T, np.asarray(Y).T).T
    return est / np.sqrt(p)


def ls_estimate_anchor(Y, Vt, p):
    """LS estimate of ``[h_direct | H_cascaded]`` from ``Y = sqrt(p) [h|H] Vt + Z``.

    Returns the direct channel (length M) and the cascaded channel (M x N).
    """
    est = _apply_inverse(np.atleast_2d(Y), Vt, p)
    return est[:, 0], est[:, 1:]


def ls_estimate_a2(y2, Vt, p):
    """Scalar-receiver version: returns ``(h_a1a2, h_a1sa2)``."""
    est = _apply_inverse(np.asarray(y2).reshape(1, -1), Vt, p)[0]
    return complex(est[0]), est[1:]


def hadamard_recover(H_bsa1_hat, H_bsa2_hat, h_a1sa2_hat):
    """Elementwise square of the BS-IRS channel from the three anchor cascades."""
    h = np.asarray(h_a1sa2_hat)
    _guard_divisor(h, "A1-IRS-A2 cascaded channel")
    return H_bsa1_hat * H_bsa2_hat / h[np.newaxis, :]


def principal_sqrt(G):
    """Principal complex square root with the angle of G taken in (-pi, pi]."""
    G = np.asarray(G, dtype=complex)
    g = np.sqrt(G)
    # numpy maps -x - 0j to angle -pi; fold that edge onto +pi.
    neg_real = (G.imag == 0) & (G.real < 0)
    return np.where(neg_real, 1j * np.sqrt(np.abs(G.real)), g)


def reference_rows(H_bsa1_hat, strict=False):
    """Per-column row used as the phase reference when building W."""
    H = np.asarray(H_bsa1_hat)
    if strict:
        return np.zeros(H.shape[1], dtype=int)
    return np.argmax(np.abs(H), axis=0)


def build_W(g, H_bsa1_hat, strict=False):
    """Surrogate for the BS-IRS channel, equal to it up to one sign per column.

    Column n is the A1 cascade column rescaled so that its reference entry
    equals ``g[ref, n]``. ``strict=True`` always uses the first row as
    reference; otherwise the strongest entry of each column is used.
    """
    H = np.asarray(H_bsa1_hat)
    cols = np.arange(H.shape[1])
    ref = reference_rows(H, strict)
    pivots = H[ref, cols]
    scale = np.abs(H).max() if H.size else 0.0
    small = np.flatnonzero(np.abs(pivots) <= DIV_TOL * scale)
    if small.size:
        raise DegenerateChannelError("BS-IRS-A1 reference row", int(small[0]))
    return H / pivots[np.newaxis, :] * np.asarray(g)[ref, cols][np.newaxis, :]


def los_recover_Hbs(H_bsa_hat, h_ra):
    """BS-IRS channel from the single-anchor cascade and the known LoS link."""
    h = np.asarray(h_ra)
    _guard_divisor(h, "LoS IRS-anchor channel")
    return np.asarray(H_bsa_hat) / h[np.newaxis, :]


@dataclass
class Phase1Estimate:
    H_bsa1_hat: np.ndarray
    h_ba1_hat: np.ndarray
    W: np.ndarray
    G: np.ndarray
    g: np.ndarray
    mode: str
    slots_used: int
    H_bsa2_hat: np.ndarray | None = None
    h_ba2_hat: np.ndarray | None = None
    h_a1sa2_hat: np.ndarray | None = None
    h_a1a2_hat: complex | None = None


def training_matrix(plan):
    """Rebuild the (N+1) x (N+1) training matrix ``[1; v_i] * a_i`` from a plan."""
    cols = []
    for slot in plan.slots:
        (a,) = slot.tx.values()
        cols.append(np.concatenate([[1.0], slot.reflection]) * a)
    return np.stack(cols, axis=1)


def _observe(channels, plan, p, noise, with_a2=False):
    Y = np.stack([synthesize_rx(channels, s.reflection, s.tx, p, noise) for s in plan.slots], axis=1)
    if not with_a2:
        return Y, None
    y2 = np.array([synthesize_rx(channels, s.reflection, s.tx, p, noise, receiver=ANCHOR_2)
                   for s in plan.slots])
    return Y, y2


def run_phase1(channels: ChannelRealization, plans, p_offline, noise: NoiseModel | None,
               mode=TWO_ANCHOR, strict_reference_row=False):
    """Simulate the anchor training slots and produce the W surrogate.

    ``plans`` comes from :func:`irs_anchor.pilots.plan_phase1` with the same
    mode. Feedback of the A2 observation to the BS is taken as error-free.
    """
    if mode == LOS:
        (plan,) = plans
        Vt = training_matrix(plan)
        Y, _ = _observe(channels, plan, p_offline, noise)
        h_ba, H_bsa = ls_estimate_anchor(Y, Vt, p_offline)
        # The LoS IRS-anchor link is known from the deployment geometry.
        W = los_recover_Hbs(H_bsa, channels.h_sa_los)
        return Phase1Estimate(H_bsa1_hat=H_bsa, h_ba1_hat=h_ba, W=W, G=W * W, g=W,
                              mode=LOS, slots_used=len(plan))
    if mode != TWO_ANCHOR:
        raise ValueError(f"unknown phase-1 mode {mode!r}")

    plan1, plan2 = plans
    Y1, y2 = _observe(channels, plan1, p_offline, noise, with_a2=True)
    Y2, _ = _observe(channels, plan2, p_offline, noise)
    h_ba1, H_bsa1 = ls_estimate_anchor(Y1, training_matrix(plan1), p_offline)
    h_ba2, H_bsa2 = ls_estimate_anchor(Y2, training_matrix(plan2), p_offline)
    h_a1a2, h_a1sa2 = ls_estimate_a2(y2, training_matrix(plan1), p_offline)
    G = hadamard_recover(H_bsa1, H_bsa2, h_a1sa2)
    g = principal_sqrt(G)
    W = build_W(g, H_bsa1, strict=strict_reference_row)
    return Phase1Estimate(
        H_bsa1_hat=H_bsa1, h_ba1_hat=h_ba1, W=W, G=G, g=g, mode=TWO_ANCHOR,
        slots_used=len(plan1) + len(plan2), H_bsa2_hat=H_bsa2, h_ba2_hat=h_ba2,
        h_a1sa2_hat=h_a1sa2, h_a1a2_hat=h_a1a2,
    )
