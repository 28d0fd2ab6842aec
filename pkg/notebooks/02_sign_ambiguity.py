# %% [markdown]
# # Off-line anchor training
# Two anchors give the elementwise square of the BS-IRS channel. After taking
# square roots, each column is known only up to a sign.

# %%
import numpy as np

from irs_anchor import PathLossModel, SystemGeometry, draw_channels, plan_phase1, run_phase1

M, N, K = 8, 6, 3
ch = draw_channels(M, K, SystemGeometry.for_elements(N), PathLossModel(), np.random.default_rng(7))
est = run_phase1(ch, plan_phase1(N), p_offline=1e4, noise=None)

# %%
signs = np.real(np.sum(est.W / ch.H_bs, axis=0) / M)
print("per-column sign of W relative to H_bs:", np.round(signs, 12))
print("max |W - H_bs diag(signs)|:", np.abs(est.W - ch.H_bs * signs).max())

# %% [markdown]
# The signs cancel in the cascaded channel: W diag(h) with the sign-flipped
# IRS-user estimate equals the true cascade.
