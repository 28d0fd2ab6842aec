# %% [markdown]
# # On-line user training
# With at least as many BS antennas as IRS elements, one slot per user is
# enough. With fewer antennas, users are grouped and share a slot budget.

# %%
import numpy as np

from irs_anchor import (PathLossModel, SystemGeometry, draw_channels, make_grouping, plan_phase1,
                        plan_phase2, run_phase1, run_phase2)


def noiseless_error(M, N, K, seed=0):
    ch = draw_channels(M, K, SystemGeometry.for_elements(N), PathLossModel(),
                       np.random.default_rng(seed))
    est = run_phase2(ch, run_phase1(ch, plan_phase1(N), 1e4, None), plan_phase2(M, N, K), 1e2, None)
    return np.linalg.norm(est.H_bsu_hat - ch.cascaded_bsu) / np.linalg.norm(ch.cascaded_bsu), est


err, est = noiseless_error(8, 6, 3)
print(est.scheme_tag, "slots", est.slots_used, "rel. error", err)

# %%
print(make_grouping(6, 4, 8))
err, est = noiseless_error(4, 8, 6)
print(est.scheme_tag, "slots", est.slots_used, "rel. error", err)
