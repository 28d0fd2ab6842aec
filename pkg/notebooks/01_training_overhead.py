# %% [markdown]
# # Pilot budget
# How many pilot slots each scheme spends before data can flow, and when the
# anchor-assisted design starts to pay off.

# %%
from irs_anchor import training_overhead
from irs_anchor.harness import BENCHMARK, PROPOSED_GENERAL, PROPOSED_LOS

for M, N, K in [(60, 60, 20), (10, 60, 20), (1, 60, 20)]:
    row = {s: training_overhead(M, N, K, s) for s in (PROPOSED_GENERAL, PROPOSED_LOS, BENCHMARK)}
    print(M, N, K, row)

# %% [markdown]
# With a single BS antenna the proposed scheme is worse than per-user training.
# The ratio below falls as more users share the off-line cost.

# %%
for K in (1, 2, 5, 10, 20, 40):
    r = training_overhead(10, 60, K, PROPOSED_GENERAL) / training_overhead(10, 60, K, BENCHMARK)
    print(f"K={K:2d}  proposed/benchmark = {r:.3f}")
