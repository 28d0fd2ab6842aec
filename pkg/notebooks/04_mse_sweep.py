# %% [markdown]
# # Estimation error against user power
# Per-user training spends far more slots and is the most accurate. The LoS
# variant skips the square root and beats the two-anchor scheme.

# %%
from irs_anchor import ExperimentConfig, run_sweep

config = ExperimentConfig(M=16, N=16, K=4, trials=200, p_offline_dbm=40.0, master_seed=1)
rows = run_sweep(config, axis="p", grid=(0, 10, 20, 30, 40))
for r in rows:
    print(f"{r['axis_value']:>5} dBm  {r['scheme']:<17} slots={r['overhead_slots']:<3} "
          f"nmse={r['nmse_mean']:.3e} +- {r['nmse_stderr']:.1e}")

# %% [markdown]
# More BS antennas help the proposed scheme.

# %%
for M in (16, 64):
    (row,) = run_sweep(ExperimentConfig(M=M, N=16, K=4, trials=200, schemes=("proposed-general",)))
    print(M, row["nmse_mean"])
