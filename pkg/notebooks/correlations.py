# %% [markdown]
# # What tracks time per edge?
#
# Collect per-sweep samples from several graphs, replace the simulated
# timings with measured ones, and correlate.

# %%
from branchlab import generate_random, sv_branch_based
from branchlab.analysis import correlate, timed_iterations, with_wall_times
from branchlab.tracer import TraceRecorder

samples = []
for seed in range(5):
    g = generate_random(1500, 1800, seed)
    run = sv_branch_based(g, TraceRecorder())
    samples += with_wall_times(run.per_iteration, timed_iterations(sv_branch_based, g))
print(len(samples), "samples")

# %%
cm = correlate(samples)
print("    " + "".join(f"{x:>7}" for x in cm.labels))
for a in cm.labels:
    cells = (cm.get(a, b) for b in cm.labels)
    print(f"{a:<4}" + "".join("      ." if c is None else f"{c:>7.2f}" for c in cells))

# %% [markdown]
# A dot marks a column with no variance (per-edge loads are constant here).
# Branches per edge barely move between sweeps of one graph, so T against B
# stays near zero. Timings are host specific; rerun to see how much the T row
# moves.
