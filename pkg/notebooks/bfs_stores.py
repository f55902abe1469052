# %% [markdown]
# # BFS: fewer misses, many more stores
#
# The branch-avoiding BFS writes a distance for every traversed edge. As
# the average degree grows, the store ratio grows with it.

# %%
from branchlab import bfs_branch_avoiding, bfs_branch_based, generate_random
from branchlab.analysis import bfs_bounds
from branchlab.tracer import TraceRecorder

print("avg_deg   |V^|    |E^|   d-stores based/avoid   ratio   M based/avoid")
for m in (2000, 5000, 10000, 25000, 50000):
    g = generate_random(1000, m, 3)
    rb, ra = TraceRecorder(), TraceRecorder()
    b = bfs_branch_based(g, 0, rb)
    bfs_branch_avoiding(g, 0, ra)
    sb, sa = rb.report(), ra.report()
    print(f"{2 * m / 1000:>7.0f} {b.reached:>6} {b.edges_traversed:>7} "
          f"{sb.stores_to('d'):>10} / {sa.stores_to('d'):<8} "
          f"{sa.stores_to('d') / sb.stores_to('d'):>7.1f} "
          f"{sb.mispredictions:>7} / {sa.mispredictions}")

# %% [markdown]
# Misses against the bounds, for each starting predictor state.

# %%
from branchlab import PredictorState

g = generate_random(1000, 4000, 3)
for s in PredictorState:
    rep = bfs_bounds(bfs_branch_based(g, 0, TraceRecorder(s)))
    print(s.name, rep.measured_mispredictions, [rep.lower_bound, rep.upper_bound])
