# %% [markdown]
# # Connected components: where the misses go
#
# Run both label-propagation variants on one random graph and look at each
# branch site, sweep by sweep.

# %%
from branchlab import generate_random, sv_branch_avoiding, sv_branch_based
from branchlab.analysis import iteration_ratio_table, sv_bounds
from branchlab.tracer import TraceRecorder

g = generate_random(2000, 6000, 1)
rb, ra = TraceRecorder(), TraceRecorder()
based = sv_branch_based(g, rb)
avoid = sv_branch_avoiding(g, ra)
print(based.iterations, "sweeps, labels equal:", (based.labels == avoid.labels).all())

# %%
for name, rec in (("based", rb), ("avoiding", ra)):
    print(name)
    for site in rec.report().sites:
        print(f"  {site.label:<18} evals={site.evaluations:>8} misses={site.mispredictions:>7}")

# %% [markdown]
# Per sweep: the branch-based run pays for the `if` early on, and the
# avoiding run stores every label every sweep.

# %%
table = iteration_ratio_table(based.per_iteration, avoid.per_iteration)
print("it   M_based  M_avoid  S_based  S_avoid")
for r in table.rows:
    print(f"{r.index:<4} {r.mispredictions_based:>7} {r.mispredictions_avoiding:>8} "
          f"{r.stores_based:>8} {r.stores_avoiding:>8}")

# %%
for name, run in (("based", based), ("avoiding", avoid)):
    b = sv_bounds(run, g)
    print(name, b.measured_mispredictions, "vs lower", b.lower_bound, f"({b.ratio_to_lower:.3f})")
