# %% [markdown]
# # The 2-bit predictor on a loop branch
#
# Step the automaton by hand on a few loops, then compare the closed-form
# expected miss counts with brute-force enumeration.

# %%
import numpy as np

from branchlab import LoopConvention, PredictorState as S
from branchlab.predictor import (brute_force_loop_misses, enumerate_loop_expectation,
                                 expected_mispredict_loop, nested_loop_misses)

# %% [markdown]
# Misses of one loop test, by trip count and starting state.

# %%
print("n   " + "  ".join(f"{s.name[:12]:>12}" for s in S))
for n in range(7):
    print(f"{n:<3} " + "  ".join(f"{brute_force_loop_misses(s, n):>12}" for s in S))

# %% [markdown]
# An inner loop run 1000 times costs at most two misses beyond one per exit.

# %%
rng = np.random.default_rng(0)
trips = [5] + rng.integers(1, 20, size=999).tolist()
for s in S:
    print(s.name, nested_loop_misses(s, trips)[1])

# %% [markdown]
# Expected misses when the starting state is random.

# %%
uniform = np.full(4, 0.25)
for n in range(5):
    print(n, expected_mispredict_loop(uniform, n))

p = rng.dirichlet(np.ones(4))
for conv in LoopConvention:
    dev = max(abs(expected_mispredict_loop(p, n, conv) - enumerate_loop_expectation(p, n, conv))
              for n in range(11))
    print(conv.name, f"{dev:.1e}")
