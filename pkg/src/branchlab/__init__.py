"""Branch-based vs. branch-avoiding graph kernels under a simulated 2-bit predictor."""

from .bfs import UNREACHED, BfsRunResult, bfs_branch_avoiding, bfs_branch_based
from .cc import CcRunResult, count_components, sv_branch_avoiding, sv_branch_based
from .graph import (Diameter, EdgeList, Graph, GraphFormatError, diameter, generate_random,
                    load_edge_list, load_metis, to_csr)
from .predictor import (LoopConvention, PredictorState, brute_force_loop_misses, evolve,
                        expected_mispredict_loop, expected_mispredict_single, step,
                        transition_matrix)
from .tracer import IterationStats, NullRecorder, Snapshot, TraceRecorder

__version__ = "0.1.0"
