from branchlab import generate_random
from branchlab.predictor import PredictorState as S
from branchlab.tracer import TraceRecorder


def min_degree_graph(n, m, seed):
    """Random graph with every vertex of degree >= 1 (retry seeds)."""
    while True:
        g = generate_random(n, m, seed)
        if g.degrees().min() >= 1:
            return g
        seed += 1000


class SweepRecorder(TraceRecorder):
    """Also tracks sv.if misses separately for each sweep."""

    def __init__(self, initial_state=S.WEAKLY_NOT_TAKEN):
        super().__init__(initial_state)
        self.if_misses = []

    def record_branch(self, site, taken):
        if site.label == "sv.while" and taken:
            self.if_misses.append(0)
        before = site.mispredictions
        super().record_branch(site, taken)
        if site.label == "sv.if":
            self.if_misses[-1] += site.mispredictions - before
