"""Two-bit saturating branch predictor: automaton, Markov chain and expected misses.

States are ordered ``[strongly not taken, weakly not taken, weakly taken,
strongly taken]`` everywhere, including the probability row-vectors used by
the Markov-chain functions.
"""

from __future__ import annotations

import enum
import functools
from typing import Iterable, Sequence

import numpy as np

DISTRIBUTION_TOL = 1e-12


class PredictorState(enum.IntEnum):
    STRONGLY_NOT_TAKEN = 0
    WEAKLY_NOT_TAKEN = 1
    WEAKLY_TAKEN = 2
    STRONGLY_TAKEN = 3

    @property
    def predicts_taken(self) -> bool:
        return self >= PredictorState.WEAKLY_TAKEN

    @classmethod
    def from_short(cls, name: str) -> "PredictorState":
        """Parse ``snt``, ``wnt``, ``wt`` or ``st``."""
        try:
            return _SHORT_NAMES[name.lower()]
        except KeyError:
            raise ValueError(f"unknown predictor state {name!r}; "
                             f"expected one of {sorted(_SHORT_NAMES)}") from None


_SHORT_NAMES = {
    "snt": PredictorState.STRONGLY_NOT_TAKEN,
    "wnt": PredictorState.WEAKLY_NOT_TAKEN,
    "wt": PredictorState.WEAKLY_TAKEN,
    "st": PredictorState.STRONGLY_TAKEN,
}

# NEXT_STATE[state][taken]; a saturating counter in both directions.
NEXT_STATE = ((0, 1), (0, 2), (1, 3), (2, 3))


class LoopConvention(enum.Enum):
    """Which direction the loop-test branch takes.

    ``TAKEN_ON_CONTINUE``: taken while the loop keeps iterating, not taken on exit.
    ``TAKEN_ON_EXIT``: not taken while iterating, taken once to leave the loop.
    """

    TAKEN_ON_CONTINUE = "taken-on-continue"
    TAKEN_ON_EXIT = "taken-on-exit"


def step(state: PredictorState, taken: bool) -> tuple[PredictorState, bool]:
    """Resolve one branch: return the next state and whether it was mispredicted."""
    state = PredictorState(state)
    return PredictorState(NEXT_STATE[state][bool(taken)]), state.predicts_taken != bool(taken)


def run_outcomes(state: PredictorState, outcomes: Iterable[bool]) -> tuple[PredictorState, int]:
    """Feed a sequence of outcomes; return the final state and the miss count."""
    misses = 0
    for taken in outcomes:
        state, missed = step(state, taken)
        misses += missed
    return state, misses


def loop_outcomes(n: int, convention: LoopConvention) -> list[bool]:
    """Outcomes of the test of a simple loop running its body ``n`` times."""
    if n < 0:
        raise ValueError("loop trip count must be nonnegative")
    cont = convention is LoopConvention.TAKEN_ON_CONTINUE
    return [cont] * n + [not cont]


def brute_force_loop_misses(initial: PredictorState, n: int,
                            convention: LoopConvention = LoopConvention.TAKEN_ON_CONTINUE) -> int:
    """Exact misses of a simple loop's test branch, by stepping the automaton."""
    return run_outcomes(initial, loop_outcomes(n, convention))[1]


def nested_loop_misses(initial: PredictorState, trip_counts: Sequence[int],
                       convention: LoopConvention = LoopConvention.TAKEN_ON_CONTINUE
                       ) -> tuple[PredictorState, int]:
    """Misses of one inner-loop branch site executed once per entry of ``trip_counts``."""
    state, total = PredictorState(initial), 0
    for n in trip_counts:
        state, misses = run_outcomes(state, loop_outcomes(n, convention))
        total += misses
    return state, total


def as_distribution(p) -> np.ndarray:
    """Validate a state distribution ``[s̄, w̄, w, s]`` and return it as an array."""
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ValueError("a state distribution has exactly four entries")
    if np.any(p < -DISTRIBUTION_TOL) or abs(p.sum() - 1.0) > DISTRIBUTION_TOL:
        raise ValueError(f"not a probability distribution: {p}")
    return p


def transition_matrix(b: float) -> np.ndarray:
    """Markov transition matrix of the predictor when the branch is taken with probability b.

    Row ``i`` holds the probabilities of moving from state ``i`` to each state,
    so an updated distribution is ``p @ transition_matrix(b)``.
    """
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"taken probability must lie in [0, 1], got {b}")
    nb = 1.0 - b
    return np.array([
        [nb, b, 0.0, 0.0],
        [nb, 0.0, b, 0.0],
        [0.0, nb, 0.0, b],
        [0.0, 0.0, nb, b],
    ])


def evolve(p, b: float, steps: int) -> np.ndarray:
    """Distribution after ``steps`` branches each taken with probability ``b``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    return as_distribution(p) @ np.linalg.matrix_power(transition_matrix(b), steps)


def correct_probability(p, b: float) -> float:
    """Probability that the next prediction is right: (w+s)·b + (1-(w+s))·(1-b)."""
    p = as_distribution(p)
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"taken probability must lie in [0, 1], got {b}")
    taken = p[2] + p[3]
    return taken * b + (1.0 - taken) * (1.0 - b)


def expected_mispredict_single(p, b: float) -> float:
    """Expected misses of a single branch, taken with probability ``b``."""
    return 1.0 - correct_probability(p, b)


def expected_mispredict_loop(p, n: int,
                             convention: LoopConvention = LoopConvention.TAKEN_ON_EXIT) -> float:
    """Expected misses of a simple loop's test branch over its ``n + 1`` evaluations.

    Closed form for the taken-on-exit convention::

        n = 0:   1 - (w + s)
        n = 1:   1 + w
        n >= 2:  1 + w + 2s

    The automaton is symmetric under swapping taken/not-taken together with
    reversing the state order, so the taken-on-continue case evaluates the
    same formula on the reversed distribution.
    """
    if n < 0:
        raise ValueError("loop trip count must be nonnegative")
    p = as_distribution(p)
    if convention is LoopConvention.TAKEN_ON_CONTINUE:
        p = p[::-1]
    w, s = p[2], p[3]
    if n == 0:
        return 1.0 - (w + s)
    if n == 1:
        return 1.0 + w
    return 1.0 + w + 2.0 * s


def enumerate_loop_expectation(p, n: int,
                               convention: LoopConvention = LoopConvention.TAKEN_ON_EXIT) -> float:
    """Brute-force counterpart of :func:`expected_mispredict_loop`.

    Weighted average of exact miss counts over the four deterministic initial states.
    """
    p = as_distribution(p)
    return float(p @ np.array(_loop_miss_vector(n, convention), dtype=float))


@functools.lru_cache(maxsize=None)
def _loop_miss_vector(n: int, convention: LoopConvention) -> tuple[int, ...]:
    return tuple(brute_force_loop_misses(s, n, convention) for s in PredictorState)
