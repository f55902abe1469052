"""Exhaustive checks of the 2-bit predictor's loop facts and expectation formulas."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .predictor import (
    LoopConvention,
    PredictorState,
    brute_force_loop_misses,
    enumerate_loop_expectation,
    evolve,
    expected_mispredict_loop,
    expected_mispredict_single,
    loop_outcomes,
    nested_loop_misses,
    run_outcomes,
    step,
)

S = PredictorState
CONT = LoopConvention.TAKEN_ON_CONTINUE
EXIT = LoopConvention.TAKEN_ON_EXIT

# (state, taken) -> next state, read off the saturating-counter automaton
FSA_TABLE = {
    (S.STRONGLY_NOT_TAKEN, False): S.STRONGLY_NOT_TAKEN,
    (S.STRONGLY_NOT_TAKEN, True): S.WEAKLY_NOT_TAKEN,
    (S.WEAKLY_NOT_TAKEN, False): S.STRONGLY_NOT_TAKEN,
    (S.WEAKLY_NOT_TAKEN, True): S.WEAKLY_TAKEN,
    (S.WEAKLY_TAKEN, False): S.WEAKLY_NOT_TAKEN,
    (S.WEAKLY_TAKEN, True): S.STRONGLY_TAKEN,
    (S.STRONGLY_TAKEN, False): S.WEAKLY_TAKEN,
    (S.STRONGLY_TAKEN, True): S.STRONGLY_TAKEN,
}


@dataclass(frozen=True)
class LemmaCheck:
    name: str
    passed: bool
    max_deviation: float
    detail: str


def check_fsa() -> LemmaCheck:
    bad = 0
    for (state, taken), expected in FSA_TABLE.items():
        nxt, missed = step(state, taken)
        bad += nxt != expected or missed != (state.predicts_taken != taken)
    return LemmaCheck("fsa transitions", bad == 0, float(bad), "8 (state, outcome) pairs")


def check_saturation() -> LemmaCheck:
    bad = 0
    for state, taken in product(S, (False, True)):
        final, _ = run_outcomes(state, [taken] * 3)
        bad += final != (S.STRONGLY_TAKEN if taken else S.STRONGLY_NOT_TAKEN)
    return LemmaCheck("3 identical outcomes saturate", bad == 0, float(bad), "all states")


def check_final_state_weakly_taken(max_n: int = 64) -> LemmaCheck:
    bad = sum(run_outcomes(s, loop_outcomes(n, CONT))[0] != S.WEAKLY_TAKEN
              for s in S for n in range(3, max_n + 1))
    return LemmaCheck("loop n>=3 ends weakly taken", bad == 0, float(bad),
                      f"n in [3, {max_n}], all initial states")


def _range_check(name: str, ns, lo: int, hi: int) -> LemmaCheck:
    counts = [brute_force_loop_misses(s, n, CONT) for s in S for n in ns]
    dev = max(max(lo - c, c - hi, 0) for c in counts)
    return LemmaCheck(name, dev == 0, float(dev),
                      f"observed [{min(counts)}, {max(counts)}], allowed [{lo}, {hi}]")


def check_loop_miss_range(max_n: int = 64) -> LemmaCheck:
    return _range_check("loop n>=3 costs 1..3 misses", range(3, max_n + 1), 1, 3)


def check_nested_loop(k: int = 1000, seed: int = 0) -> LemmaCheck:
    """k executions, the first with n >= 3 and the rest with n >= 1, from every state."""
    rng = np.random.default_rng(seed)
    trips = [int(rng.integers(3, 20))] + rng.integers(1, 20, size=k - 1).tolist()
    totals = [nested_loop_misses(s, trips, CONT)[1] for s in S]
    # constant trip counts are the other extreme worth pinning
    totals += [nested_loop_misses(s, [3] + [1] * (k - 1), CONT)[1] for s in S]
    dev = max(max(k - t, t - (k + 2), 0) for t in totals)
    return LemmaCheck(f"k={k} nested loop runs", dev == 0, float(dev),
                      f"totals in [{min(totals)}, {max(totals)}], allowed [{k}, {k + 2}]")


def check_small_trip_counts() -> list[LemmaCheck]:
    checks = [
        _range_check("n=0 costs 0..1 misses", [0], 0, 1),
        _range_check("n=1 costs 1..2 misses", [1], 1, 2),
        _range_check("n=2 costs 1..3 misses", [2], 1, 3),
    ]
    finals0 = {run_outcomes(s, loop_outcomes(0, CONT))[0] for s in S}
    finals2 = {run_outcomes(s, loop_outcomes(2, CONT))[0] for s in S}
    ok0 = S.STRONGLY_TAKEN not in finals0
    ok2 = finals2 <= {S.WEAKLY_TAKEN, S.WEAKLY_NOT_TAKEN}
    checks.append(LemmaCheck("n=0 never ends strongly taken", ok0, float(not ok0),
                             f"final states {sorted(s.name for s in finals0)}"))
    checks.append(LemmaCheck("n=2 ends in a weak state", ok2, float(not ok2),
                             f"final states {sorted(s.name for s in finals2)}"))
    return checks


def check_loop_expectation(samples: int = 1000, max_n: int = 10, seed: int = 0,
                           tol: float = 1e-12) -> LemmaCheck:
    """Closed-form expected loop misses vs. enumeration over the four initial states."""
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        p = rng.dirichlet(np.ones(4))
        p /= p.sum()
        for n in range(max_n + 1):
            for conv in (EXIT, CONT):
                dev = max(dev, abs(expected_mispredict_loop(p, n, conv)
                                   - enumerate_loop_expectation(p, n, conv)))
    return LemmaCheck("expected loop misses = enumeration", dev <= tol, dev,
                      f"{samples} random distributions, n in [0, {max_n}], tol {tol:g}")


def check_uniform_prior() -> LemmaCheck:
    uniform = np.full(4, 0.25)
    got = [expected_mispredict_loop(uniform, n, EXIT) for n in (0, 1, 2, 5)]
    want = [0.5, 1.25, 1.75, 1.75]
    dev = max(abs(g - w) for g, w in zip(got, want))
    return LemmaCheck("uniform prior: 1/2, 5/4, 7/4", dev <= 1e-12, dev,
                      "n=0,1,2,5 -> " + " / ".join(f"{g:g}" for g in got))


def check_single_branch(seed: int = 0, samples: int = 200) -> LemmaCheck:
    """Single-branch expectation vs. enumerating (state, outcome) pairs."""
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        p = rng.dirichlet(np.ones(4))
        p /= p.sum()
        b = float(rng.random())
        brute = sum(p[s] * (b * step(S(s), True)[1] + (1 - b) * step(S(s), False)[1])
                    for s in range(4))
        dev = max(dev, abs(expected_mispredict_single(p, b) - brute))
    uniform_dev = max(abs(expected_mispredict_single(np.full(4, 0.25), b) - 0.5)
                      for b in np.linspace(0, 1, 11))
    dev = max(dev, uniform_dev)
    return LemmaCheck("single-branch expected misses", dev <= 1e-12, dev,
                      f"{samples} random (p, b); uniform p gives 1/2")


def check_evolve(seed: int = 0, samples: int = 100, max_steps: int = 50) -> LemmaCheck:
    rng = np.random.default_rng(seed)
    dev = 0.0
    for _ in range(samples):
        p = rng.dirichlet(np.ones(4))
        p /= p.sum()
        b = float(rng.random())
        for k in range(max_steps + 1):
            q = evolve(p, b, k)
            dev = max(dev, abs(q.sum() - 1.0), float(max(0.0, -q.min())))
        for k in range(3, 8):
            dev = max(dev, float(np.abs(evolve(p, 0.0, k) - [1, 0, 0, 0]).max()),
                      float(np.abs(evolve(p, 1.0, k) - [0, 0, 0, 1]).max()))
    return LemmaCheck("evolve stays a distribution", dev <= 1e-12, dev,
                      f"{samples} random (p, b), up to {max_steps} steps; b=0/1 saturate in 3")


def verify_all() -> list[LemmaCheck]:
    return [
        check_fsa(),
        check_saturation(),
        check_final_state_weakly_taken(),
        check_loop_miss_range(),
        check_nested_loop(),
        *check_small_trip_counts(),
        check_single_branch(),
        check_loop_expectation(),
        check_uniform_prior(),
        check_evolve(),
    ]
