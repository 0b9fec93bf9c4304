"""Twin-set greedy solvers, the thresholded variant, and baselines.

All solvers follow the same reporting contract: they own their value
caches (the oracle caches nothing), count their own oracle traffic, and
emit a RunReport whose insertion log suffices to replay the run.

The two twin-set solvers use lazy marginal evaluation: cached gains are
upper bounds because a side only grows and gains only shrink under
submodularity, and a side that became infeasible for an element stays
infeasible by the hereditary property.  Skipping an element whose bound
is already below the acceptance bar therefore never changes which
element is picked, only how many queries confirming it costs.  One
caveat: two float evaluations of mathematically equal marginals can
differ by a few ulps, so a mathematical tie may resolve differently
than a literal rescan would resolve it; that stays within the "ties
broken arbitrarily" contract and is orders of magnitude below every
stated 1e-9 tolerance.  In exact arithmetic (e.g. dyadic weights) the
runs coincide bit for bit.  The sampled baseline is deliberately the
textbook scan-everything greedy.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    ContractViolation,
    GroundSet,
    IndependenceOracle,
    InsertionLog,
    ParameterError,
    RunReport,
    ValueOracle,
)
from .constraints import rank as constraint_rank
from .generators import RNG_ID

TIE_BREAK = "side1-lowest-id"


@dataclass
class SolverParams:
    """Knobs shared by the solve() front door."""

    epsilon: float | None = None  # threshold decay (thresholded solver)
    q: float = 0.5  # inclusion probability (sampled baseline)
    seed: int | None = None  # rng seed for randomized baselines
    tie_break: str = TIE_BREAK


def _report(algorithm, ground, parameters, s, fval, log, queries, checks, t0) -> RunReport:
    star = 0 if fval[0] >= fval[1] else 1
    return RunReport(
        algorithm=algorithm,
        n=ground.n,
        parameters=parameters,
        s1=s[0],
        s2=s[1],
        s_star=s[star],
        f_s1=fval[0],
        f_s2=fval[1],
        f_star=fval[star],
        log=log,
        value_queries=queries[0],
        independence_checks=checks,
        wall_time_s=time.perf_counter() - t0,
    )


def twin_greedy(f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet) -> RunReport:
    """Grow two disjoint sides greedily and return the better one.

    Each round inserts the feasible (element, side) pair of maximum
    marginal gain, stopping when the best gain is non-positive or nothing
    fits.  Ties prefer side 1, then the lower element id, which makes the
    run bit-reproducible.  Implemented with a lazy max-heap of stale
    gains; stale entries are re-evaluated on pop and pushed back, so the
    confirmed maximum is the one a full rescan would select (exactly so
    in exact arithmetic; see the module note on float tie noise).

    The constraint must be hereditary; a non-hereditary family can make
    the run stop early, which is not detected.
    """
    t0 = time.perf_counter()
    n = ground.n
    queries = [0]

    def ev(mask):
        queries[0] += 1
        return f.evaluate(mask)

    checks0 = constraint.check_count
    f_empty = ev(0)
    s = [0, 0]
    fval = [f_empty, f_empty]
    states = [constraint.empty_state(), constraint.empty_state()]
    versions = [0, 0]
    log = InsertionLog()

    # both sides are empty, so singleton gains are shared between them
    heap = []
    empty_state = constraint.empty_state()
    for e in range(n):
        if constraint.can_add(empty_state, e):
            val = ev(1 << e)
            gain = val - f_empty
            heap.append((-gain, 0, e, 0, val))
            heap.append((-gain, 1, e, 0, val))
    heapq.heapify(heap)

    selected = 0
    while heap:
        neg_gain, i, e, ver, val = heapq.heappop(heap)
        if (selected >> e) & 1:
            continue
        if not constraint.can_add(states[i], e):
            continue  # a grown side never becomes feasible again
        if ver != versions[i]:
            val = ev(s[i] | (1 << e))
            heapq.heappush(heap, (fval[i] - val, i, e, versions[i], val))
            continue
        gain = -neg_gain
        if gain <= 0:
            break
        log.append(element=e, side=i + 1, gain=gain)
        s[i] |= 1 << e
        fval[i] = val  # val is the oracle's own output for the grown side
        states[i] = constraint.add(states[i], e)
        versions[i] += 1
        selected |= 1 << e

    return _report(
        "twin_greedy", ground, {"tie_break": TIE_BREAK}, s, fval, log,
        queries, constraint.check_count - checks0, t0,
    )


def twin_greedy_fast(f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet,
                     epsilon: float) -> RunReport:
    """Thresholded twin-set greedy with geometrically decaying bar.

    Starting from the best feasible singleton value, each pass scans the
    unselected elements in ascending id order and inserts an element into
    the feasible side of larger marginal gain whenever that gain clears
    the current bar tau; the bar then decays by (1+epsilon) until it
    drops to epsilon*tau_max/(r*(1+epsilon)).  Cached per-side gain
    bounds skip evaluations that cannot clear the bar (see module note);
    the insertion sequence is identical to the unskipped scan.
    """
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0,1), got {epsilon}")
    t0 = time.perf_counter()
    n = ground.n
    queries = [0]

    def ev(mask):
        queries[0] += 1
        return f.evaluate(mask)

    checks0 = constraint.check_count
    f_empty = ev(0)
    log = InsertionLog()
    s = [0, 0]
    fval = [f_empty, f_empty]
    params: dict = {"epsilon": epsilon, "tie_break": TIE_BREAK}

    singleton = np.full(n, -np.inf)
    empty_state = constraint.empty_state()
    for e in range(n):
        if constraint.can_add(empty_state, e):
            singleton[e] = ev(1 << e)
    tau_max = float(singleton.max()) if n else -math.inf
    params["tau_max"] = None if math.isinf(tau_max) else tau_max
    if not tau_max > 0.0:
        params.update(passes=0, tau_min=None, rank=None)
        return _report("twin_greedy_fast", ground, params, s, fval, log,
                       queries, constraint.check_count - checks0, t0)

    r = constraint_rank(constraint, ground)
    params["rank"] = r
    tau_floor = epsilon * tau_max / (r * (1.0 + epsilon))

    states = [constraint.empty_state(), constraint.empty_state()]
    # upper bounds on the marginal gain of each (side, element) pair
    bounds = np.where(np.isinf(singleton), -np.inf, singleton - f_empty)
    bounds = np.vstack([bounds, bounds.copy()])

    passes = 0
    tau = tau_max
    while tau > tau_floor:
        for e in np.flatnonzero((bounds[0] >= tau) | (bounds[1] >= tau)):
            e = int(e)
            best_gain = -math.inf
            best_side = 0
            best_val = 0.0
            for i in (0, 1):
                if bounds[i, e] < tau:
                    continue
                if not constraint.can_add(states[i], e):
                    bounds[i, e] = -np.inf
                    continue
                val = ev(s[i] | (1 << e))
                gain = val - fval[i]
                bounds[i, e] = gain
                if gain > best_gain:  # strict keeps side 1 on ties
                    best_gain, best_side, best_val = gain, i, val
            if best_gain >= tau:
                i = best_side
                log.append(element=e, side=i + 1, gain=best_gain, threshold=tau)
                s[i] |= 1 << e
                fval[i] = best_val
                states[i] = constraint.add(states[i], e)
                bounds[:, e] = -np.inf
        passes += 1
        tau = tau_max / (1.0 + epsilon) ** passes
    params.update(passes=passes, tau_min=tau_max / (1.0 + epsilon) ** (passes - 1))

    return _report("twin_greedy_fast", ground, params, s, fval, log,
                   queries, constraint.check_count - checks0, t0)


def _single_greedy(algorithm, f, constraint, ground, candidates, parameters, t0,
                   checks0) -> RunReport:
    """Textbook single-set greedy: full rescans, positive-gain stopping."""
    queries = [0]

    def ev(mask):
        queries[0] += 1
        return f.evaluate(mask)

    f_empty = ev(0)
    sol = 0
    fcur = f_empty
    state = constraint.empty_state()
    log = InsertionLog()
    remaining = list(candidates)
    while remaining:
        alive = []
        best_e = -1
        best_gain = -math.inf
        best_val = 0.0
        for e in remaining:
            if not constraint.can_add(state, e):
                continue  # infeasible for good; drop from future rounds
            alive.append(e)
            val = ev(sol | (1 << e))
            gain = val - fcur
            if gain > best_gain:  # ascending scan keeps the lowest id on ties
                best_e, best_gain, best_val = e, gain, val
        if best_e < 0 or best_gain <= 0:
            break
        log.append(element=best_e, side=1, gain=best_gain)
        sol |= 1 << best_e
        fcur = best_val
        state = constraint.add(state, best_e)
        alive.remove(best_e)
        remaining = alive

    return _report(algorithm, ground, parameters, [sol, 0], [fcur, f_empty], log,
                   queries, constraint.check_count - checks0, t0)


def classic_greedy(f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet) -> RunReport:
    """Single-set greedy baseline (the monotone workhorse)."""
    t0 = time.perf_counter()
    return _single_greedy("classic_greedy", f, constraint, ground, range(ground.n),
                          {"tie_break": TIE_BREAK}, t0, constraint.check_count)


def sample_greedy(f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet,
                  q: float = 0.5, seed: int = 0) -> RunReport:
    """Greedy on a q-subsampled ground set (randomized matroid baseline)."""
    if not 0.0 < q <= 1.0:
        raise ParameterError(f"q must lie in (0,1], got {q}")
    t0 = time.perf_counter()
    checks0 = constraint.check_count
    rng = np.random.default_rng(seed)
    keep = rng.random(ground.n) < q
    candidates = [e for e in range(ground.n) if keep[e]]
    params = {"q": q, "seed": seed, "rng": RNG_ID, "tie_break": TIE_BREAK,
              "sample_size": len(candidates)}
    return _single_greedy("sample_greedy", f, constraint, ground, candidates,
                          params, t0, checks0)


@dataclass
class ExactResult:
    """Optimal independent set found by exhaustive search."""

    solution: int
    value: float
    sets_visited: int


def exact_max(f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet) -> ExactResult:
    """Globally optimal independent set by pruned depth-first enumeration.

    Explores supersets in ascending-id order and prunes any branch whose
    first extension is infeasible, which is only sound for hereditary
    families.  Keeps the first maximum encountered, i.e. the
    lexicographically smallest optimal set.
    """
    n = ground.n
    if n > 20:
        raise ContractViolation("exhaustive search needs n <= 20")
    best = [0, f.evaluate(0), 1]

    def walk(mask, state, start):
        for e in range(start, n):
            if not constraint.can_add(state, e):
                continue
            grown = mask | (1 << e)
            val = f.evaluate(grown)
            best[2] += 1
            if val > best[1]:
                best[0], best[1] = grown, val
            walk(grown, constraint.add(state, e), e + 1)

    walk(0, constraint.empty_state(), 0)
    return ExactResult(solution=best[0], value=best[1], sets_visited=best[2])


def solve(name: str, f: ValueOracle, constraint: IndependenceOracle, ground: GroundSet,
          params: SolverParams | None = None) -> RunReport:
    """Uniform front door over the implemented algorithms."""
    params = params or SolverParams()
    if name in ("twin", "twin_greedy"):
        return twin_greedy(f, constraint, ground)
    if name in ("twinfast", "twin_greedy_fast"):
        if params.epsilon is None:
            raise ParameterError("the thresholded solver needs epsilon")
        return twin_greedy_fast(f, constraint, ground, params.epsilon)
    if name in ("samplegreedy", "sample_greedy"):
        return sample_greedy(f, constraint, ground, q=params.q, seed=params.seed or 0)
    if name in ("greedy", "classic_greedy"):
        return classic_greedy(f, constraint, ground)
    raise ParameterError(f"unknown algorithm {name!r}")
