"""Ground-set primitives, oracle contracts, and run artifacts.

Element sets are plain Python ints used as bitmasks over the dense ids
0..n-1.  This keeps set algebra (union, intersection, difference) single
expressions and makes the solver inner loops allocation-free.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


class ContractViolation(ValueError):
    """An operation was invoked outside its stated preconditions."""


class ParameterError(ValueError):
    """A solver parameter is outside its admissible range."""


# ---------------------------------------------------------------------------
# bitmask element sets


def bitmask(ids) -> int:
    """Build a bitmask set from an iterable of element ids."""
    m = 0
    for e in ids:
        m |= 1 << e
    return m


def members(mask: int) -> list[int]:
    """Element ids of a bitmask set, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class GroundSet:
    """Dense ground set; elements are the integer ids 0..n-1."""

    n: int
    labels: dict[int, str] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ContractViolation(f"ground size must be >= 0, got {self.n}")
        if self.labels is not None and set(self.labels) != set(range(self.n)):
            raise ContractViolation("labels must cover exactly the ids 0..n-1")

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def elements(self) -> range:
        return range(self.n)


# ---------------------------------------------------------------------------
# oracle contracts


class ValueOracle:
    """Set-function evaluator with a per-instance query counter.

    Subclasses implement `_value(mask)`.  `evaluate` is the only counted
    entry point: one call is one query, so a marginal gain against a
    caller-cached base value costs exactly one query.  Oracles hold no
    value caches of their own; solvers own theirs, which keeps the query
    count attributable to the algorithm under test.
    """

    def __init__(self):
        self.query_count = 0

    def evaluate(self, mask: int) -> float:
        self.query_count += 1
        return self._value(mask)

    def _value(self, mask: int) -> float:
        raise NotImplementedError


class CallableOracle(ValueOracle):
    """Adapter turning a plain ``mask -> float`` function into an oracle."""

    def __init__(self, fn):
        super().__init__()
        self._fn = fn

    def _value(self, mask: int) -> float:
        return float(self._fn(mask))


class IndependenceOracle:
    """Membership test for a hereditary independence family over 0..n-1.

    Besides the set-wise `is_independent`, constraints expose an
    incremental interface (`empty_state`, `can_add`, `add`) so solver
    inner loops can test single-element feasibility in O(1) amortized
    time instead of re-deriving structure from the full set.
    """

    def __init__(self, n: int):
        self.n = n
        self.check_count = 0

    def is_independent(self, mask: int) -> bool:
        if mask >> self.n:
            raise ContractViolation("set contains ids outside the ground set")
        self.check_count += 1
        return self._independent(mask)

    def _independent(self, mask: int) -> bool:
        raise NotImplementedError

    # incremental interface; the default falls back to set-wise testing
    def empty_state(self):
        return 0

    def can_add(self, state, e: int) -> bool:
        if not 0 <= e < self.n:
            raise ContractViolation(f"element {e} outside ground set of size {self.n}")
        self.check_count += 1
        return self._can_add(state, e)

    def _can_add(self, state, e: int) -> bool:
        return self._independent(state | (1 << e))

    def add(self, state, e: int):
        """Return the successor state after inserting e (e must be addable)."""
        return state | (1 << e)


# ---------------------------------------------------------------------------
# run artifacts


@dataclass
class LogEntry:
    element: int
    side: int  # 1 or 2
    position: int  # 0-based insertion index over both sides combined
    gain: float
    threshold: float | None = None  # acceptance bar active at insertion, if any

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "side": self.side,
            "position": self.position,
            "gain": self.gain,
            "threshold": self.threshold,
        }


@dataclass
class InsertionLog:
    """Ordered record of twin-set insertions.

    The log is the ground truth for replay: the sets grown on each side,
    the per-element insertion gain, and the prefix of either side that
    existed before any given insertion are all derivable from it.
    """

    entries: list[LogEntry] = field(default_factory=list)

    def append(self, element: int, side: int, gain: float, threshold: float | None = None):
        self.entries.append(LogEntry(element, side, len(self.entries), gain, threshold))

    def __len__(self) -> int:
        return len(self.entries)

    def replay(self) -> tuple[int, int]:
        """Rebuild the two sides from the log; returns (s1, s2) masks."""
        s1 = s2 = 0
        for ent in self.entries:
            if ent.side == 1:
                s1 |= 1 << ent.element
            else:
                s2 |= 1 << ent.element
        return s1, s2

    def pre_masks(self) -> list[tuple[int, int]]:
        """Per entry, the (side-1, side-2) masks as they were just before it."""
        out = []
        s1 = s2 = 0
        for ent in self.entries:
            out.append((s1, s2))
            if ent.side == 1:
                s1 |= 1 << ent.element
            else:
                s2 |= 1 << ent.element
        return out

    def pre(self, element: int) -> tuple[int, int]:
        """The (side-1, side-2) prefixes in place when `element` was inserted."""
        for ent, masks in zip(self.entries, self.pre_masks()):
            if ent.element == element:
                return masks
        raise KeyError(f"element {element} was never inserted")

    def side_elements(self, side: int) -> list[int]:
        """Elements of one side in insertion order."""
        return [ent.element for ent in self.entries if ent.side == side]

    def gains(self) -> dict[int, float]:
        return {ent.element: ent.gain for ent in self.entries}

    def validate(self):
        seen = 0
        for pos, ent in enumerate(self.entries):
            if ent.position != pos:
                raise ContractViolation("log positions must be consecutive from 0")
            if ent.side not in (1, 2):
                raise ContractViolation(f"bad side {ent.side}")
            if (seen >> ent.element) & 1:
                raise ContractViolation(f"element {ent.element} inserted twice")
            seen |= 1 << ent.element


@dataclass
class RunReport:
    """Everything a solver run produced, sufficient to reproduce it."""

    algorithm: str
    n: int
    parameters: dict
    s1: int
    s2: int
    s_star: int
    f_s1: float
    f_s2: float
    f_star: float
    log: InsertionLog
    value_queries: int
    independence_checks: int
    wall_time_s: float

    def __post_init__(self):
        if self.s1 & self.s2:
            raise ContractViolation("the two sides must be disjoint")
        if self.s_star not in (self.s1, self.s2):
            raise ContractViolation("returned solution must be one of the two sides")
        if self.f_star != max(self.f_s1, self.f_s2):
            raise ContractViolation("f_star must be the larger side value")

    @property
    def solution_size(self) -> int:
        return self.s_star.bit_count()

    def to_dict(self, include_timing: bool = True) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "parameters": dict(self.parameters),
            "s1": members(self.s1),
            "s2": members(self.s2),
            "s_star": members(self.s_star),
            "f_s1": self.f_s1,
            "f_s2": self.f_s2,
            "f_star": self.f_star,
            "solution_size": self.solution_size,
            "value_queries": self.value_queries,
            "independence_checks": self.independence_checks,
            "wall_time_s": self.wall_time_s if include_timing else 0.0,
            "log": [ent.to_dict() for ent in self.log.entries],
        }


# ---------------------------------------------------------------------------
# operations


def marginal_gain(oracle: ValueOracle, base_value: float, base: int, e: int) -> float:
    """Gain of adding e to `base`, given the cached value of `base`.

    Costs exactly one oracle query.  The caller is responsible for
    `base_value == oracle.evaluate(base)`.
    """
    if (base >> e) & 1:
        raise ContractViolation(f"element {e} already in the base set")
    return oracle.evaluate(base | (1 << e)) - base_value


def submodularity_check(oracle: ValueOracle, ground: GroundSet, trials: int = 200,
                        seed: int = 0, tol: float = 1e-9):
    """Randomized falsification test for submodularity.

    Samples X subseteq Y with a random partition Z_1..Z_t of Y\\X and checks
    f(Y|X) <= sum_j f(Z_j|X), plus the pairwise lattice inequality
    f(X)+f(Y) >= f(X u Y)+f(X n Y).  Returns (True, None) if no violation
    was found, else (False, witness) where the witness names the sets and
    both sides of the failed inequality.
    """
    rng = random.Random(seed)
    n = ground.n
    for _ in range(trials):
        y = rng.getrandbits(n) if n else 0
        x = y & (rng.getrandbits(n) if n else 0)
        rest = members(y & ~x)
        rng.shuffle(rest)
        t = rng.randint(1, len(rest)) if rest else 0
        parts = [0] * t
        for idx, e in enumerate(rest):
            parts[idx % t] |= 1 << e
        fx = oracle.evaluate(x)
        lhs = oracle.evaluate(y) - fx
        rhs = sum(oracle.evaluate(z | x) - fx for z in parts)
        if lhs > rhs + tol:
            return False, {
                "kind": "partition",
                "x": members(x),
                "y": members(y),
                "parts": [members(z) for z in parts],
                "lhs": lhs,
                "rhs": rhs,
            }
        a = rng.getrandbits(n) if n else 0
        b = rng.getrandbits(n) if n else 0
        lhs2 = oracle.evaluate(a | b) + oracle.evaluate(a & b)
        rhs2 = oracle.evaluate(a) + oracle.evaluate(b)
        if lhs2 > rhs2 + tol:
            return False, {
                "kind": "pairwise",
                "x": members(a),
                "y": members(b),
                "lhs": lhs2,
                "rhs": rhs2,
            }
    return True, None
