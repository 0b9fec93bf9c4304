"""Mechanized checks of the charging argument behind the twin-set solvers.

Given a finished run, its insertion log, and an exactly-optimal set, this
module classifies the optimal elements against the log, rebuilds the
backward-sweep charging maps into each side, and verifies every
inequality the approximation guarantee rests on.  A failure here means a
bug in a solver, a constraint, or an objective, not a tight instance.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .core import ContractViolation, InsertionLog, RunReport, ValueOracle, bitmask, members


class CertificationError(RuntimeError):
    """The charging-map construction could not be completed."""


@dataclass
class ClassifiedOptimal:
    """Partition of an optimal set O against the final sides S1, S2.

    Elements of O inside a side split by whether they were still addable
    to the *other* side at their own insertion moment: the plus classes
    were, the minus classes were not.  Elements outside both sides land
    in o3/o4 when they no longer fit the respective final side, and the
    leftovers form o5/o6.
    """

    o1_plus: int = 0
    o1_minus: int = 0
    o2_plus: int = 0
    o2_minus: int = 0
    o3: int = 0
    o4: int = 0
    o5: int = 0
    o6: int = 0

    def to_dict(self) -> dict:
        return {name: members(getattr(self, name)) for name in
                ("o1_plus", "o1_minus", "o2_plus", "o2_minus", "o3", "o4", "o5", "o6")}


@dataclass
class PiMapping:
    """Charging maps into each side; injective when p=1, preimages <= p otherwise."""

    pi1: dict[int, int] = field(default_factory=dict)
    pi2: dict[int, int] = field(default_factory=dict)

    def preimage_histogram(self) -> dict:
        out = {}
        for name, mapping in (("pi1", self.pi1), ("pi2", self.pi2)):
            sizes = Counter(Counter(mapping.values()).values())
            out[name] = {str(k): v for k, v in sorted(sizes.items())}
        return out


@dataclass
class InequalityRecord:
    name: str
    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "holds": self.holds}


def classify(log: InsertionLog, optimal: int, constraint) -> ClassifiedOptimal:
    """Assign each optimal element to its class given a finished run's log."""
    s1, s2 = log.replay()
    pre = {ent.element: masks for ent, masks in zip(log.entries, log.pre_masks())}
    cls = ClassifiedOptimal()
    for e in members(optimal & s1):
        if constraint.is_independent(pre[e][1] | (1 << e)):
            cls.o1_plus |= 1 << e
        else:
            cls.o1_minus |= 1 << e
    for e in members(optimal & s2):
        if constraint.is_independent(pre[e][0] | (1 << e)):
            cls.o2_plus |= 1 << e
        else:
            cls.o2_minus |= 1 << e
    outside = optimal & ~(s1 | s2)
    for e in members(outside):
        if not constraint.is_independent(s1 | (1 << e)):
            cls.o3 |= 1 << e
        if not constraint.is_independent(s2 | (1 << e)):
            cls.o4 |= 1 << e
    cls.o5 = outside & ~cls.o3
    cls.o6 = outside & ~cls.o4
    return cls


def _sweep(side_elements: list[int], pool: int, identity: int, constraint, p: int) -> dict[int, int]:
    """Backward sweep assigning pool elements to side elements.

    Walks the side from its last insertion to its first.  At step j the
    addable pool elements against the side's length-(j-1) prefix form
    A_j; identity-reserved elements charge to themselves, everything else
    charges to the step's own side element, at most p per target.  The
    pool must be exhausted when the sweep ends.
    """
    mapping: dict[int, int] = {}
    remaining = pool
    for j in range(len(side_elements), 0, -1):
        u_j = side_elements[j - 1]
        prefix = bitmask(side_elements[: j - 1])
        a_j = [x for x in members(remaining & ~prefix)
               if constraint.is_independent(prefix | (1 << x))]
        if p == 1:
            if (identity >> u_j) & 1:
                if u_j not in a_j:
                    raise CertificationError(
                        f"identity element {u_j} unavailable at its own step")
                chosen = [u_j]
            elif a_j:
                chosen = [a_j[0]]
            else:
                chosen = []
        else:
            if len(a_j) <= p:
                chosen = a_j
            elif (identity >> u_j) & 1:
                if u_j not in a_j:
                    raise CertificationError(
                        f"identity element {u_j} unavailable at its own step")
                chosen = [u_j] + [x for x in a_j if x != u_j][: p - 1]
            else:
                chosen = a_j[:p]
            if (identity >> u_j) & 1 and u_j not in chosen:
                raise CertificationError(f"identity element {u_j} displaced")
        for x in chosen:
            mapping[x] = u_j
            remaining &= ~(1 << x)
    if remaining:
        raise CertificationError(
            f"charging sweep left elements unassigned: {members(remaining)}")
    return mapping


def build_pi(log: InsertionLog, classes: ClassifiedOptimal, constraint, p: int = 1) -> PiMapping:
    """Construct both charging maps; raises CertificationError on failure."""
    if p < 1:
        raise ContractViolation("p must be >= 1")
    pool1 = classes.o1_plus | classes.o1_minus | classes.o2_minus | classes.o3
    pool2 = classes.o1_minus | classes.o2_plus | classes.o2_minus | classes.o4
    pi1 = _sweep(log.side_elements(1), pool1, classes.o1_plus | classes.o1_minus,
                 constraint, p)
    pi2 = _sweep(log.side_elements(2), pool2, classes.o2_plus | classes.o2_minus,
                 constraint, p)
    return PiMapping(pi1=pi1, pi2=pi2)


def check_pi_properties(log: InsertionLog, classes: ClassifiedOptimal, pi: PiMapping,
                        constraint, p: int = 1) -> list[tuple[str, bool]]:
    """Verify domain coverage, feasibility at the target's moment, identity
    on the prescribed subsets, and the preimage cap."""
    s1, s2 = log.replay()
    pre = {ent.element: masks for ent, masks in zip(log.entries, log.pre_masks())}
    results = []
    for side, mapping, pool, identity, side_mask, pre_idx in (
        (1, pi.pi1, classes.o1_plus | classes.o1_minus | classes.o2_minus | classes.o3,
         classes.o1_plus | classes.o1_minus, s1, 0),
        (2, pi.pi2, classes.o1_minus | classes.o2_plus | classes.o2_minus | classes.o4,
         classes.o2_plus | classes.o2_minus, s2, 1),
    ):
        results.append((f"pi{side}_domain", bitmask(mapping.keys()) == pool))
        results.append((f"pi{side}_targets", all((side_mask >> t) & 1 for t in mapping.values())))
        results.append((f"pi{side}_identity", all(mapping.get(e) == e for e in members(identity))))
        feasible = all(
            constraint.is_independent(pre[t][pre_idx] | (1 << e))
            for e, t in mapping.items()
        )
        results.append((f"pi{side}_feasible_at_target", feasible))
        worst = max(Counter(mapping.values()).values(), default=0)
        results.append((f"pi{side}_preimage_le_p", worst <= p))
    return results


def check_gain_bounds(f: ValueOracle, log: InsertionLog, classes: ClassifiedOptimal,
                      pi: PiMapping, variant: str = "exact", epsilon: float = 0.0,
                      tol: float = 1e-9, _val=None) -> list[InequalityRecord]:
    """The six class-wise gain inequalities.

    Each bounds the marginal value of one optimal class against a side by
    the logged gains of its charged targets; in the threshold variant the
    minus/outside classes pick up a (1+epsilon) factor.
    """
    if variant not in ("exact", "threshold"):
        raise ContractViolation(f"unknown variant {variant!r}")
    val = _val or (lambda mask: f.evaluate(mask))
    s1, s2 = log.replay()
    gains = log.gains()
    kappa = 1.0 + epsilon if variant == "threshold" else 1.0
    rows = [
        ("o1_plus_vs_s2", classes.o1_plus, s2, pi.pi1, 1.0),
        ("o2_plus_vs_s1", classes.o2_plus, s1, pi.pi2, 1.0),
        ("o1_minus_vs_s2", classes.o1_minus, s2, pi.pi2, kappa),
        ("o2_minus_vs_s1", classes.o2_minus, s1, pi.pi1, kappa),
        ("o3_vs_s1", classes.o3, s1, pi.pi1, kappa),
        ("o4_vs_s2", classes.o4, s2, pi.pi2, kappa),
    ]
    records = []
    for name, cls_mask, base, mapping, factor in rows:
        if cls_mask == 0:
            records.append(InequalityRecord(name, 0.0, 0.0, True))
            continue
        lhs = val(base | cls_mask) - val(base)
        rhs = factor * sum(gains[mapping[e]] for e in members(cls_mask))
        records.append(InequalityRecord(name, lhs, rhs, lhs <= rhs + tol))
    return records


def check_residuals(f: ValueOracle, log: InsertionLog, classes: ClassifiedOptimal,
                    variant: str = "exact", tau_min: float | None = None,
                    tol: float = 1e-9, _val=None) -> list[InequalityRecord]:
    """Leftover optimal elements must have been rejected for cause.

    Exact variant: their gain on the side they fit is non-positive.
    Threshold variant: that gain is below the smallest bar tested.
    """
    val = _val or (lambda mask: f.evaluate(mask))
    s1, s2 = log.replay()
    bound = 0.0 if variant == "exact" or tau_min is None else tau_min
    records = []
    for name, cls_mask, base in (("o5_vs_s1", classes.o5, s1), ("o6_vs_s2", classes.o6, s2)):
        if cls_mask == 0:
            records.append(InequalityRecord(name, 0.0, bound, True))
            continue
        fbase = val(base)
        worst = max(val(base | (1 << e)) - fbase for e in members(cls_mask))
        records.append(InequalityRecord(name, worst, bound, worst <= bound + tol))
    return records


def check_log_gains(f: ValueOracle, log: InsertionLog, tol: float = 1e-9, _val=None):
    """Replay every insertion and compare the recorded gain."""
    val = _val or (lambda mask: f.evaluate(mask))
    worst = 0.0
    for ent, (pre1, pre2) in zip(log.entries, log.pre_masks()):
        base = pre1 if ent.side == 1 else pre2
        recomputed = val(base | (1 << ent.element)) - val(base)
        worst = max(worst, abs(recomputed - ent.gain))
    return InequalityRecord("log_gain_replay", worst, 0.0, worst <= tol)


def check_global_bound(report: RunReport, optimal_value: float, variant: str = "exact",
                       epsilon: float = 0.0, p: int = 1, tol: float = 1e-9):
    """The end-to-end value inequality and the approximation ratio it implies."""
    fs = report.f_s1 + report.f_s2
    if variant == "exact":
        combined = InequalityRecord("optimal_le_2f1_plus_2f2", optimal_value, 2.0 * fs,
                                    optimal_value <= 2.0 * fs + tol)
        ratio_bound = 0.25
    else:
        rhs = (1.0 + (1.0 + epsilon) * p) * fs + 2.0 * epsilon * optimal_value
        combined = InequalityRecord("optimal_le_threshold_combination", optimal_value, rhs,
                                    optimal_value <= rhs + tol)
        ratio_bound = (1.0 - 2.0 * epsilon) / (2.0 * p + 2.0 + 2.0 * p * epsilon)
    ratio = InequalityRecord("implied_ratio", ratio_bound * optimal_value, report.f_star,
                             report.f_star >= ratio_bound * optimal_value - tol)
    degenerate = None
    if report.s2 == 0 or report.s1 == 0:
        lone = report.f_s1 if report.s2 == 0 else report.f_s2
        if variant == "exact":
            degenerate = InequalityRecord("lone_side_is_optimal", optimal_value, lone,
                                          abs(lone - optimal_value) <= tol)
        else:
            want = (1.0 - epsilon) * optimal_value
            degenerate = InequalityRecord("lone_side_within_1_minus_eps", want, lone,
                                          lone >= want - tol)
    return combined, ratio, degenerate


@dataclass
class CertificationReport:
    """Full result of certifying one run against one optimal set."""

    algorithm: str
    variant: str
    p: int
    epsilon: float
    optimal: int
    optimal_value: float
    classes: ClassifiedOptimal
    pi: PiMapping
    structural: list[tuple[str, bool]]
    inequalities: list[InequalityRecord]
    residuals: list[InequalityRecord]
    log_gain_check: InequalityRecord
    global_check: InequalityRecord
    ratio_check: InequalityRecord
    degenerate_check: InequalityRecord | None
    value_queries_used: int

    @property
    def ok(self) -> bool:
        records = self.inequalities + self.residuals + [self.log_gain_check,
                                                        self.global_check, self.ratio_check]
        if self.degenerate_check is not None:
            records.append(self.degenerate_check)
        return all(r.holds for r in records) and all(ok for _, ok in self.structural)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "variant": self.variant,
            "p": self.p,
            "epsilon": self.epsilon,
            "optimal": members(self.optimal),
            "optimal_value": self.optimal_value,
            "classes": self.classes.to_dict(),
            "pi_preimage_histogram": self.pi.preimage_histogram(),
            "structural": [{"name": n, "holds": ok} for n, ok in self.structural],
            "inequalities": [r.to_dict() for r in self.inequalities],
            "residuals": [r.to_dict() for r in self.residuals],
            "log_gain_replay": self.log_gain_check.to_dict(),
            "global_bound": self.global_check.to_dict(),
            "implied_ratio": self.ratio_check.to_dict(),
            "degenerate": None if self.degenerate_check is None else self.degenerate_check.to_dict(),
            "ok": self.ok,
            "value_queries_used": self.value_queries_used,
        }


def certify_run(f: ValueOracle, constraint, report: RunReport, optimal: int,
                optimal_value: float, p: int = 1, tol: float = 1e-9) -> CertificationReport:
    """Run the whole certification pipeline for one finished run."""
    variant = "threshold" if report.algorithm == "twin_greedy_fast" else "exact"
    epsilon = float(report.parameters.get("epsilon", 0.0)) if variant == "threshold" else 0.0
    tau_min = report.parameters.get("tau_min") if variant == "threshold" else None

    q0 = f.query_count
    cache: dict[int, float] = {}

    def val(mask):
        if mask not in cache:
            cache[mask] = f.evaluate(mask)
        return cache[mask]

    classes = classify(report.log, optimal, constraint)
    pi = build_pi(report.log, classes, constraint, p=p)
    structural = check_pi_properties(report.log, classes, pi, constraint, p=p)
    inequalities = check_gain_bounds(f, report.log, classes, pi, variant=variant,
                                     epsilon=epsilon, tol=tol, _val=val)
    residuals = check_residuals(f, report.log, classes, variant=variant,
                                tau_min=tau_min, tol=tol, _val=val)
    gain_check = check_log_gains(f, report.log, tol=tol, _val=val)
    global_check, ratio_check, degenerate = check_global_bound(
        report, optimal_value, variant=variant, epsilon=epsilon, p=p, tol=tol)
    return CertificationReport(
        algorithm=report.algorithm,
        variant=variant,
        p=p,
        epsilon=epsilon,
        optimal=optimal,
        optimal_value=optimal_value,
        classes=classes,
        pi=pi,
        structural=structural,
        inequalities=inequalities,
        residuals=residuals,
        log_gain_check=gain_check,
        global_check=global_check,
        ratio_check=ratio_check,
        degenerate_check=degenerate,
        value_queries_used=f.query_count - q0,
    )
