import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import twinopt as t
from twinopt.core import CallableOracle, LogEntry

import helpers


def test_ground_set_rejects_negative_n():
    with pytest.raises(t.ContractViolation):
        t.GroundSet(-1)


def test_ground_set_labels_must_cover_ids():
    t.GroundSet(2, labels={0: "a", 1: "b"})
    with pytest.raises(t.ContractViolation):
        t.GroundSet(2, labels={0: "a"})


@given(st.sets(st.integers(0, 63)), st.sets(st.integers(0, 63)))
def test_mask_algebra_inclusion_exclusion(a_ids, b_ids):
    a, b = t.bitmask(a_ids), t.bitmask(b_ids)
    assert (a | b).bit_count() + (a & b).bit_count() == a.bit_count() + b.bit_count()
    assert set(t.members(a)) == a_ids


def test_marginal_gain_modular_from_empty():
    f = t.ModularObjective([3.0, 2.0, 1.0])
    assert t.marginal_gain(f, 0.0, 0, 0) == 3.0


def test_marginal_gain_cut_edge_leaves():
    graph = t.WeightedGraph(2, [(0, 1, 1.0)])
    f = t.CutMonitorObjective(graph)
    base_value = f.evaluate(1)  # f({0}) = 1
    assert t.marginal_gain(f, base_value, 1, 1) == -1.0


def test_marginal_gain_matches_double_evaluation():
    graph, ground, oracle, _ = helpers.cut_instance(6, seed=5)
    f = oracle()
    ref = oracle()
    for mask, e in [(0b000101, 1), (0b110000, 0), (0, 3)]:
        base_value = f.evaluate(mask)
        gain = t.marginal_gain(f, base_value, mask, e)
        assert gain == pytest.approx(
            ref.evaluate(mask | (1 << e)) - ref.evaluate(mask), abs=1e-12)


def test_marginal_gain_rejects_member_element():
    f = t.ModularObjective([1.0, 1.0])
    with pytest.raises(t.ContractViolation):
        t.marginal_gain(f, 1.0, 0b01, 0)


def test_marginal_gain_costs_one_query():
    f = t.ModularObjective([1.0, 2.0])
    base_value = f.evaluate(0)
    before = f.query_count
    t.marginal_gain(f, base_value, 0, 1)
    assert f.query_count == before + 1


def test_query_counter_increments_once_per_evaluate():
    f = CallableOracle(lambda mask: float(mask.bit_count()))
    for expected in range(1, 6):
        f.evaluate(0b1011)
        assert f.query_count == expected


def test_submodularity_check_accepts_weighted_cut():
    graph, ground, oracle, _ = helpers.cut_instance(8, seed=3)
    ok, witness = t.submodularity_check(oracle(), ground, trials=1000, seed=1)
    assert ok and witness is None


def test_submodularity_check_rejects_supermodular_square():
    ground = t.GroundSet(4)
    f = CallableOracle(lambda mask: float(mask.bit_count() ** 2))
    ok, witness = t.submodularity_check(f, ground, trials=200, seed=1)
    assert not ok
    assert witness["lhs"] > witness["rhs"]


def test_insertion_log_replay_and_pre():
    log = t.InsertionLog()
    log.append(element=3, side=1, gain=2.0)
    log.append(element=1, side=2, gain=1.5)
    log.append(element=0, side=1, gain=0.5)
    s1, s2 = log.replay()
    assert t.members(s1) == [0, 3] and t.members(s2) == [1]
    assert log.pre(0) == (0b1000, 0b0010)
    assert log.side_elements(1) == [3, 0]
    log.validate()


def test_insertion_log_validate_rejects_duplicates():
    log = t.InsertionLog()
    log.append(element=2, side=1, gain=1.0)
    log.append(element=2, side=2, gain=1.0)
    with pytest.raises(t.ContractViolation):
        log.validate()


def test_insertion_log_validate_rejects_position_gap():
    log = t.InsertionLog(entries=[LogEntry(element=0, side=1, position=1, gain=1.0)])
    with pytest.raises(t.ContractViolation):
        log.validate()


def test_run_report_invariants_enforced():
    log = t.InsertionLog()
    with pytest.raises(t.ContractViolation):
        t.RunReport(algorithm="x", n=2, parameters={}, s1=0b01, s2=0b01, s_star=0b01,
                    f_s1=1.0, f_s2=1.0, f_star=1.0, log=log, value_queries=0,
                    independence_checks=0, wall_time_s=0.0)
    with pytest.raises(t.ContractViolation):
        t.RunReport(algorithm="x", n=2, parameters={}, s1=0b01, s2=0b10, s_star=0b01,
                    f_s1=1.0, f_s2=2.0, f_star=1.0, log=log, value_queries=0,
                    independence_checks=0, wall_time_s=0.0)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_solver_query_accounting_cross_check(seed):
    # the oracle's counter and the solver's own count must agree exactly
    graph, ground, oracle, constraint = helpers.cut_instance(7, seed=seed % 1000)
    f = oracle()
    report = t.twin_greedy(f, constraint(), ground)
    assert report.value_queries == f.query_count


def test_log_replay_matches_report_sides():
    graph, ground, oracle, constraint = helpers.cut_instance(9, seed=21)
    report = t.twin_greedy(oracle(), constraint(), ground)
    assert report.log.replay() == (report.s1, report.s2)
