import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainsched.errors import (
    BadChainPartition,
    CyclicPrecedence,
    DuplicateId,
    HorizonOverflow,
    JobSetMismatch,
    NegativeTime,
    UnknownIdReference,
    ZeroProcessing,
)
from chainsched.generate import generate
from chainsched.model import (
    Instance,
    Job,
    Schedule,
    instance_stats,
    make_instance,
    validate_instance,
    validate_schedule,
)
from chainsched.reduction import ShuffleInstance, construct_1
from chainsched.baselines import oracle_solve


def test_self_loop_is_cyclic():
    with pytest.raises(CyclicPrecedence):
        make_instance([("a", 0, 1, 1)], [("a", "a")])


def test_two_cycle_is_cyclic():
    with pytest.raises(CyclicPrecedence) as exc:
        make_instance([("a", 0, 1, 1), ("b", 0, 1, 1)], [("a", "b"), ("b", "a")])
    assert set(exc.value.ids) == {"a", "b"}


def test_longer_cycle_names_its_members():
    with pytest.raises(CyclicPrecedence) as exc:
        make_instance(
            [(x, 0, 1, 9) for x in "abcde"],
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "b"), ("d", "e")],
        )
    assert set(exc.value.ids) == {"b", "c", "d"}


def test_single_job_is_valid():
    inst = make_instance([("a", 0, 1, 1)])
    assert inst.n == 1


@pytest.mark.parametrize(
    "jobs, edges, chains, error",
    [
        ([("a", 0, 1, 1), ("a", 0, 1, 2)], [], None, DuplicateId),
        ([("a", 0, 1, 1)], [("a", "zz")], None, UnknownIdReference),
        ([("a", -1, 1, 1)], [], None, NegativeTime),
        ([("a", 0, 1, -3)], [], None, NegativeTime),
        ([("a", 0, 0, 1)], [], None, ZeroProcessing),
        ([("a", 0, 1, 2**62)], [], None, HorizonOverflow),
        ([("a", 0, 1, 1), ("b", 0, 1, 1)], [], [["a"]], BadChainPartition),
        ([("a", 0, 1, 1), ("b", 0, 1, 1)], [], [["a", "b"]], BadChainPartition),
        ([("a", 0, 1, 1), ("b", 0, 1, 1)], [("a", "b")], [["a"], ["b"]], BadChainPartition),
        ([("a", 0, 1, 1), ("b", 0, 1, 1)], [("a", "b")], [["a", "b"], ["a"]], BadChainPartition),
        ([("a", 0, 1, 1)], [], [["a"], []], BadChainPartition),
        ([("a", 0, 1, 1)], [], [["a", "q"]], UnknownIdReference),
    ],
)
def test_invalid_instances(jobs, edges, chains, error):
    with pytest.raises(error):
        make_instance(jobs, edges, chains)


def test_non_integer_time_rejected():
    with pytest.raises(NegativeTime):
        validate_instance(Instance(jobs=(Job("a", 0.5, 1, 2),)))


def test_individually_infeasible_job_is_allowed_in_data():
    inst = make_instance([("a", 0, 3, 2)])
    assert instance_stats(inst).max_slack == -1


def test_empty_schedule_is_feasible_with_zero_makespan():
    inst = make_instance([])
    rep = validate_schedule(inst, Schedule({}))
    assert rep.feasible and rep.cmax == 0 and rep.lmax is None


def test_guard_chain_schedule_feasible(guards_122):
    inst = make_instance([("a", 0, 1, 1), ("b", 2, 1, 3)], [("a", "b")])
    rep = validate_schedule(inst, Schedule({"a": 0, "b": 2}))
    assert rep.feasible and rep.cmax == 3
    rep = validate_schedule(guards_122, Schedule({"g0": 0, "g1": 2, "g2": 5, "g3": 8}))
    assert rep.feasible and rep.cmax == 9 and rep.lmax == 0


def test_overlap_reported_on_pair():
    inst = make_instance([("a", 0, 2, 4), ("b", 0, 2, 4)])
    rep = validate_schedule(inst, Schedule({"a": 0, "b": 1}))
    assert not rep.feasible
    assert [(v.kind, v.ids) for v in rep.violations] == [("overlap", ("a", "b"))]


def test_each_violation_kind(diamond):
    rep = validate_schedule(diamond, Schedule({"a": 3, "b": 0, "c": 1, "d": 2}))
    kinds = {v.kind for v in rep.violations}
    assert kinds == {"precedence"}
    # a is after all its successors, d after b and c
    assert ("precedence", ("a", "d")) in [(v.kind, v.ids) for v in rep.violations]
    late = make_instance([("a", 5, 2, 6)])
    rep = validate_schedule(late, Schedule({"a": 4}))
    assert {v.kind for v in rep.violations} == {"release"}
    rep = validate_schedule(late, Schedule({"a": 5}))
    assert {v.kind for v in rep.violations} == {"deadline"}
    assert rep.lmax == 1


def test_precedence_uses_closure():
    inst = make_instance([(x, 0, 1, 9) for x in "abc"], [("a", "b"), ("b", "c")])
    rep = validate_schedule(inst, Schedule({"a": 2, "b": 0, "c": 1}))
    pairs = {v.ids for v in rep.violations if v.kind == "precedence"}
    assert ("a", "c") in pairs and ("a", "b") in pairs


def test_job_set_mismatch():
    inst = make_instance([("a", 0, 1, 1)])
    with pytest.raises(JobSetMismatch):
        validate_schedule(inst, Schedule({"b": 0}))
    with pytest.raises(JobSetMismatch):
        validate_schedule(inst, Schedule({"a": 0, "b": 0}))


def test_schedule_rejects_negative_start():
    with pytest.raises(NegativeTime):
        Schedule({"a": -1})


@given(st.integers(0, 10_000), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_validate_schedule_ignores_job_order(seed, rnd):
    inst = generate("general", 6, 3, seed)
    starts = {j.id: rnd.randrange(0, 30) for j in inst.jobs}
    jobs = list(inst.jobs)
    rnd.shuffle(jobs)
    shuffled = validate_instance(inst.with_changes(jobs=tuple(jobs), declared_chains=None))
    a = validate_schedule(inst, Schedule(starts))
    b = validate_schedule(shuffled, Schedule(starts))
    assert a == b


def test_stats_single_job():
    stats = instance_stats(make_instance([("a", 0, 1, 3)]))
    assert stats.max_slack == 2 and stats.proper_level == 0
    assert stats.max_flexibility == 3


def test_stats_antichain_of_three():
    stats = instance_stats(make_instance([(x, 0, 1, 5) for x in "abc"]))
    assert stats.width == 3 and stats.min_chain_count == 3


def test_stats_construction1_window_sizes():
    inst = construct_1(ShuffleInstance(("011",), "011"), 1, 2)
    assert instance_stats(inst).num_window_sizes == 2


def test_stats_empty_instance():
    stats = instance_stats(make_instance([]))
    assert stats.n == 0 and stats.width == 0 and stats.max_slack == 0


@pytest.mark.parametrize("seed", range(40))
def test_stats_invariants(seed):
    inst = generate("general", 1 + seed % 9, 3, seed, window_sizes=1 + seed % 4)
    s = instance_stats(inst)
    assert s.num_window_sizes <= s.num_job_types <= s.n
    assert s.min_chain_count == s.width
    assert s.max_slack == max(j.deadline - j.release - j.processing for j in inst.jobs)
    if s.num_job_types == 1:
        assert s.num_window_sizes == 1 and s.num_processing_times == 1


@pytest.mark.parametrize("seed", range(25))
def test_oracle_makespan_lower_bounds(seed):
    inst = generate("general", 7, 3, seed)
    res = oracle_solve(inst)
    if not res.feasible:
        return
    assert res.cmax >= max(j.release + j.processing for j in inst.jobs)
    # after the last idle point the machine runs the remaining jobs back to back
    comp = res.schedule.completion(inst)
    order = res.schedule.order()
    last_idle = 0
    for prev, nxt in zip(order, order[1:]):
        if res.schedule.starts[nxt] > comp[prev]:
            last_idle = order.index(nxt)
    tail = order[last_idle:]
    start = res.schedule.starts[tail[0]]
    assert res.cmax == start + sum(inst.job(j).processing for j in tail)
    assert start >= min(inst.job(j).release for j in tail)


def test_random_instances_round_trip_through_make_instance():
    rnd = random.Random(3)
    jobs = [(f"j{i}", rnd.randrange(5), rnd.randrange(1, 4), rnd.randrange(5, 15)) for i in range(5)]
    inst = make_instance(jobs, [("j0", "j1")])
    assert inst.job("j3").release == jobs[3][1]
