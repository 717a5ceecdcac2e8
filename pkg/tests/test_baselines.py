import collections
import itertools

import numpy as np
import pytest

from chainsched.baselines import (
    canonicalize_schedule,
    drop_precedence_if_chain_uniform,
    edd_order,
    edd_schedule,
    oracle_solve,
    rescale_simultaneous_releases,
    solve_single_window,
    unscale_schedule,
)
from chainsched.decompose import transitive_closure
from chainsched.errors import InstanceTooLarge, NotChainUniform, PreconditionViolated, TooManyTies
from chainsched.generate import generate
from chainsched.model import Schedule, chain_instance, make_instance, validate_schedule

from conftest import as_jobs
from oracles import best_by_permutation


def test_edd_two_jobs():
    inst = make_instance([("a", 0, 2, 4), ("b", 0, 1, 2)])
    rep = edd_schedule(inst)
    assert rep.schedule.starts == {"a": 1, "b": 0}
    assert rep.lmax_edd == -1


def test_edd_follows_chain_order():
    inst = chain_instance([[("a", 0, 1, 3), ("b", 0, 1, 4), ("c", 1, 1, 5)]])
    assert [inst.ids[i] for i in edd_order(inst)] == ["a", "b", "c"]


def test_edd_waits_for_release():
    inst = make_instance([("a", 5, 1, 6), ("b", 7, 1, 20)])
    assert edd_schedule(inst).schedule.starts == {"a": 5, "b": 7}


def test_edd_does_not_enforce_deadlines():
    inst = make_instance([("a", 0, 3, 2)])
    assert edd_schedule(inst).lmax_edd == 1


def test_edd_empty():
    rep = edd_schedule(make_instance([]))
    assert rep.schedule.starts == {} and rep.lmax_edd is None


def test_edd_tie_break_by_release_then_id():
    inst = make_instance([("b", 0, 1, 5), ("a", 0, 1, 5), ("c", 0, 1, 4)])
    assert [inst.ids[i] for i in edd_order(inst)] == ["c", "a", "b"]


def test_single_window_staggered():
    inst = chain_instance([[("a", 0, 1, 3), ("b", 1, 1, 4), ("c", 2, 1, 5)]])
    res = solve_single_window(inst)
    assert res.feasible and res.schedule.starts == {"a": 0, "b": 1, "c": 2}


def test_single_window_capacity():
    inst = make_instance([(x, 0, 2, 5) for x in "abc"])
    assert not solve_single_window(inst).feasible


def test_single_window_preconditions():
    with pytest.raises(PreconditionViolated):
        solve_single_window(make_instance([("a", 0, 1, 3), ("b", 0, 1, 4)]))
    with pytest.raises(PreconditionViolated):
        solve_single_window(make_instance([("a", 0, 2, 5), ("b", 1, 1, 6)], [("a", "b")]))


def test_drop_precedence():
    inst = chain_instance(
        [[(f"a{i}", 0, 2, 9) for i in range(3)], [(f"b{i}", 1, 1, 7) for i in range(3)]]
    )
    dropped = drop_precedence_if_chain_uniform(inst)
    assert dropped.n == 6 and dropped.prec_edges == () and dropped.declared_chains is None
    assert len({j.type_key for j in dropped.jobs}) == 2
    assert drop_precedence_if_chain_uniform(make_instance([])).n == 0


def test_drop_precedence_rejects_mixed_chain():
    with pytest.raises(NotChainUniform):
        drop_precedence_if_chain_uniform(chain_instance([[("a", 0, 1, 9), ("b", 0, 2, 9)]]))


@pytest.mark.parametrize("seed", range(30))
def test_drop_precedence_keeps_type_multiset_and_canonicalizes(seed):
    inst = generate("chain-uniform", 2 + seed % 8, 1 + seed % 3, seed)
    dropped = drop_precedence_if_chain_uniform(inst)
    assert collections.Counter(j.type_key for j in inst.jobs) == collections.Counter(
        j.type_key for j in dropped.jobs
    )
    res = oracle_solve(dropped)
    assert res.feasible == oracle_solve(inst).feasible
    if res.feasible:
        fixed = canonicalize_schedule(inst, res.schedule)
        rep = validate_schedule(inst, fixed)
        assert rep.feasible and rep.cmax == res.cmax


def test_oracle_guard_chain_122(guards_122):
    assert oracle_solve(guards_122).cmax == 9


def test_oracle_counts_symmetric_orders():
    inst = make_instance([("a", 0, 1, 2), ("b", 0, 1, 2)])
    res = oracle_solve(inst, count_orders=True)
    assert res.cmax == 2 and res.optimal_orders == 2


def test_oracle_diamond_tight(diamond):
    tight = diamond.with_changes(
        jobs=tuple(j if j.id != "a" else j.__class__("a", 0, 1, 1) for j in diamond.jobs)
    )
    res = oracle_solve(tight, count_orders=True)
    assert res.cmax == 4 and res.optimal_orders == 2 and res.schedule.starts["a"] == 0


def test_oracle_cap(monkeypatch):
    inst = make_instance([(f"j{i}", 0, 1, 20) for i in range(11)])
    with pytest.raises(InstanceTooLarge):
        oracle_solve(inst)
    monkeypatch.setenv("SCHED_ORACLE_CAP", "3")
    with pytest.raises(InstanceTooLarge):
        oracle_solve(make_instance([(f"j{i}", 0, 1, 20) for i in range(4)]))
    monkeypatch.setenv("SCHED_ORACLE_CAP", "11")
    assert oracle_solve(inst).cmax == 11


def test_oracle_empty():
    res = oracle_solve(make_instance([]))
    assert res.feasible and res.cmax == 0 and res.lmax_opt is None


@pytest.mark.parametrize("seed", range(50))
def test_oracle_matches_permutation_brute_force(seed):
    inst = generate("general", 1 + seed % 7, 1 + seed % 3, seed)
    cmax, lmax, count = best_by_permutation(as_jobs(inst), inst.prec_edges)
    res = oracle_solve(inst, count_orders=True)
    assert res.cmax == cmax and res.lmax_opt == lmax
    if cmax is not None:
        assert res.optimal_orders == count
    assert validate_schedule(inst, res.lmax_schedule).lmax == lmax


@pytest.mark.parametrize("seed", range(40))
def test_left_shift_never_hurts(seed):
    inst = generate("general", 6, 2, seed)
    res = oracle_solve(inst)
    rng = np.random.default_rng(seed)
    sched = res.lmax_schedule
    order = sched.order()
    base = validate_schedule(inst, sched)
    # delay jobs in the same order; validate() still yields a schedule in that order
    t = 0
    starts = {}
    for jid in order:
        job = inst.job(jid)
        t = max(t, job.release) + int(rng.integers(0, 3))
        starts[jid] = t
        t += job.processing
    pushed = validate_schedule(inst, Schedule(starts))
    assert pushed.cmax >= base.cmax and pushed.lmax >= base.lmax


@pytest.mark.parametrize("seed", range(60))
def test_edd_bound_and_idle_structure(seed):
    inst = generate("agreeable-queues", 2 + seed % 8, 1 + seed % 3, seed)
    opt = oracle_solve(inst)
    rep = edd_schedule(inst, opt.lmax_opt)
    pmax = max(j.processing for j in inst.jobs)
    assert rep.bound_gap_certificate == rep.lmax_edd - opt.lmax_opt
    assert rep.bound_gap_certificate <= pmax - 1

    _assert_critical_block(inst, rep.schedule)


def _assert_critical_block(inst, sched):
    """Job-set argument behind the bound, checked on the EDD schedule itself.

    i is a job of maximum lateness; t <= C_i - p_i is the rightmost time with
    idle time in [t-1, t) or a job j with d_j > d_i completing at t. Jobs run
    in [t, C_i] must be released after t - p_j (or at or after t when no such j).
    """
    comp = sched.completion(inst)
    lateness = {k: comp[k] - inst.job(k).deadline for k in comp}
    i = min(comp, key=lambda k: (-lateness[k], comp[k]))
    ci, pi, di = comp[i], inst.job(i).processing, inst.job(i).deadline
    busy = set()
    for k, s in sched.starts.items():
        busy.update(range(s, comp[k]))
    ends = {c: k for k, c in comp.items()}
    t, pj = 0, None
    for cand in range(ci - pi, 0, -1):
        if cand - 1 not in busy:
            t = cand
            break
        j = ends.get(cand)
        if j is not None and inst.job(j).deadline > di:
            t, pj = cand, inst.job(j).processing
            break
    block = [k for k, s in sched.starts.items() if s >= t and comp[k] <= ci]
    assert i in block
    for k in block:
        if pj is None:
            assert inst.job(k).release >= t
        else:
            assert inst.job(k).release > t - pj


def test_rescale_example():
    inst = chain_instance([[("a", 0, 1, 4), ("b", 0, 1, 4)]])
    out = rescale_simultaneous_releases(inst, 1)
    assert [(j.release, j.processing, j.deadline) for j in out.jobs] == [(0, 2, 8), (1, 2, 9)]


def test_rescale_identity():
    inst = make_instance([("a", 0, 1, 4), ("b", 2, 3, 9)])
    assert rescale_simultaneous_releases(inst, 0).jobs == inst.jobs


def test_rescale_too_many_ties():
    inst = chain_instance([[(x, 0, 1, 9) for x in "abc"]])
    with pytest.raises(TooManyTies):
        rescale_simultaneous_releases(inst, 1)


def _tie_instance(seed):
    rng = np.random.default_rng(seed)
    chains, c = [], 0
    for _ in range(int(rng.integers(1, 4))):
        size = int(rng.integers(1, 4))
        chain = []
        for r in sorted(int(x) for x in rng.integers(0, 3, size=size)):
            p = int(rng.integers(1, 4))
            chain.append((f"j{c}", r, p, r + p + int(rng.integers(0, 6))))
            c += 1
        chains.append(chain)
    ties = max(collections.Counter((i, j[1]) for i, ch in enumerate(chains) for j in ch).values()) - 1
    return chain_instance(chains), ties


@pytest.mark.parametrize("seed", range(80))
def test_rescale_preserves_feasibility(seed):
    inst, ties = _tie_instance(seed)
    scaled = rescale_simultaneous_releases(inst, ties)
    a, b = oracle_solve(inst), oracle_solve(scaled)
    assert a.feasible == b.feasible
    if b.feasible:
        assert validate_schedule(inst, unscale_schedule(b.schedule, ties)).feasible
    for queue in scaled.declared_chains:
        rel = [scaled.job(j).release for j in queue]
        assert len(set(rel)) == len(rel)


def test_oracle_against_direct_scan_of_orders():
    inst = make_instance([("a", 0, 2, 6), ("b", 1, 1, 3), ("c", 0, 1, 6)])
    reports = [validate_schedule(inst, _earliest(inst, perm)) for perm in itertools.permutations("abc")]
    assert oracle_solve(inst).cmax == min(rep.cmax for rep in reports if rep.feasible)


def _earliest(inst, perm):
    t, starts = 0, {}
    for x in perm:
        starts[x] = max(t, inst.job(x).release)
        t = starts[x] + inst.job(x).processing
    return Schedule(starts)
