"""EDD dispatching, polynomial special cases, and the exhaustive reference solver."""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from chainsched import _kernels
from chainsched.decompose import (
    _reach,
    chain_uniform,
    computed_chain_decomposition,
    prec_consistent,
)
from chainsched.errors import (
    InstanceTooLarge,
    NotChainUniform,
    PreconditionViolated,
    TooManyTies,
)
from chainsched.model import Instance, Job, Schedule, makespan_and_lateness, validate_instance
from chainsched.solver import SolveResult

DEFAULT_ORACLE_CAP = 10


@dataclass(frozen=True)
class EddReport:
    schedule: Schedule
    lmax_edd: int | None
    bound_gap_certificate: int | None = None


def edd_order(inst: Instance) -> list[int]:
    """Dispatch sequence (job indices) of non-delay EDD with precedence.

    At time t the precedence-available jobs released by t compete; the least
    ``(deadline, release, id)`` starts. If none is released yet, t jumps to
    the earliest release among precedence-available jobs.
    """
    reach = _reach(inst)
    n = inst.n
    npred = reach.sum(axis=0).astype(int).tolist()
    succs = [np.nonzero(reach[i])[0].tolist() for i in range(n)]
    jobs = inst.jobs
    available = {i for i in range(n) if npred[i] == 0}
    t = 0
    seq = []
    while available:
        ready = [i for i in available if jobs[i].release <= t]
        if not ready:
            t = min(jobs[i].release for i in available)
            continue
        j = min(ready, key=lambda i: (jobs[i].deadline, jobs[i].release, jobs[i].id))
        seq.append(j)
        available.remove(j)
        t += jobs[j].processing
        for s in succs[j]:
            npred[s] -= 1
            if npred[s] == 0:
                available.add(s)
    return seq


def _earliest_start(inst: Instance, order) -> Schedule:
    t = 0
    starts = {}
    for i in order:
        job = inst.jobs[int(i)]
        s = max(t, job.release)
        starts[job.id] = s
        t = s + job.processing
    return Schedule(starts)


def edd_schedule(inst: Instance, lmax_opt: int | None = None) -> EddReport:
    """EDD schedule, its maximum lateness, and the gap to ``lmax_opt`` if given.

    Deadlines are not enforced; the schedule meets them iff ``lmax_edd <= 0``.
    """
    sched = _earliest_start(inst, edd_order(inst))
    _, lmax = makespan_and_lateness(inst, sched)
    gap = None
    if lmax_opt is not None and lmax is not None:
        gap = lmax - lmax_opt
    return EddReport(sched, lmax, gap)


def solve_single_window(inst: Instance) -> SolveResult:
    """EDD on instances with a single window length and prec-consistent windows.

    The verdict is feasible iff the EDD schedule has no late job.
    """
    windows = {j.window for j in inst.jobs}
    if len(windows) > 1:
        raise PreconditionViolated(f"expected one window length, found {len(windows)}")
    if not prec_consistent(inst):
        raise PreconditionViolated("time windows are not prec-consistent")
    report = edd_schedule(inst)
    cmax, lmax = makespan_and_lateness(inst, report.schedule)
    if lmax is not None and lmax > 0:
        return SolveResult(False, None, None, "single-window", lmax=lmax)
    return SolveResult(True, cmax, report.schedule, "single-window", lmax=lmax)


def _queues(inst: Instance) -> tuple[tuple[str, ...], ...]:
    if inst.declared_chains is not None:
        return inst.declared_chains
    return computed_chain_decomposition(inst).chains


def drop_precedence_if_chain_uniform(inst: Instance) -> Instance:
    """Same jobs, no precedence. Only valid when every chain holds identical jobs."""
    if not chain_uniform(inst):
        raise NotChainUniform("some chain mixes different (release, deadline, processing)")
    return validate_instance(inst.with_changes(prec_edges=(), declared_chains=None))


def canonicalize_schedule(original: Instance, sched: Schedule) -> Schedule:
    """Reassign starts inside each chain so they increase in chain order.

    Turns a schedule of the precedence-free instance back into one that
    respects the original chains; chain members are interchangeable.
    """
    starts = dict(sched.starts)
    for chain in _queues(original):
        times = sorted(starts[j] for j in chain)
        for jid, s in zip(chain, times):
            starts[jid] = s
    return Schedule(starts)


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    cmax: int | None
    schedule: Schedule | None
    lmax_opt: int | None
    lmax_schedule: Schedule | None
    optimal_orders: int | None
    nodes: int

    def as_solve_result(self, inst: Instance) -> SolveResult:
        lmax = None
        if self.schedule is not None:
            _, lmax = makespan_and_lateness(inst, self.schedule)
        return SolveResult(self.feasible, self.cmax, self.schedule, "oracle", self.nodes, lmax)


def oracle_cap() -> int:
    raw = os.environ.get("SCHED_ORACLE_CAP")
    return int(raw) if raw else DEFAULT_ORACLE_CAP


def oracle_solve(inst: Instance, cap: int | None = None, count_orders: bool = False) -> OracleResult:
    """Exact optimum by enumerating precedence-respecting job orders.

    Each order is scheduled earliest-start, which is optimal for that order
    under both makespan and maximum lateness. Branches are cut by simple
    lower bounds. Returns the least makespan over deadline-feasible orders and,
    separately, the least maximum lateness over all orders.
    """
    cap = oracle_cap() if cap is None else cap
    if inst.n > cap:
        raise InstanceTooLarge(f"oracle limited to {cap} jobs, got {inst.n}")
    if inst.n > 62:
        raise InstanceTooLarge("oracle bitmasks hold at most 62 jobs")
    reach = _reach(inst)
    pred_mask = np.zeros(inst.n, dtype=np.int64)
    for j in range(inst.n):
        for i in np.nonzero(reach[:, j])[0]:
            pred_mask[j] |= np.int64(1) << np.int64(i)
    r, p, d = inst.arrays

    best, order, count, nodes = _kernels.oracle_search(r, p, d, pred_mask, 0, count_orders)
    feasible = best != _kernels.INF
    sched = _earliest_start(inst, order) if feasible else None

    lbest, lorder, _, lnodes = _kernels.oracle_search(r, p, d, pred_mask, 1, False)
    lsched = _earliest_start(inst, lorder) if inst.n else Schedule({})
    return OracleResult(
        feasible=feasible,
        cmax=int(best) if feasible else None,
        schedule=sched,
        lmax_opt=None if inst.n == 0 else int(lbest),
        lmax_schedule=lsched,
        optimal_orders=count if (count_orders and feasible) else None,
        nodes=nodes + lnodes,
    )


def rescale_simultaneous_releases(inst: Instance, ties: int) -> Instance:
    """Integer version of perturbing tied releases by multiples of 1/(ties+1).

    All times are multiplied by ``ties + 1``; within each queue the jobs that
    share a release get offsets ``0, 1, ...`` in queue order, added to both
    release and deadline. A queue may hold at most ``ties + 1`` jobs with the
    same release. Queues are the declared chains, else a minimum chain cover.
    """
    if ties < 0:
        raise TooManyTies("ties must be nonnegative")
    scale = ties + 1
    offset: dict[str, int] = {}
    for queue in _queues(inst):
        groups: dict[int, list[str]] = defaultdict(list)
        for jid in queue:
            groups[inst.job(jid).release].append(jid)
        for rel, members in groups.items():
            if len(members) > scale:
                raise TooManyTies(
                    f"{len(members)} jobs of one queue released at {rel}, limit {scale}",
                    tuple(members),
                )
            for o, jid in enumerate(members):
                offset[jid] = o
    jobs = tuple(
        Job(
            j.id,
            j.release * scale + offset.get(j.id, 0),
            j.processing * scale,
            j.deadline * scale + offset.get(j.id, 0),
        )
        for j in inst.jobs
    )
    return validate_instance(inst.with_changes(jobs=jobs))


def unscale_schedule(sched: Schedule, ties: int) -> Schedule:
    """Map a schedule of the rescaled instance back by floor division."""
    return Schedule({j: s // (ties + 1) for j, s in sched.starts.items()})
