"""Instances, schedules, feasibility checking and instance statistics."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

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

HORIZON_LIMIT = 2**61


class Objective(str, enum.Enum):
    FEASIBILITY = "feasible"
    MIN_MAKESPAN = "cmax"


@dataclass(frozen=True)
class Job:
    id: str
    release: int
    processing: int
    deadline: int

    @property
    def slack(self) -> int:
        return self.deadline - self.release - self.processing

    @property
    def window(self) -> int:
        return self.deadline - self.release

    @property
    def type_key(self) -> tuple[int, int, int]:
        return (self.release, self.deadline, self.processing)


@dataclass(frozen=True)
class Instance:
    """Job set plus a generating set of precedence edges ``(a, b)`` meaning a before b.

    Containers are normalized to tuples so instances can be shared freely.
    Call :func:`validate_instance` before handing one to a solver.
    """

    jobs: tuple[Job, ...]
    prec_edges: tuple[tuple[str, str], ...] = ()
    declared_chains: tuple[tuple[str, ...], ...] | None = None
    objective: Objective = Objective.MIN_MAKESPAN

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "prec_edges", tuple((a, b) for a, b in self.prec_edges))
        if self.declared_chains is not None:
            object.__setattr__(
                self, "declared_chains", tuple(tuple(c) for c in self.declared_chains)
            )
        object.__setattr__(self, "objective", Objective(self.objective))

    @property
    def n(self) -> int:
        return len(self.jobs)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.jobs)

    @cached_property
    def index(self) -> dict[str, int]:
        return {jid: i for i, jid in enumerate(self.ids)}

    def job(self, jid: str) -> Job:
        return self.jobs[self.index[jid]]

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(release, processing, deadline) as int64 arrays in job order."""
        r = np.array([j.release for j in self.jobs], dtype=np.int64)
        p = np.array([j.processing for j in self.jobs], dtype=np.int64)
        d = np.array([j.deadline for j in self.jobs], dtype=np.int64)
        return r, p, d

    def with_changes(self, **kwargs) -> "Instance":
        fields = dict(
            jobs=self.jobs,
            prec_edges=self.prec_edges,
            declared_chains=self.declared_chains,
            objective=self.objective,
        )
        fields.update(kwargs)
        return Instance(**fields)


def _check_int(value, what: str, jid: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise NegativeTime(f"job {jid!r}: {what} must be an integer, got {value!r}", (jid,))


def topological_order(n: int, edges: Iterable[tuple[int, int]]) -> list[int] | None:
    """Kahn's algorithm on index pairs; smallest index first. None if cyclic."""
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in edges:
        succ[a].append(b)
        indeg[b] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    order = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return order if len(order) == n else None


def validate_instance(raw: Instance) -> Instance:
    """Check every structural invariant of ``raw`` and return it.

    Raises the specific :mod:`chainsched.errors` subclass for the first
    problem found.
    """
    seen: set[str] = set()
    for job in raw.jobs:
        if job.id in seen:
            raise DuplicateId(f"duplicate job id {job.id!r}", (job.id,))
        seen.add(job.id)
        for what in ("release", "processing", "deadline"):
            _check_int(getattr(job, what), what, job.id)
        if job.release < 0 or job.deadline < 0:
            raise NegativeTime(f"job {job.id!r} has a negative release or deadline", (job.id,))
        if job.processing < 1:
            raise ZeroProcessing(f"job {job.id!r} has processing time < 1", (job.id,))
        if max(job.deadline, job.release, job.processing) > HORIZON_LIMIT:
            raise HorizonOverflow(f"job {job.id!r} exceeds the 2^61 time horizon", (job.id,))

    index = raw.index
    for a, b in raw.prec_edges:
        for x in (a, b):
            if x not in index:
                raise UnknownIdReference(f"precedence edge refers to unknown job {x!r}", (x,))
        if a == b:
            raise CyclicPrecedence(f"self-loop on job {a!r}", (a,))
    edges = [(index[a], index[b]) for a, b in raw.prec_edges]
    if topological_order(raw.n, edges) is None:
        stuck = _cycle_members(raw.n, edges)
        raise CyclicPrecedence(
            "precedence edges contain a cycle through " + ", ".join(raw.ids[i] for i in stuck),
            tuple(raw.ids[i] for i in stuck),
        )

    if raw.declared_chains is not None:
        _check_declared_chains(raw, edges)
    return raw


def _cycle_members(n: int, edges: list[tuple[int, int]]) -> list[int]:
    # nodes left after repeatedly peeling sources and sinks lie on or between cycles
    alive = set(range(n))
    changed = True
    while changed:
        changed = False
        has_in = {b for a, b in edges if a in alive and b in alive}
        has_out = {a for a, b in edges if a in alive and b in alive}
        for v in list(alive):
            if v not in has_in or v not in has_out:
                alive.discard(v)
                changed = True
    return sorted(alive)


def _check_declared_chains(raw: Instance, edges: list[tuple[int, int]]) -> None:
    from chainsched.decompose import closure_matrix

    index = raw.index
    chain_of: dict[str, int] = {}
    for ci, chain in enumerate(raw.declared_chains):
        if not chain:
            raise BadChainPartition(f"declared chain {ci} is empty")
        for jid in chain:
            if jid not in index:
                raise UnknownIdReference(f"declared chain refers to unknown job {jid!r}", (jid,))
            if jid in chain_of:
                raise BadChainPartition(f"job {jid!r} appears in more than one chain", (jid,))
            chain_of[jid] = ci
    missing = [jid for jid in raw.ids if jid not in chain_of]
    if missing:
        raise BadChainPartition(
            "declared chains do not cover jobs " + ", ".join(missing), tuple(missing)
        )
    for a, b in raw.prec_edges:
        if chain_of[a] != chain_of[b]:
            raise BadChainPartition(f"edge ({a!r}, {b!r}) crosses two chains", (a, b))
    reach = closure_matrix(raw.n, edges)
    for chain in raw.declared_chains:
        for a, b in zip(chain, chain[1:]):
            if not reach[index[a], index[b]]:
                raise BadChainPartition(
                    f"chain is not ordered by precedence: {a!r} does not precede {b!r}", (a, b)
                )


@dataclass(frozen=True)
class Schedule:
    starts: Mapping[str, int]

    def __post_init__(self) -> None:
        starts = dict(self.starts)
        for jid, s in starts.items():
            if isinstance(s, bool) or not isinstance(s, (int, np.integer)):
                raise NegativeTime(f"start of {jid!r} must be an integer, got {s!r}", (jid,))
            if s < 0:
                raise NegativeTime(f"start of {jid!r} is negative", (jid,))
            starts[jid] = int(s)
        object.__setattr__(self, "starts", starts)

    def completion(self, inst: Instance) -> dict[str, int]:
        return {jid: s + inst.job(jid).processing for jid, s in self.starts.items()}

    def order(self) -> list[str]:
        return sorted(self.starts, key=lambda jid: (self.starts[jid], jid))


@dataclass(frozen=True)
class Violation:
    kind: str  # "release" | "deadline" | "overlap" | "precedence"
    ids: tuple[str, ...]


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]
    cmax: int
    lmax: int | None

    @property
    def feasible(self) -> bool:
        return not self.violations


def makespan_and_lateness(inst: Instance, sched: Schedule) -> tuple[int, int | None]:
    if not inst.jobs:
        return 0, None
    comp = [sched.starts[j.id] + j.processing for j in inst.jobs]
    return max(comp), max(c - j.deadline for c, j in zip(comp, inst.jobs))


def validate_schedule(inst: Instance, sched: Schedule) -> FeasibilityReport:
    """List every violated feasibility condition of ``sched`` on ``inst``.

    Precedence is checked on the transitive closure as start-before-start.
    Violation lists are sorted, so the report does not depend on job order.
    """
    from chainsched.decompose import transitive_closure

    if set(sched.starts) != set(inst.ids) or len(sched.starts) != inst.n:
        extra = sorted(set(sched.starts) - set(inst.ids))
        missing = sorted(set(inst.ids) - set(sched.starts))
        raise JobSetMismatch(
            f"schedule/instance job sets differ (missing {missing}, extra {extra})",
            tuple(missing + extra),
        )
    violations: list[Violation] = []
    for job in inst.jobs:
        s = sched.starts[job.id]
        if s < job.release:
            violations.append(Violation("release", (job.id,)))
        if s + job.processing > job.deadline:
            violations.append(Violation("deadline", (job.id,)))

    if inst.n > 1:
        ids = np.array(inst.ids, dtype=object)
        s = np.array([sched.starts[j] for j in inst.ids], dtype=np.int64)
        e = s + inst.arrays[1]
        clash = (s[:, None] < e[None, :]) & (s[None, :] < e[:, None])
        for a, b in zip(*np.nonzero(np.triu(clash, k=1))):
            violations.append(Violation("overlap", tuple(sorted((ids[a], ids[b])))))

    closure = transitive_closure(inst)
    for a, b in closure.pairs():
        if sched.starts[a] > sched.starts[b]:
            violations.append(Violation("precedence", (a, b)))

    violations.sort(key=lambda v: (v.kind, v.ids))
    cmax, lmax = makespan_and_lateness(inst, sched)
    return FeasibilityReport(tuple(violations), cmax, lmax)


@dataclass(frozen=True)
class InstanceStats:
    n: int
    num_window_sizes: int
    num_processing_times: int
    num_job_types: int
    max_slack: int
    max_processing: int
    max_flexibility: Fraction
    width: int
    min_chain_count: int
    prec_consistent: bool
    chain_uniform: bool
    proper_level: int

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "num_window_sizes": self.num_window_sizes,
            "num_processing_times": self.num_processing_times,
            "num_job_types": self.num_job_types,
            "max_slack": self.max_slack,
            "max_processing": self.max_processing,
            "max_flexibility": str(self.max_flexibility),
            "width": self.width,
            "min_chain_count": self.min_chain_count,
            "prec_consistent": self.prec_consistent,
            "chain_uniform": self.chain_uniform,
            "proper_level": self.proper_level,
        }


def instance_stats(inst: Instance) -> InstanceStats:
    """All structural parameters of ``inst``.

    Maxima over an empty job set are reported as 0.
    """
    from chainsched import decompose

    jobs = inst.jobs
    chains = decompose.min_chain_decomposition(inst)
    return InstanceStats(
        n=inst.n,
        num_window_sizes=len({j.window for j in jobs}),
        num_processing_times=len({j.processing for j in jobs}),
        num_job_types=len({j.type_key for j in jobs}),
        max_slack=max((j.slack for j in jobs), default=0),
        max_processing=max((j.processing for j in jobs), default=0),
        max_flexibility=max((Fraction(j.window, j.processing) for j in jobs), default=Fraction(0)),
        width=decompose.width(inst),
        min_chain_count=len(chains.chains),
        prec_consistent=decompose.prec_consistent(inst),
        chain_uniform=decompose.chain_uniform(inst),
        proper_level=decompose.proper_level(inst),
    )


def make_instance(
    jobs: Sequence[tuple[str, int, int, int]],
    edges: Sequence[tuple[str, str]] = (),
    chains: Sequence[Sequence[str]] | None = None,
    objective: Objective | str = Objective.MIN_MAKESPAN,
) -> Instance:
    """Build and validate from ``(id, release, processing, deadline)`` tuples."""
    return validate_instance(
        Instance(
            jobs=tuple(Job(jid, r, p, d) for jid, r, p, d in jobs),
            prec_edges=tuple(edges),
            declared_chains=None if chains is None else tuple(tuple(c) for c in chains),
            objective=Objective(objective),
        )
    )


def chain_instance(chains: Sequence[Sequence[tuple[str, int, int, int]]], **kwargs) -> Instance:
    """Instance whose precedence is exactly the given chains, declared as such."""
    jobs = [job for chain in chains for job in chain]
    edges = [(a[0], b[0]) for chain in chains for a, b in zip(chain, chain[1:])]
    ids = [[job[0] for job in chain] for chain in chains if chain]
    return make_instance(jobs, edges, ids, **kwargs)
