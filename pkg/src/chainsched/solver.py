"""Exact makespan minimization by dynamic programming over chain progress.

A state is the tuple of how many jobs of each chain are already scheduled;
its value is the least makespan of a feasible partial schedule covering
exactly those jobs. Appending the next job of chain ``i`` starts it at
``max(value, release)`` and is allowed only if it meets its deadline and
none of the jobs already counted in other chains is one of its successors.
With pure chains that last filter never fires.

States that no feasible partial schedule reaches are never stored; a missing
state *is* the infeasible value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from chainsched import _kernels
from chainsched.decompose import ChainDecomposition, _reach, min_chain_decomposition
from chainsched.errors import CrossChainEdge, InfeasibleNoSchedule, NotAChainPartition
from chainsched.model import Instance, Schedule, makespan_and_lateness


@dataclass(frozen=True)
class DpTable:
    """Finite DP entries keyed by progress tuple: ``(makespan, chain, start)``.

    ``chain`` is the index of the chain whose job was appended last on the
    argmin transition (``-1`` for the empty state), ``start`` that job's start.
    """

    chains: tuple[tuple[str, ...], ...]
    entries: dict[tuple[int, ...], tuple[int, int, int]] = field(repr=False)

    @property
    def full(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.chains)

    def value(self, progress: Sequence[int]) -> int | None:
        """Least makespan for ``progress``, or None when no feasible schedule covers it."""
        entry = self.entries.get(tuple(progress))
        return None if entry is None else entry[0]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SolveResult:
    feasible: bool
    cmax: int | None
    schedule: Schedule | None
    algorithm: str
    states_explored: int = 0
    lmax: int | None = None
    table: DpTable | None = field(default=None, repr=False, compare=False)


def _check_partition(inst: Instance, chains: ChainDecomposition) -> None:
    flat = [j for chain in chains.chains for j in chain]
    if sorted(flat) != sorted(inst.ids) or len(set(flat)) != len(flat):
        raise NotAChainPartition("chains do not partition the job set")
    reach = _reach(inst)
    index = inst.index
    for chain in chains.chains:
        for a, b in zip(chain, chain[1:]):
            if not reach[index[a], index[b]]:
                raise NotAChainPartition(f"{a!r} does not precede {b!r} within its chain", (a, b))


def _first_successors(inst: Instance, chains: Sequence[Sequence[str]]) -> np.ndarray:
    """``out[x, i]`` = 1-based position of x's first successor in chain i, else len+1."""
    reach = _reach(inst)
    index = inst.index
    out = np.empty((inst.n, len(chains)), dtype=np.int64)
    for i, chain in enumerate(chains):
        cols = [index[j] for j in chain]
        sub = reach[:, cols] if cols else np.zeros((inst.n, 0), dtype=bool)
        has = sub.any(axis=1)
        out[:, i] = np.where(has, sub.argmax(axis=1) + 1, len(chain) + 1)
    return out


def run_dp(inst: Instance, chains: Sequence[Sequence[str]], algorithm: str) -> SolveResult:
    """DP over the given chain partition with the successor filter on."""
    chains = tuple(tuple(c) for c in chains if c)
    index = inst.index
    k = len(chains)
    lengths = np.array([len(c) for c in chains], dtype=np.int64)
    width = int(lengths.max()) if k else 0
    chain_jobs = np.zeros((k, max(width, 1)), dtype=np.int64)
    for i, chain in enumerate(chains):
        chain_jobs[i, : len(chain)] = [index[j] for j in chain]
    r, p, d = inst.arrays

    if k == 0:
        keys, vals, chs, sts = [0], [0], [-1], [0]
    else:
        keys, vals, chs, sts = _kernels.width_dp(
            lengths, chain_jobs, r, p, d, _first_successors(inst, chains)
        )

    strides = [1] * k
    for i in range(1, k):
        strides[i] = strides[i - 1] * (int(lengths[i - 1]) + 1)
    keys = np.asarray(keys)
    # object dtype (python kernel) keeps arbitrary-size keys exact
    digits = (keys[:, None] // np.asarray(strides, dtype=keys.dtype)) % (lengths + 1).astype(keys.dtype)
    payload = zip(np.asarray(vals).tolist(), np.asarray(chs).tolist(), np.asarray(sts).tolist())
    entries = dict(zip(map(tuple, digits.tolist()), payload))
    table = DpTable(chains, entries)

    final = table.value(table.full)
    if final is None:
        return SolveResult(False, None, None, algorithm, len(table), None, table)
    sched = reconstruct_schedule(table, inst)
    _, lmax = makespan_and_lateness(inst, sched)
    return SolveResult(True, final, sched, algorithm, len(table), lmax, table)


def reconstruct_schedule(table: DpTable, inst: Instance) -> Schedule:
    """Walk argmin transitions back from the full state, placing each popped job."""
    progress = list(table.full)
    entry = table.entries.get(tuple(progress))
    if entry is None:
        raise InfeasibleNoSchedule("the full state is infeasible; nothing to reconstruct")
    starts: dict[str, int] = {}
    while any(progress):
        _, i, t = table.entries[tuple(progress)]
        starts[table.chains[i][progress[i] - 1]] = t
        progress[i] -= 1
    missing = set(inst.ids) - starts.keys()
    if missing:
        raise InfeasibleNoSchedule(f"table does not cover jobs {sorted(missing)}")
    return Schedule(starts)


def solve_chain_dp(inst: Instance, chains: ChainDecomposition) -> SolveResult:
    """Minimum makespan when the precedence is exactly the disjoint union of ``chains``."""
    _check_partition(inst, chains)
    reach = _reach(inst)
    chain_of = {j: ci for ci, chain in enumerate(chains.chains) for j in chain}
    a, b = np.nonzero(reach)
    for x, y in zip(a, b):
        if chain_of[inst.ids[x]] != chain_of[inst.ids[y]]:
            raise CrossChainEdge(
                f"{inst.ids[x]!r} precedes {inst.ids[y]!r} across chains",
                (inst.ids[x], inst.ids[y]),
            )
    return run_dp(inst, chains.chains, "chain-dp")


def solve_width_dp(inst: Instance) -> SolveResult:
    """Minimum makespan under an arbitrary precedence DAG, in ``n^O(width)`` states."""
    chains = min_chain_decomposition(inst)
    return run_dp(inst, chains.chains, "width-dp")
