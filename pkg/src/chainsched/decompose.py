"""Structure of the precedence DAG: closure, width and minimum chain covers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from chainsched.model import Instance, topological_order


def closure_matrix(n: int, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    """Boolean ``reach[a, b]`` = a directed path a -> b exists. Input must be acyclic."""
    reach = np.zeros((n, n), dtype=bool)
    succ: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        succ[a].append(b)
    order = topological_order(n, edges)
    if order is None:
        raise ValueError("closure of a cyclic relation")
    for u in reversed(order):
        for v in succ[u]:
            reach[u, v] = True
            reach[u] |= reach[v]
    return reach


@dataclass(frozen=True)
class ClosureMatrix:
    ids: tuple[str, ...]
    matrix: np.ndarray

    def reaches(self, a: str, b: str) -> bool:
        idx = {jid: i for i, jid in enumerate(self.ids)}
        return bool(self.matrix[idx[a], idx[b]])

    def pairs(self) -> Iterator[tuple[str, str]]:
        for a, b in zip(*np.nonzero(self.matrix)):
            yield self.ids[a], self.ids[b]

    def __len__(self) -> int:
        return int(self.matrix.sum())


def _reach(inst: Instance) -> np.ndarray:
    # memoized on the (immutable) instance
    cached = inst.__dict__.get("_reach")
    if cached is None:
        index = inst.index
        edges = [(index[a], index[b]) for a, b in inst.prec_edges]
        cached = closure_matrix(inst.n, edges)
        cached.setflags(write=False)
        inst.__dict__["_reach"] = cached
    return cached


def transitive_closure(inst: Instance) -> ClosureMatrix:
    return ClosureMatrix(inst.ids, _reach(inst))


def _max_matching(reach: np.ndarray, order: Sequence[int]) -> list[int]:
    """Kuhn's augmenting paths on the split graph ``u -> v`` for ``reach[u, v]``.

    ``order`` fixes the visiting order of both sides, which makes the matching
    (and therefore the extracted chains) deterministic. Returns ``match_left``
    where ``match_left[u]`` is u's matched successor or -1.
    """
    n = reach.shape[0]
    adj = [[v for v in order if reach[u, v]] for u in range(n)]
    match_left = [-1] * n
    match_right = [-1] * n
    for root in order:
        # iterative DFS for an augmenting path from root
        parent_right: dict[int, int] = {}
        stack = [(root, iter(adj[root]))]
        visited: set[int] = set()
        end = -1
        while stack and end < 0:
            u, it = stack[-1]
            for v in it:
                if v in visited:
                    continue
                visited.add(v)
                parent_right[v] = u
                if match_right[v] < 0:
                    end = v
                    break
                w = match_right[v]
                stack.append((w, iter(adj[w])))
                break
            else:
                stack.pop()
        if end < 0:
            continue
        v = end
        while True:
            u = parent_right[v]
            prev = match_left[u]
            match_left[u] = v
            match_right[v] = u
            if u == root:
                break
            v = prev
    return match_left


@dataclass(frozen=True)
class ChainDecomposition:
    chains: tuple[tuple[str, ...], ...]

    @property
    def k(self) -> int:
        return len(self.chains)


def _sorted_indices(inst: Instance) -> list[int]:
    return sorted(range(inst.n), key=lambda i: inst.ids[i])


def width(inst: Instance) -> int:
    """Size of a largest antichain, via Dilworth: n minus a maximum path-cover matching."""
    if inst.n == 0:
        return 0
    match = _max_matching(_reach(inst), _sorted_indices(inst))
    return inst.n - sum(1 for v in match if v >= 0)


def computed_chain_decomposition(inst: Instance) -> ChainDecomposition:
    """Minimum chain cover built from the matching, ignoring any declared chains."""
    reach = _reach(inst)
    order = _sorted_indices(inst)
    match = _max_matching(reach, order)
    has_pred = {v for v in match if v >= 0}
    chains = []
    for u in order:
        if u in has_pred:
            continue
        chain = [u]
        while match[chain[-1]] >= 0:
            chain.append(match[chain[-1]])
        chains.append(tuple(inst.ids[i] for i in chain))
    return ChainDecomposition(tuple(chains))


def min_chain_decomposition(inst: Instance) -> ChainDecomposition:
    """A partition into ``width(inst)`` chains.

    Declared chains are returned as-is when they are already minimal.
    """
    if inst.declared_chains is not None and len(inst.declared_chains) == width(inst):
        return ChainDecomposition(inst.declared_chains)
    return computed_chain_decomposition(inst)


def prec_consistent(inst: Instance) -> bool:
    reach = _reach(inst)
    if not reach.any():
        return True
    r, p, d = inst.arrays
    a, b = np.nonzero(reach)
    return bool(np.all(r[b] >= r[a] + p[a]) and np.all(d[a] <= d[b] - p[b]))


def proper_level(inst: Instance) -> int:
    """Max over jobs of how many other windows strictly contain its window on both ends."""
    if inst.n == 0:
        return 0
    r, _, d = inst.arrays
    contains = (r[None, :] < r[:, None]) & (d[:, None] < d[None, :])
    return int(contains.sum(axis=1).max())


def chain_uniform(inst: Instance) -> bool:
    """Every chain has a single (release, deadline, processing) triple.

    Judged on the declared chains when present, otherwise on the computed
    minimum decomposition.
    """
    chains = inst.declared_chains
    if chains is None:
        chains = computed_chain_decomposition(inst).chains
    return all(len({inst.job(j).type_key for j in chain}) <= 1 for chain in chains)
