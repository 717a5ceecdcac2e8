"""Seeded random instances for tests, sweeps and benchmarks.

Profiles:

general
    ``width`` chains plus random forward edges between them, so the width is
    at most ``width``. Window lengths come from a pool of ``window_sizes``
    distinct values.
chain-uniform
    ``width`` chains, all jobs of a chain identical.
single-window
    one window length; edges only where the windows stay prec-consistent.
agreeable-queues
    ``width`` chains (queues) with one processing time per queue and
    releases and deadlines both increasing along each queue.

All times lie in ``[0, horizon]``.
"""

from __future__ import annotations

import numpy as np

from chainsched.decompose import chain_uniform, prec_consistent, width as dag_width
from chainsched.model import Instance, Job, Objective, validate_instance
from chainsched.reduction import ShuffleInstance

PROFILES = ("general", "chain-uniform", "single-window", "agreeable-queues")


def _split(rng: np.random.Generator, n: int, parts: int) -> list[int]:
    """Random composition of n into ``min(parts, n)`` positive sizes."""
    parts = max(1, min(parts, n))
    if n == 0:
        return []
    cuts = np.sort(rng.choice(np.arange(1, n), size=parts - 1, replace=False)) if parts > 1 else []
    bounds = [0, *[int(c) for c in cuts], n]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def _chains_instance(chains: list[list[Job]], extra_edges=(), objective=Objective.MIN_MAKESPAN):
    jobs = tuple(j for c in chains for j in c)
    edges = [(a.id, b.id) for c in chains for a, b in zip(c, c[1:])]
    edges.extend(extra_edges)
    declared = None if extra_edges else tuple(tuple(j.id for j in c) for c in chains if c)
    return validate_instance(
        Instance(jobs=jobs, prec_edges=tuple(edges), declared_chains=declared, objective=objective)
    )


def gen_general(rng, n, width, window_sizes=3, horizon=30, max_p=4, cross_prob=0.2):
    lengths = np.arange(2, max(3, horizon // 2) + 1)
    pool = rng.choice(lengths, size=min(window_sizes, len(lengths)), replace=False)
    rank = rng.permutation(n)
    sizes = _split(rng, n, width)
    chains: list[list[Job]] = []
    pos = 0
    for ci, size in enumerate(sizes):
        members = sorted(range(pos, pos + size), key=lambda k: rank[k])
        pos += size
        chain = []
        for k in members:
            w = int(rng.choice(pool))
            p = int(rng.integers(1, max_p + 1))
            r = int(rng.integers(0, max(1, horizon - w) + 1))
            chain.append(Job(f"j{k}", r, p, min(r + w, horizon)))
        chains.append(chain)
    by_id = {j.id: int(j.id[1:]) for c in chains for j in c}
    extra = []
    for ca in range(len(chains)):
        for cb in range(len(chains)):
            if ca == cb:
                continue
            for a in chains[ca]:
                for b in chains[cb]:
                    if rank[by_id[a.id]] < rank[by_id[b.id]] and rng.random() < cross_prob / n:
                        extra.append((a.id, b.id))
    return _chains_instance(chains, extra)


def gen_chain_uniform(rng, n, width, horizon=30, max_p=4):
    chains = []
    jid = 0
    for size in _split(rng, n, width):
        p = int(rng.integers(1, max_p + 1))
        r = int(rng.integers(0, horizon // 2 + 1))
        span = int(rng.integers(p, p * size + max_p + 1))
        d = min(r + span, horizon)
        chains.append([Job(f"j{jid + t}", r, p, d) for t in range(size)])
        jid += size
    return _chains_instance(chains)


def gen_single_window(rng, n, width, horizon=30, max_p=4, edge_prob=0.6):
    delta = int(rng.integers(max_p, 2 * max_p + 3))
    spread = min(horizon - delta, 2 * n)
    jobs = []
    for k in range(n):
        p = int(rng.integers(1, max_p + 1))
        r = int(rng.integers(0, spread + 1))
        jobs.append(Job(f"j{k}", r, p, r + delta))
    queue = rng.integers(0, max(1, width), size=n)
    edges = []
    for qi in range(max(1, width)):
        members = sorted((k for k in range(n) if queue[k] == qi), key=lambda k: (jobs[k].release, k))
        tail = None
        for k in members:
            if tail is None:
                tail = k
                continue
            a, b = jobs[tail], jobs[k]
            # with equal windows this one inequality is prec-consistency, and it composes
            if b.release - a.release >= max(a.processing, b.processing) and rng.random() < edge_prob:
                edges.append((a.id, b.id))
                tail = k
    return validate_instance(Instance(jobs=tuple(jobs), prec_edges=tuple(edges)))


def gen_agreeable_queues(rng, n, width, horizon=30, max_p=4):
    chains = []
    jid = 0
    for size in _split(rng, n, width):
        p = int(rng.integers(1, max_p + 1))
        top = max(size, horizon - p - 1)
        releases = np.sort(rng.choice(np.arange(0, top + 1), size=size, replace=False))
        slack = rng.integers(0, max_p * 3 + 1, size=size)
        deadlines = np.sort(releases + p + slack)
        chain = []
        for t in range(size):
            chain.append(Job(f"j{jid + t}", int(releases[t]), p, int(min(deadlines[t], horizon))))
        # clamping to the horizon keeps deadlines sorted
        chains.append(chain)
        jid += size
    return _chains_instance(chains)


def generate(profile: str, n: int, width: int, seed: int, window_sizes: int = 3, horizon: int = 30) -> Instance:
    rng = np.random.default_rng(seed)
    if profile == "general":
        inst = gen_general(rng, n, width, window_sizes=max(1, window_sizes), horizon=horizon)
    elif profile == "chain-uniform":
        inst = gen_chain_uniform(rng, n, width, horizon=horizon)
    elif profile == "single-window":
        inst = gen_single_window(rng, n, width, horizon=horizon)
    elif profile == "agreeable-queues":
        inst = gen_agreeable_queues(rng, n, width, horizon=horizon)
    else:
        raise ValueError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    problems = profile_violations(inst, profile, width, window_sizes)
    if problems:
        raise AssertionError(f"generator broke profile {profile!r}: {problems}")
    return inst


def profile_violations(inst: Instance, profile: str, width: int, window_sizes: int) -> list[str]:
    """Structural checks a generated instance must pass before it is emitted."""
    out = []
    windows = {j.window for j in inst.jobs}
    if profile == "general":
        if dag_width(inst) > max(1, width):
            out.append("width above request")
        if len(windows) > max(1, window_sizes):
            out.append("too many window sizes")
    elif profile == "chain-uniform":
        if not chain_uniform(inst):
            out.append("not chain-uniform")
        if dag_width(inst) > max(1, width):
            out.append("width above request")
    elif profile == "single-window":
        if len(windows) > 1:
            out.append("more than one window size")
        if not prec_consistent(inst):
            out.append("not prec-consistent")
    elif profile == "agreeable-queues":
        for chain in inst.declared_chains or ():
            jobs = [inst.job(j) for j in chain]
            if len({j.processing for j in jobs}) > 1:
                out.append("queue with mixed processing times")
            if any(a.release > b.release or a.deadline > b.deadline for a, b in zip(jobs, jobs[1:])):
                out.append("queue not agreeable")
    return out


def random_shuffle_instance(rng: np.random.Generator, max_v: int, max_l: int) -> ShuffleInstance:
    """About half yes-instances (split a random word), the rest perturbed."""
    n = int(rng.integers(0, max_v + 1))
    ell = int(rng.integers(1, max(1, max_l) + 1))
    v = "".join(rng.choice(["0", "1"], size=n))
    owner = rng.integers(0, ell, size=n)
    words = ["".join(v[k] for k in range(n) if owner[k] == i) for i in range(ell)]
    kind = rng.random()
    if kind < 0.45:
        pass
    elif kind < 0.9:
        # same letters, scrambled inside each word: usually a no-instance
        words = ["".join(rng.permutation(list(w))) if w else w for w in words]
    elif n:
        k = int(rng.integers(0, n))
        v = v[:k] + ("1" if v[k] == "0" else "0") + v[k + 1 :]
    return ShuffleInstance(tuple(words), v)
