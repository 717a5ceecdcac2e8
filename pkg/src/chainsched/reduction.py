"""Shuffle-product membership and the scheduling instances that encode it.

Words are strings over ``'0'``/``'1'``. When a word becomes jobs, ``'0'``
decodes to the integer ``p`` and ``'1'`` to ``q`` (``0 < p < q``).

Both constructions lay out guard jobs ``g0 < g1 < ... < g|v|`` whose
windows leave a gap of exactly ``v[i]`` time units between ``g(i-1)`` and
``g(i)`` (slot ``i``, 1-based). Each word ``u_i`` becomes a chain of jobs
``x{i}_{j}`` with processing ``u_i[j]``. A feasible schedule has to fill
every slot with one x-job of matching length, which spells out an
interleaving of the words equal to ``v``.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from chainsched.errors import (
    BadAlphabetValues,
    EquivalenceViolated,
    NonBinaryAlphabet,
    TooLarge,
)
from chainsched.model import Instance, Job, Objective, Schedule, validate_instance

BINARY = frozenset("01")
TRIVIAL_NO_ID = "trivial"
_XJOB = re.compile(r"^x(\d+)_(\d+)$")


@dataclass(frozen=True)
class ShuffleInstance:
    u_words: tuple[str, ...]
    v_word: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_words", tuple(self.u_words))
        for w in (*self.u_words, self.v_word):
            if not set(w) <= BINARY:
                raise NonBinaryAlphabet(f"word {w!r} is not over {{0, 1}}")


@dataclass(frozen=True)
class ShuffleWitness:
    """``maps[i][x - 1]`` = position in v (1-based) of letter x of word i."""

    maps: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ShuffleAnswer:
    member: bool
    witness: ShuffleWitness | None = None
    reason: str | None = None


def counts_agree(words: Sequence[str], v: str) -> bool:
    return Counter("".join(words)) == Counter(v)


def is_witness(words: Sequence[str], v: str, witness: ShuffleWitness) -> bool:
    if len(witness.maps) != len(words):
        return False
    used: list[int] = []
    for word, f in zip(words, witness.maps):
        if len(f) != len(word):
            return False
        if any(a >= b for a, b in zip(f, f[1:])):
            return False
        for x, pos in enumerate(f):
            if not 1 <= pos <= len(v) or v[pos - 1] != word[x]:
                return False
        used.extend(f)
    return sorted(used) == list(range(1, len(v) + 1))


def interleave(words: Sequence[str], v: str) -> ShuffleWitness | None:
    """Witness that ``v`` interleaves ``words``, or None. Works for any alphabet.

    Forward search over consumed-prefix tuples, one position of v at a time.
    """
    words = tuple(words)
    if len(v) != sum(map(len, words)):
        return None
    start = (0,) * len(words)
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {start: (start, -1)}
    frontier = [start]
    for ch in v:
        nxt = []
        for state in frontier:
            for i, w in enumerate(words):
                c = state[i]
                if c < len(w) and w[c] == ch:
                    new = state[:i] + (c + 1,) + state[i + 1 :]
                    if new not in parent:
                        parent[new] = (state, i)
                        nxt.append(new)
        frontier = nxt
        if not frontier:
            return None
    final = tuple(len(w) for w in words)
    if final not in parent:
        return None
    maps: list[list[int]] = [[] for _ in words]
    state, pos = final, len(v)
    while pos > 0:
        prev, i = parent[state]
        maps[i].append(pos)
        state, pos = prev, pos - 1
    return ShuffleWitness(tuple(tuple(reversed(m)) for m in maps))


def shuffle_member(si: ShuffleInstance) -> ShuffleAnswer:
    if not counts_agree(si.u_words, si.v_word):
        return ShuffleAnswer(False, None, "letter counts of v and the u-words differ")
    witness = interleave(si.u_words, si.v_word)
    if witness is None:
        return ShuffleAnswer(False, None, "no interleaving of the u-words spells v")
    return ShuffleAnswer(True, witness)


def enumerate_shuffle(words: Sequence[str], cap: int = 100_000) -> frozenset[str]:
    """Every distinct interleaving of ``words``. Total length is limited to 12."""
    words = tuple(words)
    total = sum(map(len, words))
    if total > 12:
        raise TooLarge(f"total length {total} exceeds 12")

    @lru_cache(maxsize=None)
    def suffixes(state: tuple[int, ...]) -> frozenset[str]:
        if all(c == len(w) for c, w in zip(state, words)):
            return frozenset({""})
        out: set[str] = set()
        for i, w in enumerate(words):
            c = state[i]
            if c < len(w):
                new = state[:i] + (c + 1,) + state[i + 1 :]
                out.update(w[c] + s for s in suffixes(new))
        return frozenset(out)

    result = suffixes((0,) * len(words))
    if len(result) > cap:
        raise TooLarge(f"{len(result)} interleavings exceed the cap of {cap}")
    return result


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def _check_pq(p: int, q: int) -> None:
    if not (isinstance(p, int) and isinstance(q, int)) or p <= 0 or q <= p:
        raise BadAlphabetValues(f"need integers 0 < p < q, got p={p!r}, q={q!r}")


def decode(word: str, p: int, q: int) -> list[int]:
    return [p if ch == "0" else q for ch in word]


def prefix_sums(values: Sequence[int]) -> list[int]:
    """``out[i]`` = sum of the first i values (``out[0] = 0``)."""
    out = [0]
    for x in values:
        out.append(out[-1] + x)
    return out


def trivial_no_instance() -> Instance:
    return validate_instance(Instance(jobs=(Job(TRIVIAL_NO_ID, 0, 2, 1),)))


def xjob_id(word: int, letter: int) -> str:
    """Id of the job for letter ``letter`` of word ``word``, both counted from 1."""
    return f"x{word}_{letter}"


def parse_xjob_id(jid: str) -> tuple[int, int] | None:
    m = _XJOB.match(jid)
    return (int(m.group(1)), int(m.group(2))) if m else None


def _assemble(guards: list[Job], words: list[list[Job]]) -> Instance:
    chains = [guards] + [w for w in words if w]
    jobs = tuple(j for chain in chains for j in chain)
    edges = tuple((a.id, b.id) for chain in chains for a, b in zip(chain, chain[1:]))
    return validate_instance(
        Instance(
            jobs=jobs,
            prec_edges=edges,
            declared_chains=tuple(tuple(j.id for j in chain) for chain in chains),
            objective=Objective.MIN_MAKESPAN,
        )
    )


def construct_1(si: ShuffleInstance, p: int, q: int) -> Instance:
    """Guards of length p with zero slack; x-jobs free over the whole horizon.

    Guard ``g_i`` is released at ``p*i + v[1] + ... + v[i]``. Every x-job has
    release 0 and the deadline of the last guard.
    """
    _check_pq(p, q)
    if not counts_agree(si.u_words, si.v_word):
        return trivial_no_instance()
    v = decode(si.v_word, p, q)
    S = prefix_sums(v)
    n = len(v)
    guards = [Job(f"g{i}", p * i + S[i], p, p * i + S[i] + p) for i in range(n + 1)]
    horizon = (n + 1) * p + S[n]
    words = [
        [Job(xjob_id(i, j), 0, val, horizon) for j, val in enumerate(decode(u, p, q), start=1)]
        for i, u in enumerate(si.u_words, start=1)
    ]
    return _assemble(guards, words)


def construct_2(si: ShuffleInstance, p: int, q: int) -> Instance:
    """Variant whose windows are consistent with the chains.

    Guards have length q and zero slack except the last one, which covers
    ``[r, r + delta)`` with ``delta = (|v|+1)*q + sum(v)`` so nothing can run
    after it. The x-job for letter j of a word is released at the start of
    slot j, ``j*q + v[1] + ... + v[j-1]``, with window length ``delta``.
    """
    _check_pq(p, q)
    if not counts_agree(si.u_words, si.v_word):
        return trivial_no_instance()
    v = decode(si.v_word, p, q)
    S = prefix_sums(v)
    n = len(v)
    delta = (n + 1) * q + S[n]
    guards = []
    for i in range(n + 1):
        r = q * i + S[i]
        length = q if i < n else delta
        guards.append(Job(f"g{i}", r, length, r + length))
    words = []
    for i, u in enumerate(si.u_words, start=1):
        chain = []
        for j, val in enumerate(decode(u, p, q), start=1):
            r = j * q + S[j - 1]
            chain.append(Job(xjob_id(i, j), r, val, r + delta))
        words.append(chain)
    return _assemble(guards, words)


CONSTRUCTIONS = {1: construct_1, 2: construct_2}


def guard_length(which: int, p: int, q: int) -> int:
    return p if which == 1 else q


def schedule_from_witness(
    si: ShuffleInstance, witness: ShuffleWitness, which: int, p: int, q: int
) -> Schedule:
    """Guards at their releases, letter j of word i at the start of slot ``f_i(j)``."""
    inst = CONSTRUCTIONS[which](si, p, q)
    g = guard_length(which, p, q)
    starts = {f"g{i}": inst.job(f"g{i}").release for i in range(len(si.v_word) + 1)}
    for i, f in enumerate(witness.maps, start=1):
        for j, slot in enumerate(f, start=1):
            starts[xjob_id(i, j)] = inst.job(f"g{slot - 1}").release + g
    return Schedule(starts)


def witness_from_schedule(si: ShuffleInstance, sched: Schedule) -> ShuffleWitness:
    """``f_i(j)`` = 1 + number of x-jobs that start before ``x{i}_{j}``."""
    xs = sorted(
        (s, jid) for jid, s in sched.starts.items() if parse_xjob_id(jid) is not None
    )
    rank = {jid: pos for pos, (_, jid) in enumerate(xs, start=1)}
    return ShuffleWitness(
        tuple(
            tuple(rank[xjob_id(i, j)] for j in range(1, len(u) + 1))
            for i, u in enumerate(si.u_words, start=1)
        )
    )


@dataclass(frozen=True)
class CertReport:
    construction: int
    shuffle_member: bool
    schedule_feasible: bool
    shuffle_witness: ShuffleWitness | None
    extracted_witness: ShuffleWitness | None
    states_explored: int

    @property
    def holds(self) -> bool:
        return self.shuffle_member == self.schedule_feasible


def certify_reduction(si: ShuffleInstance, which: int, p: int = 1, q: int = 2) -> CertReport:
    """Check instance-feasible iff v is a shuffle, on one input.

    The scheduling side is the width DP, the word side the shuffle search;
    they share no code. On a double yes, the schedule is turned back into a
    witness which must verify.
    """
    from chainsched.solver import solve_width_dp

    if len(si.v_word) > 10 or len(si.u_words) > 3:
        raise TooLarge("certification is limited to |v| <= 10 and at most 3 words")
    if which not in CONSTRUCTIONS:
        raise ValueError(f"construction must be 1 or 2, got {which!r}")
    answer = shuffle_member(si)
    inst = CONSTRUCTIONS[which](si, p, q)
    result = solve_width_dp(inst)
    extracted = None
    if answer.member and result.feasible:
        extracted = witness_from_schedule(si, result.schedule)
    report = CertReport(
        which, answer.member, result.feasible, answer.witness, extracted, result.states_explored
    )
    if not report.holds:
        raise EquivalenceViolated(f"construction {which} disagrees with membership on {si}")
    if extracted is not None and not is_witness(si.u_words, si.v_word, extracted):
        raise EquivalenceViolated(f"schedule of {si} does not decode to a valid witness")
    return report
