"""Hot loops: forward expansion of the chain DP and the exhaustive order search.

Each kernel exists twice, a numba ``@njit`` version over int64 arrays and a
plain-Python version over Python ints. They implement the same algorithm and
return identical results; the parity tests hold them to that.

The backend is picked at import from ``CHAINSCHED_DISABLE_NUMBA`` (any of
``1/true/yes`` forces the Python path) and can be switched at runtime with
:func:`set_backend`. If numba cannot be imported the Python path is used.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit, types
    from numba.typed import Dict, List

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

INF = np.iinfo(np.int64).max
NEG_INF = np.iinfo(np.int64).min
# mixed-radix state keys must stay below this for the int64 kernel
KEY_LIMIT = 2**62

_disabled = os.environ.get("CHAINSCHED_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}
_use_numba = NUMBA_AVAILABLE and not _disabled


def backend() -> str:
    return "numba" if _use_numba else "python"


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"python"``; returns the previous backend name."""
    global _use_numba
    previous = backend()
    if name == "numba":
        if not NUMBA_AVAILABLE:
            raise RuntimeError("numba is not installed")
        _use_numba = True
    elif name == "python":
        _use_numba = False
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


# ---------------------------------------------------------------------------
# chain DP, forward (push) form
#
# State key = sum_i progress[i] * stride[i]. For each reachable state with a
# finite makespan we keep (value, chain index of the last job, its start).
# first_succ[x, i] is the 1-based position in chain i of the first closure
# successor of job x (len_i + 1 when none): x may be appended while chain i
# has progress < first_succ[x, i] for every other chain i.
# ---------------------------------------------------------------------------


def width_dp_python(chain_len, chain_jobs, r, p, d, first_succ):
    k = len(chain_len)
    chain_len = [int(x) for x in chain_len]
    chain_jobs = [[int(x) for x in row] for row in chain_jobs]
    r = [int(x) for x in r]
    p = [int(x) for x in p]
    d = [int(x) for x in d]
    first_succ = [[int(x) for x in row] for row in first_succ]
    stride = [1] * k
    for i in range(1, k):
        stride[i] = stride[i - 1] * (chain_len[i - 1] + 1)

    value = {0: 0}
    choice = {0: -1}
    start = {0: 0}
    frontier = [0]
    total = sum(chain_len)
    for _ in range(total):
        nxt = []
        for key in frontier:
            v = value[key]
            coords = [(key // stride[i]) % (chain_len[i] + 1) for i in range(k)]
            for i in range(k):
                ji = coords[i]
                if ji == chain_len[i]:
                    continue
                x = chain_jobs[i][ji]
                fs = first_succ[x]
                if any(i2 != i and fs[i2] <= coords[i2] for i2 in range(k)):
                    continue
                t = v if v > r[x] else r[x]
                c = t + p[x]
                if c > d[x]:
                    continue
                nk = key + stride[i]
                old = value.get(nk)
                if old is None:
                    value[nk] = c
                    choice[nk] = i
                    start[nk] = t
                    nxt.append(nk)
                elif c < old or (c == old and i < choice[nk]):
                    value[nk] = c
                    choice[nk] = i
                    start[nk] = t
        frontier = nxt
        if not frontier:
            break

    keys = np.fromiter(value.keys(), dtype=object, count=len(value))
    return (
        keys,
        np.array([value[kk] for kk in keys], dtype=object),
        np.array([choice[kk] for kk in keys], dtype=np.int64),
        np.array([start[kk] for kk in keys], dtype=object),
    )


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _width_dp_nb(chain_len, chain_jobs, r, p, d, first_succ):
        k = chain_len.shape[0]
        stride = np.ones(k, dtype=np.int64)
        for i in range(1, k):
            stride[i] = stride[i - 1] * (chain_len[i - 1] + 1)
        total = 0
        for i in range(k):
            total += chain_len[i]

        value = Dict.empty(key_type=types.int64, value_type=types.int64)
        choice = Dict.empty(key_type=types.int64, value_type=types.int64)
        start = Dict.empty(key_type=types.int64, value_type=types.int64)
        value[0] = 0
        choice[0] = -1
        start[0] = 0
        frontier = List.empty_list(types.int64)
        frontier.append(0)
        coords = np.zeros(k, dtype=np.int64)
        for _ in range(total):
            nxt = List.empty_list(types.int64)
            for key in frontier:
                v = value[key]
                for i in range(k):
                    coords[i] = (key // stride[i]) % (chain_len[i] + 1)
                for i in range(k):
                    ji = coords[i]
                    if ji == chain_len[i]:
                        continue
                    x = chain_jobs[i, ji]
                    blocked = False
                    for i2 in range(k):
                        if i2 != i and first_succ[x, i2] <= coords[i2]:
                            blocked = True
                            break
                    if blocked:
                        continue
                    t = v if v > r[x] else r[x]
                    c = t + p[x]
                    if c > d[x]:
                        continue
                    nk = key + stride[i]
                    if nk in value:
                        old = value[nk]
                        if c < old or (c == old and i < choice[nk]):
                            value[nk] = c
                            choice[nk] = i
                            start[nk] = t
                    else:
                        value[nk] = c
                        choice[nk] = i
                        start[nk] = t
                        nxt.append(nk)
            frontier = nxt
            if len(frontier) == 0:
                break

        m = len(value)
        keys = np.empty(m, dtype=np.int64)
        vals = np.empty(m, dtype=np.int64)
        chs = np.empty(m, dtype=np.int64)
        sts = np.empty(m, dtype=np.int64)
        pos = 0
        for key in value.keys():
            keys[pos] = key
            vals[pos] = value[key]
            chs[pos] = choice[key]
            sts[pos] = start[key]
            pos += 1
        return keys, vals, chs, sts


def width_dp(chain_len, chain_jobs, r, p, d, first_succ):
    """Run the chain DP; returns parallel arrays ``(keys, values, choices, starts)``.

    Only states with a finite makespan appear. The int64 kernel is used when
    the numba backend is active and every key fits in 62 bits.
    """
    n_states_bound = 1
    for length in chain_len:
        n_states_bound *= int(length) + 1
    if _use_numba and n_states_bound < KEY_LIMIT and len(chain_len) > 0:
        return _width_dp_nb(
            np.asarray(chain_len, dtype=np.int64),
            np.asarray(chain_jobs, dtype=np.int64).reshape(len(chain_len), -1),
            np.asarray(r, dtype=np.int64),
            np.asarray(p, dtype=np.int64),
            np.asarray(d, dtype=np.int64),
            np.asarray(first_succ, dtype=np.int64).reshape(len(r), len(chain_len)),
        )
    return width_dp_python(chain_len, chain_jobs, r, p, d, first_succ)


# ---------------------------------------------------------------------------
# exhaustive search over topological orders
#
# Every order is scheduled earliest-start (each job at max(previous
# completion, release)). mode 0 minimizes makespan among orders meeting all
# deadlines; mode 1 minimizes maximum lateness with deadlines ignored.
# pred_mask[j] has bit i set when job i must precede job j.
# Returns (best, best_order, optimal_order_count, nodes). best is INF when no
# order qualifies. Orders are only counted when count_orders is set, which
# disables pruning of ties.
# ---------------------------------------------------------------------------


def oracle_search_python(r, p, d, pred_mask, mode, count_orders):
    n = len(r)
    r = [int(x) for x in r]
    p = [int(x) for x in p]
    d = [int(x) for x in d]
    pred_mask = [int(x) for x in pred_mask]
    full = (1 << n) - 1
    if mode == 0:
        floor = max((r[i] + p[i] for i in range(n)), default=0)
        floor = max(floor, min(r, default=0) + sum(p))
    else:
        floor = NEG_INF
    best = [INF, 0, 0]  # value, count, nodes
    best_order: list[int] = []
    order: list[int] = []

    def bound_ok(lb):
        return lb <= best[0] if count_orders else lb < best[0]

    def visit(placed, time, late, rem):
        best[2] += 1
        if placed == full:
            val = time if mode == 0 else late
            if val < best[0]:
                best[0], best[1] = val, 1
                best_order[:] = order
            elif val == best[0]:
                best[1] += 1
            return
        for j in range(n):
            if placed >> j & 1 or pred_mask[j] & ~placed:
                continue
            s = time if time > r[j] else r[j]
            c = s + p[j]
            if mode == 0:
                if c > d[j] or not bound_ok(c + rem - p[j]):
                    continue
                ok = True
                for i in range(n):
                    if i != j and not placed >> i & 1:
                        si = c if c > r[i] else r[i]
                        if si + p[i] > d[i]:
                            ok = False
                            break
                if not ok:
                    continue
                lat = late
            else:
                lat = late if late > c - d[j] else c - d[j]
                lb = lat
                for i in range(n):
                    if i != j and not placed >> i & 1:
                        si = c if c > r[i] else r[i]
                        if si + p[i] - d[i] > lb:
                            lb = si + p[i] - d[i]
                if not bound_ok(lb):
                    continue
            order.append(j)
            visit(placed | (1 << j), c, lat, rem - p[j])
            order.pop()
            if not count_orders and best[0] <= floor:
                return

    visit(0, 0, NEG_INF, sum(p))
    return best[0], np.array(best_order, dtype=np.int64), best[1], best[2]


if NUMBA_AVAILABLE:

    @njit(cache=True)
    def _oracle_search_nb(r, p, d, pred_mask, mode, count_orders):
        n = r.shape[0]
        full = (np.int64(1) << n) - 1
        total = 0
        floor = NEG_INF
        if mode == 0:
            floor = 0
            rmin = INF
            for i in range(n):
                total += p[i]
                if r[i] + p[i] > floor:
                    floor = r[i] + p[i]
                if r[i] < rmin:
                    rmin = r[i]
            if n > 0 and rmin + total > floor:
                floor = rmin + total
        else:
            for i in range(n):
                total += p[i]

        best = INF
        count = 0
        nodes = 0
        best_order = np.empty(n, dtype=np.int64)
        order = np.empty(n, dtype=np.int64)
        tried = np.full(n + 1, -1, dtype=np.int64)
        time = np.zeros(n + 1, dtype=np.int64)
        late = np.full(n + 1, NEG_INF, dtype=np.int64)
        rem = np.zeros(n + 1, dtype=np.int64)
        rem[0] = total
        placed = np.int64(0)
        depth = 0
        nodes = 1
        if n == 0:
            return (0 if mode == 0 else NEG_INF), best_order, 1, 1

        while True:
            if depth == n:
                val = time[n] if mode == 0 else late[n]
                if val < best:
                    best = val
                    count = 1
                    best_order[:] = order
                elif val == best:
                    count += 1
                depth -= 1
                placed &= ~(np.int64(1) << order[depth])
                if not count_orders and best <= floor:
                    break
                continue

            found = -1
            fc = 0
            fl = 0
            j = tried[depth] + 1
            while j < n:
                bit = np.int64(1) << j
                if (placed & bit) == 0 and (pred_mask[j] & ~placed) == 0:
                    s = time[depth] if time[depth] > r[j] else r[j]
                    c = s + p[j]
                    if mode == 0:
                        lb = c + rem[depth] - p[j]
                        if c <= d[j] and (lb <= best if count_orders else lb < best):
                            ok = True
                            for i in range(n):
                                if i != j and (placed >> i) & 1 == 0:
                                    si = c if c > r[i] else r[i]
                                    if si + p[i] > d[i]:
                                        ok = False
                                        break
                            if ok:
                                found = j
                                fc = c
                                fl = late[depth]
                                break
                    else:
                        lat = late[depth] if late[depth] > c - d[j] else c - d[j]
                        lb = lat
                        for i in range(n):
                            if i != j and (placed >> i) & 1 == 0:
                                si = c if c > r[i] else r[i]
                                if si + p[i] - d[i] > lb:
                                    lb = si + p[i] - d[i]
                        if lb <= best if count_orders else lb < best:
                            found = j
                            fc = c
                            fl = lat
                            break
                j += 1

            if found >= 0:
                tried[depth] = found
                order[depth] = found
                placed |= np.int64(1) << found
                time[depth + 1] = fc
                late[depth + 1] = fl
                rem[depth + 1] = rem[depth] - p[found]
                depth += 1
                tried[depth] = -1
                nodes += 1
            else:
                tried[depth] = -1
                if depth == 0:
                    break
                depth -= 1
                placed &= ~(np.int64(1) << order[depth])
                if not count_orders and best <= floor:
                    break
        return best, best_order, count, nodes


def oracle_search(r, p, d, pred_mask, mode, count_orders=False):
    if _use_numba:
        best, order, count, nodes = _oracle_search_nb(
            np.asarray(r, dtype=np.int64),
            np.asarray(p, dtype=np.int64),
            np.asarray(d, dtype=np.int64),
            np.asarray(pred_mask, dtype=np.int64),
            np.int64(mode),
            bool(count_orders),
        )
        return int(best), order, int(count), int(nodes)
    return oracle_search_python(r, p, d, pred_mask, mode, count_orders)
