"""Instance and result files.

Both are JSON documents written canonically: keys sorted, jobs sorted by id,
one job / edge / schedule entry per line, so files diff cleanly. Instance
grammar::

    {
      "chains": [["a", "b"], ["c"]],          optional, order kept
      "jobs": [
        {"d": 4, "id": "a", "p": 1, "r": 0},
        ...
      ],
      "objective": "cmax",                    or "feasible"; default "cmax"
      "prec": [["a", "b"], ...]               edges a -> b
    }

Parsing sorts jobs by id and edges lexicographically (dropping repeats),
so ``parse(serialize(parse(text))) == parse(text)``.
"""

from __future__ import annotations

import json
import re
from typing import Any

from chainsched.errors import SchedError
from chainsched.model import Instance, Job, Objective, Schedule, validate_instance


class FileFormatError(SchedError):
    """Malformed document. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, ids: tuple[str, ...] = ()) -> None:
        super().__init__(message, ids)
        self.line = line


def _dump(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(", ", ": "))


def _block(items: list[str]) -> str:
    if not items:
        return "[]"
    return "[\n    " + ",\n    ".join(items) + "\n  ]"


def serialize_instance(inst: Instance) -> str:
    jobs = sorted(inst.jobs, key=lambda j: j.id)
    parts = {}
    if inst.declared_chains is not None:
        parts["chains"] = _block([_dump(list(c)) for c in inst.declared_chains])
    parts["jobs"] = _block(
        [_dump({"id": j.id, "r": j.release, "p": j.processing, "d": j.deadline}) for j in jobs]
    )
    parts["objective"] = _dump(inst.objective.value)
    parts["prec"] = _block([_dump([a, b]) for a, b in sorted(set(inst.prec_edges))])
    body = ",\n".join(f"  {_dump(k)}: {v}" for k, v in parts.items())
    return "{\n" + body + "\n}\n"


def _line_of(text: str, token: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return lineno
    return None


def _job_line(text: str, jid: str) -> int | None:
    pattern = re.compile(r'"id"\s*:\s*' + re.escape(json.dumps(jid)))
    for lineno, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return lineno
    return _line_of(text, json.dumps(jid))


def _nonneg_int(value: Any, what: str, text: str, jid: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise FileFormatError(
            f"job {jid!r}: {what} must be a nonnegative integer, got {value!r}",
            _job_line(text, jid),
            (jid,),
        )
    return value


def parse_instance(text: str) -> Instance:
    """Parse and validate an instance document.

    Every problem surfaces as :class:`FileFormatError` with a line number
    where one can be located.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise FileFormatError("top level must be an object", 1)
    unknown = set(doc) - {"jobs", "prec", "chains", "objective"}
    if unknown:
        key = sorted(unknown)[0]
        raise FileFormatError(f"unknown key {key!r}", _line_of(text, json.dumps(key)))
    if "jobs" not in doc or not isinstance(doc["jobs"], list):
        raise FileFormatError('"jobs" must be a list', _line_of(text, '"jobs"') or 1)

    jobs = []
    for pos, entry in enumerate(doc["jobs"]):
        if not isinstance(entry, dict) or set(entry) != {"id", "r", "p", "d"}:
            raise FileFormatError(
                f"job #{pos} must have exactly the keys id, r, p, d", _line_of(text, '"jobs"')
            )
        jid = entry["id"]
        if not isinstance(jid, str) or not jid:
            raise FileFormatError(f"job #{pos} has a non-string id", _line_of(text, '"jobs"'))
        jobs.append(
            Job(
                jid,
                _nonneg_int(entry["r"], "r", text, jid),
                _nonneg_int(entry["p"], "p", text, jid),
                _nonneg_int(entry["d"], "d", text, jid),
            )
        )
    jobs.sort(key=lambda j: j.id)

    edges = doc.get("prec", [])
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges
    ):
        raise FileFormatError('"prec" must be a list of [from, to] id pairs', _line_of(text, '"prec"'))
    chains = doc.get("chains")
    if chains is not None and not (
        isinstance(chains, list)
        and all(isinstance(c, list) and all(isinstance(x, str) for x in c) for c in chains)
    ):
        raise FileFormatError('"chains" must be a list of id lists', _line_of(text, '"chains"'))
    try:
        objective = Objective(doc.get("objective", "cmax"))
    except ValueError:
        raise FileFormatError(
            'objective must be "cmax" or "feasible"', _line_of(text, '"objective"')
        ) from None

    raw = Instance(
        jobs=tuple(jobs),
        prec_edges=tuple(sorted({(a, b) for a, b in edges})),
        declared_chains=None if chains is None else tuple(tuple(c) for c in chains),
        objective=objective,
    )
    try:
        return validate_instance(raw)
    except FileFormatError:
        raise
    except SchedError as exc:
        line = _job_line(text, exc.ids[0]) if exc.ids else None
        raise FileFormatError(f"{type(exc).__name__}: {exc}", line, exc.ids) from None


def result_document(
    inst: Instance,
    feasible: bool,
    algorithm: str,
    cmax: int | None = None,
    lmax: int | None = None,
    schedule: Schedule | None = None,
    states_explored: int | None = None,
    wall_ms: float | None = None,
) -> dict:
    doc: dict[str, Any] = {"algorithm": algorithm, "feasible": feasible}
    if feasible and inst.objective is Objective.MIN_MAKESPAN and schedule is not None:
        doc["cmax"] = cmax
        doc["schedule"] = [{"id": j, "start": schedule.starts[j]} for j in sorted(schedule.starts)]
    if lmax is not None:
        doc["lmax"] = lmax
    stats = {}
    if states_explored is not None:
        stats["states_explored"] = states_explored
    if wall_ms is not None:
        stats["wall_ms"] = round(wall_ms, 3)
    if stats:
        doc["stats"] = stats
    return doc


def serialize_result(doc: dict) -> str:
    lines = []
    for key in sorted(doc):
        value = doc[key]
        if key == "schedule":
            lines.append(f"  {_dump(key)}: {_block([_dump(e) for e in value])}")
        else:
            lines.append(f"  {_dump(key)}: {_dump(value)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"

