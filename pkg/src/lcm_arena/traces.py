"""Trace and schedule file formats.

A trace is JSONL: one object per executed round with exactly the fields
{round, activated, robots, decisions, verdict}. Floats are written with 17
significant digits so parsed values equal the originals bit-for-bit and a
re-serialized parse reproduces the file byte-for-byte.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping, Sequence

from .errors import ProtocolError

_FIELDS = ("round", "activated", "robots", "decisions", "verdict")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _pos(pair: Sequence[float]) -> str:
    return f"[{format_float(pair[0])},{format_float(pair[1])}]"


def serialize_record(rec: Mapping) -> str:
    """One trace line; field order and float format are part of the contract."""
    robots = ",".join(
        f'{{"pos":{_pos(r["pos"])},"light":{json.dumps(r["light"])}}}' for r in rec["robots"]
    )
    decisions = ",".join(
        f'{{"robot":{int(d["robot"])},"dest":{_pos(d["dest"])},"light":{json.dumps(d["light"])}}}'
        for d in rec["decisions"]
    )
    activated = ",".join(str(int(i)) for i in rec["activated"])
    return (
        f'{{"round":{int(rec["round"])},"activated":[{activated}],'
        f'"robots":[{robots}],"decisions":[{decisions}],'
        f'"verdict":{json.dumps(rec["verdict"])}}}'
    )


def serialize_trace(records: Iterable[Mapping]) -> str:
    return "".join(serialize_record(r) + "\n" for r in records)


def parse_record(line: str) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as e:
        raise ProtocolError(f"invalid trace line: {e}") from e
    if not isinstance(rec, dict) or set(rec) != set(_FIELDS):
        raise ProtocolError(
            f"trace line must carry exactly the fields {list(_FIELDS)}, got {sorted(rec)}"
        )
    return rec


def parse_trace(text: str) -> list[dict]:
    return [parse_record(line) for line in text.splitlines() if line.strip()]


def load_trace(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_trace(fh.read())


def write_trace(path: str, records: Iterable[Mapping]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_trace(records))


def load_schedule(path: str) -> list[list[int]]:
    """Activation script from either a JSON array of arrays or a trace file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.strip()
    if stripped.startswith("["):
        data = json.loads(stripped)
        if not isinstance(data, list) or not all(isinstance(s, list) for s in data):
            raise ProtocolError("schedule file must be a JSON array of activation arrays")
        return [[int(i) for i in s] for s in data]
    return [[int(i) for i in rec["activated"]] for rec in parse_trace(text)]
