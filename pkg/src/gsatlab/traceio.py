"""Columnar text format for GSAT traces.

A trace file holds every try of one problem::

    #trace,version=1,problem_id=3,num_vars=500,num_clauses=2150,k=3
    try_id,flip_index,variable,delta,score_after,poss_size,best_delta
    #try,try_id=0,seed=1234,initial_score=1870,solved_at=,max_flips=1250,n_flips=1250
    0,1,17,4,1874,12,4
    ...

The first two lines are mandatory. Each try starts with a ``#try`` metadata
row followed by one row per flip; an empty ``solved_at`` means unsolved.
"""

from __future__ import annotations

import io
import os
from pathlib import Path

import numpy as np

from .engine import Trace

COLUMNS = ("try_id", "flip_index", "variable", "delta", "score_after", "poss_size", "best_delta")
HEADER = ",".join(COLUMNS)
VERSION = 1


class TraceFormatError(ValueError):
    pass


def _kv(line: str) -> dict[str, str]:
    out = {}
    for part in line.strip().split(",")[1:]:
        key, _, value = part.partition("=")
        out[key] = value
    return out


def file_header(problem_id: int, num_vars: int, num_clauses: int, k: int) -> str:
    return (
        f"#trace,version={VERSION},problem_id={problem_id},num_vars={num_vars},"
        f"num_clauses={num_clauses},k={k}\n{HEADER}\n"
    )


def format_try(trace: Trace) -> str:
    solved = "" if trace.solved_at is None else str(trace.solved_at)
    meta = (
        f"#try,try_id={trace.try_id},seed={trace.seed},initial_score={trace.initial_score},"
        f"solved_at={solved},max_flips={trace.max_flips},n_flips={trace.n_flips}\n"
    )
    n = len(trace)
    if n == 0:
        return meta
    table = np.column_stack([
        np.full(n, trace.try_id), np.arange(1, n + 1), trace.variables, trace.deltas,
        trace.scores, trace.poss_sizes, trace.best_deltas,
    ])
    buf = io.StringIO()
    np.savetxt(buf, table, fmt="%d", delimiter=",")
    return meta + buf.getvalue()


def format_traces(traces: list[Trace]) -> str:
    if not traces:
        raise ValueError("no traces to format")
    t0 = traces[0]
    parts = [file_header(t0.problem_id, t0.num_vars, t0.num_clauses, t0.k)]
    for t in traces:
        if (t.problem_id, t.num_vars, t.num_clauses, t.k) != (t0.problem_id, t0.num_vars, t0.num_clauses, t0.k):
            raise ValueError("all traces in one file must belong to the same problem")
        parts.append(format_try(t))
    return "".join(parts)


def write_traces(path, traces: list[Trace]) -> None:
    """Write ``traces`` atomically (temp file then rename)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(format_traces(traces))
    os.replace(tmp, path)


def parse_traces(text: str) -> list[Trace]:
    lines = text.split("\n", 2)
    if len(lines) < 2 or not lines[0].startswith("#trace,"):
        raise TraceFormatError("missing #trace header line")
    if lines[1].strip() != HEADER:
        raise TraceFormatError(f"unexpected column header {lines[1]!r}")
    head = _kv(lines[0])
    if int(head.get("version", -1)) != VERSION:
        raise TraceFormatError(f"unsupported trace version {head.get('version')}")
    try:
        problem_id, n, L, k = (int(head[key]) for key in ("problem_id", "num_vars", "num_clauses", "k"))
    except (KeyError, ValueError) as e:
        raise TraceFormatError(f"bad #trace header: {lines[0]!r}") from e

    body = lines[2] if len(lines) > 2 else ""
    traces = []
    for block in body.split("#try,")[1:]:
        meta_line, _, rows = block.partition("\n")
        meta = _kv("#try," + meta_line)
        try:
            table = np.loadtxt(io.StringIO(rows), delimiter=",", dtype=np.int64, ndmin=2) if rows.strip() else np.zeros((0, 7), np.int64)
        except ValueError as e:
            raise TraceFormatError(f"bad rows in try {meta.get('try_id')}: {e}") from e
        if table.shape[1] != len(COLUMNS):
            raise TraceFormatError(f"expected {len(COLUMNS)} columns, got {table.shape[1]}")
        try_id = int(meta["try_id"])
        if len(table) and (np.any(table[:, 0] != try_id) or np.any(table[:, 1] != np.arange(1, len(table) + 1))):
            raise TraceFormatError(f"try {try_id}: try_id/flip_index columns are inconsistent")
        solved = meta.get("solved_at", "")
        traces.append(Trace(
            num_vars=n, num_clauses=L, k=k, seed=int(meta["seed"]),
            initial_score=int(meta["initial_score"]), max_flips=int(meta["max_flips"]),
            variables=table[:, 2].astype(np.int32), deltas=table[:, 3].astype(np.int32),
            scores=table[:, 4].astype(np.int32), poss_sizes=table[:, 5].astype(np.int32),
            best_deltas=table[:, 6].astype(np.int32),
            solved_at=int(solved) if solved else None,
            problem_id=problem_id, try_id=try_id, n_flips=int(meta.get("n_flips", len(table))),
        ))
    return traces


def read_traces(path) -> list[Trace]:
    return parse_traces(Path(path).read_text())
