"""
Plain-text and JSON formats.

Graphs use ``p <n> <m>`` followed by ``<u> <v>`` lines with 0-based ids; separators use
``separator <size>`` followed by one id per line; minors use ``minor <h>`` followed by
one line of ids per branch set. Traces and reports are JSON, benchmarks JSON-lines.
``#`` lines are comments everywhere. A path of ``-`` means stdin or stdout.
"""

import json
import logging
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any, Iterable, Iterator, TextIO

import numpy as np

from minorsep.config import PROFILES, ConstantsProfile
from minorsep.graph_core import Graph, VertexSet, build_graph
from minorsep.helpers import InputError
from minorsep.models import IterationRecord, MinorModel, RunTrace

logger = logging.getLogger(__name__)

TRACE_VERSION = 2
READABLE_TRACE_VERSIONS = (1, 2)


def _open_read(path) -> TextIO:
    if str(path) == "-":
        return sys.stdin
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    if str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")


def _content_lines(lines: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield lineno, stripped.split()


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError as exc:
        raise InputError(f"line {lineno}: expected an integer, got {token!r}") from exc


def parse_graph(
    lines: Iterable[str],
    *,
    max_edges: int | None = None,
    edges_per_vertex: int | None = None,
) -> Graph:
    """
    Parse the edge-list format. With ``max_edges`` set, or ``edges_per_vertex`` (a
    limit of that many edges per declared vertex), reading stops at the limit and the
    header count is not enforced.
    """
    rows = _content_lines(lines)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise InputError("empty graph file") from None
    if len(header) != 3 or header[0] != "p":
        raise InputError(f"line {lineno}: expected 'p <n> <m>', got {' '.join(header)!r}")
    n, m = _int(header[1], lineno), _int(header[2], lineno)
    if n < 0 or m < 0:
        raise InputError(f"line {lineno}: negative size in header")
    if edges_per_vertex is not None:
        bound = edges_per_vertex * n
        max_edges = bound if max_edges is None else min(max_edges, bound)
    limit = m if max_edges is None else min(m, max_edges)
    edges = []
    for lineno, tokens in rows:
        if len(edges) == limit:
            if max_edges is None:
                raise InputError(f"line {lineno}: more than the {m} declared edges")
            break
        if len(tokens) != 2:
            raise InputError(f"line {lineno}: expected '<u> <v>'")
        u, v = _int(tokens[0], lineno), _int(tokens[1], lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"line {lineno}: edge ({u}, {v}) is outside [0, {n})")
        edges.append((u, v))
    if len(edges) < limit:
        raise InputError(f"header declares {m} edges, found {len(edges)}")
    return build_graph(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))


def read_graph(
    path, *, max_edges: int | None = None, edges_per_vertex: int | None = None
) -> Graph:
    stream = _open_read(path)
    try:
        graph = parse_graph(
            stream, max_edges=max_edges, edges_per_vertex=edges_per_vertex
        )
    finally:
        if stream is not sys.stdin:
            stream.close()
    logger.debug("Read %r from %s", graph, path)
    return graph


def format_graph(graph: Graph) -> str:
    edges = graph.edges()
    body = "".join(f"{u} {v}\n" for u, v in edges.tolist())
    return f"p {graph.n} {graph.m}\n{body}"


def write_graph(graph: Graph, path) -> None:
    _write_text(path, format_graph(graph))


def format_separator(separator: VertexSet) -> str:
    body = "".join(f"{v}\n" for v in separator)
    return f"separator {len(separator)}\n{body}"


def parse_separator(lines: Iterable[str]) -> VertexSet:
    rows = _content_lines(lines)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise InputError("empty separator file") from None
    if len(header) != 2 or header[0] != "separator":
        raise InputError(f"line {lineno}: expected 'separator <size>'")
    size = _int(header[1], lineno)
    ids = [_int(tok, no) for no, tokens in rows for tok in tokens]
    if len(ids) != size:
        raise InputError(f"separator declares {size} vertices, found {len(ids)}")
    return VertexSet(ids)


def read_separator(path) -> VertexSet:
    stream = _open_read(path)
    try:
        return parse_separator(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()


def write_separator(separator: VertexSet, path) -> None:
    _write_text(path, format_separator(separator))


def format_minor(model: MinorModel) -> str:
    body = "".join(" ".join(map(str, s.tolist())) + "\n" for s in model.branch_sets)
    return f"minor {len(model.branch_sets)}\n{body}"


def parse_minor(lines: Iterable[str]) -> MinorModel:
    rows = _content_lines(lines)
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise InputError("empty minor file") from None
    if len(header) != 2 or header[0] != "minor":
        raise InputError(f"line {lineno}: expected 'minor <h>'")
    h = _int(header[1], lineno)
    sets = [[_int(tok, no) for tok in tokens] for no, tokens in rows]
    if len(sets) != h:
        raise InputError(f"minor declares {h} branch sets, found {len(sets)}")
    return MinorModel.from_lists(sets)


def read_minor(path) -> MinorModel:
    stream = _open_read(path)
    try:
        return parse_minor(stream)
    finally:
        if stream is not sys.stdin:
            stream.close()


def write_minor(model: MinorModel, path) -> None:
    _write_text(path, format_minor(model))


def trace_to_dict(trace: RunTrace) -> dict[str, Any]:
    return {
        "version": TRACE_VERSION,
        "n": trace.n,
        "h": trace.h,
        "seed": trace.seed,
        "bfs_on_component": trace.bfs_on_component,
        "vertices": None if trace.vertices is None else trace.vertices.tolist(),
        "contracted": trace.contracted,
        "profile": asdict(trace.profile),
        "records": [r.to_dict() for r in trace.records],
    }


def _profile_from_dict(data: dict[str, Any]) -> ConstantsProfile:
    known = {f.name for f in fields(ConstantsProfile)}
    unknown = set(data) - known
    if unknown:
        raise InputError(f"unknown profile fields in trace: {sorted(unknown)}")
    name = data.get("name", "custom")
    base = PROFILES.get(name)
    if base is not None and asdict(base) == data:
        return base
    return ConstantsProfile(**data)


def _check_version(data: dict[str, Any]) -> None:
    version = data.get("version", TRACE_VERSION)
    if version not in READABLE_TRACE_VERSIONS:
        raise InputError(f"unsupported trace version {version}")


def trace_from_dict(data: dict[str, Any]) -> RunTrace:
    """Rebuild a trace without weights or trees; :func:`replay_trace` restores them."""
    try:
        _check_version(data)
        records = [
            IterationRecord(
                t=int(r["t"]),
                separator=VertexSet(r.get("separator", [])),
                component_size=int(r["component_size"]),
                root=r.get("root"),
                total_weight=int(r["total_weight"]),
                checksum=str(r["checksum"]),
                returned=bool(r.get("returned", False)),
            )
            for r in data["records"]
        ]
        vertices = data.get("vertices")
        return RunTrace(
            n=int(data["n"]),
            h=int(data["h"]),
            profile=_profile_from_dict(data["profile"]),
            seed=int(data.get("seed", 0)),
            bfs_on_component=bool(data.get("bfs_on_component", False)),
            records=records,
            vertices=None if vertices is None else VertexSet(vertices),
            contracted=bool(data.get("contracted", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed trace: {exc}") from exc


def traces_to_dict(traces: Iterable[RunTrace]) -> dict[str, Any]:
    return {"version": TRACE_VERSION, "runs": [trace_to_dict(t) for t in traces]}


def traces_from_dict(data: dict[str, Any]) -> list[RunTrace]:
    """
    Every run of a trace file. A file holding a single run, as written by
    :func:`write_trace`, reads as a list of one.
    """
    if not isinstance(data, dict):
        raise InputError("malformed trace: expected a JSON object")
    if "runs" not in data:
        return [trace_from_dict(data)]
    _check_version(data)
    if not isinstance(data["runs"], list):
        raise InputError("malformed trace: 'runs' must be a list")
    return [trace_from_dict(run) for run in data["runs"]]


def _load_json(path) -> Any:
    stream = _open_read(path)
    try:
        return json.load(stream)
    except json.JSONDecodeError as exc:
        raise InputError(f"trace {path} is not valid JSON: {exc}") from exc
    finally:
        if stream is not sys.stdin:
            stream.close()


def write_trace(trace: RunTrace, path) -> None:
    _write_text(path, json.dumps(trace_to_dict(trace), indent=2) + "\n")


def write_traces(traces: Iterable[RunTrace], path) -> None:
    _write_text(path, json.dumps(traces_to_dict(traces), indent=2) + "\n")


def read_trace(path) -> RunTrace:
    data = _load_json(path)
    if isinstance(data, dict) and "runs" in data:
        runs = traces_from_dict(data)
        if len(runs) != 1:
            raise InputError(f"trace {path} holds {len(runs)} runs, expected one")
        return runs[0]
    return trace_from_dict(data)


def read_traces(path) -> list[RunTrace]:
    return traces_from_dict(_load_json(path))


def write_json(data: Any, path) -> None:
    _write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_jsonl(records: Iterable[Any], path) -> None:
    """One JSON object per line; records with ``to_dict`` are converted first."""
    lines = []
    for record in records:
        payload = record.to_dict() if hasattr(record, "to_dict") else record
        lines.append(json.dumps(payload, sort_keys=True) + "\n")
    _write_text(path, "".join(lines))
