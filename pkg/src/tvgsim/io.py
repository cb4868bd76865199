"""File formats: the graph text format and the scenario JSON format."""

from __future__ import annotations

import json
import re
from typing import Optional

from .errors import DomainError, ParseError
from .graphs import StaticGraph, make_edge
from .tvg import PeriodicTail, PresenceSchedule, Tvg

_ID_RE = re.compile(r"^[A-Za-z0-9_]+$")


def parse_graph_text(text: str) -> StaticGraph:
    """Graph file: first line ``vertices: <comma-separated ids>``, then
    ``edge: <id> <id>`` lines; ``#`` starts a comment."""
    vertices = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if vertices is None:
            if not line.startswith("vertices:"):
                raise ParseError(f"line {lineno}: expected 'vertices: ...', got {raw!r}")
            ids = [v.strip() for v in line[len("vertices:"):].split(",") if v.strip()]
            if not ids:
                raise ParseError(f"line {lineno}: empty vertex list")
            for v in ids:
                if not _ID_RE.match(v):
                    raise ParseError(f"line {lineno}: invalid identifier {v!r}")
            if len(set(ids)) != len(ids):
                raise ParseError(f"line {lineno}: duplicate vertex identifier")
            vertices = ids
        elif line.startswith("edge:"):
            parts = line[len("edge:"):].split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'edge: <id> <id>', got {raw!r}")
            u, v = parts
            for x in (u, v):
                if x not in vertices:
                    raise ParseError(f"line {lineno}: unknown vertex {x!r}")
            if u == v:
                raise ParseError(f"line {lineno}: self-loop on {u!r}")
            edges.append((u, v))
        else:
            raise ParseError(f"line {lineno}: unrecognized line {raw!r}")
    if vertices is None:
        raise ParseError("missing 'vertices:' line")
    return StaticGraph.of(vertices, edges)


def load_graph_file(path: str) -> StaticGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


def tvg_to_dict(tvg: Tvg) -> dict:
    edges = []
    for e in tvg.graph.sorted_edges():
        sched = tvg.schedule[e]
        entry = {
            "u": e[0],
            "v": e[1],
            "latency": tvg.latency[e],
            "intervals": [[s, end] for (s, end) in sched.intervals],
        }
        if sched.tail is not None:
            entry["periodic"] = {
                "offset": sched.tail.offset,
                "period": sched.tail.period,
                "duration": sched.tail.duration,
            }
        edges.append(entry)
    return {
        "vertices": tvg.graph.sorted_vertices(),
        "edges": edges,
        "process_latency": tvg.process_latency,
    }


def tvg_from_dict(obj: dict) -> Tvg:
    if not isinstance(obj, dict):
        raise ParseError("scenario must be a JSON object")
    raw_vertices = obj.get("vertices")
    if not isinstance(raw_vertices, list) or not raw_vertices:
        raise ParseError("scenario needs a nonempty 'vertices' array")
    for v in raw_vertices:
        if not isinstance(v, str) or not _ID_RE.match(v):
            raise ParseError(f"invalid vertex identifier {v!r}")
    if len(set(raw_vertices)) != len(raw_vertices):
        raise ParseError("duplicate vertex identifier")
    raw_edges = obj.get("edges")
    if not isinstance(raw_edges, list):
        raise ParseError("scenario needs an 'edges' array")
    schedule = {}
    latency = {}
    edges = []
    for i, entry in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: edge entry must be an object")
        u, v = entry.get("u"), entry.get("v")
        if u not in raw_vertices or v not in raw_vertices:
            raise ParseError(f"{where}: endpoints {u!r},{v!r} must be declared vertices")
        if u == v:
            raise ParseError(f"{where}: self-loop on {u!r}")
        z = entry.get("latency")
        if not isinstance(z, int) or z < 1:
            raise ParseError(f"{where}: latency must be an integer >= 1")
        intervals = entry.get("intervals", [])
        if not isinstance(intervals, list):
            raise ParseError(f"{where}: intervals must be an array of [start,end] pairs")
        parsed = []
        for pair in intervals:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, int) for x in pair)
            ):
                raise ParseError(f"{where}: interval {pair!r} must be a pair of integers")
            if pair[0] < 0 or pair[1] <= pair[0]:
                raise ParseError(f"{where}: interval {pair!r} must satisfy 0 <= start < end")
            parsed.append((pair[0], pair[1]))
        tail: Optional[PeriodicTail] = None
        periodic = entry.get("periodic")
        if periodic is not None:
            if not isinstance(periodic, dict):
                raise ParseError(f"{where}: periodic must be an object")
            try:
                tail = PeriodicTail(
                    int(periodic["offset"]),
                    int(periodic["period"]),
                    int(periodic["duration"]),
                )
            except (KeyError, TypeError, ValueError, DomainError) as exc:
                raise ParseError(f"{where}: invalid periodic tail: {exc}") from None
        if not parsed and tail is None:
            raise ParseError(f"{where}: edge has no presence at all; remove it instead")
        e = make_edge(u, v)
        if e in schedule:
            raise ParseError(f"{where}: duplicate edge {u!r}-{v!r}")
        try:
            schedule[e] = PresenceSchedule.of(parsed, tail)
        except DomainError as exc:
            raise ParseError(f"{where}: invalid schedule: {exc}") from None
        latency[e] = z
        edges.append(e)
    pl = obj.get("process_latency", 0)
    if not isinstance(pl, int) or pl < 0:
        raise ParseError("process_latency must be a non-negative integer")
    graph = StaticGraph.of(raw_vertices, edges)
    return Tvg(graph, schedule, latency, pl)


def save_scenario(tvg: Tvg, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tvg_to_dict(tvg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path: str) -> Tvg:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    return tvg_from_dict(obj)
