"""Time-varying graph model: presence schedules, journeys, reachability.

Time is discrete (non-negative integer ticks).  Presence is described by
half-open intervals [start, end); an optional periodic tail makes an edge
recurrent (present during [offset + i*period, offset + i*period + duration)
for every i >= 0).  A contiguous tail (duration == period) is normalized to
period = duration = 1 and represents "present forever from offset".
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import DomainError
from .graphs import Edge, StaticGraph, VertexId, is_connected, make_edge, vertex_key

Tick = int
Interval = Tuple[Tick, Optional[Tick]]  # end None = unbounded


@dataclass(frozen=True)
class PeriodicTail:
    offset: Tick
    period: Tick
    duration: Tick

    def __post_init__(self):
        if self.offset < 0:
            raise DomainError("periodic tail offset must be non-negative")
        if self.period <= 0:
            raise DomainError("periodic tail period must be positive")
        if not (0 < self.duration <= self.period):
            raise DomainError("periodic tail duration must satisfy 0 < duration <= period")


@dataclass(frozen=True)
class PresenceSchedule:
    intervals: Tuple[Tuple[Tick, Tick], ...] = ()
    tail: Optional[PeriodicTail] = None

    @staticmethod
    def of(intervals, tail: Optional[PeriodicTail] = None) -> "PresenceSchedule":
        """Normalizing constructor: sorts, merges touching intervals, folds
        finite intervals abutting the tail into it."""
        ints: List[List[Tick]] = []
        for (s, e) in sorted(intervals):
            if s < 0:
                raise DomainError(f"interval start {s} is negative")
            if e <= s:
                raise DomainError(f"interval [{s},{e}) is empty")
            if ints and s <= ints[-1][1]:
                ints[-1][1] = max(ints[-1][1], e)
            else:
                ints.append([s, e])
        if tail is not None and tail.duration == tail.period:
            # Contiguous tail: present forever from offset.
            offset = tail.offset
            while ints and ints[-1][1] >= offset:
                offset = min(offset, ints[-1][0])
                ints.pop()
            tail = PeriodicTail(offset, 1, 1)
        elif tail is not None:
            # Fold occurrences that touch the last finite interval.
            while ints and ints[-1][1] == tail.offset:
                ints[-1][1] = tail.offset + tail.duration
                tail = PeriodicTail(tail.offset + tail.period, tail.period, tail.duration)
            if ints and ints[-1][1] > tail.offset:
                raise DomainError("periodic tail overlaps a finite interval")
        return PresenceSchedule(tuple((s, e) for s, e in ints), tail)

    @property
    def recurrent(self) -> bool:
        return self.tail is not None

    @property
    def is_empty(self) -> bool:
        return not self.intervals and self.tail is None

    def first_appearance(self) -> Tick:
        if self.intervals:
            return self.intervals[0][0]
        if self.tail is not None:
            return self.tail.offset
        raise DomainError("empty schedule has no first appearance")

    def present_at(self, t: Tick) -> bool:
        for (s, e) in self.intervals:
            if s <= t < e:
                return True
        tail = self.tail
        if tail is not None and t >= tail.offset:
            return (t - tail.offset) % tail.period < tail.duration
        return False

    def earliest_window(self, t: Tick, duration: Tick) -> Optional[Tick]:
        """Smallest t' >= t such that the schedule is present at t' and, when
        duration >= 1, throughout the half-open window [t', t' + duration)."""
        t = max(t, 0)

        def fits(c: Tick, e: Optional[Tick]) -> bool:
            if e is None:
                return True
            return c < e if duration == 0 else c + duration <= e

        for (s, e) in self.intervals:
            c = max(s, t)
            if fits(c, e):
                return c
        tail = self.tail
        if tail is None:
            return None
        if tail.duration == tail.period:
            return max(tail.offset, t)
        i0 = max(0, (t - tail.offset) // tail.period)
        for i in (i0, i0 + 1):
            s = tail.offset + i * tail.period
            c = max(s, t)
            if fits(c, s + tail.duration):
                return c
        return None

    def occurrences(self) -> Iterator[Interval]:
        """All maximal presence intervals in order; the last one may be
        unbounded (end None).  Infinite generator for a non-contiguous tail."""
        for (s, e) in self.intervals:
            yield (s, e)
        tail = self.tail
        if tail is None:
            return
        if tail.duration == tail.period:
            yield (tail.offset, None)
            return
        i = 0
        while True:
            s = tail.offset + i * tail.period
            yield (s, s + tail.duration)
            i += 1

    def boundaries_before(self, horizon: Tick) -> List[Tick]:
        out = []
        for (s, e) in self.occurrences():
            if s >= horizon:
                break
            out.append(s)
            if e is not None and e < horizon:
                out.append(e)
        return out

    def minus(self, start: Tick, end: Optional[Tick]) -> "PresenceSchedule":
        """Schedule with presence removed over [start, end); end None = forever."""
        if start < 0 or (end is not None and end <= start):
            raise DomainError(f"invalid mask interval [{start},{end})")
        fin: List[Tuple[Tick, Tick]] = []

        def subtract(s: Tick, e: Tick):
            if e <= start or (end is not None and s >= end):
                fin.append((s, e))
                return
            if s < start:
                fin.append((s, start))
            if end is not None and e > end:
                fin.append((end, e))

        for (s, e) in self.intervals:
            subtract(s, e)
        tail = self.tail
        new_tail: Optional[PeriodicTail] = None
        if tail is not None:
            if tail.duration == tail.period:
                o = tail.offset
                if o < start:
                    fin.append((o, start))
                if end is not None:
                    new_tail = PeriodicTail(max(o, end), 1, 1)
            elif end is None:
                o = tail.offset
                while o < start:
                    if min(o + tail.duration, start) > o:
                        fin.append((o, min(o + tail.duration, start)))
                    o += tail.period
            else:
                o = tail.offset
                while o < end:
                    subtract(o, o + tail.duration)
                    o += tail.period
                new_tail = PeriodicTail(o, tail.period, tail.duration)
        return PresenceSchedule.of(fin, new_tail)


@dataclass(frozen=True)
class Journey:
    hops: Tuple[Tuple[Edge, Tick], ...]


@dataclass(frozen=True)
class Tvg:
    graph: StaticGraph
    schedule: Mapping[Edge, PresenceSchedule]
    latency: Mapping[Edge, Tick]
    process_latency: Tick = 0

    def __post_init__(self):
        if set(self.schedule) != set(self.graph.edges):
            raise DomainError("schedule must be defined for exactly the edges of the graph")
        if set(self.latency) != set(self.graph.edges):
            raise DomainError("latency must be defined for exactly the edges of the graph")
        for e, sched in self.schedule.items():
            if sched.is_empty:
                raise DomainError(f"edge {e} has an empty schedule; drop it from the graph instead")
        for e, z in self.latency.items():
            if z < 1:
                raise DomainError(f"edge {e} has latency {z} < 1")
        if self.process_latency < 0:
            raise DomainError("process latency must be non-negative")

    def edge_schedule(self, e: Edge) -> PresenceSchedule:
        try:
            return self.schedule[e]
        except KeyError:
            raise DomainError(f"unknown edge {e}") from None


def presence(tvg: Tvg, e: Tuple[VertexId, VertexId], t: Tick) -> bool:
    return tvg.edge_schedule(make_edge(*e)).present_at(t)


def underlying_graph(tvg: Tvg) -> StaticGraph:
    return tvg.graph


def eventual_underlying_graph(tvg: Tvg) -> StaticGraph:
    recurrent = frozenset(e for e in tvg.graph.edges if tvg.schedule[e].recurrent)
    return StaticGraph(tvg.graph.vertices, recurrent)


def is_journey(tvg: Tvg, j: Journey, source: VertexId, target: VertexId) -> bool:
    if source not in tvg.graph.vertices or target not in tvg.graph.vertices:
        return False
    if not j.hops:
        return source == target
    at = source
    prev_arrival = 0
    for (raw_edge, dep) in j.hops:
        e = make_edge(*raw_edge)
        if e not in tvg.graph.edges:
            return False
        if at not in e:
            return False
        if dep < prev_arrival:
            return False
        if not tvg.schedule[e].present_at(dep):
            return False
        at = e[1] if e[0] == at else e[0]
        prev_arrival = dep + tvg.latency[e]
    return at == target


def earliest_arrival(
    tvg: Tvg,
    source: VertexId,
    target: VertexId,
    after: Tick = 0,
    deliverable: bool = False,
) -> Optional[Tick]:
    """Minimum arrival tick over journeys departing at or after ``after``.

    With deliverable=True each hop needs its edge present throughout the full
    latency window, matching the delivery condition of the retrying send
    primitive; with deliverable=False presence is required only at departure.
    """
    if source not in tvg.graph.vertices:
        raise DomainError(f"unknown vertex {source!r}")
    if target not in tvg.graph.vertices:
        raise DomainError(f"unknown vertex {target!r}")
    after = max(after, 0)
    if source == target:
        return after
    best: Dict[VertexId, Tick] = {source: after}
    heap: List[Tuple[Tick, Tuple[int, str]]] = [(after, vertex_key(source))]
    key_to_vertex = {vertex_key(v): v for v in tvg.graph.vertices}
    while heap:
        t, vk = heapq.heappop(heap)
        v = key_to_vertex[vk]
        if t > best[v]:
            continue
        if v == target:
            return t
        for u in sorted(tvg.graph.neighbors(v), key=vertex_key):
            e = make_edge(v, u)
            need = tvg.latency[e] if deliverable else 0
            dep = tvg.schedule[e].earliest_window(t, need)
            if dep is None:
                continue
            arrival = dep + tvg.latency[e]
            if u not in best or arrival < best[u]:
                best[u] = arrival
                heapq.heappush(heap, (arrival, vertex_key(u)))
    return best.get(target)


def is_connected_over_time(tvg: Tvg) -> bool:
    # Recurrent edges appear infinitely often with full-duration occurrences,
    # so journeys exist after any time iff the eventual underlying graph is
    # connected.
    return is_connected(eventual_underlying_graph(tvg))


def restrict(
    tvg: Tvg,
    masks: Sequence[Tuple[Sequence[Tuple[VertexId, VertexId]], Interval]],
) -> Tvg:
    """Force the presence of each masked edge to false over its masked
    half-open interval.  Edges whose schedule becomes empty are dropped."""
    schedules = dict(tvg.schedule)
    for (edges, (start, end)) in masks:
        for raw in edges:
            e = make_edge(*raw)
            if e not in schedules:
                raise DomainError(f"unknown edge {e}")
            schedules[e] = schedules[e].minus(start, end)
    kept = frozenset(e for e, sched in schedules.items() if not sched.is_empty)
    graph = StaticGraph(tvg.graph.vertices, kept)
    return Tvg(
        graph=graph,
        schedule={e: schedules[e] for e in kept},
        latency={e: tvg.latency[e] for e in kept},
        process_latency=tvg.process_latency,
    )


def snapshots(tvg: Tvg, horizon: Tick) -> List[Tuple[Tick, StaticGraph]]:
    """Topological-event times within [0, horizon) and the static snapshot
    holding from each event time to the next."""
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    ticks = {0}
    for e in tvg.graph.edges:
        ticks.update(tvg.schedule[e].boundaries_before(horizon))
    out: List[Tuple[Tick, StaticGraph]] = []
    for t in sorted(ticks):
        present = frozenset(e for e in tvg.graph.edges if tvg.schedule[e].present_at(t))
        snap = StaticGraph(tvg.graph.vertices, present)
        if not out or out[-1][1] != snap:
            out.append((t, snap))
    return out
