"""Deterministic discrete-event executor of a protocol over a Tvg.

Tie-break at equal ticks: edge disappearances first, then edge appearances
(both in lexicographic edge order), then message deliveries in message-id
order, then protocol callbacks in vertex-id order.  The engine is
seed-independent; the ``seed`` argument is reserved for randomized scenario
generation elsewhere.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import DomainError
from .graphs import Edge, VertexId, edge_key, make_edge, vertex_key
from .tvg import Tick, Tvg

EDGE_UP = "EdgeUp"
EDGE_DOWN = "EdgeDown"
SEND_INVOKED = "SendInvoked"
MESSAGE_DELIVERED = "MessageDelivered"
MESSAGE_LOST = "MessageLost"
OUTPUT_CHANGED = "OutputChanged"

# Processing phases at an equal tick; also the documented ordering contract.
_PHASE_DOWN = 0
_PHASE_UP = 1
_PHASE_DELIVERY = 2
_PHASE_CALLBACK = 3

ORDERING_CONTRACT = (
    "edge disappearances before appearances",
    "edge events in lexicographic edge order",
    "deliveries in message-id order",
    "protocol callbacks in vertex-id order",
    "seed is reserved for scenario generation; the engine is seed-independent",
)


def deterministic_order() -> Tuple[str, ...]:
    """The tie-break contract enforced at equal ticks."""
    return ORDERING_CONTRACT


@dataclass
class Message:
    id: int
    sender: VertexId
    receiver: VertexId
    edge: Edge
    payload: Any


@dataclass(frozen=True)
class TraceEvent:
    time: Tick
    kind: str
    subject: Tuple[str, ...]
    value: Any = None  # raw output for OutputChanged; not serialized

    def line(self) -> str:
        return " ".join((str(self.time), self.kind) + self.subject)


@dataclass
class Trace:
    events: List[TraceEvent]
    initial_outputs: Dict[VertexId, Any]
    final_outputs: Dict[VertexId, Any]
    final_states: Dict[VertexId, Any]
    horizon: Tick
    formatted_finals: Dict[VertexId, str]

    def serialize(self) -> str:
        lines = [ev.line() for ev in self.events]
        lines.append("FINAL")
        for v in sorted(self.formatted_finals, key=vertex_key):
            lines.append(f"{v} {self.formatted_finals[v]}")
        return "\n".join(lines) + "\n"


def replay_outputs(trace: Trace, t: Tick) -> Dict[VertexId, Any]:
    """Output of every process once all events up to and including tick t
    have been processed."""
    if t > trace.horizon:
        raise DomainError(f"tick {t} is beyond the trace horizon {trace.horizon}")
    outputs = dict(trace.initial_outputs)
    for ev in trace.events:
        if ev.time > t:
            break
        if ev.kind == OUTPUT_CHANGED:
            outputs[ev.subject[0]] = ev.value
    return outputs


class Protocol:
    """Per-process transition functions.  Handlers are pure: they take a state
    and return (new_state, sends) where sends is a list of (dest, payload)."""

    name = "protocol"

    def initial_state(self, vertex: VertexId):
        raise NotImplementedError

    def on_init(self, state, vertex: VertexId):
        return state, []

    def on_edge_appear(self, state, vertex: VertexId, other: VertexId):
        return state, []

    def on_edge_disappear(self, state, vertex: VertexId, other: VertexId):
        return state, []

    def on_receive(self, state, vertex: VertexId, sender: VertexId, payload):
        return state, []

    def output(self, state):
        raise NotImplementedError

    def format_output(self, value) -> str:
        raise NotImplementedError


def run(tvg: Tvg, protocol: Protocol, horizon: Tick, seed: int = 0) -> Trace:
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    verts = tvg.graph.sorted_vertices()
    states = {v: protocol.initial_state(v) for v in verts}
    initial_outputs = {v: protocol.output(states[v]) for v in verts}
    current_output = dict(initial_outputs)
    events: List[TraceEvent] = []
    phi = tvg.process_latency

    seq = itertools.count()
    heap: List[Tuple] = []

    def push(tick: Tick, phase: int, key, action):
        if tick < horizon:
            heapq.heappush(heap, (tick, phase, key, next(seq), action))

    for e in tvg.graph.sorted_edges():
        for (s, end) in tvg.schedule[e].occurrences():
            if s >= horizon:
                break
            push(s, _PHASE_UP, edge_key(e), ("up", e, end))
            if end is not None:
                push(end, _PHASE_DOWN, edge_key(e), ("down", e))

    for v in verts:
        push(0, _PHASE_CALLBACK, (vertex_key(v),), ("init", v))

    up_end: Dict[Edge, Optional[Tick]] = {}  # current occurrence end while up
    pending: Dict[Edge, List[Message]] = {e: [] for e in tvg.graph.edges}
    doomed: Dict[Edge, List[Message]] = {e: [] for e in tvg.graph.edges}
    msg_ids = itertools.count(1)

    def record(t: Tick, kind: str, subject: Tuple[str, ...], value=None):
        events.append(TraceEvent(t, kind, subject, value))

    def attempt(m: Message, t: Tick):
        end = up_end[m.edge]
        z = tvg.latency[m.edge]
        if end is None or t + z <= end:
            push(t + z, _PHASE_DELIVERY, (m.id,), ("deliver", m))
        else:
            doomed[m.edge].append(m)

    def invoke_send(sender: VertexId, dest: VertexId, payload, t: Tick):
        e = make_edge(sender, dest)
        if e not in tvg.graph.edges:
            raise DomainError(f"protocol sent over unknown edge {e}")
        m = Message(next(msg_ids), sender, dest, e, payload)
        record(t, SEND_INVOKED, (str(m.id), sender, dest))
        pending[e].append(m)
        if e in up_end:
            attempt(m, t)

    def run_callback(v: VertexId, action, t: Tick):
        state = states[v]
        if action[0] == "init":
            state, sends = protocol.on_init(state, v)
        elif action[0] == "appear":
            state, sends = protocol.on_edge_appear(state, v, action[2])
        elif action[0] == "disappear":
            state, sends = protocol.on_edge_disappear(state, v, action[2])
        else:  # receive
            state, sends = protocol.on_receive(state, v, action[2], action[3])
        states[v] = state
        out = protocol.output(state)
        if out != current_output[v]:
            current_output[v] = out
            record(t, OUTPUT_CHANGED, (v, protocol.format_output(out)), value=out)
        for dest, payload in sends:
            invoke_send(v, dest, payload, t)

    while heap:
        tick, phase, key, _, action = heapq.heappop(heap)
        if action[0] == "up":
            _, e, end = action
            record(tick, EDGE_UP, e)
            up_end[e] = end
            for m in list(pending[e]):
                attempt(m, tick)
            for v in sorted(e, key=vertex_key):
                other = e[1] if e[0] == v else e[0]
                push(tick + phi, _PHASE_CALLBACK, (vertex_key(v),), ("appear", v, other))
        elif action[0] == "down":
            _, e = action
            record(tick, EDGE_DOWN, e)
            up_end.pop(e, None)
            for m in doomed[e]:
                record(tick, MESSAGE_LOST, (str(m.id),))
            doomed[e] = []
            for v in sorted(e, key=vertex_key):
                other = e[1] if e[0] == v else e[0]
                push(tick + phi, _PHASE_CALLBACK, (vertex_key(v),), ("disappear", v, other))
        elif action[0] == "deliver":
            m = action[1]
            record(tick, MESSAGE_DELIVERED, (str(m.id),))
            pending[m.edge].remove(m)
            push(
                tick + phi,
                _PHASE_CALLBACK,
                (vertex_key(m.receiver),),
                ("receive", m.receiver, m.sender, m.payload),
            )
        else:
            run_callback(action[1], action, tick)

    formatted = {v: protocol.format_output(current_output[v]) for v in verts}
    return Trace(
        events=events,
        initial_outputs=initial_outputs,
        final_outputs=dict(current_output),
        final_states=states,
        horizon=horizon,
        formatted_finals=formatted,
    )
