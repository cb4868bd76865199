"""Scenario constructors: the lower-bound chain family, random
connected-over-time instances, named static graph families, and the adaptive
adversary that destabilizes the dominating-set protocol on graphs admitting
no strong minimal dominating set."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .engine import OUTPUT_CHANGED, Trace, run
from .errors import DomainError, GenerationError
from .graphs import (
    Edge,
    StaticGraph,
    VertexId,
    diameter,
    edge_key,
    find_smds,
    is_connected,
    is_cut_set,
    make_edge,
    smds_witness,
    vertex_key,
)
from .protocols import MdstProtocol
from .tvg import PeriodicTail, PresenceSchedule, Tick, Tvg, is_connected_over_time, restrict

ALWAYS = PresenceSchedule.of([], PeriodicTail(0, 1, 1))


def generate_gk(k: int) -> Tvg:
    """Chain of 3k+1 vertices whose shortcut edges exist only during [0,1)
    while the chain edges are present from tick 1 on; unit latencies."""
    if k < 1:
        raise DomainError("k must be >= 1")
    verts = [f"p{i}" for i in range(3 * k + 1)]
    path_edges = [make_edge(verts[i], verts[i + 1]) for i in range(3 * k)]
    chords = {make_edge(verts[0], verts[2 * k]), make_edge(verts[2 * k], verts[3 * k])}
    chords -= set(path_edges)
    edges = list(path_edges) + sorted(chords, key=edge_key)
    schedule = {}
    for e in path_edges:
        schedule[e] = PresenceSchedule.of([], PeriodicTail(1, 1, 1))
    for e in chords:
        schedule[e] = PresenceSchedule.of([(0, 1)])
    graph = StaticGraph.of(verts, edges)
    return Tvg(graph, schedule, {e: 1 for e in graph.edges}, 0)


def named_graph(name: str, size: int, seed: int = 0) -> StaticGraph:
    if size < 1:
        raise DomainError("size must be >= 1")
    verts = [f"p{i}" for i in range(1, size + 1)]
    if name == "path":
        edges = [(verts[i], verts[i + 1]) for i in range(size - 1)]
    elif name == "cycle":
        if size < 3:
            raise DomainError("a cycle needs at least 3 vertices")
        edges = [(verts[i], verts[(i + 1) % size]) for i in range(size)]
    elif name == "star":
        edges = [(verts[0], v) for v in verts[1:]]
    elif name == "complete":
        edges = [(verts[i], verts[j]) for i in range(size) for j in range(i + 1, size)]
    elif name == "tree_random":
        rng = random.Random(seed)
        edges = [(verts[i], verts[rng.randrange(i)]) for i in range(1, size)]
    else:
        raise DomainError(f"unknown graph family {name!r}")
    return StaticGraph.of(verts, edges)


def _bridges(g: StaticGraph) -> set:
    return {e for e in g.edges if is_cut_set(g, {e})}


def generate_random_cot(
    n: int,
    extra_edge_probability: float,
    missing_fraction: float,
    horizon: Tick,
    seed: int,
) -> Tvg:
    """Random connected-over-time scenario, reproducible from the seed.

    All underlying edges appear within [0, horizon); recurrent edges carry
    periodic tails with duration >= latency so retried sends always get a
    sufficient occurrence."""
    if n < 2:
        raise DomainError("n must be >= 2")
    if not (0.0 <= extra_edge_probability <= 1.0) or not (0.0 <= missing_fraction <= 1.0):
        raise DomainError("probabilities must lie in [0,1]")
    if horizon < 8:
        raise DomainError("horizon must be >= 8")
    rng = random.Random(seed)
    verts = [f"p{i}" for i in range(1, n + 1)]
    edges = {make_edge(verts[i], verts[rng.randrange(i)]) for i in range(1, n)}
    for i in range(n):
        for j in range(i + 1, n):
            e = make_edge(verts[i], verts[j])
            if e not in edges and rng.random() < extra_edge_probability:
                edges.add(e)
    underlying = StaticGraph.of(verts, edges)

    eligible = sorted(edges - _bridges(underlying), key=edge_key)
    target = int(missing_fraction * len(eligible))
    rng.shuffle(eligible)
    missing: set = set()
    kept = set(edges)
    for e in eligible:
        if len(missing) >= target:
            break
        trial = kept - {e}
        if is_connected(underlying.subgraph_with_edges(trial)):
            kept = trial
            missing.add(e)
    if len(missing) < target:
        raise GenerationError(
            f"could not mark {target} eventual-missing edges while keeping the recurrent graph connected"
        )

    span = horizon
    latency = {}
    schedule = {}
    for e in sorted(edges, key=edge_key):
        z = rng.randint(1, 3)
        latency[e] = z
        if e in missing:
            intervals = []
            for _ in range(rng.randint(1, 2)):
                start = rng.randint(0, span // 2)
                intervals.append((start, start + rng.randint(1, 4)))
            schedule[e] = PresenceSchedule.of(intervals)
        else:
            period = rng.randint(z, z + 5)
            duration = period if rng.random() < 0.5 else rng.randint(z, period)
            offset = rng.randint(0, span - 1)
            intervals = []
            # Optional early one-shot appearance; kept clear of the tail.
            if offset >= 4 and rng.random() < 0.5:
                start = rng.randint(0, offset - 2)
                intervals.append((start, rng.randint(start + 1, offset - 1)))
            schedule[e] = PresenceSchedule.of(intervals, PeriodicTail(offset, period, duration))
    tvg = Tvg(underlying, schedule, latency, 0)
    assert is_connected_over_time(tvg)
    return tvg


@dataclass(frozen=True)
class AdversaryRound:
    index: int
    stable_set: FrozenSet[VertexId]
    witness: VertexId
    suppressed_edges: FrozenSet[Edge]
    new_set: FrozenSet[VertexId]
    stabilized_at: Tick
    restabilized_at: Tick


@dataclass(frozen=True)
class InstabilityReport:
    rounds: Tuple[AdversaryRound, ...]


def _true_set(outputs: Dict[VertexId, object]) -> FrozenSet[VertexId]:
    return frozenset(v for v, out in outputs.items() if out)


def _stabilize(tvg: Tvg, after: Tick, quiet: Tick) -> Tuple[FrozenSet[VertexId], Tick]:
    """Simulate until the true-set has been constant for the quiet window;
    returns the stable set and the tick of its last change."""
    horizon = after + 4 * quiet + 64
    while horizon <= 1_000_000:
        trace = run(tvg, MdstProtocol(), horizon)
        changes = [ev.time for ev in trace.events if ev.kind == OUTPUT_CHANGED]
        last = max(changes, default=0)
        if last + quiet < horizon:
            return _true_set(trace.final_outputs), max(last, after)
        horizon *= 2
    raise GenerationError("dominating-set output did not stabilize within the search horizon")


def adversary_destabilize(
    underlying: StaticGraph,
    max_rounds: int,
    quiet_window: Optional[Tick] = None,
) -> Tuple[Tvg, InstabilityReport]:
    """Adaptively extend an all-edges-present schedule so that the shipped
    dominating-set protocol changes its stabilized output every round."""
    if not is_connected(underlying):
        raise DomainError("adversary requires a connected underlying graph")
    if find_smds(underlying) is not None:
        raise DomainError("graph admits a strong minimal dominating set; adversary inapplicable")
    quiet = quiet_window if quiet_window is not None else 2 * diameter(underlying)

    tvg = Tvg(
        underlying,
        {e: ALWAYS for e in underlying.edges},
        {e: 1 for e in underlying.edges},
        0,
    )
    rounds: List[AdversaryRound] = []
    watch = 0
    for i in range(max_rounds):
        stable, eta = _stabilize(tvg, watch, quiet)
        witness = smds_witness(underlying, stable)
        if witness is None:
            raise GenerationError(f"stabilized set {sorted(stable)} is unexpectedly strong")
        suppressed = frozenset(
            make_edge(witness, q) for q in underlying.neighbors(witness) & stable
        )
        start = eta + 1
        probe = restrict(tvg, [(sorted(suppressed, key=edge_key), (start, None))])
        new_set, alpha = _stabilize(probe, start, quiet)
        tvg = restrict(tvg, [(sorted(suppressed, key=edge_key), (start, alpha + 1))])
        rounds.append(
            AdversaryRound(i, stable, witness, suppressed, new_set, eta, alpha)
        )
        watch = alpha + 1
    return tvg, InstabilityReport(tuple(rounds))
