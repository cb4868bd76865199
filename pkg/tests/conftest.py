import networkx as nx

from tvgsim.graphs import StaticGraph


def nx_to_static(g: "nx.Graph") -> StaticGraph:
    """Relabel an integer-node networkx graph to string ids q0, q1, ..."""
    mapping = {node: f"q{i}" for i, node in enumerate(sorted(g.nodes))}
    return StaticGraph.of(
        mapping.values(),
        [(mapping[u], mapping[v]) for (u, v) in g.edges],
    )
