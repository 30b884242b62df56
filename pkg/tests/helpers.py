"""Construtores de grafos pequenos usados pelos testes."""
import itertools

import numpy as np

from graph.sparse_graph import SparseGraph


def graph_from_pairs(node_count, pairs, directed=False, weights=None):
    pairs = list(pairs)
    return SparseGraph.from_edges(node_count, [u for u, _ in pairs], [v for _, v in pairs],
                                  weights=weights, directed=directed)


def complete_graph(n):
    return graph_from_pairs(n, itertools.combinations(range(n), 2))


def cycle_graph(n):
    return graph_from_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return graph_from_pairs(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(n, p, seed):
    """Grafo de Erdős–Rényi G(n, p) não direcionado."""
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return graph_from_pairs(n, pairs)


def to_networkx(g):
    import networkx as nx
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.node_count))
    coo = g.adjacency.tocoo()
    nxg.add_edges_from((int(u), int(v)) for u, v in zip(coo.row, coo.col) if u < v)
    return nxg
