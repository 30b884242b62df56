"""
Divisão de um grafo em dois subgrafos disjuntos (arestas cruzadas descartadas).
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .sparse_graph import SparseGraph


@dataclass(frozen=True)
class NodeSplit:
    """
    Resultado da divisão de nós.

    Attributes:
        graph_a_nodes: Ids originais (ordenados) do subgrafo A
        graph_b_nodes: Ids originais (ordenados) do subgrafo B
        part: Para cada nó original, 0 se está em A e 1 se está em B
        local_ids: Para cada nó original, seu id dentro do próprio subgrafo
    """

    graph_a_nodes: np.ndarray
    graph_b_nodes: np.ndarray
    part: np.ndarray
    local_ids: np.ndarray

    def nodes_of(self, part: str) -> np.ndarray:
        if part == 'a':
            return self.graph_a_nodes
        if part == 'b':
            return self.graph_b_nodes
        raise ValueError(f"Parte inválida: '{part}' (esperado 'a' ou 'b')")


def split_nodes(g: SparseGraph, fraction: float, seed: int) -> Tuple[SparseGraph, SparseGraph, NodeSplit]:
    """
    Atribui aleatoriamente `fraction` dos nós ao subgrafo A e o restante ao B.

    Args:
        g: Grafo original
        fraction: Fração dos nós em A, em (0, 1)
        seed: Semente; a divisão é determinística para uma semente fixa

    Returns:
        (subgrafo A, subgrafo B, NodeSplit)

    Raises:
        ValueError: Se fraction estiver fora de (0, 1)
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction deve estar em (0, 1), recebido {fraction}")

    n = g.node_count
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    size_a = int(round(fraction * n))

    graph_a_nodes = np.sort(order[:size_a])
    graph_b_nodes = np.sort(order[size_a:])

    part = np.ones(n, dtype=np.int8)
    part[graph_a_nodes] = 0
    local_ids = np.empty(n, dtype=np.int64)
    local_ids[graph_a_nodes] = np.arange(len(graph_a_nodes))
    local_ids[graph_b_nodes] = np.arange(len(graph_b_nodes))

    split = NodeSplit(graph_a_nodes=graph_a_nodes, graph_b_nodes=graph_b_nodes,
                      part=part, local_ids=local_ids)
    return g.subgraph(graph_a_nodes), g.subgraph(graph_b_nodes), split
