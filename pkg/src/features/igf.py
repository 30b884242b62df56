"""
Features invariantes do grafo (IGF) por nó, sempre na ordem de IGF_SCHEMA:
grau, PageRank, triângulos, número de k-core, maior clique contendo o nó,
arestas internas da egonet e arestas de fronteira da egonet.

Todas as contagens usam o grafo simples subjacente (pesos e laços ignorados).
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from graph.sparse_graph import SparseGraph
from .feature_table import FeatureTable

IGF_SCHEMA = ('degree', 'pagerank', 'triangles', 'core_number', 'max_clique',
              'egonet_edges', 'egonet_boundary')

PAGERANK_DAMPING = 0.85
PAGERANK_TOLERANCE = 1e-10
PAGERANK_MAX_ITER = 10_000

# maior egonet (em nós) resolvida por busca exata de clique
DEFAULT_CLIQUE_CAP = 200


def simple_adjacency(g: SparseGraph) -> sp.csr_matrix:
    """
    Adjacência binária sem laços.

    Raises:
        ValueError: Se o grafo for direcionado
    """
    if g.directed:
        raise ValueError("IGF exige um grafo não direcionado")
    coo = g.adjacency.tocoo()
    keep = coo.row != coo.col
    adjacency = sp.csr_matrix((np.ones(keep.sum()), (coo.row[keep], coo.col[keep])),
                              shape=g.adjacency.shape)
    adjacency.sort_indices()
    return adjacency


def pagerank(adjacency: sp.csr_matrix, damping: float = PAGERANK_DAMPING,
             tolerance: float = PAGERANK_TOLERANCE) -> np.ndarray:
    """
    PageRank por iteração de potência com teletransporte uniforme.

    A massa de nós sem arestas é redistribuída uniformemente. Para quando o
    resíduo L1 entre iterações fica abaixo de `tolerance`.
    """
    n = adjacency.shape[0]
    if n == 0:
        return np.zeros(0)
    out_degree = np.asarray(adjacency.sum(axis=1)).ravel()
    dangling = out_degree == 0
    inverse = np.zeros(n)
    inverse[~dangling] = 1.0 / out_degree[~dangling]
    walk_t = sp.csr_matrix((sp.diags(inverse) @ adjacency).T)

    rank = np.full(n, 1.0 / n)
    for _ in range(PAGERANK_MAX_ITER):
        spread = damping * (walk_t @ rank + rank[dangling].sum() / n)
        updated = spread + (1.0 - damping) / n
        residual = np.abs(updated - rank).sum()
        rank = updated
        if residual < tolerance:
            break
    return rank


def triangle_counts(adjacency: sp.csr_matrix) -> np.ndarray:
    """Número de triângulos que passam por cada nó."""
    closed = (adjacency @ adjacency).multiply(adjacency)
    return np.rint(np.asarray(closed.sum(axis=1)).ravel() / 2.0).astype(np.int64)


def core_numbers(adjacency: sp.csr_matrix) -> np.ndarray:
    """Número de k-core de cada nó (remoção por baldes de grau, Batagelj-Zaversnik)."""
    n = adjacency.shape[0]
    degree = np.diff(adjacency.indptr).astype(np.int64)
    if n == 0:
        return degree
    max_degree = int(degree.max())

    # nós ordenados por grau, com o início de cada balde
    bin_start = np.zeros(max_degree + 2, dtype=np.int64)
    np.add.at(bin_start, degree + 1, 1)
    bin_start = np.cumsum(bin_start)
    order = np.argsort(degree, kind='stable')
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)

    degree = degree.copy()
    for idx in range(n):
        v = order[idx]
        for u in adjacency.indices[adjacency.indptr[v]:adjacency.indptr[v + 1]]:
            if degree[u] > degree[v]:
                du = degree[u]
                pu = position[u]
                pw = bin_start[du]
                w = order[pw]
                if u != w:
                    order[pu], order[pw] = w, u
                    position[u], position[w] = pw, pu
                bin_start[du] += 1
                degree[u] -= 1
    return degree


def _neighbor_bitsets(adjacency: sp.csr_matrix, nodes: np.ndarray) -> List[int]:
    """Bitsets de adjacência restritos a `nodes` (bit b = nodes[b])."""
    local = {int(v): b for b, v in enumerate(nodes)}
    bitsets = []
    for v in nodes:
        bits = 0
        for u in adjacency.indices[adjacency.indptr[v]:adjacency.indptr[v + 1]]:
            b = local.get(int(u))
            if b is not None:
                bits |= 1 << b
        bitsets.append(bits)
    return bitsets


def _max_clique_size(bitsets: List[int]) -> int:
    """Tamanho do maior clique do grafo dado por bitsets (branch-and-bound)."""
    best = 0

    def expand(size: int, candidates: int):
        nonlocal best
        if candidates == 0:
            best = max(best, size)
            return
        while candidates:
            if size + candidates.bit_count() <= best:
                return
            b = candidates.bit_length() - 1
            candidates &= ~(1 << b)
            expand(size + 1, candidates & bitsets[b])

    expand(0, (1 << len(bitsets)) - 1)
    return best


def _greedy_clique_size(bitsets: List[int]) -> int:
    """Limite inferior guloso: adiciona o candidato com mais vizinhos entre os candidatos."""
    candidates = (1 << len(bitsets)) - 1
    size = 0
    while candidates:
        best_b, best_count = -1, -1
        remaining = candidates
        while remaining:
            b = remaining.bit_length() - 1
            remaining &= ~(1 << b)
            count = (bitsets[b] & candidates).bit_count()
            if count > best_count:
                best_b, best_count = b, count
        size += 1
        candidates &= bitsets[best_b]
    return size


def max_clique_containing(adjacency: sp.csr_matrix, node: int,
                          clique_cap: int = DEFAULT_CLIQUE_CAP) -> Tuple[int, bool]:
    """
    Tamanho do maior clique que contém `node`.

    Returns:
        (tamanho, aproximado): `aproximado` é True quando a egonet excede
        `clique_cap` nós e o valor é um limite inferior guloso
    """
    neighbors = adjacency.indices[adjacency.indptr[node]:adjacency.indptr[node + 1]]
    bitsets = _neighbor_bitsets(adjacency, neighbors)
    if len(neighbors) + 1 > clique_cap:
        return 1 + _greedy_clique_size(bitsets), True
    return 1 + _max_clique_size(bitsets), False


def igf_table(g: SparseGraph, nodes: Optional[Sequence[int]] = None,
              clique_cap: int = DEFAULT_CLIQUE_CAP) -> FeatureTable:
    """
    Tabela IGF para `nodes` (padrão: todos os nós).

    Linhas cujo clique foi estimado de forma gulosa ficam marcadas em `flags`.

    Raises:
        ValueError: Se o grafo for direcionado
        IndexError: Se algum nó estiver fora do intervalo
    """
    adjacency = simple_adjacency(g)
    nodes = np.arange(g.node_count) if nodes is None else np.asarray(nodes, dtype=np.int64)
    if len(nodes) and (nodes.min() < 0 or nodes.max() >= g.node_count):
        raise IndexError(f"Nó fora do intervalo [0, {g.node_count})")

    degree = np.diff(adjacency.indptr).astype(np.int64)
    ranks = pagerank(adjacency)
    triangles = triangle_counts(adjacency)
    cores = core_numbers(adjacency)

    values = np.empty((len(nodes), len(IGF_SCHEMA)))
    flags = np.zeros(len(nodes), dtype=bool)
    for row, v in enumerate(nodes):
        clique, flags[row] = max_clique_containing(adjacency, int(v), clique_cap)
        ego = adjacency.indices[adjacency.indptr[v]:adjacency.indptr[v + 1]]
        internal = degree[v] + triangles[v]
        boundary = degree[v] + degree[ego].sum() - 2 * internal
        values[row] = (degree[v], ranks[v], triangles[v], cores[v], clique, internal, boundary)

    return FeatureTable(
        schema=IGF_SCHEMA, keys=nodes, values=values,
        provenance={'method': 'igf', 'config_digest': f"clique_cap={clique_cap}",
                    'graph_digest': g.digest.hex()},
        flags=flags if flags.any() else None,
    )


def igf_features(g: SparseGraph, i: int, clique_cap: int = DEFAULT_CLIQUE_CAP) -> np.ndarray:
    """
    As 7 features IGF do nó i.

    Raises:
        ValueError: Se o grafo for direcionado
    """
    return igf_table(g, [i], clique_cap).values[0]
