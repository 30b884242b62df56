"""
Features RP DotProd: produtos escalares de projeções aleatórias de potências da
matriz de transição, F^(k,s)_ij ~ R_i^(k) . R_j^(s).

Ordem das features (lexicográfica em (k, s)):
    - nó: F_ii^(k,s) para 0 <= k <= s <= N, total (N+1)(N+2)/2;
    - par: bloco ii (k <= s), bloco ij (todos os (k, s)), bloco jj (k <= s),
      total (N+1)(N+2) + (N+1)^2.
Os valores estimados não são recortados para [0, 1].
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rproj.projection_set import ProjectionSet
from .feature_table import FeatureTable

# nós por bloco no cálculo das tabelas
_CHUNK = 2048


def upper_pairs(max_power: int) -> List[Tuple[int, int]]:
    """(k, s) com 0 <= k <= s <= N, em ordem lexicográfica."""
    return [(k, s) for k in range(max_power + 1) for s in range(k, max_power + 1)]


def all_pairs(max_power: int) -> List[Tuple[int, int]]:
    """Todos os (k, s) com 0 <= k, s <= N, em ordem lexicográfica."""
    return [(k, s) for k in range(max_power + 1) for s in range(max_power + 1)]


def node_feature_count(max_power: int) -> int:
    return (max_power + 1) * (max_power + 2) // 2


def pair_feature_count(max_power: int) -> int:
    return (max_power + 1) * (max_power + 2) + (max_power + 1) ** 2


def node_schema(max_power: int) -> Tuple[str, ...]:
    return tuple(f"F_k{k}_s{s}" for k, s in upper_pairs(max_power))


def pair_schema(max_power: int) -> Tuple[str, ...]:
    ii = [f"F_ii_k{k}_s{s}" for k, s in upper_pairs(max_power)]
    ij = [f"F_ij_k{k}_s{s}" for k, s in all_pairs(max_power)]
    jj = [f"F_jj_k{k}_s{s}" for k, s in upper_pairs(max_power)]
    return tuple(ii + ij + jj)


def _upper_index(max_power: int) -> Tuple[np.ndarray, np.ndarray]:
    k, s = zip(*upper_pairs(max_power))
    return np.array(k), np.array(s)


def gram_blocks_from_walks(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """
    Produtos escalares entre as linhas de dois blocos.

    Args:
        left: Array (n, N+1, D) com as linhas (por potência) do nó i
        right: Array (n, N+1, D) com as linhas do nó j

    Returns:
        Array (n, N+1, N+1) com G[:, k, s] = left[:, k] . right[:, s]
    """
    return np.einsum('nkd,nsd->nks', left, right)


def assemble_pair_features(g_ii: np.ndarray, g_ij: np.ndarray, g_jj: np.ndarray) -> np.ndarray:
    """Concatena os blocos ii (k <= s), ij (todos) e jj (k <= s) na ordem documentada."""
    max_power = g_ii.shape[1] - 1
    k, s = _upper_index(max_power)
    n = g_ii.shape[0]
    return np.hstack([g_ii[:, k, s], g_ij.reshape(n, -1), g_jj[:, k, s]])


def _walk_rows(ps: ProjectionSet, nodes: np.ndarray) -> np.ndarray:
    """Array (n, N+1, D) com R^(k)_i para cada nó."""
    return np.transpose(ps.matrices[:, nodes, :], (1, 0, 2))


def _node_block(ps: ProjectionSet, nodes: np.ndarray) -> np.ndarray:
    rows = _walk_rows(ps, nodes)
    gram = gram_blocks_from_walks(rows, rows).astype(np.float64) * ps.config.dot_scale
    k, s = _upper_index(ps.max_power)
    return gram[:, k, s]


def _pair_block(ps: ProjectionSet, pairs: np.ndarray) -> np.ndarray:
    left = _walk_rows(ps, pairs[:, 0])
    right = _walk_rows(ps, pairs[:, 1])
    scale = ps.config.dot_scale
    g_ii = gram_blocks_from_walks(left, left).astype(np.float64) * scale
    g_ij = gram_blocks_from_walks(left, right).astype(np.float64) * scale
    g_jj = gram_blocks_from_walks(right, right).astype(np.float64) * scale
    return assemble_pair_features(g_ii, g_ij, g_jj)


def rp_node_features(ps: ProjectionSet, i: int) -> np.ndarray:
    """
    Features de nó F_i^(k,s) = R_i^(k) . R_i^(s), 0 <= k <= s <= N.

    Args:
        ps: Projeções
        i: Nó

    Returns:
        Vetor de tamanho (N+1)(N+2)/2

    Raises:
        IndexError: Se o nó estiver fora do intervalo
    """
    ps.check_node(i)
    return _node_block(ps, np.array([i]))[0]


def rp_pair_features(ps: ProjectionSet, i: int, j: int) -> np.ndarray:
    """
    Features de par: blocos {F_ii (k <= s)}, {F_ij (todos)}, {F_jj (k <= s)}.

    Args:
        ps: Projeções
        i: Primeiro nó
        j: Segundo nó

    Returns:
        Vetor de tamanho (N+1)(N+2) + (N+1)^2

    Raises:
        IndexError: Se algum nó estiver fora do intervalo
    """
    ps.check_node(i)
    ps.check_node(j)
    return _pair_block(ps, np.array([[i, j]]))[0]


def _chunked(compute, keys: np.ndarray, width: int, threads: int) -> np.ndarray:
    """Aplica `compute` a blocos de chaves; o resultado não depende de `threads`."""
    out = np.empty((len(keys), width), dtype=np.float64)
    chunks = [(a, min(a + _CHUNK, len(keys))) for a in range(0, len(keys), _CHUNK)]

    def work(bounds):
        a, b = bounds
        out[a:b] = compute(keys[a:b])

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    else:
        for bounds in chunks:
            work(bounds)
    return out


def _provenance(ps: ProjectionSet) -> dict:
    return {
        'method': 'rp-dotprod',
        'config_digest': ps.config.digest(),
        'graph_digest': ps.graph_hash.hex(),
        'projection_digest': ps.digest,
    }


def rp_node_table(ps: ProjectionSet, nodes: Optional[Sequence[int]] = None,
                  threads: int = 1) -> FeatureTable:
    """Tabela de features de nó para `nodes` (padrão: todos)."""
    nodes = np.arange(ps.node_count) if nodes is None else np.asarray(nodes, dtype=np.int64)
    for node in (nodes.min(), nodes.max()) if len(nodes) else ():
        ps.check_node(node)
    values = _chunked(lambda block: _node_block(ps, block), nodes,
                      node_feature_count(ps.max_power), threads)
    return FeatureTable(schema=node_schema(ps.max_power), keys=nodes, values=values,
                        provenance=_provenance(ps))


def rp_pair_table(ps: ProjectionSet, pairs: Sequence[Tuple[int, int]],
                  threads: int = 1) -> FeatureTable:
    """Tabela de features de par para a lista de pares (i, j)."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs):
        ps.check_node(pairs.min())
        ps.check_node(pairs.max())
    values = _chunked(lambda block: _pair_block(ps, block), pairs,
                      pair_feature_count(ps.max_power), threads)
    return FeatureTable(schema=pair_schema(ps.max_power), keys=pairs, values=values,
                        provenance=_provenance(ps))
