"""
Features exatas F^(k,s)_ij = (A^k)_i . (A^s)_j por propagação densa de vetores unitários.

Servem de oráculo para o estimador RP DotProd em grafos pequenos.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from graph.transition import TransitionMatrix
from rproj.projection_set import ProjectionSet
from .feature_table import FeatureTable
from .rp_dotprod import (
    assemble_pair_features, gram_blocks_from_walks, node_schema, pair_schema, upper_pairs,
)

DEFAULT_DENSE_CAP = 2000


def _check_cap(t: TransitionMatrix, dense_cap: int):
    if t.node_count > dense_cap:
        raise ValueError(
            f"Grafo com {t.node_count} nós excede o limite denso do oráculo ({dense_cap})")


def _check_node(t: TransitionMatrix, node: int):
    if not 0 <= int(node) < t.node_count:
        raise IndexError(f"Nó {node} fora do intervalo [0, {t.node_count})")


def walk_distributions(t: TransitionMatrix, node: int, max_power: int,
                       dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """
    Distribuições do passeio aleatório a partir de `node`: linha k é (A^k)_node.

    Args:
        t: Matriz de transição
        node: Nó inicial
        max_power: N
        dense_cap: Maior |V| aceito

    Returns:
        Array (N+1) x |V|
    """
    _check_cap(t, dense_cap)
    _check_node(t, node)
    transposed = t.rows.T.tocsr()
    walks = np.zeros((max_power + 1, t.node_count))
    walks[0, node] = 1.0
    for k in range(1, max_power + 1):
        walks[k] = transposed @ walks[k - 1]
    return walks


def oracle_pair_features(t: TransitionMatrix, i: int, j: int, max_power: int,
                         dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """
    Valores exatos de F^(k,s) para o par (i, j), na mesma ordem de rp_pair_features.

    Raises:
        ValueError: Se o grafo exceder o limite denso
    """
    walks_i = walk_distributions(t, i, max_power, dense_cap)[None]
    walks_j = walk_distributions(t, j, max_power, dense_cap)[None]
    return assemble_pair_features(
        gram_blocks_from_walks(walks_i, walks_i),
        gram_blocks_from_walks(walks_i, walks_j),
        gram_blocks_from_walks(walks_j, walks_j),
    )[0]


def oracle_features(t: TransitionMatrix, i: int, j: int, max_power: int,
                    dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Alias de oracle_pair_features."""
    return oracle_pair_features(t, i, j, max_power, dense_cap)


def oracle_node_features(t: TransitionMatrix, i: int, max_power: int,
                         dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Valores exatos de F_i^(k,s), k <= s, na mesma ordem de rp_node_features."""
    walks = walk_distributions(t, i, max_power, dense_cap)
    gram = walks @ walks.T
    return np.array([gram[k, s] for k, s in upper_pairs(max_power)])


def _provenance(t: TransitionMatrix, max_power: int) -> dict:
    return {'method': 'oracle', 'config_digest': f"N={max_power}", 'graph_digest': t.digest.hex()}


def oracle_node_table(t: TransitionMatrix, max_power: int, nodes: Optional[Sequence[int]] = None,
                      dense_cap: int = DEFAULT_DENSE_CAP) -> FeatureTable:
    nodes = np.arange(t.node_count) if nodes is None else np.asarray(nodes, dtype=np.int64)
    values = [oracle_node_features(t, int(i), max_power, dense_cap) for i in nodes]
    return FeatureTable(schema=node_schema(max_power), keys=nodes,
                        values=np.array(values).reshape(len(nodes), -1),
                        provenance=_provenance(t, max_power))


def oracle_pair_table(t: TransitionMatrix, max_power: int, pairs: Sequence[Tuple[int, int]],
                      dense_cap: int = DEFAULT_DENSE_CAP) -> FeatureTable:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    values = [oracle_pair_features(t, int(i), int(j), max_power, dense_cap) for i, j in pairs]
    return FeatureTable(schema=pair_schema(max_power), keys=pairs,
                        values=np.array(values).reshape(len(pairs), -1),
                        provenance=_provenance(t, max_power))


@dataclass(frozen=True)
class ErrorSummary:
    """Resumo de |F_estimado - F_exato| sobre quádruplas (i, j, k, s) sorteadas."""

    errors: np.ndarray

    @property
    def samples(self) -> int:
        return len(self.errors)

    @property
    def max(self) -> float:
        return float(self.errors.max())

    @property
    def mean(self) -> float:
        return float(self.errors.mean())

    @property
    def p99(self) -> float:
        return float(np.percentile(self.errors, 99))


def sampled_errors(ps: ProjectionSet, t: TransitionMatrix, samples: int, seed: int = 0,
                   dense_cap: int = DEFAULT_DENSE_CAP) -> ErrorSummary:
    """
    Compara o estimador com os valores exatos em quádruplas (i, j, k, s) uniformes.

    Args:
        ps: Projeções calculadas sobre `t`
        t: Matriz de transição
        samples: Número de quádruplas (>= 1)
        seed: Semente do sorteio
        dense_cap: Maior |V| aceito

    Returns:
        ErrorSummary com os erros absolutos

    Raises:
        ValueError: samples < 1, digest das projeções diferente do grafo ou grafo acima do limite
    """
    if samples < 1:
        raise ValueError(f"samples deve ser >= 1, recebido {samples}")
    if ps.graph_hash != t.digest:
        raise ValueError("Projeções calculadas sobre outro grafo (digest diferente)")
    _check_cap(t, dense_cap)

    rng = np.random.default_rng(seed)
    n, powers = t.node_count, ps.max_power + 1
    i = rng.integers(0, n, samples)
    j = rng.integers(0, n, samples)
    k = rng.integers(0, powers, samples)
    s = rng.integers(0, powers, samples)

    nodes = np.unique(np.concatenate([i, j]))
    position = np.searchsorted(nodes, np.arange(n))
    walks = np.stack([walk_distributions(t, int(v), ps.max_power, dense_cap) for v in nodes])
    exact = np.einsum('nv,nv->n', walks[position[i], k], walks[position[j], s])

    left = ps.matrices[k, i].astype(np.float64)
    right = ps.matrices[s, j].astype(np.float64)
    estimate = np.einsum('nd,nd->n', left, right) * ps.config.dot_scale
    return ErrorSummary(errors=np.abs(estimate - exact))
