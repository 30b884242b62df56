"""
Matrizes de transição (estocásticas por linha) e quadrado bipartido.
"""
import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .sparse_graph import SparseGraph


def _row_normalize(matrix: sp.csr_matrix) -> sp.csr_matrix:
    """Divide cada linha pela sua soma; linhas vazias continuam vazias."""
    sums = np.asarray(matrix.sum(axis=1)).ravel()
    inverse = np.zeros_like(sums)
    np.divide(1.0, sums, out=inverse, where=sums > 0)
    return sp.csr_matrix(sp.diags(inverse) @ matrix)


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """
    Matriz de transição A, guardada de forma fatorada.

    A = factors[0] @ factors[1] @ ... + diag(self_loops). Linhas de nós isolados ficam
    vazias nos fatores e recebem um laço unitário via `self_loops`. Para um grafo comum
    há um único fator; no quadrado bipartido há dois (lado→outro, outro→lado), e o
    produto nunca precisa ser formado para propagar projeções.
    """

    factors: Tuple[sp.csr_matrix, ...]
    self_loops: np.ndarray
    degrees: np.ndarray
    edge_count: int
    digest: bytes
    node_ids: Optional[np.ndarray] = None

    @property
    def node_count(self) -> int:
        return self.factors[0].shape[0]

    @cached_property
    def rows(self) -> sp.csr_matrix:
        """Produto explícito dos fatores (CSR), com os laços de nós isolados."""
        product = self.factors[0]
        for factor in self.factors[1:]:
            product = product @ factor
        product = sp.csr_matrix(product) + sp.diags(self.self_loops.astype(np.float64))
        product = sp.csr_matrix(product)
        product.eliminate_zeros()
        product.sort_indices()
        return product

    def row(self, node: int) -> dict:
        """Linha `node` como dicionário {coluna: probabilidade}."""
        rows = self.rows
        start, end = rows.indptr[node], rows.indptr[node + 1]
        return {int(c): float(p) for c, p in zip(rows.indices[start:end], rows.data[start:end])}

    def to_dense(self) -> np.ndarray:
        return self.rows.toarray()

    def cast(self, dtype) -> Tuple[sp.csr_matrix, ...]:
        """Cópias dos fatores no tipo numérico pedido (float32 no pipeline padrão)."""
        return tuple(sp.csr_matrix(f, dtype=dtype) for f in self.factors)

    def apply(self, dense: np.ndarray) -> np.ndarray:
        """
        Calcula A @ dense multiplicando pelos fatores em cadeia.

        Args:
            dense: Matriz densa |V| x D

        Returns:
            Matriz densa |V| x D
        """
        result = dense
        for factor in reversed(self.cast(dense.dtype)):
            result = factor @ result
        result = np.asarray(result)
        if self.self_loops.any():
            result[self.self_loops] += dense[self.self_loops]
        return result


def transition_matrix(g: SparseGraph) -> TransitionMatrix:
    """
    Constrói a matriz de transição do grafo: A_ij = w(i,j) / sum_j w(i,j).

    Nós isolados recebem um laço com probabilidade 1.

    Args:
        g: Grafo esparso

    Returns:
        TransitionMatrix com um único fator
    """
    factor = _row_normalize(g.adjacency)
    degrees = g.degrees()
    return TransitionMatrix(
        factors=(factor,),
        self_loops=np.diff(factor.indptr) == 0,
        degrees=degrees,
        edge_count=g.edge_count,
        digest=g.digest,
    )


def bipartite_square(g: SparseGraph, side: int) -> TransitionMatrix:
    """
    Transição de dois passos restrita a um lado de um grafo bipartido
    (por exemplo, negócio → usuário → negócio).

    O resultado é o produto das matrizes retangulares lado→outro e outro→lado,
    mantido fatorado: nenhuma matriz densa é materializada.

    Args:
        g: Grafo com partição
        side: Lado (0 ou 1) cujos nós formam as linhas da transição

    Returns:
        TransitionMatrix com dois fatores; `node_ids` mapeia para ids de `g`

    Raises:
        ValueError: Se o grafo não tiver partição ou o lado for inválido
    """
    if g.partition is None:
        raise ValueError("bipartite_square exige um grafo com partição")
    if side not in (0, 1):
        raise ValueError(f"Lado inválido: {side} (esperado 0 ou 1)")

    side_nodes = np.flatnonzero(g.partition == side)
    other_nodes = np.flatnonzero(g.partition != side)

    biadjacency = sp.csr_matrix(g.adjacency[side_nodes][:, other_nodes])
    side_to_other = _row_normalize(biadjacency)
    other_to_side = _row_normalize(sp.csr_matrix(g.adjacency[other_nodes][:, side_nodes]))

    h = hashlib.sha256()
    h.update(g.digest)
    h.update(b'bipartite-side')
    h.update(bytes([side]))

    return TransitionMatrix(
        factors=(side_to_other, other_to_side),
        self_loops=np.diff(side_to_other.indptr) == 0,
        degrees=g.degrees()[side_nodes],
        edge_count=g.edge_count,
        digest=h.digest(),
        node_ids=side_nodes,
    )
