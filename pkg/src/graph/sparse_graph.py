"""
Classe SparseGraph - Grafo esparso (possivelmente bipartido e ponderado) em formato CSR.
"""
import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """
    Grafo imutável armazenado como matriz de adjacência CSR.

    Invariantes:
        - ids de vizinhos < node_count, pesos > 0, sem entradas (src, dst) duplicadas;
        - se não direcionado, a adjacência é simétrica;
        - se houver partição, toda aresta cruza a partição.
    """

    adjacency: sp.csr_matrix
    directed: bool = False
    partition: Optional[np.ndarray] = None
    node_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        adjacency = sp.csr_matrix(self.adjacency, dtype=np.float64)
        adjacency.sum_duplicates()
        adjacency.eliminate_zeros()
        adjacency.sort_indices()
        object.__setattr__(self, 'adjacency', adjacency)

        if self.partition is not None:
            partition = np.asarray(self.partition, dtype=np.int8)
            object.__setattr__(self, 'partition', partition)
        if self.node_names is not None:
            object.__setattr__(self, 'node_names', tuple(self.node_names))

        self.validate()

    @classmethod
    def from_edges(cls, node_count: int, sources: Sequence[int], targets: Sequence[int],
                   weights: Optional[Sequence[float]] = None, directed: bool = False,
                   partition: Optional[Sequence[int]] = None,
                   node_names: Optional[Sequence[str]] = None) -> 'SparseGraph':
        """
        Constrói o grafo a partir de listas de arestas.

        Arestas duplicadas são fundidas somando os pesos. Entradas não direcionadas
        são simetrizadas (laços não são espelhados).

        Args:
            node_count: Número de nós
            sources: Ids de origem
            targets: Ids de destino
            weights: Pesos (padrão: 1.0 para todas as arestas)
            directed: Se o grafo é direcionado
            partition: Bicoloração opcional (0/1 por nó)
            node_names: Ids originais na ordem densa

        Returns:
            SparseGraph válido

        Raises:
            ValueError: Se algum id estiver fora do intervalo ou algum peso não for positivo
        """
        src = np.asarray(sources, dtype=np.int64)
        dst = np.asarray(targets, dtype=np.int64)
        if weights is None:
            w = np.ones(len(src), dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64)

        if len(src) != len(dst) or len(src) != len(w):
            raise ValueError("Listas de origem, destino e peso com tamanhos diferentes")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= node_count):
            raise ValueError(f"Id de nó fora do intervalo [0, {node_count})")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("Pesos de aresta devem ser finitos e positivos")

        if not directed:
            mirror = src != dst
            src, dst, w = (np.concatenate([src, dst[mirror]]),
                           np.concatenate([dst, src[mirror]]),
                           np.concatenate([w, w[mirror]]))

        adjacency = sp.coo_matrix((w, (src, dst)), shape=(node_count, node_count)).tocsr()
        if not directed:
            adjacency = adjacency.maximum(adjacency.T).tocsr()
        return cls(adjacency=adjacency, directed=directed,
                   partition=None if partition is None else np.asarray(partition),
                   node_names=node_names)

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        """Número de arestas (pares não ordenados se não direcionado)."""
        if self.directed:
            return int(self.adjacency.nnz)
        loops = int(np.count_nonzero(self.adjacency.diagonal()))
        return (int(self.adjacency.nnz) + loops) // 2

    def neighbors(self, node: int) -> np.ndarray:
        start, end = self.adjacency.indptr[node], self.adjacency.indptr[node + 1]
        return self.adjacency.indices[start:end]

    def edge_weights(self, node: int) -> np.ndarray:
        start, end = self.adjacency.indptr[node], self.adjacency.indptr[node + 1]
        return self.adjacency.data[start:end]

    def degrees(self) -> np.ndarray:
        """Grau ponderado (soma dos pesos de saída) de cada nó."""
        return np.asarray(self.adjacency.sum(axis=1)).ravel()

    def name_of(self, node: int) -> str:
        if self.node_names is None:
            return str(node)
        return self.node_names[node]

    @cached_property
    def digest(self) -> bytes:
        """Digest sha256 (32 bytes) da estrutura do grafo."""
        h = hashlib.sha256()
        h.update(b'SparseGraph')
        h.update(np.int64(self.node_count).tobytes())
        h.update(b'D' if self.directed else b'U')
        h.update(self.adjacency.indptr.astype('<i8').tobytes())
        h.update(self.adjacency.indices.astype('<i8').tobytes())
        h.update(self.adjacency.data.astype('<f8').tobytes())
        if self.partition is not None:
            h.update(self.partition.astype('<i1').tobytes())
        return h.digest()

    def validate(self):
        """
        Verifica os invariantes do grafo.

        Raises:
            ValueError: Se algum invariante for violado
        """
        n = self.node_count
        if self.adjacency.shape != (n, n):
            raise ValueError("Matriz de adjacência não é quadrada")
        if self.adjacency.nnz and np.any(self.adjacency.data <= 0):
            raise ValueError("Pesos de aresta devem ser positivos")

        if not self.directed and self.adjacency.nnz:
            asymmetry = abs(self.adjacency - self.adjacency.T)
            # somas de duplicatas em ordens diferentes diferem no último bit
            tolerance = 1e-12 * max(1.0, float(self.adjacency.data.max()))
            if asymmetry.nnz and asymmetry.max() > tolerance:
                raise ValueError("Grafo não direcionado com adjacência assimétrica")

        if self.partition is not None:
            if self.partition.shape != (n,) or not np.isin(self.partition, (0, 1)).all():
                raise ValueError("Partição deve atribuir 0 ou 1 a cada nó")
            coo = self.adjacency.tocoo()
            if np.any(self.partition[coo.row] == self.partition[coo.col]):
                raise ValueError("Aresta dentro de uma mesma parte da partição bipartida")

        if self.node_names is not None and len(self.node_names) != n:
            raise ValueError("Quantidade de nomes de nós difere de node_count")

    def symmetrized(self) -> 'SparseGraph':
        """
        Retorna a versão não direcionada do grafo (peso máximo entre os dois sentidos).
        Em um grafo já não direcionado, não faz nada.
        """
        if not self.directed:
            return self
        adjacency = self.adjacency.maximum(self.adjacency.T).tocsr()
        return SparseGraph(adjacency=adjacency, directed=False,
                           partition=self.partition, node_names=self.node_names)

    def subgraph(self, nodes: Sequence[int]) -> 'SparseGraph':
        """
        Subgrafo induzido pelos nós dados (na ordem dada); arestas para fora são descartadas.

        Args:
            nodes: Ids dos nós mantidos

        Returns:
            SparseGraph com ids renumerados 0..len(nodes)-1
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        adjacency = self.adjacency[nodes][:, nodes].tocsr()
        partition = None if self.partition is None else self.partition[nodes]
        names = None if self.node_names is None else tuple(self.node_names[i] for i in nodes)
        return SparseGraph(adjacency=adjacency, directed=self.directed,
                           partition=partition, node_names=names)

    def __repr__(self):
        kind = "direcionado" if self.directed else "não direcionado"
        bip = ", bipartido" if self.partition is not None else ""
        return f"SparseGraph(nodes={self.node_count}, edges={self.edge_count}, {kind}{bip})"
