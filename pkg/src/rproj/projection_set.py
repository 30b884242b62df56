"""
Classe ProjectionSet - a pilha R^(0)..R^(N) de projeções de um grafo.
"""
import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import ProjectionConfig


@dataclass(frozen=True, eq=False)
class ProjectionSet:
    """
    Projeções de todas as potências da matriz de transição.

    Attributes:
        matrices: Array (N+1) x |V| x D; matrices[k] = A^k R^(0)
        config: Configuração que gerou as projeções
        graph_hash: Digest (32 bytes) da matriz de transição de origem
    """

    matrices: np.ndarray
    config: ProjectionConfig
    graph_hash: bytes

    def __post_init__(self):
        matrices = np.ascontiguousarray(self.matrices)
        if matrices.ndim != 3:
            raise ValueError(f"matrices deve ter 3 dimensões, recebido {matrices.ndim}")
        if matrices.shape[0] != self.config.max_power + 1 or matrices.shape[2] != self.config.dim:
            raise ValueError(
                f"Formato {matrices.shape} incompatível com N={self.config.max_power}, "
                f"D={self.config.dim}")
        matrices.setflags(write=False)
        object.__setattr__(self, 'matrices', matrices)

    @property
    def node_count(self) -> int:
        return self.matrices.shape[1]

    @property
    def dim(self) -> int:
        return self.matrices.shape[2]

    @property
    def max_power(self) -> int:
        return self.matrices.shape[0] - 1

    def power(self, k: int) -> np.ndarray:
        """R^(k)."""
        return self.matrices[k]

    def check_node(self, node: int):
        """
        Raises:
            IndexError: Se o nó estiver fora de [0, |V|)
        """
        if not 0 <= int(node) < self.node_count:
            raise IndexError(f"Nó {node} fora do intervalo [0, {self.node_count})")

    @cached_property
    def node_major(self) -> np.ndarray:
        """Array |V| x D x (N+1): linha i é a matriz X^(i) da entrada do ConvNet."""
        stacked = np.ascontiguousarray(np.transpose(self.matrices, (1, 2, 0)))
        stacked.setflags(write=False)
        return stacked

    @cached_property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.config.digest().encode('utf-8'))
        h.update(self.graph_hash)
        h.update(self.matrices.tobytes())
        return h.hexdigest()

    def __repr__(self):
        return (f"ProjectionSet(nodes={self.node_count}, dim={self.dim}, "
                f"powers=0..{self.max_power}, init='{self.config.init}')")
