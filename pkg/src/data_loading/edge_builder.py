"""
Acumulador de arestas compartilhado pelos leitores: internação de ids,
validação linha a linha e montagem do SparseGraph.
"""
import math
from typing import Dict, List, Optional

from graph.sparse_graph import SparseGraph
from .idata_reader import EdgeListOptions


class EdgeListFormatError(ValueError):
    """Erro de formato em uma lista de arestas, com o número da linha."""

    def __init__(self, message: str, line_number: int, file_path: Optional[str] = None):
        self.line_number = line_number
        self.file_path = file_path
        location = f"{file_path}:{line_number}" if file_path else f"linha {line_number}"
        super().__init__(f"{location}: {message}")


class EdgeBuilder:
    """
    Acumula arestas lidas de um arquivo.

    Ids (inteiros ou texto) são internados na ordem da primeira aparição.
    Em modo bipartido, a parte de um nó é a coluna (0 = origem, 1 = destino)
    em que ele aparece pela primeira vez.
    """

    def __init__(self, options: EdgeListOptions, file_path: Optional[str] = None):
        self.options = options
        self.file_path = file_path
        self._ids: Dict[str, int] = {}
        self._names: List[str] = []
        self._partition: List[int] = []
        self._sources: List[int] = []
        self._targets: List[int] = []
        self._weights: List[float] = []

    def _intern(self, token: str, column: int, line_number: int) -> int:
        node = self._ids.get(token)
        if node is None:
            node = len(self._names)
            self._ids[token] = node
            self._names.append(token)
            self._partition.append(column)
        elif self.options.bipartite and self._partition[node] != column:
            raise EdgeListFormatError(
                f"aresta dentro da mesma parte: nó '{token}' já apareceu na coluna "
                f"{self._partition[node]}", line_number, self.file_path)
        return node

    def add(self, src: str, dst: str, weight: Optional[str], line_number: int):
        """
        Adiciona uma aresta.

        Args:
            src: Token do nó de origem
            dst: Token do nó de destino
            weight: Token do peso (ou None)
            line_number: Linha do arquivo (para mensagens de erro)

        Raises:
            EdgeListFormatError: Peso inválido, negativo ou aresta intra-partição
        """
        value = 1.0
        if weight is not None:
            try:
                value = float(weight)
            except ValueError:
                raise EdgeListFormatError(f"peso inválido '{weight}'", line_number, self.file_path)
            if not math.isfinite(value):
                raise EdgeListFormatError(f"peso não finito '{weight}'", line_number, self.file_path)
            if value < 0:
                raise EdgeListFormatError(f"peso negativo {value}", line_number, self.file_path)
            if value == 0:
                raise EdgeListFormatError("peso zero", line_number, self.file_path)

        u = self._intern(src, 0, line_number)
        v = self._intern(dst, 1, line_number)

        self._sources.append(u)
        self._targets.append(v)
        self._weights.append(value if self.options.weighted else 1.0)

    def build(self) -> SparseGraph:
        """Monta o grafo (duplicatas fundidas pela soma dos pesos)."""
        return SparseGraph.from_edges(
            node_count=len(self._names),
            sources=self._sources,
            targets=self._targets,
            weights=self._weights,
            directed=self.options.directed,
            partition=self._partition if self.options.bipartite else None,
            node_names=self._names,
        )
