"""
Interface para leitores de grafos.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

from graph.sparse_graph import SparseGraph


@dataclass(frozen=True)
class EdgeListOptions:
    """Opções de leitura de uma lista de arestas."""

    directed: bool = False
    weighted: bool = False
    bipartite: bool = False


class IGraphReader(ABC):
    """Interface abstrata para leitores de grafos."""

    def __init__(self, file_path: str, options: EdgeListOptions = EdgeListOptions()):
        """
        Inicializa o leitor.

        Args:
            file_path: Caminho do arquivo
            options: Opções de leitura (direcionado, ponderado, bipartido)
        """
        self.file_path = file_path
        self.options = options

    @abstractmethod
    def read(self) -> SparseGraph:
        """
        Lê o arquivo e retorna o grafo.

        Returns:
            SparseGraph: Grafo carregado
        """
        pass
