"""
Interface para estratégias de inicialização - Padrão Strategy.
"""
from abc import ABC, abstractmethod

import numpy as np

from rproj.config import ProjectionConfig


class IProjectionInit(ABC):
    """Interface abstrata para inicializações de R^(0)."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Nome da inicialização (como em ProjectionConfig.init)."""
        pass

    @property
    @abstractmethod
    def code(self) -> int:
        """Código gravado no cabeçalho do arquivo de projeções."""
        pass

    @abstractmethod
    def sample_rows(self, start: int, stop: int, node_count: int,
                    config: ProjectionConfig) -> np.ndarray:
        """
        Gera as linhas start..stop-1 de R^(0) em float64.

        A entrada (i, p) deve depender apenas de (seed, i, p), nunca da ordem
        de geração nem do tamanho dos blocos.

        Args:
            start: Primeira linha
            stop: Linha final (exclusiva)
            node_count: Número total de nós |V|
            config: Configuração das projeções

        Returns:
            Matriz (stop - start) x D
        """
        pass
