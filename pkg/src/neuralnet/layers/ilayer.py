"""
Interface para camadas - Padrão Strategy.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np


class ILayer(ABC):
    """
    Interface abstrata para camadas com retropropagação manual.

    `forward` guarda o que `backward` precisa; `backward` acumula os gradientes
    dos parâmetros em `grads` e devolve o gradiente da entrada.
    """

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}

    @property
    @abstractmethod
    def kind(self) -> str:
        """Nome do tipo de camada (usado na persistência)."""
        pass

    @abstractmethod
    def forward(self, x: np.ndarray) -> np.ndarray:
        """
        Args:
            x: Entrada (..., largura)

        Returns:
            Saída (..., largura de saída)
        """
        pass

    @abstractmethod
    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        """
        Args:
            grad_out: Gradiente da perda em relação à saída do último forward

        Returns:
            Gradiente da perda em relação à entrada
        """
        pass

    @abstractmethod
    def output_width(self, input_width: int) -> int:
        pass

    def config(self) -> Dict[str, Any]:
        """Argumentos que reconstroem a camada (sem os pesos)."""
        return {}

    def zero_grads(self):
        for name, value in self.params.items():
            self.grads[name] = np.zeros_like(value)

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))
