"""
Otimizadores - Padrão Strategy.
"""
from abc import ABC, abstractmethod
from typing import List

import numpy as np


class IOptimizer(ABC):
    """Atualiza os parâmetros no lugar a partir dos gradientes."""

    def __init__(self, learning_rate: float):
        if learning_rate <= 0:
            raise ValueError(f"learning_rate deve ser positivo, recebido {learning_rate}")
        self.learning_rate = learning_rate

    @abstractmethod
    def step(self, params: List[np.ndarray], grads: List[np.ndarray]):
        pass


class SGD(IOptimizer):

    def step(self, params, grads):
        for p, g in zip(params, grads):
            p -= (self.learning_rate * g).astype(p.dtype, copy=False)


class Adam(IOptimizer):
    """Adam com correção de viés."""

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 epsilon: float = 1e-8):
        super().__init__(learning_rate)
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self.m: List[np.ndarray] = []
        self.v: List[np.ndarray] = []

    def step(self, params, grads):
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.epsilon)
            p -= update.astype(p.dtype, copy=False)
