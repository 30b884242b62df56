"""
Camadas densas sobre o último eixo.

Os produtos usam np.einsum, que calcula cada linha de saída só a partir da linha de
entrada correspondente; assim a saída de uma linha não depende da sua posição no lote.
"""
from typing import Optional

import numpy as np

from .ilayer import ILayer


class Dense(ILayer):
    """y = x W^T + b, aplicado ao último eixo (qualquer número de eixos à esquerda)."""

    def __init__(self, in_width: int, out_width: int, rng: Optional[np.random.Generator] = None,
                 dtype: str = 'float32'):
        super().__init__()
        if in_width < 1 or out_width < 1:
            raise ValueError(f"Larguras devem ser >= 1, recebido {in_width} -> {out_width}")
        self.in_width = in_width
        self.out_width = out_width
        if rng is None:
            weights = np.zeros((out_width, in_width))
        else:
            weights = rng.normal(0.0, np.sqrt(2.0 / in_width), size=(out_width, in_width))
        self.params = {'weights': weights.astype(dtype), 'bias': np.zeros(out_width, dtype=dtype)}
        self.zero_grads()
        self._input = None

    @property
    def kind(self) -> str:
        return "dense"

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.in_width:
            raise ValueError(
                f"Camada {self.kind} espera largura {self.in_width}, recebido {x.shape[-1]}")
        self._input = x
        return np.einsum('...i,oi->...o', x, self.params['weights']) + self.params['bias']

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        x = self._input
        self.grads['weights'] += np.einsum('...o,...i->oi', grad_out, x)
        self.grads['bias'] += grad_out.reshape(-1, self.out_width).sum(axis=0)
        return np.einsum('...o,oi->...i', grad_out, self.params['weights'])

    def output_width(self, input_width: int) -> int:
        return self.out_width

    def config(self):
        return {'in_width': self.in_width, 'out_width': self.out_width}


class RowConv(Dense):
    """
    Convolução 1-D com kernel do tamanho da linha: a mesma transformação densa
    aplicada a cada uma das D linhas da entrada (D x largura).
    """

    @property
    def kind(self) -> str:
        return "row_conv"
