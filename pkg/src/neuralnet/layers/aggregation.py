"""
Agregação por média sobre as D linhas (dimensões da projeção).
"""
import numpy as np

from .ilayer import ILayer


class MeanOverRows(ILayer):
    """
    (lote, D, M) -> (lote, M): F = (1/D) sum_p H_p.

    A soma é feita sobre os valores ordenados ao longo de D, então o resultado é
    idêntico bit a bit para qualquer permutação das linhas.
    """

    def __init__(self):
        super().__init__()
        self._rows = None

    @property
    def kind(self) -> str:
        return "mean_rows"

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 3:
            raise ValueError(f"Agregação espera entrada (lote, D, M), recebido {x.shape}")
        self._rows = x.shape[1]
        return (np.sort(x, axis=1).sum(axis=1) / self._rows).astype(x.dtype, copy=False)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        grad = grad_out[:, None, :] / self._rows
        return np.broadcast_to(grad, (grad_out.shape[0], self._rows, grad_out.shape[1])).astype(
            grad_out.dtype)

    def output_width(self, input_width: int) -> int:
        return input_width
