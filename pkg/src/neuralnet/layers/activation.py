"""
Ativação ReLU.
"""
import numpy as np

from .ilayer import ILayer


class ReLU(ILayer):

    def __init__(self):
        super().__init__()
        self._mask = None

    @property
    def kind(self) -> str:
        return "relu"

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0
        return np.where(self._mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return np.where(self._mask, grad_out, 0).astype(grad_out.dtype, copy=False)

    def output_width(self, input_width: int) -> int:
        return input_width
