"""
Convolução 1-D deslizante ao longo de cada linha (janela fixa, passo 1), seguida de
achatamento para (posições x canais).
"""
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .ilayer import ILayer


class SlidingConv1d(ILayer):
    """
    Trata cada linha de largura W como um sinal de um canal e aplica `channels`
    filtros de tamanho `window`, produzindo (W - window + 1) * channels valores.
    """

    def __init__(self, in_width: int, channels: int, window: int = 3,
                 rng: Optional[np.random.Generator] = None, dtype: str = 'float32'):
        super().__init__()
        if window < 1 or window > in_width:
            raise ValueError(f"Janela {window} incompatível com a largura {in_width}")
        self.in_width = in_width
        self.channels = channels
        self.window = window
        self.positions = in_width - window + 1
        if rng is None:
            kernel = np.zeros((channels, window))
        else:
            kernel = rng.normal(0.0, np.sqrt(2.0 / window), size=(channels, window))
        self.params = {'kernel': kernel.astype(dtype), 'bias': np.zeros(channels, dtype=dtype)}
        self.zero_grads()
        self._windows = None

    @property
    def kind(self) -> str:
        return "sliding_conv"

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.in_width:
            raise ValueError(
                f"Camada {self.kind} espera largura {self.in_width}, recebido {x.shape[-1]}")
        self._windows = sliding_window_view(x, self.window, axis=-1)
        out = np.einsum('...lw,cw->...lc', self._windows, self.params['kernel']) + self.params['bias']
        return out.reshape(x.shape[:-1] + (self.positions * self.channels,))

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        lead = grad_out.shape[:-1]
        grad = grad_out.reshape(lead + (self.positions, self.channels))
        self.grads['kernel'] += np.einsum('...lc,...lw->cw', grad, self._windows)
        self.grads['bias'] += grad.reshape(-1, self.channels).sum(axis=0)

        grad_windows = np.einsum('...lc,cw->...lw', grad, self.params['kernel'])
        grad_in = np.zeros(lead + (self.in_width,), dtype=grad_out.dtype)
        for offset in range(self.window):
            grad_in[..., offset:offset + self.positions] += grad_windows[..., offset]
        return grad_in

    def output_width(self, input_width: int) -> int:
        return self.positions * self.channels

    def config(self):
        return {'in_width': self.in_width, 'channels': self.channels, 'window': self.window}
