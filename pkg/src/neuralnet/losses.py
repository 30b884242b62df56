"""
Funções de perda: entropia cruzada softmax (com máscara de classes) e entropia
cruzada binária sobre logits. Cada função devolve (perda média, gradiente dos logits).
"""
from typing import Callable, Dict, Optional, Tuple

import numpy as np


class NonFiniteLossError(FloatingPointError):
    """Perda ou gradientes não finitos; o passo de otimização é abortado."""

    def __init__(self, loss: float, detail: str = "", epoch: Optional[int] = None,
                 batch: Optional[int] = None):
        self.epoch = epoch
        self.batch = batch
        self.loss = loss
        message = f"Perda não finita ({loss})"
        if epoch is not None:
            message += f" na época {epoch}, lote {batch}"
        super().__init__(f"{message}: {detail}" if detail else message)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax por linha; logits -inf (classes mascaradas) recebem probabilidade 0."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def sigmoid(z: np.ndarray) -> np.ndarray:
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))),
                    np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Args:
        logits: (lote, classes); classes ausentes valem -inf
        labels: Ids das classes (lote,)

    Returns:
        (perda média, gradiente em relação aos logits)
    """
    batch = len(labels)
    wide = logits.astype(np.float64)
    top = wide.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(wide - top).sum(axis=1)) + top[:, 0]
    picked = wide[np.arange(batch), labels]
    loss = float(np.mean(log_norm - picked))

    grad = softmax(wide)
    grad[np.arange(batch), labels] -= 1.0
    return loss, (grad / batch).astype(logits.dtype)


def binary_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Args:
        logits: (lote, 1) escore do par
        labels: 0/1 (lote,)

    Returns:
        (perda média, gradiente em relação aos logits)
    """
    z = logits[:, 0].astype(np.float64)
    y = labels.astype(np.float64)
    loss = float(np.mean(np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    grad = (sigmoid(z) - y) / len(y)
    return loss, grad[:, None].astype(logits.dtype)


LOSSES: Dict[str, Callable[[np.ndarray, np.ndarray], Tuple[float, np.ndarray]]] = {
    'cross-entropy': softmax_cross_entropy,
    'binary-cross-entropy': binary_cross_entropy,
}


def get_loss(name: str):
    """
    Raises:
        ValueError: Se a perda não for conhecida
    """
    if name not in LOSSES:
        raise ValueError(f"Perda '{name}' desconhecida. Opções: {sorted(LOSSES)}")
    return LOSSES[name]
