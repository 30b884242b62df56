"""
Métricas de avaliação e baseline de classe majoritária.
"""
from typing import Tuple

import numpy as np
from scipy.stats import rankdata


def _check_inputs(predictions, labels) -> Tuple[np.ndarray, np.ndarray]:
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("Métrica indefinida para entrada vazia")
    if predictions.shape != labels.shape:
        raise ValueError(f"Formatos diferentes: {predictions.shape} e {labels.shape}")
    return predictions, labels


def metric_accuracy(predictions, labels) -> float:
    """Fração de acertos exatos."""
    predictions, labels = _check_inputs(predictions, labels)
    return float(np.mean(predictions == labels))


def metric_auc(scores, labels) -> float:
    """
    Área sob a curva ROC pela estatística de Mann-Whitney (empates contam 1/2).

    Args:
        scores: Escores (maior = mais provável positivo)
        labels: 0/1

    Raises:
        ValueError: Se só uma classe estiver presente
    """
    scores, labels = _check_inputs(scores, labels)
    positive = labels == 1
    n_pos = int(positive.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC exige exemplos positivos e negativos")
    ranks = rankdata(scores, method='average')
    u = ranks[positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def metric_mapped_accuracy(predictions, labels) -> float:
    """
    Acurácia após mapear cada grupo de predições para a moda dos rótulos verdadeiros.
    Nunca é menor que a acurácia simples.
    """
    predictions, labels = _check_inputs(predictions, labels)
    _, pred_index = np.unique(predictions, return_inverse=True)
    _, label_index = np.unique(labels, return_inverse=True)
    counts = np.zeros((pred_index.max() + 1, label_index.max() + 1), dtype=np.int64)
    np.add.at(counts, (pred_index.ravel(), label_index.ravel()), 1)
    return float(counts.max(axis=1).sum() / len(labels))


def majority_class(labels) -> int:
    """Classe mais frequente (a menor, em caso de empate)."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("Baseline indefinido para entrada vazia")
    values, counts = np.unique(labels, return_counts=True)
    return values[np.argmax(counts)]


def majority_baseline(labels) -> float:
    """Acurácia de prever sempre a classe mais frequente: a frequência dessa classe."""
    labels = np.asarray(labels)
    return metric_accuracy(np.full(len(labels), majority_class(labels)), labels)


METRICS = {
    'accuracy': metric_accuracy,
    'mapped_accuracy': metric_mapped_accuracy,
    'auc': metric_auc,
}
