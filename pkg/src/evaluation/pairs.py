"""
Amostras de pares de nós para a tarefa "mesma classe?".

O treino recebe apenas o rótulo binário do par, nunca os rótulos dos nós.
"""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

SAME_CLASS = 1
DIFFERENT_CLASS = 0


@dataclass(frozen=True)
class PairSample:
    """Par ordenado (i, j), i != j, com rótulo 1 (mesma classe) ou 0 (classes diferentes)."""

    i: int
    j: int
    label: int


def _class_blocks(labels: np.ndarray):
    """Nós rotulados agrupados por classe: (nós ordenados, classe, início do bloco, tamanho)."""
    nodes = np.flatnonzero(labels >= 0)
    order = nodes[np.argsort(labels[nodes], kind='stable')]
    classes, starts, sizes = np.unique(labels[order], return_index=True, return_counts=True)
    return order, classes, starts, sizes


def make_pair_samples(labels, count: int, seed: int, balanced: bool = True) -> List[PairSample]:
    """
    Sorteia pares uniformemente entre os pares ordenados elegíveis.

    Com `balanced`, metade dos pares (arredondada para baixo) é da mesma classe e o
    restante de classes diferentes; sem, os pares são uniformes entre todos os pares
    rotulados. Nós com rótulo negativo são ignorados.

    Args:
        labels: Classe de cada nó (-1 = sem rótulo)
        count: Número de pares
        seed: Semente

    Returns:
        Lista de PairSample em ordem aleatória determinística

    Raises:
        ValueError: Menos de duas classes, ou nenhum par da mesma classe possível
    """
    labels = np.asarray(labels, dtype=np.int64)
    order, classes, starts, sizes = _class_blocks(labels)
    if len(classes) < 2:
        raise ValueError("Distribuição de rótulos degenerada: são necessárias ao menos 2 classes")
    if balanced and not np.any(sizes >= 2):
        raise ValueError("Nenhuma classe com dois nós: impossível sortear pares da mesma classe")

    rng = np.random.default_rng(seed)
    total = len(order)
    block_of = np.repeat(np.arange(len(classes)), sizes)
    position = np.arange(total) - starts[block_of]

    def same_pairs(n):
        weights = (sizes[block_of] - 1).astype(np.float64)
        first = rng.choice(total, size=n, p=weights / weights.sum())
        block = block_of[first]
        shift = rng.integers(0, sizes[block] - 1)
        second = starts[block] + (position[first] + 1 + shift) % sizes[block]
        return first, second

    def different_pairs(n):
        weights = (total - sizes[block_of]).astype(np.float64)
        first = rng.choice(total, size=n, p=weights / weights.sum())
        block = block_of[first]
        r = rng.integers(0, total - sizes[block])
        second = np.where(r < starts[block], r, r + sizes[block])
        return first, second

    if balanced:
        n_same = count // 2
        first_s, second_s = same_pairs(n_same)
        first_d, second_d = different_pairs(count - n_same)
        first = np.concatenate([first_s, first_d])
        second = np.concatenate([second_s, second_d])
    else:
        first = rng.integers(0, total, size=count)
        r = rng.integers(0, total - 1, size=count)
        second = np.where(r < first, r, r + 1)

    shuffle = rng.permutation(len(first))
    i, j = order[first[shuffle]], order[second[shuffle]]
    same = labels[i] == labels[j]
    return [PairSample(int(a), int(b), SAME_CLASS if s else DIFFERENT_CLASS)
            for a, b, s in zip(i, j, same)]


def pair_arrays(samples: List[PairSample]) -> Tuple[np.ndarray, np.ndarray]:
    """(pares N x 2, rótulos N) a partir das amostras."""
    pairs = np.array([(s.i, s.j) for s in samples], dtype=np.int64).reshape(-1, 2)
    return pairs, np.array([s.label for s in samples], dtype=np.int64)
