"""
Gerador de grafos por modelo de blocos estocástico (SBM).
"""
import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from graph.sparse_graph import SparseGraph


@dataclass(frozen=True)
class SbmSpec:
    """
    Família de grafos SBM.

    Attributes:
        block_sizes: Número de nós de cada bloco (>= 2 blocos)
        p_intra: Probabilidade de aresta dentro do bloco (uma para todos ou uma por bloco)
        p_inter: Probabilidade de aresta entre blocos diferentes
        seed: Semente
    """

    block_sizes: Tuple[int, ...]
    p_intra: Union[float, Tuple[float, ...]]
    p_inter: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'block_sizes', tuple(int(b) for b in self.block_sizes))
        if isinstance(self.p_intra, (list, tuple, np.ndarray)):
            object.__setattr__(self, 'p_intra', tuple(float(p) for p in self.p_intra))
        if len(self.block_sizes) < 2:
            raise ValueError("SBM exige ao menos 2 blocos")
        if any(b < 1 for b in self.block_sizes):
            raise ValueError("Blocos devem ter ao menos 1 nó")
        if len(self.intra_probabilities) != len(self.block_sizes):
            raise ValueError("p_intra deve ter um valor por bloco")
        if not all(0.0 <= p <= 1.0 for p in self.intra_probabilities + (self.p_inter,)):
            raise ValueError("Probabilidades devem estar em [0, 1]")

    @property
    def intra_probabilities(self) -> Tuple[float, ...]:
        if isinstance(self.p_intra, tuple):
            return self.p_intra
        return (float(self.p_intra),) * len(self.block_sizes)

    @property
    def node_count(self) -> int:
        return sum(self.block_sizes)

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def _triangle_pairs(n: int, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Converte índices lineares do triângulo superior estrito n x n em pares (i, j), i < j."""
    t = np.asarray(t, dtype=np.int64)

    def before(i):
        # pares nas linhas anteriores a i
        return i * (2 * n - i - 1) // 2

    i = np.floor(((2 * n - 1) - np.sqrt((2 * n - 1) ** 2 - 8.0 * t)) / 2).astype(np.int64)
    i = np.clip(i, 0, max(n - 2, 0))
    i = np.where(before(i) > t, i - 1, i)
    i = np.where(before(i + 1) <= t, i + 1, i)
    return i, t - before(i) + i + 1


def _sample_pairs(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Índices dos pares presentes: cada um dos `total` pares entra com probabilidade p."""
    if total == 0 or p == 0.0:
        return np.zeros(0, dtype=np.int64)
    count = rng.binomial(total, p)
    return np.sort(rng.choice(total, size=count, replace=False))


def generate_sbm(spec: SbmSpec) -> Tuple[SparseGraph, np.ndarray]:
    """
    Gera um grafo SBM simples não direcionado.

    Cada par de nós recebe uma aresta independentemente, com probabilidade p_intra
    (mesmo bloco) ou p_inter (blocos diferentes).

    Args:
        spec: Especificação do SBM

    Returns:
        (grafo, rótulos = id do bloco de cada nó)
    """
    rng = np.random.default_rng(spec.seed)
    sizes = np.array(spec.block_sizes, dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    labels = np.repeat(np.arange(len(sizes)), sizes)

    sources, targets = [], []
    for a in range(len(sizes)):
        n_a = int(sizes[a])
        picked = _sample_pairs(rng, n_a * (n_a - 1) // 2, spec.intra_probabilities[a])
        i, j = _triangle_pairs(n_a, picked)
        sources.append(offsets[a] + i)
        targets.append(offsets[a] + j)
        for b in range(a + 1, len(sizes)):
            n_b = int(sizes[b])
            picked = _sample_pairs(rng, n_a * n_b, spec.p_inter)
            sources.append(offsets[a] + picked // n_b)
            targets.append(offsets[b] + picked % n_b)

    graph = SparseGraph.from_edges(int(offsets[-1]), np.concatenate(sources),
                                   np.concatenate(targets))
    return graph, labels
