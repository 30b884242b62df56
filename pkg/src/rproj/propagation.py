"""
Propagação das projeções pela regra da cadeia: R^(k) = A R^(k-1).

Cada passo custa O(|E| D); nenhuma matriz densa |V| x |V| é formada.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from graph.transition import TransitionMatrix
from .config import ProjectionConfig
from .initialization import init_projection
from .projection_set import ProjectionSet

DEFAULT_MEMORY_BUDGET = 8 * 1024 ** 3


class MemoryBudgetError(MemoryError):
    """As projeções não cabem no orçamento de memória."""

    def __init__(self, required_bytes: int, budget_bytes: int):
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f"Projeções exigem {required_bytes} bytes "
            f"(orçamento: {budget_bytes} bytes)")


def required_bytes(node_count: int, config: ProjectionConfig) -> int:
    """(N+1) * |V| * D * largura do tipo."""
    return (config.max_power + 1) * node_count * config.dim * config.numpy_dtype.itemsize


class _ChainOperator:
    """Aplica A = F_1 F_2 ... + diag(laços) a matrizes densas, em blocos de linhas.

    Cada linha de saída depende só de uma linha esparsa de um fator, então o
    resultado não depende do número de threads.
    """

    def __init__(self, t: TransitionMatrix, dtype: np.dtype, threads: int):
        self.threads = max(1, int(threads))
        self.self_loops = t.self_loops
        self.stages: List[List[tuple]] = []
        for factor in reversed(t.cast(dtype)):
            self.stages.append(self._row_blocks(factor))

    def _row_blocks(self, factor: sp.csr_matrix) -> List[tuple]:
        rows = factor.shape[0]
        blocks = min(self.threads, max(rows, 1))
        bounds = np.linspace(0, rows, blocks + 1).astype(np.int64)
        return [(int(a), int(b), factor[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]

    def __call__(self, dense: np.ndarray, pool: Optional[ThreadPoolExecutor]) -> np.ndarray:
        current = dense
        for blocks in self.stages:
            rows = blocks[-1][1]
            out = np.empty((rows, current.shape[1]), dtype=dense.dtype)

            def work(block, source=current, target=out):
                a, b, piece = block
                target[a:b] = piece @ source

            if pool is None:
                for block in blocks:
                    work(block)
            else:
                list(pool.map(work, blocks))
            current = out

        if self.self_loops.any():
            current[self.self_loops] += dense[self.self_loops]
        return current


def propagate_matrix(t: TransitionMatrix, r0: np.ndarray, max_power: int,
                     threads: int = 1) -> np.ndarray:
    """
    Propaga uma matriz inicial arbitrária pelas potências de A.

    Args:
        t: Matriz de transição
        r0: Matriz inicial |V| x D (define o dtype)
        max_power: N
        threads: Número de threads (não altera o resultado)

    Returns:
        Array (N+1) x |V| x D com A^k r0
    """
    if r0.shape[0] != t.node_count:
        raise ValueError(f"r0 tem {r0.shape[0]} linhas, esperado {t.node_count}")

    matrices = np.empty((max_power + 1,) + r0.shape, dtype=r0.dtype)
    matrices[0] = r0
    operator = _ChainOperator(t, r0.dtype, threads)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for k in range(1, max_power + 1):
                matrices[k] = operator(matrices[k - 1], pool)
    else:
        for k in range(1, max_power + 1):
            matrices[k] = operator(matrices[k - 1], None)
    return matrices


def propagate(t: TransitionMatrix, config: ProjectionConfig, threads: int = 1,
              memory_budget: int = DEFAULT_MEMORY_BUDGET) -> ProjectionSet:
    """
    Inicializa R^(0) e calcula R^(k) = A R^(k-1) para k = 1..N.

    Args:
        t: Matriz de transição
        config: Configuração das projeções
        threads: Paralelismo sobre linhas (resultados idênticos para qualquer valor)
        memory_budget: Limite de bytes para a pilha de matrizes

    Returns:
        ProjectionSet com as N+1 matrizes

    Raises:
        MemoryBudgetError: Se (N+1) |V| D * largura exceder o orçamento
    """
    needed = required_bytes(t.node_count, config)
    if needed > memory_budget:
        raise MemoryBudgetError(needed, memory_budget)

    r0 = init_projection(t.node_count, config, degrees=t.degrees, edge_count=t.edge_count)
    matrices = propagate_matrix(t, r0, config.max_power, threads=threads)
    return ProjectionSet(matrices=matrices, config=config, graph_hash=t.digest)
