"""
Inicialização da matriz aleatória R^(0).
"""
from typing import Dict, Optional, Type

import numpy as np

from .config import ProjectionConfig
from .initializers.iprojection_init import IProjectionInit
from .initializers.gaussian import GaussianInit
from .initializers.sparse import SparseInit
from .initializers.identity import IdentityInit

_INITIALIZERS: Dict[str, Type[IProjectionInit]] = {
    'gaussian': GaussianInit,
    'sparse': SparseInit,
    'identity': IdentityInit,
}

# linhas geradas por bloco (limita a memória temporária)
_ROW_BLOCK = 4096


def create_initializer(kind: str) -> IProjectionInit:
    """
    Retorna a estratégia de inicialização pelo nome.

    Raises:
        ValueError: Se o nome não for conhecido
    """
    if kind not in _INITIALIZERS:
        raise ValueError(f"Inicialização '{kind}' desconhecida. Opções: {sorted(_INITIALIZERS)}")
    return _INITIALIZERS[kind]()


def initializer_from_code(code: int) -> IProjectionInit:
    for cls in _INITIALIZERS.values():
        initializer = cls()
        if initializer.code == code:
            return initializer
    raise ValueError(f"Código de inicialização desconhecido: {code}")


def degree_scaling(degrees: np.ndarray, edge_count: int, beta: float) -> np.ndarray:
    """
    Fatores (d_i / 2m)^beta da normalização por grau; nós sem arestas ficam com fator 1.
    """
    degrees = np.asarray(degrees, dtype=np.float64)
    scale = np.ones_like(degrees)
    if edge_count > 0:
        positive = degrees > 0
        scale[positive] = (degrees[positive] / (2.0 * edge_count)) ** beta
    return scale


def init_projection(node_count: int, config: ProjectionConfig,
                    degrees: Optional[np.ndarray] = None,
                    edge_count: Optional[int] = None) -> np.ndarray:
    """
    Gera R^(0) com |V| linhas e D colunas.

    A entrada (i, p) é função pura de (seed, i, p). Com normalização por grau,
    cada linha i é multiplicada por (d_i / 2m)^beta.

    Args:
        node_count: Número de nós |V|
        config: Configuração das projeções
        degrees: Graus ponderados dos nós (obrigatório com normalização por grau)
        edge_count: Número de arestas m (obrigatório com normalização por grau)

    Returns:
        Matriz |V| x D no dtype da configuração
    """
    initializer = create_initializer(config.init)
    matrix = np.empty((node_count, config.dim), dtype=np.float64)
    for start in range(0, node_count, _ROW_BLOCK):
        stop = min(start + _ROW_BLOCK, node_count)
        matrix[start:stop] = initializer.sample_rows(start, stop, node_count, config)

    if config.normalization == 'degree':
        if degrees is None or edge_count is None:
            raise ValueError("Normalização por grau exige degrees e edge_count")
        matrix *= degree_scaling(degrees, edge_count, config.beta)[:, None]

    return matrix.astype(config.numpy_dtype, copy=False)
