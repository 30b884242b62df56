"""
Inicialização identidade (modo exato): R^(0) = I, então R^(k) = A^k.
"""
import numpy as np

from rproj.config import ProjectionConfig
from .iprojection_init import IProjectionInit


class IdentityInit(IProjectionInit):
    """R^(0) = I_|V|; usada como oráculo exato nos testes (exige D = |V|)."""

    @property
    def name(self) -> str:
        return "identity"

    @property
    def code(self) -> int:
        return 2

    def sample_rows(self, start: int, stop: int, node_count: int,
                    config: ProjectionConfig) -> np.ndarray:
        if config.dim != node_count:
            raise ValueError(
                f"Inicialização identidade exige dim == |V| ({config.dim} != {node_count})")
        rows = np.zeros((stop - start, config.dim))
        rows[np.arange(stop - start), np.arange(start, stop)] = 1.0
        return rows
