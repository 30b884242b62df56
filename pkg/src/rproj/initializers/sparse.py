"""
Inicialização esparsa: sqrt(s) com prob. 1/(2s), 0 com prob. 1 - 1/s, -sqrt(s) com prob. 1/(2s).
"""
import numpy as np

from rproj.config import ProjectionConfig
from .iprojection_init import IProjectionInit
from .counter import counter_uniforms


class SparseInit(IProjectionInit):
    """Projeção aleatória esparsa (variância 1 por entrada)."""

    @property
    def name(self) -> str:
        return "sparse"

    @property
    def code(self) -> int:
        return 1

    def sample_rows(self, start: int, stop: int, node_count: int,
                    config: ProjectionConfig) -> np.ndarray:
        s = float(config.sparsity)
        uniforms = counter_uniforms(config.seed, start * config.dim, (stop - start) * config.dim)
        tail = 1.0 / (2.0 * s)

        values = np.zeros_like(uniforms)
        values[uniforms < tail] = np.sqrt(s)
        values[uniforms >= 1.0 - tail] = -np.sqrt(s)
        return values.reshape(stop - start, config.dim)
