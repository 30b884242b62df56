"""
Inicialização gaussiana iid N(0, 1/D).
"""
import numpy as np
from scipy.special import ndtri

from rproj.config import ProjectionConfig
from .iprojection_init import IProjectionInit
from .counter import counter_uniforms


class GaussianInit(IProjectionInit):
    """Entradas iid N(0, sigma^2) com sigma^2 = 1/D, por inversão da CDF normal."""

    @property
    def name(self) -> str:
        return "gaussian"

    @property
    def code(self) -> int:
        return 0

    def sample_rows(self, start: int, stop: int, node_count: int,
                    config: ProjectionConfig) -> np.ndarray:
        uniforms = counter_uniforms(config.seed, start * config.dim, (stop - start) * config.dim)
        values = ndtri(uniforms) * np.sqrt(config.entry_variance)
        return values.reshape(stop - start, config.dim)
