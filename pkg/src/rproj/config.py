"""
Configuração das projeções aleatórias.
"""
import hashlib
import json
from dataclasses import dataclass, asdict

import numpy as np

DEFAULT_DIM = 128
DEFAULT_MAX_POWER = 10
DEFAULT_BETA = -0.9
DEFAULT_SPARSITY = 3

INIT_KINDS = ('gaussian', 'sparse', 'identity')
NORMALIZATIONS = ('none', 'degree')
DTYPES = ('float32', 'float64')


@dataclass(frozen=True)
class ProjectionConfig:
    """
    Configuração de uma família de projeções R^(0)..R^(N).

    Attributes:
        dim: Dimensão D das projeções
        max_power: Maior potência N
        init: 'gaussian' (variância 1/D), 'sparse' (valores ±sqrt(s) e 0) ou
            'identity' (modo exato, exige D = |V|)
        sparsity: Parâmetro s da inicialização esparsa
        normalization: 'none' ou 'degree' (linhas escaladas por (d_i / 2m)^beta)
        beta: Expoente da normalização por grau
        seed: Semente de 64 bits
        dtype: 'float32' (padrão) ou 'float64' (modo de precisão estendida)
    """

    dim: int = DEFAULT_DIM
    max_power: int = DEFAULT_MAX_POWER
    init: str = 'gaussian'
    sparsity: int = DEFAULT_SPARSITY
    normalization: str = 'none'
    beta: float = DEFAULT_BETA
    seed: int = 0
    dtype: str = 'float32'

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim deve ser >= 1, recebido {self.dim}")
        if self.max_power < 0:
            raise ValueError(f"max_power deve ser >= 0, recebido {self.max_power}")
        if self.init not in INIT_KINDS:
            raise ValueError(f"init '{self.init}' inválido. Opções: {list(INIT_KINDS)}")
        if self.init == 'sparse' and not 1 <= self.sparsity <= 255:
            raise ValueError(f"sparsity deve estar em [1, 255], recebido {self.sparsity}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"normalization '{self.normalization}' inválida. Opções: {list(NORMALIZATIONS)}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed deve ser um inteiro de 64 bits sem sinal, recebido {self.seed}")
        if self.dtype not in DTYPES:
            raise ValueError(f"dtype '{self.dtype}' inválido. Opções: {list(DTYPES)}")

    @property
    def numpy_dtype(self) -> np.dtype:
        return np.dtype(self.dtype)

    @property
    def entry_variance(self) -> float:
        """Variância sigma^2 das entradas de R^(0) (antes da normalização por grau)."""
        if self.init == 'sparse':
            return 1.0
        return 1.0 / self.dim

    @property
    def dot_scale(self) -> float:
        """Fator 1/(D sigma^2) que torna R_i^(k) . R_j^(s) um estimador não viesado de F."""
        return 1.0 / (self.dim * self.entry_variance)

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()
