"""
Rede sequencial: RP ConvNet (transformação g por linha + média sobre as D linhas +
cabeça densa) ou rede totalmente conectada sobre tabelas de features.
"""
import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from rproj.projection_set import ProjectionSet
from .layers.activation import ReLU
from .layers.aggregation import MeanOverRows
from .layers.dense import Dense, RowConv
from .layers.ilayer import ILayer
from .layers.sliding_conv import SlidingConv1d
from .losses import NonFiniteLossError, get_loss

MODEL_KINDS = ('fc', 'convnet')

# kernel 0 = kernel do tamanho da linha
FULL_ROW_KERNEL = 0


@dataclass(frozen=True)
class ModelSpec:
    """
    Arquitetura da rede.

    Attributes:
        kind: 'convnet' (entrada D x largura) ou 'fc' (vetor de features)
        conv_channels: Canais de cada camada de g (ConvNet)
        conv_kernel: 0 = kernel do tamanho da linha; > 0 = janela deslizante na primeira camada
        hidden: Larguras das camadas ocultas da cabeça
    """

    kind: str = 'convnet'
    conv_channels: Tuple[int, ...] = (64, 64)
    conv_kernel: int = FULL_ROW_KERNEL
    hidden: Tuple[int, ...] = (64,)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"kind '{self.kind}' inválido. Opções: {list(MODEL_KINDS)}")
        object.__setattr__(self, 'conv_channels', tuple(int(c) for c in self.conv_channels))
        object.__setattr__(self, 'hidden', tuple(int(h) for h in self.hidden))
        if any(c < 1 for c in self.conv_channels + self.hidden):
            raise ValueError("Larguras de camada devem ser >= 1")
        if self.kind == 'convnet' and not self.conv_channels:
            raise ValueError("ConvNet exige ao menos uma camada de convolução")
        if self.conv_kernel < 0:
            raise ValueError(f"conv_kernel deve ser >= 0, recebido {self.conv_kernel}")

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


@dataclass(frozen=True)
class Standardizer:
    """Padronização z-score com média e desvio do conjunto de treino."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> 'Standardizer':
        x = np.asarray(x, dtype=np.float64)
        std = x.std(axis=0)
        return cls(mean=x.mean(axis=0), scale=np.where(std > 0, std, 1.0))

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.scale


class Network:
    """
    Sequência de camadas com máscara de classes e padronização opcional da entrada.

    Os parâmetros treináveis (ModelParams) são os `params` das camadas.
    Logits de classes fora de `class_mask` valem -inf, então não recebem gradiente.
    """

    def __init__(self, layers: Sequence[ILayer], input_width: int, n_outputs: int,
                 spec: ModelSpec, dtype: str = 'float32',
                 class_mask: Optional[np.ndarray] = None,
                 standardizer: Optional[Standardizer] = None):
        self.layers = list(layers)
        self.input_width = input_width
        self.n_outputs = n_outputs
        self.spec = spec
        self.dtype = np.dtype(dtype)
        self.class_mask = None if class_mask is None else np.asarray(class_mask, dtype=bool)
        self.standardizer = standardizer

        width = input_width
        for layer in self.layers:
            width = layer.output_width(width)
        if width != n_outputs:
            raise ValueError(f"Camadas produzem largura {width}, esperado {n_outputs}")
        if self.class_mask is not None and self.class_mask.shape != (n_outputs,):
            raise ValueError("Máscara de classes com tamanho diferente do número de saídas")

    def forward(self, x: np.ndarray) -> np.ndarray:
        """
        Args:
            x: (lote, D, largura) para ConvNet ou (lote, features) para 'fc'

        Returns:
            Logits (lote, saídas)

        Raises:
            ValueError: Se o formato da entrada não compuser com as camadas
        """
        expected_ndim = 3 if self.spec.kind == 'convnet' else 2
        if x.ndim != expected_ndim or x.shape[-1] != self.input_width:
            raise ValueError(
                f"Entrada com formato {x.shape} incompatível com a rede "
                f"({expected_ndim} eixos, largura {self.input_width})")
        if self.standardizer is not None:
            x = self.standardizer.apply(x)
        out = np.asarray(x, dtype=self.dtype)
        for layer in self.layers:
            out = layer.forward(out)
        if self.class_mask is not None:
            out = np.where(self.class_mask, out, -np.inf).astype(self.dtype)
        return out

    def backward(self, grad_logits: np.ndarray):
        """Retropropaga o gradiente dos logits, acumulando os gradientes das camadas."""
        grad = grad_logits
        if self.class_mask is not None:
            grad = np.where(self.class_mask, grad, 0).astype(grad.dtype)
        for layer in reversed(self.layers):
            grad = layer.backward(grad)

    def zero_grads(self):
        for layer in self.layers:
            layer.zero_grads()

    def parameters(self) -> List[np.ndarray]:
        return [layer.params[name] for layer in self.layers for name in sorted(layer.params)]

    def gradients(self) -> List[np.ndarray]:
        return [layer.grads[name] for layer in self.layers for name in sorted(layer.params)]

    def named_parameters(self) -> List[Tuple[str, np.ndarray]]:
        return [(f"{index}.{layer.kind}.{name}", layer.params[name])
                for index, layer in enumerate(self.layers) for name in sorted(layer.params)]

    @property
    def parameter_count(self) -> int:
        return sum(layer.parameter_count for layer in self.layers)

    def get_state(self) -> List[np.ndarray]:
        return [p.copy() for p in self.parameters()]

    def set_state(self, state: List[np.ndarray]):
        for p, value in zip(self.parameters(), state):
            p[...] = value

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())

    def predict_scores(self, x: np.ndarray) -> np.ndarray:
        """Classe prevista (multiclasse) ou escore logit do par (saída única)."""
        logits = self.forward(x)
        if self.n_outputs == 1:
            return logits[:, 0].astype(np.float64)
        return np.argmax(logits, axis=1)

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.spec.digest().encode('utf-8'))
        for name, value in self.named_parameters():
            h.update(name.encode('utf-8'))
            h.update(value.tobytes())
        return h.hexdigest()

    def __repr__(self):
        kinds = ", ".join(layer.kind for layer in self.layers)
        return f"Network({self.spec.kind}: {kinds}; {self.parameter_count} parâmetros)"


def build_network(spec: ModelSpec, input_width: int, n_outputs: int, seed: int = 0,
                  dtype: str = 'float32', class_mask: Optional[np.ndarray] = None,
                  standardizer: Optional[Standardizer] = None) -> Network:
    """
    Constrói a rede com pesos iniciais determinísticos para a semente.

    ConvNet: [g: conv -> relu]* -> média sobre as D linhas -> [dense -> relu]* -> dense.
    'fc': [dense -> relu]* -> dense.

    Raises:
        ValueError: Se a janela deslizante não couber na linha
    """
    rng = np.random.default_rng(seed)
    layers: List[ILayer] = []
    width = input_width

    if spec.kind == 'convnet':
        for index, channels in enumerate(spec.conv_channels):
            if index == 0 and spec.conv_kernel != FULL_ROW_KERNEL:
                layer = SlidingConv1d(width, channels, spec.conv_kernel, rng=rng, dtype=dtype)
            else:
                layer = RowConv(width, channels, rng=rng, dtype=dtype)
            layers += [layer, ReLU()]
            width = layer.output_width(width)
        layers.append(MeanOverRows())

    for hidden in spec.hidden:
        layers += [Dense(width, hidden, rng=rng, dtype=dtype), ReLU()]
        width = hidden
    layers.append(Dense(width, n_outputs, rng=rng, dtype=dtype))

    return Network(layers, input_width, n_outputs, spec, dtype=dtype,
                   class_mask=class_mask, standardizer=standardizer)


def forward(network: Network, x: np.ndarray) -> np.ndarray:
    """Logits da rede para a entrada (lote)."""
    return network.forward(x)


def backward(network: Network, x: np.ndarray, labels: np.ndarray,
             loss: str) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Gradientes analíticos da perda média no lote em relação a todos os parâmetros.

    Args:
        network: Rede
        x: Entrada do lote
        labels: Rótulos do lote
        loss: 'cross-entropy' ou 'binary-cross-entropy'

    Returns:
        (perda, {nome do parâmetro: gradiente})

    Raises:
        NonFiniteLossError: Perda ou algum gradiente não finito
    """
    network.zero_grads()
    value, grad_logits = get_loss(loss)(network.forward(x), np.asarray(labels))
    if not np.isfinite(value):
        raise NonFiniteLossError(value, f"lote de {len(x)} amostras")
    network.backward(grad_logits)
    grads = {}
    for index, layer in enumerate(network.layers):
        for key in sorted(layer.params):
            name = f"{index}.{layer.kind}.{key}"
            if not np.all(np.isfinite(layer.grads[key])):
                raise NonFiniteLossError(value, f"gradiente não finito em {name}")
            grads[name] = layer.grads[key]
    return value, grads


def build_convnet_input(ps: ProjectionSet, i: int, j: Optional[int] = None) -> np.ndarray:
    """
    Matriz de entrada do ConvNet.

    Nó: X^(i) com X_{p,k} = R^(k)_{i,p}, formato D x (N+1).
    Par: Z^(i,j) = [X^(i) | X^(j)] (linha p concatena as linhas p de X^(i) e X^(j)),
    formato D x 2(N+1).

    Raises:
        IndexError: Se algum nó estiver fora do intervalo
    """
    ps.check_node(i)
    x_i = ps.node_major[i]
    if j is None:
        return x_i
    ps.check_node(j)
    return np.hstack([x_i, ps.node_major[j]])


def convnet_batch(ps: ProjectionSet, keys: np.ndarray) -> np.ndarray:
    """Entradas do ConvNet para um vetor de nós ou uma matriz de pares: (lote, D, largura)."""
    keys = np.asarray(keys, dtype=np.int64)
    if len(keys) and (keys.min() < 0 or keys.max() >= ps.node_count):
        raise IndexError(f"Nó fora do intervalo [0, {ps.node_count})")
    if keys.ndim == 1:
        return ps.node_major[keys]
    return np.concatenate([ps.node_major[keys[:, 0]], ps.node_major[keys[:, 1]]], axis=2)
