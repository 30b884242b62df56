"""
Treino por minilotes com seleção do modelo pela perda de validação.
"""
import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import pandas as pd

from evaluation.metrics import metric_accuracy, metric_auc
from .losses import NonFiniteLossError, get_loss
from .network import ModelSpec, Network, Standardizer, build_network
from .optimizers import SGD, Adam, IOptimizer

OPTIMIZERS = ('sgd', 'adam')
HISTORY_COLUMNS = ['epoch', 'train_loss', 'val_loss', 'metric']


@dataclass(frozen=True)
class TrainConfig:
    """
    Hiperparâmetros do treino.

    Attributes:
        optimizer: 'sgd' ou 'adam'
        learning_rate: Taxa de aprendizado
        batch_size: Tamanho do minilote
        epochs: Número de épocas
        seed: Semente (pesos iniciais e ordem dos lotes)
        loss: 'cross-entropy' (classe do nó) ou 'binary-cross-entropy' (par)
        beta1, beta2, epsilon: Parâmetros do Adam
        dtype: 'float32' (padrão) ou 'float64' (verificação de gradientes)
    """

    optimizer: str = 'adam'
    learning_rate: float = 1e-3
    batch_size: int = 256
    epochs: int = 10
    seed: int = 0
    loss: str = 'cross-entropy'
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    dtype: str = 'float32'

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer '{self.optimizer}' inválido. Opções: {list(OPTIMIZERS)}")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("learning_rate, batch_size e epochs devem ser positivos")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1 and self.epsilon > 0):
            raise ValueError("Parâmetros do Adam fora do intervalo")
        get_loss(self.loss)

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


@dataclass
class TrainResult:
    network: Network
    history: pd.DataFrame
    best_epoch: int


def create_optimizer(config: TrainConfig) -> IOptimizer:
    if config.optimizer == 'sgd':
        return SGD(config.learning_rate)
    return Adam(config.learning_rate, config.beta1, config.beta2, config.epsilon)


def _full_loss(network: Network, x: np.ndarray, y: np.ndarray, loss: str,
               batch_size: int) -> float:
    """Perda média sobre todo o conjunto, avaliada em lotes."""
    total = 0.0
    for start in range(0, len(y), batch_size):
        value, _ = get_loss(loss)(network.forward(x[start:start + batch_size]),
                                  y[start:start + batch_size])
        total += value * len(y[start:start + batch_size])
    return total / len(y)


def _predict(network: Network, x: np.ndarray, batch_size: int) -> np.ndarray:
    return np.concatenate([network.predict_scores(x[start:start + batch_size])
                           for start in range(0, len(x), batch_size)])


def score_metric(network: Network, x: np.ndarray, y: np.ndarray, loss: str,
                 batch_size: int = 256) -> float:
    """Acurácia (classe do nó) ou AUC (par); NaN se indefinida."""
    if len(y) == 0:
        return float('nan')
    predictions = _predict(network, x, batch_size)
    if loss == 'binary-cross-entropy':
        if len(np.unique(y)) < 2:
            return float('nan')
        return metric_auc(predictions, y)
    return metric_accuracy(predictions, y)


def train(spec: ModelSpec, x_train: np.ndarray, y_train: np.ndarray, config: TrainConfig,
          x_val: Optional[np.ndarray] = None, y_val: Optional[np.ndarray] = None,
          n_classes: Optional[int] = None) -> TrainResult:
    """
    Treina uma rede nova e devolve os parâmetros da época com menor perda de validação.

    Sem conjunto de validação, a seleção usa a perda de treino. Com semente fixa o
    resultado é determinístico (treino em uma única thread).

    Args:
        spec: Arquitetura
        x_train: Entradas de treino ((n, D, largura) para ConvNet, (n, features) para 'fc')
        y_train: Ids de classe (cross-entropy) ou 0/1 (binary-cross-entropy)
        config: Hiperparâmetros
        x_val, y_val: Conjunto de validação (opcional)
        n_classes: Número de classes (padrão: maior rótulo + 1)

    Returns:
        TrainResult com a rede, o histórico (epoch, train_loss, val_loss, metric) e a melhor época

    Raises:
        ValueError: Conjunto de treino vazio ou rótulos fora do esquema
        NonFiniteLossError: Perda ou parâmetros não finitos
    """
    x_train = np.asarray(x_train)
    y_train = np.asarray(y_train, dtype=np.int64)
    if len(y_train) == 0:
        raise ValueError("Conjunto de treino vazio")
    if len(x_train) != len(y_train):
        raise ValueError(f"{len(x_train)} entradas para {len(y_train)} rótulos")
    has_val = x_val is not None and y_val is not None and len(y_val) > 0
    if has_val:
        x_val = np.asarray(x_val)
        y_val = np.asarray(y_val, dtype=np.int64)

    labels = np.concatenate([y_train, y_val]) if has_val else y_train
    if config.loss == 'binary-cross-entropy':
        n_outputs, class_mask = 1, None
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("Rótulos de par devem ser 0 ou 1")
    else:
        n_outputs = int(labels.max()) + 1 if n_classes is None else n_classes
        if labels.min() < 0 or labels.max() >= n_outputs:
            raise ValueError(f"Rótulos fora do esquema de {n_outputs} classes")
        class_mask = np.zeros(n_outputs, dtype=bool)
        class_mask[np.unique(labels)] = True

    standardizer = Standardizer.fit(x_train) if spec.kind == 'fc' else None
    network = build_network(spec, x_train.shape[-1], n_outputs, seed=config.seed,
                            dtype=config.dtype, class_mask=class_mask, standardizer=standardizer)
    optimizer = create_optimizer(config)
    loss_fn = get_loss(config.loss)
    rng = np.random.default_rng(config.seed)

    history = []
    best_state, best_loss, best_epoch = network.get_state(), np.inf, 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(y_train))
        for batch, start in enumerate(range(0, len(order), config.batch_size)):
            index = order[start:start + config.batch_size]
            network.zero_grads()
            value, grad_logits = loss_fn(network.forward(x_train[index]), y_train[index])
            if not np.isfinite(value):
                raise NonFiniteLossError(value, f"lote de {len(index)} amostras", epoch, batch)
            network.backward(grad_logits)
            optimizer.step(network.parameters(), network.gradients())
            if not network.all_finite():
                raise NonFiniteLossError(value, "parâmetros não finitos após a atualização",
                                         epoch, batch)

        train_loss = _full_loss(network, x_train, y_train, config.loss, config.batch_size)
        if has_val:
            val_loss = _full_loss(network, x_val, y_val, config.loss, config.batch_size)
            metric = score_metric(network, x_val, y_val, config.loss, config.batch_size)
        else:
            val_loss = float('nan')
            metric = score_metric(network, x_train, y_train, config.loss, config.batch_size)
        history.append((epoch, train_loss, val_loss, metric))

        selection_loss = val_loss if has_val else train_loss
        if selection_loss < best_loss:
            best_state, best_loss, best_epoch = network.get_state(), selection_loss, epoch

    network.set_state(best_state)
    return TrainResult(network=network,
                       history=pd.DataFrame(history, columns=HISTORY_COLUMNS),
                       best_epoch=best_epoch)
