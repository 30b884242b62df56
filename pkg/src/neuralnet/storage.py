"""
Persistência de redes no formato binário MDL1.

Layout (little-endian): magic "MDL1", versão u16, tipo u8 (0 = fc, 1 = convnet),
largura do payload u8 (4 ou 8), seed u64, largura de entrada u32, saídas u32,
digest da configuração de treino (32 bytes); bloco JSON com a arquitetura
(camadas, máscara de classes); blocos de parâmetros na ordem das camadas;
média e escala da padronização em f64, se houver.
"""
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np

from export.atomic import atomic_output
from export.binary_io import (
    ArtifactFormatError, check_magic, check_version, ensure_consumed, read_array,
    read_json_block, read_struct, write_array, write_json_block,
)
from .layers.activation import ReLU
from .layers.aggregation import MeanOverRows
from .layers.dense import Dense, RowConv
from .layers.ilayer import ILayer
from .layers.sliding_conv import SlidingConv1d
from .network import MODEL_KINDS, ModelSpec, Network, Standardizer
from .training import TrainConfig

MAGIC = b"MDL1"
VERSION = 1

HEADER = np.dtype([
    ('magic', 'S4'),
    ('version', '<u2'),
    ('kind', 'u1'),
    ('width', 'u1'),
    ('seed', '<u8'),
    ('inputs', '<u4'),
    ('outputs', '<u4'),
    ('digest', 'u1', (32,)),
])

_LAYER_BUILDERS: Dict[str, Callable[..., ILayer]] = {
    'dense': lambda dtype, **cfg: Dense(dtype=dtype, **cfg),
    'row_conv': lambda dtype, **cfg: RowConv(dtype=dtype, **cfg),
    'sliding_conv': lambda dtype, **cfg: SlidingConv1d(dtype=dtype, **cfg),
    'relu': lambda dtype, **cfg: ReLU(),
    'mean_rows': lambda dtype, **cfg: MeanOverRows(),
}


def save_model(network: Network, path: Union[str, Path], config: Optional[TrainConfig] = None):
    """
    Grava a rede (escrita atômica).

    Args:
        network: Rede treinada
        path: Arquivo de destino
        config: Configuração de treino (semente e digest gravados no cabeçalho)
    """
    wide = network.dtype == np.float64
    header = np.zeros((), dtype=HEADER)
    header['magic'] = MAGIC
    header['version'] = VERSION
    header['kind'] = MODEL_KINDS.index(network.spec.kind)
    header['width'] = 8 if wide else 4
    header['seed'] = 0 if config is None else config.seed
    header['inputs'] = network.input_width
    header['outputs'] = network.n_outputs
    if config is not None:
        header['digest'] = np.frombuffer(bytes.fromhex(config.digest()), dtype=np.uint8)

    meta = {
        'spec': {'kind': network.spec.kind, 'conv_channels': list(network.spec.conv_channels),
                 'conv_kernel': network.spec.conv_kernel, 'hidden': list(network.spec.hidden)},
        'layers': [{'kind': layer.kind, 'config': layer.config()} for layer in network.layers],
        'class_mask': None if network.class_mask is None else network.class_mask.tolist(),
        'standardized': network.standardizer is not None,
    }
    with atomic_output(path) as temp_path:
        with open(temp_path, 'wb') as f:
            f.write(header.tobytes())
            write_json_block(f, meta)
            for param in network.parameters():
                write_array(f, param, '<f8' if wide else '<f4')
            if network.standardizer is not None:
                write_array(f, network.standardizer.mean, '<f8')
                write_array(f, network.standardizer.scale, '<f8')


def load_model(path: Union[str, Path]) -> Network:
    """
    Carrega uma rede gravada com save_model.

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ArtifactFormatError: Magic, versão ou arquitetura inválidos
        TruncatedFileError: Arquivo menor que o declarado
    """
    path = str(path)
    try:
        f = open(path, 'rb')
    except FileNotFoundError:
        raise FileNotFoundError(f"Arquivo de modelo não encontrado: {path}")

    with f:
        header = read_struct(f, HEADER, "cabeçalho MDL1")
        check_magic(header['magic'], MAGIC, path)
        check_version(header['version'], VERSION, path)
        if int(header['width']) not in (4, 8) or int(header['kind']) >= len(MODEL_KINDS):
            raise ArtifactFormatError(f"{path}: cabeçalho MDL1 inválido")
        dtype = 'float64' if int(header['width']) == 8 else 'float32'

        meta = read_json_block(f, "arquitetura MDL1")
        try:
            spec = ModelSpec(**meta['spec'])
            layers = [_LAYER_BUILDERS[entry['kind']](dtype, **entry['config'])
                      for entry in meta['layers']]
        except (KeyError, TypeError, ValueError) as e:
            raise ArtifactFormatError(f"{path}: arquitetura inválida ({e})")

        for layer in layers:
            for name in sorted(layer.params):
                stored = read_array(f, '<f8' if dtype == 'float64' else '<f4',
                                    layer.params[name].shape, f"parâmetro {layer.kind}.{name}")
                layer.params[name] = stored.astype(dtype)
            layer.zero_grads()

        inputs = int(header['inputs'])
        standardizer = None
        if meta.get('standardized'):
            standardizer = Standardizer(mean=read_array(f, '<f8', (inputs,), "média"),
                                        scale=read_array(f, '<f8', (inputs,), "escala"))
        ensure_consumed(f, path)

    mask = meta.get('class_mask')
    try:
        return Network(layers, inputs, int(header['outputs']), spec, dtype=dtype,
                       class_mask=None if mask is None else np.array(mask, dtype=bool),
                       standardizer=standardizer)
    except ValueError as e:
        raise ArtifactFormatError(f"{path}: {e}")
