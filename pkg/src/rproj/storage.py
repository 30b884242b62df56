"""
Persistência de ProjectionSet no formato binário RPJ1.

Layout (little-endian): magic "RPJ1", versão u16, flags u16, |V| u64, D u32, N u32,
seed u64, init u8, beta f64, digest do grafo (32 bytes), seguido de N+1 matrizes
|V| x D em ordem de linha (f32, ou f64 quando a flag de precisão estendida está ligada).

Flags: bit 0 = normalização por grau; bit 1 = payload f64; bits 8-15 = esparsidade s.
"""
import warnings
from pathlib import Path
from typing import Optional, Union

import numpy as np

from export.atomic import atomic_output
from export.binary_io import (
    ArtifactFormatError, check_magic, check_version, ensure_consumed, read_array,
    read_struct, write_array,
)
from .config import ProjectionConfig
from .initialization import create_initializer, initializer_from_code
from .projection_set import ProjectionSet

MAGIC = b"RPJ1"
VERSION = 1

FLAG_DEGREE_NORMALIZATION = 0x0001
FLAG_WIDE = 0x0002

HEADER = np.dtype([
    ('magic', 'S4'),
    ('version', '<u2'),
    ('flags', '<u2'),
    ('nodes', '<u8'),
    ('dim', '<u4'),
    ('powers', '<u4'),
    ('seed', '<u8'),
    ('init', 'u1'),
    ('beta', '<f8'),
    ('digest', 'u1', (32,)),
])


class ProjectionDigestWarning(UserWarning):
    """As projeções carregadas foram calculadas sobre outro grafo."""


def save_projections(ps: ProjectionSet, path: Union[str, Path]):
    """
    Grava as projeções (escrita atômica).

    Args:
        ps: Projeções
        path: Arquivo de destino
    """
    config = ps.config
    wide = config.dtype == 'float64'
    flags = (FLAG_DEGREE_NORMALIZATION if config.normalization == 'degree' else 0)
    flags |= FLAG_WIDE if wide else 0
    flags |= (config.sparsity & 0xFF) << 8

    header = np.zeros((), dtype=HEADER)
    header['magic'] = MAGIC
    header['version'] = VERSION
    header['flags'] = flags
    header['nodes'] = ps.node_count
    header['dim'] = ps.dim
    header['powers'] = ps.max_power
    header['seed'] = config.seed
    header['init'] = create_initializer(config.init).code
    header['beta'] = config.beta
    header['digest'] = np.frombuffer(ps.graph_hash, dtype=np.uint8)

    with atomic_output(path) as temp_path:
        with open(temp_path, 'wb') as f:
            f.write(header.tobytes())
            write_array(f, ps.matrices, '<f8' if wide else '<f4')


def load_projections(path: Union[str, Path], expected_hash: Optional[bytes] = None) -> ProjectionSet:
    """
    Carrega projeções gravadas com save_projections.

    Args:
        path: Arquivo RPJ1
        expected_hash: Digest do grafo esperado; divergência gera ProjectionDigestWarning

    Returns:
        ProjectionSet idêntico (bit a bit) ao gravado

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ArtifactFormatError: Magic ou versão inválidos
        TruncatedFileError: Arquivo menor que o declarado
    """
    path = str(path)
    try:
        f = open(path, 'rb')
    except FileNotFoundError:
        raise FileNotFoundError(f"Arquivo de projeções não encontrado: {path}")

    with f:
        header = read_struct(f, HEADER, "cabeçalho RPJ1")
        check_magic(header['magic'], MAGIC, path)
        check_version(header['version'], VERSION, path)

        flags = int(header['flags'])
        wide = bool(flags & FLAG_WIDE)
        try:
            init = initializer_from_code(int(header['init'])).name
        except ValueError as e:
            raise ArtifactFormatError(f"{path}: {e}")

        config = ProjectionConfig(
            dim=int(header['dim']),
            max_power=int(header['powers']),
            init=init,
            sparsity=(flags >> 8) & 0xFF,
            normalization='degree' if flags & FLAG_DEGREE_NORMALIZATION else 'none',
            beta=float(header['beta']),
            seed=int(header['seed']),
            dtype='float64' if wide else 'float32',
        )
        shape = (config.max_power + 1, int(header['nodes']), config.dim)
        matrices = read_array(f, '<f8' if wide else '<f4', shape, "matrizes de projeção")
        ensure_consumed(f, path)

    graph_hash = bytes(np.asarray(header['digest'], dtype=np.uint8).tobytes())
    if expected_hash is not None and graph_hash != expected_hash:
        warnings.warn(
            f"{path}: projeções calculadas sobre outro grafo "
            f"(digest {graph_hash.hex()[:12]} != {expected_hash.hex()[:12]})",
            ProjectionDigestWarning, stacklevel=2)

    return ProjectionSet(matrices=matrices, config=config, graph_hash=graph_hash)
