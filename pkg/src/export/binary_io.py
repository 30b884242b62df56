"""
Utilitários comuns aos formatos binários do pipeline (RPJ1, FTB1, MDL1).

Todos os inteiros e floats são little-endian.
"""
import json
from typing import Any, BinaryIO, Dict

import numpy as np


class ArtifactFormatError(ValueError):
    """Arquivo binário inválido (magic, versão ou conteúdo)."""


class TruncatedFileError(ArtifactFormatError):
    """Arquivo binário menor do que o cabeçalho declara."""


def read_exact(f: BinaryIO, size: int, what: str) -> bytes:
    """
    Lê exatamente `size` bytes.

    Raises:
        TruncatedFileError: Se o arquivo terminar antes
    """
    data = f.read(size)
    if len(data) != size:
        raise TruncatedFileError(
            f"Arquivo truncado ao ler {what}: esperado {size} bytes, lidos {len(data)}")
    return data


def read_struct(f: BinaryIO, dtype: np.dtype, what: str) -> np.void:
    """Lê um registro de um dtype estruturado."""
    return np.frombuffer(read_exact(f, dtype.itemsize, what), dtype=dtype)[0]


def check_magic(found: bytes, expected: bytes, path: str):
    if bytes(found) != expected:
        raise ArtifactFormatError(
            f"{path}: magic inválido {bytes(found)!r} (esperado {expected!r})")


def check_version(found: int, expected: int, path: str):
    if int(found) != expected:
        raise ArtifactFormatError(
            f"{path}: versão de formato {int(found)} não suportada (esperado {expected})")


def read_array(f: BinaryIO, dtype: str, shape, what: str) -> np.ndarray:
    """Lê um bloco contíguo little-endian e devolve um array no dtype nativo."""
    dt = np.dtype(dtype)
    count = int(np.prod(shape, dtype=np.int64))
    data = read_exact(f, count * dt.itemsize, what)
    return np.frombuffer(data, dtype=dt).astype(dt.newbyteorder('='), copy=True).reshape(shape)


def write_array(f: BinaryIO, array: np.ndarray, dtype: str):
    f.write(np.ascontiguousarray(array, dtype=np.dtype(dtype)).tobytes())


def write_json_block(f: BinaryIO, payload: Dict[str, Any]):
    """Bloco JSON precedido pelo tamanho (u32)."""
    data = json.dumps(payload, sort_keys=True, separators=(',', ':')).encode('utf-8')
    f.write(np.uint32(len(data)).astype('<u4').tobytes())
    f.write(data)


def read_json_block(f: BinaryIO, what: str) -> Dict[str, Any]:
    size = int(np.frombuffer(read_exact(f, 4, what), dtype='<u4')[0])
    try:
        return json.loads(read_exact(f, size, what).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ArtifactFormatError(f"Bloco {what} corrompido: {e}")


def ensure_consumed(f: BinaryIO, path: str):
    if f.read(1):
        raise ArtifactFormatError(f"{path}: bytes extras após o fim do conteúdo")
