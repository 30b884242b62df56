"""
Escrita atômica de arquivos: grava em um nome temporário e renomeia no final.
"""
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union


@contextmanager
def atomic_output(path: Union[str, Path]) -> Iterator[Path]:
    """
    Fornece um caminho temporário no mesmo diretório de `path`; se o bloco terminar
    sem exceção, o temporário substitui `path`, senão é removido.

    Args:
        path: Caminho final

    Yields:
        Caminho temporário onde escrever
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    temp_path = Path(temp_name)
    try:
        yield temp_path
        os.replace(temp_path, path)
    finally:
        if temp_path.exists():
            temp_path.unlink()
