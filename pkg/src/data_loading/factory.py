"""
Factory para criação de leitores de grafos.
"""
from typing import Dict, Type

from .idata_reader import IGraphReader, EdgeListOptions

# Registro de leitores disponíveis
_registry: Dict[str, Type[IGraphReader]] = {}

DEFAULT_FILE_TYPE = "txt"


def register(*keys: str):
    """
    Decorador para registrar um leitor de grafos na factory.

    Args:
        keys: Chaves identificadoras do tipo de arquivo (ex: 'txt', 'csv')
    """
    def decorator(cls: Type[IGraphReader]):
        for key in keys:
            _registry[key] = cls
        return cls
    return decorator


def create_reader(file_type: str, file_path: str,
                  options: EdgeListOptions = EdgeListOptions()) -> IGraphReader:
    """
    Cria um leitor de grafos apropriado para o tipo de arquivo.

    Args:
        file_type: Tipo do arquivo (ex: 'txt', 'tsv', 'csv'); vazio usa o formato texto
        file_path: Caminho do arquivo
        options: Opções de leitura

    Returns:
        IGraphReader: Instância do leitor apropriado

    Raises:
        ValueError: Se o tipo de arquivo não for suportado
    """
    load_implementations()
    file_type = file_type or DEFAULT_FILE_TYPE
    if file_type not in _registry:
        raise ValueError(
            f"Tipo de arquivo '{file_type}' não suportado. "
            f"Tipos disponíveis: {sorted(_registry.keys())}"
        )

    reader_class = _registry[file_type]
    return reader_class(file_path, options)


def load_implementations():
    """
    Carrega dinamicamente todas as implementações de leitores.
    """
    # Import dos leitores para que sejam registrados via decorator
    from .readers import csv_reader, edge_list_reader  # noqa: F401
