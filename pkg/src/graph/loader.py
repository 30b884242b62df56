"""
Carregamento e escrita de listas de arestas.
"""
import os
from pathlib import Path
from typing import Sequence, Union

from data_loading.factory import create_reader
from data_loading.idata_reader import EdgeListOptions
from export.atomic import atomic_output
from .sparse_graph import SparseGraph


def load_edge_list(path: Union[str, Path], options: EdgeListOptions = EdgeListOptions()) -> SparseGraph:
    """
    Carrega um grafo de uma lista de arestas; o leitor é escolhido pela extensão
    (texto por padrão, CSV para `.csv`).

    Args:
        path: Caminho do arquivo
        options: Direcionado / ponderado / bipartido

    Returns:
        SparseGraph satisfazendo seus invariantes (entradas não direcionadas simetrizadas)

    Raises:
        FileNotFoundError: Se o arquivo não existir
        EdgeListFormatError: Linha mal formada, peso negativo ou aresta intra-partição
    """
    path = str(path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Arquivo não encontrado: {path}")

    _, extension = os.path.splitext(path)
    reader = create_reader(extension[1:].lower(), path, options)
    return reader.read()


def write_edge_list(path: Union[str, Path], g: SparseGraph, weighted: bool = False):
    """
    Escreve o grafo como `src<TAB>dst[<TAB>peso]` usando os nomes originais dos nós.
    Em grafos não direcionados cada aresta é escrita uma vez (src <= dst); em grafos
    bipartidos a origem é sempre o nó da parte 0. Escrita atômica.
    """
    coo = g.adjacency.tocoo()
    with atomic_output(path) as temp_path, open(temp_path, 'w', encoding='utf-8') as f:
        for u, v, w in zip(coo.row, coo.col, coo.data):
            if g.partition is not None:
                if g.partition[u] != 0:
                    continue
            elif not g.directed and u > v:
                continue
            line = f"{g.name_of(int(u))}\t{g.name_of(int(v))}"
            if weighted:
                line += f"\t{w:.17g}"
            f.write(line + "\n")


def write_id_map(path: Union[str, Path], names: Sequence[str]):
    """
    Escreve o mapeamento `id<TAB>original` dos ids densos (linhas dos artefatos) para os
    ids do arquivo de arestas.
    """
    with atomic_output(path) as temp_path, open(temp_path, 'w', encoding='utf-8') as f:
        for node, name in enumerate(names):
            f.write(f"{node}\t{name}\n")
