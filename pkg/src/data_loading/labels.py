"""
Leitura e escrita de arquivos de rótulos (`node_id<TAB>label`).
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from export.atomic import atomic_output
from graph.sparse_graph import SparseGraph


def _sort_key(name: str):
    # rótulos inteiros em ordem numérica, depois os textuais em ordem lexicográfica
    try:
        return (0, int(name), '')
    except ValueError:
        return (1, 0, name)


def sorted_class_names(names) -> Tuple[str, ...]:
    """Ordem determinística das classes."""
    return tuple(sorted(set(names), key=_sort_key))


@dataclass(frozen=True)
class NodeLabels:
    """
    Rótulos de nós de um grafo.

    Attributes:
        nodes: Ids densos dos nós rotulados (ordem crescente)
        classes: Índice da classe de cada nó em `class_names`
        class_names: Nomes das classes em ordem determinística
    """

    nodes: np.ndarray
    classes: np.ndarray
    class_names: Tuple[str, ...]

    def __len__(self):
        return len(self.nodes)

    def names(self) -> np.ndarray:
        """Nome da classe de cada nó rotulado."""
        return np.asarray(self.class_names, dtype=object)[self.classes]

    def remap(self, class_names: Sequence[str]) -> 'NodeLabels':
        """
        Reindexa as classes em outro vocabulário (ex.: a união das classes de treino).
        Classes ausentes do vocabulário recebem índice -1.
        """
        index = {name: i for i, name in enumerate(class_names)}
        classes = np.array([index.get(name, -1) for name in self.names()], dtype=np.int64)
        return NodeLabels(nodes=self.nodes, classes=classes, class_names=tuple(class_names))

    def subset(self, nodes: np.ndarray, local_ids: np.ndarray) -> 'NodeLabels':
        """Restringe aos nós dados, renumerando-os com `local_ids`."""
        keep = np.isin(self.nodes, nodes)
        return NodeLabels(nodes=local_ids[self.nodes[keep]], classes=self.classes[keep],
                          class_names=self.class_names)

    @classmethod
    def from_array(cls, labels: Sequence) -> 'NodeLabels':
        """Rótulos para todos os nós 0..n-1 a partir de uma sequência."""
        names = [str(v) for v in labels]
        class_names = sorted_class_names(names)
        index = {name: i for i, name in enumerate(class_names)}
        return cls(nodes=np.arange(len(names), dtype=np.int64),
                   classes=np.array([index[n] for n in names], dtype=np.int64),
                   class_names=class_names)


def read_labels(path: Union[str, Path], graph: Optional[SparseGraph] = None) -> NodeLabels:
    """
    Lê um arquivo de rótulos.

    Args:
        path: Caminho do arquivo `node_id<TAB>label`
        graph: Grafo cujos nomes de nós resolvem os ids; sem grafo, ids devem ser inteiros densos

    Returns:
        NodeLabels com os nós presentes no grafo (os demais são ignorados)

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ValueError: Se um nó aparecer duas vezes ou um id não puder ser resolvido
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Arquivo de rótulos não encontrado: {path}")

    try:
        df = pd.read_csv(path, sep='\t', header=None, names=['node', 'label'], dtype=str,
                         comment='#', skip_blank_lines=True, keep_default_na=False)
    except pd.errors.EmptyDataError:
        df = pd.DataFrame(columns=['node', 'label'])

    if df['node'].duplicated().any():
        duplicated = df.loc[df['node'].duplicated(), 'node'].iloc[0]
        raise ValueError(f"{path}: nó '{duplicated}' rotulado mais de uma vez")

    if graph is not None and graph.node_names is not None:
        lookup = {name: i for i, name in enumerate(graph.node_names)}
        node_ids = df['node'].map(lookup)
        df = df.assign(node_id=node_ids).dropna(subset=['node_id'])
    else:
        try:
            df = df.assign(node_id=df['node'].astype(np.int64))
        except ValueError:
            raise ValueError(f"{path}: ids de nó não inteiros sem mapeamento de nomes")
        if graph is not None:
            df = df[(df['node_id'] >= 0) & (df['node_id'] < graph.node_count)]

    df = df.sort_values('node_id')
    class_names = sorted_class_names(df['label'])
    index = {name: i for i, name in enumerate(class_names)}
    return NodeLabels(
        nodes=df['node_id'].to_numpy(dtype=np.int64),
        classes=np.array([index[v] for v in df['label']], dtype=np.int64),
        class_names=class_names,
    )


def write_labels(path: Union[str, Path], labels: NodeLabels, graph: Optional[SparseGraph] = None):
    """Escreve `node_id<TAB>label` usando os nomes originais dos nós (escrita atômica)."""
    names = labels.names()
    with atomic_output(path) as temp_path, open(temp_path, 'w', encoding='utf-8') as f:
        for node, label in zip(labels.nodes, names):
            node_name = graph.name_of(int(node)) if graph is not None else str(int(node))
            f.write(f"{node_name}\t{label}\n")
