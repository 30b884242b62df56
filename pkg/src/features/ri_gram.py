"""
Features de Gram rotacionalmente invariantes (RI-Gram) a partir de embeddings externos.

Os vetores de entrada x_i e de saída y_i (opcional) são lidos de um arquivo
`node_id<TAB>IN|OUT<TAB>v1 v2 ... vD'`. As features são os produtos escalares entre
os vetores envolvidos, na ordem do triângulo superior:
    - nó com saída: (x_i.x_i, x_i.y_i, y_i.y_i); só entrada: (x_i.x_i);
    - par só com entrada: (x_i.x_i, x_i.x_j, x_j.x_j);
    - par com saída: os 10 produtos entre (x_i, y_i, x_j, y_j).
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .feature_table import FeatureTable


@dataclass(frozen=True)
class ExternalEmbeddings:
    """
    Vetores de embedding por nó (chave = id original do nó, como texto).

    Nós sem vetores ficam ausentes; nunca são preenchidos com zeros.
    """

    inputs: Dict[str, np.ndarray]
    outputs: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        dims = {len(v) for v in self.inputs.values()} | {len(v) for v in self.outputs.values()}
        if len(dims) > 1:
            raise ValueError(f"Vetores de embedding com dimensões diferentes: {sorted(dims)}")

    @property
    def dim(self) -> int:
        for vector in self.inputs.values():
            return len(vector)
        return 0

    def has_output(self, node: str) -> bool:
        return str(node) in self.outputs

    def input_vector(self, node: str) -> np.ndarray:
        try:
            return self.inputs[str(node)]
        except KeyError:
            raise KeyError(f"Nó '{node}' sem vetor de entrada")

    def output_vector(self, node: str) -> np.ndarray:
        try:
            return self.outputs[str(node)]
        except KeyError:
            raise KeyError(f"Nó '{node}' sem vetor de saída")


def read_embeddings(path: Union[str, Path]) -> ExternalEmbeddings:
    """
    Lê embeddings no formato `node_id<TAB>IN|OUT<TAB>v1 v2 ... vD'`.

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ValueError: Linha malformada (com número da linha) ou vetor repetido
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Arquivo de embeddings não encontrado: {path}")

    tables = {'IN': {}, 'OUT': {}}
    with open(path, 'r', encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            parts = line.split('\t')
            if len(parts) != 3 or parts[1] not in tables:
                raise ValueError(f"{path}:{line_number}: esperado 'node<TAB>IN|OUT<TAB>vetor'")
            node, kind, vector_text = parts
            try:
                vector = np.array([float(v) for v in vector_text.split()])
            except ValueError:
                raise ValueError(f"{path}:{line_number}: valor não numérico no vetor")
            if node in tables[kind]:
                raise ValueError(f"{path}:{line_number}: vetor {kind} repetido para o nó '{node}'")
            tables[kind][node] = vector

    try:
        return ExternalEmbeddings(inputs=tables['IN'], outputs=tables['OUT'])
    except ValueError as e:
        raise ValueError(f"{path}: {e}")


def _upper_gram(vectors: Sequence[np.ndarray]) -> np.ndarray:
    stacked = np.vstack(vectors)
    gram = stacked @ stacked.T
    rows, cols = np.triu_indices(len(vectors))
    return gram[rows, cols]


def _labels(pairwise: bool, use_output: bool) -> Tuple[str, ...]:
    if pairwise:
        return ('x_i', 'y_i', 'x_j', 'y_j') if use_output else ('x_i', 'x_j')
    return ('x_i', 'y_i') if use_output else ('x_i',)


def ri_gram_schema(pairwise: bool, use_output: bool) -> Tuple[str, ...]:
    labels = _labels(pairwise, use_output)
    rows, cols = np.triu_indices(len(labels))
    return tuple(f"{labels[a]}.{labels[b]}" for a, b in zip(rows, cols))


def ri_gram_features(emb: ExternalEmbeddings, i: str, j: Optional[str] = None,
                     use_output: Optional[bool] = None) -> np.ndarray:
    """
    Features RI-Gram de um nó ou par.

    Args:
        emb: Embeddings externos
        i: Nó (id original)
        j: Segundo nó, para features de par
        use_output: Usar vetores de saída; None = usar se todos os nós pedidos os tiverem

    Returns:
        Vetor de 1 ou 3 (nó) ou 3 ou 10 (par) features

    Raises:
        KeyError: Se faltar algum vetor necessário
    """
    nodes = [i] if j is None else [i, j]
    if use_output is None:
        use_output = all(emb.has_output(n) for n in nodes)
    vectors = []
    for node in nodes:
        vectors.append(emb.input_vector(node))
        if use_output:
            vectors.append(emb.output_vector(node))
    return _upper_gram(vectors)


def ri_gram_table(emb: ExternalEmbeddings, keys: Sequence, node_names: Sequence[str],
                  use_output: Optional[bool] = None, graph_digest: str = '') -> FeatureTable:
    """
    Tabela RI-Gram para nós (chaves 1-D) ou pares (chaves N x 2).

    Args:
        emb: Embeddings externos
        keys: Ids densos dos nós ou pares
        node_names: Id original de cada id denso (liga o grafo ao arquivo de embeddings)
        use_output: Como em ri_gram_features; None = usar se todo nó do grafo tiver saída
        graph_digest: Digest do grafo de origem, para a proveniência
    """
    keys = np.asarray(keys, dtype=np.int64)
    pairwise = keys.ndim == 2
    if use_output is None:
        use_output = bool(emb.outputs) and all(emb.has_output(n) for n in node_names)

    values = []
    for key in keys:
        if pairwise:
            values.append(ri_gram_features(emb, node_names[key[0]], node_names[key[1]], use_output))
        else:
            values.append(ri_gram_features(emb, node_names[key], use_output=use_output))
    schema = ri_gram_schema(pairwise, use_output)
    return FeatureTable(
        schema=schema, keys=keys, values=np.array(values).reshape(len(keys), len(schema)),
        provenance={'method': 'ri-gram', 'config_digest': f"dim={emb.dim},output={use_output}",
                    'graph_digest': graph_digest},
    )
