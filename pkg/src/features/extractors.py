"""
Extratores de features - Padrão Strategy com registro por nome de método.

Cada extrator produz FeatureTables de nós ou pares a partir de um GraphBundle.
Ids de nós são sempre os da matriz de transição (no quadrado bipartido, os nós
de um lado, mapeados para o grafo completo via `transition.node_ids`).
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Type

import numpy as np

from graph.sparse_graph import SparseGraph
from graph.transition import TransitionMatrix
from rproj.config import DEFAULT_MAX_POWER
from rproj.projection_set import ProjectionSet
from .feature_table import FeatureTable
from .igf import DEFAULT_CLIQUE_CAP, IGF_SCHEMA, igf_table
from .oracle import DEFAULT_DENSE_CAP, oracle_node_table, oracle_pair_table
from .ri_gram import ExternalEmbeddings, ri_gram_table
from .rp_dotprod import rp_node_table, rp_pair_table


@dataclass(frozen=True, eq=False)
class GraphBundle:
    """
    Tudo o que os extratores podem consultar sobre um grafo.

    Attributes:
        graph: Grafo completo (IGF é calculado nele)
        transition: Matriz de transição cujos nós são as linhas das tabelas
        projections: Projeções sobre `transition` (métodos RP)
        embeddings: Embeddings externos (método RI-Gram)
    """

    graph: SparseGraph
    transition: TransitionMatrix
    projections: Optional[ProjectionSet] = None
    embeddings: Optional[ExternalEmbeddings] = None

    @property
    def node_count(self) -> int:
        return self.transition.node_count

    def graph_ids(self, nodes: np.ndarray) -> np.ndarray:
        """Ids no grafo completo dos nós da transição."""
        nodes = np.asarray(nodes, dtype=np.int64)
        if self.transition.node_ids is None:
            return nodes
        return self.transition.node_ids[nodes]

    def node_names(self) -> Tuple[str, ...]:
        """Id original de cada nó da transição."""
        return tuple(self.graph.name_of(int(v)) for v in self.graph_ids(np.arange(self.node_count)))

    def require_projections(self) -> ProjectionSet:
        if self.projections is None:
            raise ValueError("Método exige projeções, mas nenhuma foi calculada")
        return self.projections


@dataclass(frozen=True)
class ExtractorOptions:
    threads: int = 1
    max_power: int = DEFAULT_MAX_POWER
    clique_cap: int = DEFAULT_CLIQUE_CAP
    dense_cap: int = DEFAULT_DENSE_CAP


class IFeatureExtractor(ABC):
    """Interface abstrata para métodos de features."""

    def __init__(self, options: ExtractorOptions = ExtractorOptions()):
        self.options = options

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def node_table(self, bundle: GraphBundle, nodes: Optional[Sequence[int]] = None) -> FeatureTable:
        """Features de nó (padrão: todos os nós)."""
        pass

    @abstractmethod
    def pair_table(self, bundle: GraphBundle, pairs: Sequence[Tuple[int, int]]) -> FeatureTable:
        """Features de par para a lista de pares (i, j)."""
        pass


_registry: Dict[str, Type[IFeatureExtractor]] = {}


def register_extractor(key: str):
    """Decorador para registrar um extrator pelo nome do método."""
    def decorator(cls: Type[IFeatureExtractor]):
        _registry[key] = cls
        return cls
    return decorator


def available_methods() -> Tuple[str, ...]:
    return tuple(sorted(_registry))


def create_extractor(method: str, options: ExtractorOptions = ExtractorOptions()) -> IFeatureExtractor:
    """
    Raises:
        ValueError: Se o método não for conhecido
    """
    if method not in _registry:
        raise ValueError(f"Método '{method}' desconhecido. Opções: {list(available_methods())}")
    return _registry[method](options)


def _all_nodes(bundle: GraphBundle, nodes: Optional[Sequence[int]]) -> np.ndarray:
    return np.arange(bundle.node_count) if nodes is None else np.asarray(nodes, dtype=np.int64)


@register_extractor('rp-dotprod')
class RPDotProdExtractor(IFeatureExtractor):

    @property
    def name(self) -> str:
        return 'rp-dotprod'

    def node_table(self, bundle, nodes=None):
        return rp_node_table(bundle.require_projections(), nodes, threads=self.options.threads)

    def pair_table(self, bundle, pairs):
        return rp_pair_table(bundle.require_projections(), pairs, threads=self.options.threads)


@register_extractor('oracle')
class OracleExtractor(IFeatureExtractor):
    """F^(k,s) exatas; a maior potência vem das projeções, se houver."""

    @property
    def name(self) -> str:
        return 'oracle'

    def _max_power(self, bundle: GraphBundle) -> int:
        if bundle.projections is not None:
            return bundle.projections.max_power
        return self.options.max_power

    def node_table(self, bundle, nodes=None):
        return oracle_node_table(bundle.transition, self._max_power(bundle), nodes,
                                 dense_cap=self.options.dense_cap)

    def pair_table(self, bundle, pairs):
        return oracle_pair_table(bundle.transition, self._max_power(bundle), pairs,
                                 dense_cap=self.options.dense_cap)


@register_extractor('igf')
class IGFExtractor(IFeatureExtractor):
    """IGF do grafo completo; em pares, as 7 features de i seguidas das 7 de j."""

    @property
    def name(self) -> str:
        return 'igf'

    def node_table(self, bundle, nodes=None):
        nodes = _all_nodes(bundle, nodes)
        table = igf_table(bundle.graph, bundle.graph_ids(nodes), self.options.clique_cap)
        return FeatureTable(schema=table.schema, keys=nodes, values=table.values,
                            provenance=table.provenance, flags=table.flags)

    def pair_table(self, bundle, pairs):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        unique, inverse = np.unique(pairs, return_inverse=True)
        inverse = inverse.reshape(pairs.shape)
        table = igf_table(bundle.graph, bundle.graph_ids(unique), self.options.clique_cap)

        values = np.hstack([table.values[inverse[:, 0]], table.values[inverse[:, 1]]])
        flags = None
        if table.flags is not None:
            flags = table.flags[inverse[:, 0]] | table.flags[inverse[:, 1]]
        schema = tuple(f"i.{n}" for n in IGF_SCHEMA) + tuple(f"j.{n}" for n in IGF_SCHEMA)
        return FeatureTable(schema=schema, keys=pairs, values=values,
                            provenance=table.provenance, flags=flags)


@register_extractor('ri-gram')
class RIGramExtractor(IFeatureExtractor):

    @property
    def name(self) -> str:
        return 'ri-gram'

    def _embeddings(self, bundle: GraphBundle) -> ExternalEmbeddings:
        if bundle.embeddings is None:
            raise ValueError("Método 'ri-gram' exige um arquivo de embeddings")
        return bundle.embeddings

    def node_table(self, bundle, nodes=None):
        return ri_gram_table(self._embeddings(bundle), _all_nodes(bundle, nodes),
                             bundle.node_names(), graph_digest=bundle.transition.digest.hex())

    def pair_table(self, bundle, pairs):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return ri_gram_table(self._embeddings(bundle), pairs, bundle.node_names(),
                             graph_digest=bundle.transition.digest.hex())


@register_extractor('ensemble')
class EnsembleExtractor(IFeatureExtractor):
    """RP DotProd seguido das features IGF."""

    @property
    def name(self) -> str:
        return 'ensemble'

    def node_table(self, bundle, nodes=None):
        rp = RPDotProdExtractor(self.options).node_table(bundle, nodes)
        return rp.concat(IGFExtractor(self.options).node_table(bundle, nodes))

    def pair_table(self, bundle, pairs):
        rp = RPDotProdExtractor(self.options).pair_table(bundle, pairs)
        return rp.concat(IGFExtractor(self.options).pair_table(bundle, pairs))
