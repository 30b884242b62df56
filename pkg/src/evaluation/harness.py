"""
Harness de experimentos: treina nos grafos de treino, avalia em cada grafo de teste
e monta o relatório (uma linha por grafo de teste, médias simples e ponderadas,
baseline de classe majoritária, linhas de treino e validação).
"""
import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from data_loading.labels import NodeLabels, read_labels, sorted_class_names
from features.extractors import ExtractorOptions, GraphBundle, create_extractor
from features.ri_gram import ExternalEmbeddings, read_embeddings
from graph.loader import load_edge_list
from graph.sparse_graph import SparseGraph
from graph.split import split_nodes
from graph.transition import TransitionMatrix, bipartite_square, transition_matrix
from neuralnet.network import Network, convnet_batch
from neuralnet.training import TrainResult, train
from rproj.propagation import propagate
from .experiment import ExperimentSpec, GraphSource
from .metrics import METRICS, majority_baseline
from .pairs import make_pair_samples, pair_arrays
from .sbm import generate_sbm

TRAIN_ROW = "treino"
VALIDATION_ROW = "validação"
MEAN_ROW = "média"
WEIGHTED_MEAN_ROW = "média ponderada"

# erros que marcam uma célula como falha sem interromper o experimento
CELL_ERRORS = (ValueError, KeyError, IndexError, MemoryError, FloatingPointError, OSError)


def derive_seed(*parts) -> int:
    """Semente de 64 bits derivada deterministicamente de uma sequência de rótulos."""
    digest = hashlib.sha256("/".join(str(p) for p in parts).encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little')


@dataclass(frozen=True, eq=False)
class LoadedGraph:
    """Grafo do experimento pronto para uso: ids de nós são os da matriz de transição."""

    source: GraphSource
    graph: SparseGraph
    transition: TransitionMatrix
    labels: NodeLabels
    embeddings: Optional[ExternalEmbeddings] = None

    @property
    def name(self) -> str:
        return self.source.name

    @property
    def node_count(self) -> int:
        return self.transition.node_count

    @property
    def digest(self) -> str:
        return self.transition.digest.hex()

    def label_array(self, class_names: Optional[Tuple[str, ...]] = None) -> np.ndarray:
        """Classe de cada nó (-1 = sem rótulo ou classe fora do vocabulário)."""
        labels = self.labels if class_names is None else self.labels.remap(class_names)
        array = np.full(self.node_count, -1, dtype=np.int64)
        array[labels.nodes] = labels.classes
        return array


def load_source(source: GraphSource) -> LoadedGraph:
    """
    Constrói o grafo de uma origem (SBM ou arquivo, com divisão e lado bipartido opcionais).

    Raises:
        FileNotFoundError: Se algum arquivo não existir
        ValueError: Erros de formato propagados dos leitores
    """
    if source.sbm is not None:
        graph, blocks = generate_sbm(source.sbm)
        labels = NodeLabels.from_array(blocks)
    else:
        graph = load_edge_list(source.edges, source.options)
        labels = read_labels(source.labels, graph)

    if source.split is not None:
        part_a, part_b, split = split_nodes(graph, source.split_fraction, source.split_seed)
        graph = part_a if source.split == 'a' else part_b
        labels = labels.subset(split.nodes_of(source.split), split.local_ids)

    if source.options.bipartite:
        transition = bipartite_square(graph, source.side)
        local = np.full(graph.node_count, -1, dtype=np.int64)
        local[transition.node_ids] = np.arange(len(transition.node_ids))
        labels = labels.subset(transition.node_ids, local)
    else:
        transition = transition_matrix(graph)

    embeddings = read_embeddings(source.embeddings) if source.embeddings else None
    return LoadedGraph(source=source, graph=graph, transition=transition, labels=labels,
                       embeddings=embeddings)


@dataclass
class AcceptanceCheck:
    name: str
    threshold: float
    value: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value >= self.threshold)


@dataclass
class ExperimentReport:
    """
    Resultado de evaluate.

    Attributes:
        cells: Uma linha por (semente, grafo, papel) com as métricas e o baseline
        summary: Layout de tabela: grafos de teste, médias, treino e validação (média das sementes)
        history: Histórico de treino de cada semente
        acceptance: Verificações declaradas em [acceptance]
        failures: Mensagens das células que falharam
    """

    name: str
    spec_digest: str
    task: str
    method: str
    metrics: Tuple[str, ...]
    cells: pd.DataFrame
    summary: pd.DataFrame
    history: pd.DataFrame
    acceptance: List[AcceptanceCheck] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    model_digests: Dict[int, str] = field(default_factory=dict)

    @property
    def primary_metric(self) -> str:
        return self.metrics[0]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.acceptance)

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.spec_digest.encode('utf-8'))
        h.update(self.cells.to_csv(index=False, float_format='%.10g').encode('utf-8'))
        h.update(self.summary.to_csv(float_format='%.10g').encode('utf-8'))
        return h.hexdigest()


@dataclass
class _Samples:
    keys: np.ndarray
    targets: np.ndarray
    inputs: np.ndarray
    graph_digests: Set[str]


def _table_digests(provenance: Dict[str, str]) -> Set[str]:
    return {v for k, v in provenance.items() if k.endswith('graph_digest') and v}


def _build_samples(loaded: LoadedGraph, bundle: GraphBundle, spec: ExperimentSpec,
                   vocabulary: Tuple[str, ...], seed: int, role: str,
                   options: ExtractorOptions) -> _Samples:
    """Chaves, alvos e entradas de um grafo para a tarefa do experimento."""
    if spec.task == 'node-class':
        labels = loaded.label_array(vocabulary)
        keys = np.sort(loaded.labels.nodes)
        targets = labels[keys]
        if role == 'train':
            keys, targets = keys[targets >= 0], targets[targets >= 0]
    else:
        labels = loaded.label_array()
        count = spec.pairs_per_node * int(np.count_nonzero(labels >= 0))
        samples = make_pair_samples(labels, count, derive_seed(seed, 'pairs', role, loaded.name))
        keys, targets = pair_arrays(samples)

    digests = {bundle.transition.digest.hex()}
    if spec.method == 'rp-convnet':
        projections = bundle.require_projections()
        inputs = convnet_batch(projections, keys).astype(spec.train.dtype)
        digests.add(projections.graph_hash.hex())
    else:
        extractor = create_extractor(spec.method, options)
        if spec.task == 'node-class':
            table = extractor.node_table(bundle, keys)
        else:
            table = extractor.pair_table(bundle, keys)
        inputs = table.values
        digests |= _table_digests(table.provenance)
    return _Samples(keys=keys, targets=targets, inputs=inputs, graph_digests=digests)


def _bundle(loaded: LoadedGraph, spec: ExperimentSpec, seed: int, threads: int) -> GraphBundle:
    projection_config, _ = spec.for_seed(seed)
    projections = None
    if spec.uses_projections:
        projections = propagate(loaded.transition, projection_config, threads=threads)
    return GraphBundle(graph=loaded.graph, transition=loaded.transition,
                       projections=projections, embeddings=loaded.embeddings)


def _metric_values(network: Network, samples: _Samples, spec: ExperimentSpec,
                   raw_labels: Optional[np.ndarray] = None) -> Dict[str, float]:
    """Métricas configuradas; a acurácia mapeada usa os rótulos do próprio grafo."""
    scores = network.predict_scores(samples.inputs)
    values = {}
    for metric in spec.metrics:
        try:
            if spec.task == 'pair-same-class' and metric == 'accuracy':
                values[metric] = METRICS[metric]((scores > 0).astype(np.int64), samples.targets)
            elif metric == 'mapped_accuracy' and raw_labels is not None:
                values[metric] = METRICS[metric](scores, raw_labels)
            else:
                values[metric] = METRICS[metric](scores, samples.targets)
        except ValueError:
            values[metric] = float('nan')
    return values


def _baseline(spec: ExperimentSpec, targets: np.ndarray, raw_labels: Optional[np.ndarray]) -> float:
    if spec.task == 'node-class':
        return majority_baseline(raw_labels if raw_labels is not None else targets)
    if spec.metrics[0] == 'auc':
        return 0.5
    return majority_baseline(targets)


def _split_validation(group_sizes: Sequence[int], fraction: float,
                      seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Divisão treino/validação feita em cada grafo de treino separadamente, para que
    todo grafo contribua com a mesma fração de amostras de validação.

    Returns:
        (índices de ajuste, índices de validação) no conjunto agrupado, ordenados
    """
    fit, val = [], []
    offset = 0
    for group, n in enumerate(group_sizes):
        order = offset + np.random.default_rng(
            derive_seed(seed, 'validation', group)).permutation(n)
        n_val = int(round(fraction * n))
        val.append(order[:n_val])
        fit.append(order[n_val:])
        offset += n
    return np.sort(np.concatenate(fit)), np.sort(np.concatenate(val))


def _log(verbose: bool, message: str):
    if verbose:
        print(message)


def _fit(spec: ExperimentSpec, seed: int, train_graphs: List[LoadedGraph],
         test_graphs: List[LoadedGraph], vocabulary: Tuple[str, ...], threads: int,
         verbose: bool):
    """Amostras agrupadas dos grafos de treino, divisão de validação e treino da semente."""
    options = ExtractorOptions(threads=threads, max_power=spec.projection.max_power)
    _, train_config = spec.for_seed(seed)
    pooled = [_build_samples(g, _bundle(g, spec, seed, threads), spec, vocabulary, seed,
                             'train', options) for g in train_graphs]
    x_all = np.concatenate([s.inputs for s in pooled])
    y_all = np.concatenate([s.targets for s in pooled])
    train_digests = set().union(*(s.graph_digests for s in pooled))
    for loaded in test_graphs:
        if loaded.digest in train_digests and not spec.diagnostic:
            raise ValueError(f"vazamento: o grafo de teste '{loaded.name}' alimenta o treino")

    fit_index, val_index = _split_validation([len(s.targets) for s in pooled],
                                             spec.validation_fraction, seed)
    _log(verbose, f"🔄 Semente {seed}: treinando com {len(fit_index)} amostras "
                  f"({len(val_index)} de validação)")
    result = train(spec.model, x_all[fit_index], y_all[fit_index], train_config,
                   x_all[val_index], y_all[val_index],
                   n_classes=len(vocabulary) if spec.task == 'node-class' else None)
    return result, x_all, y_all, fit_index, val_index


def train_experiment(spec: ExperimentSpec, seed: int, threads: int = 1,
                     verbose: bool = False) -> TrainResult:
    """
    Treina o modelo de uma semente exatamente como evaluate o faz, sem avaliar nos testes.

    Raises:
        FileNotFoundError: Se algum arquivo de grafo não existir
        ValueError: Vazamento de grafo de teste ou amostras inválidas
    """
    train_graphs = [load_source(s) for s in spec.train_graphs]
    test_graphs = [load_source(s) for s in spec.test_graphs]
    vocabulary = sorted_class_names(name for g in train_graphs for name in g.labels.names())
    result, *_ = _fit(spec, seed, train_graphs, test_graphs, vocabulary, threads, verbose)
    return result


def _run_seed(spec: ExperimentSpec, seed: int, train_graphs: List[LoadedGraph],
              test_graphs: List[LoadedGraph], vocabulary: Tuple[str, ...], threads: int,
              verbose: bool) -> Tuple[List[dict], Optional[TrainResult], List[str]]:
    options = ExtractorOptions(threads=threads, max_power=spec.projection.max_power)
    rows, failures = [], []

    def failed_rows(graphs, role, error):
        for loaded in graphs:
            rows.append({'seed': seed, 'graph': loaded.name, 'role': role,
                         'nodes': loaded.node_count, 'status': f"falha: {error}"})

    try:
        result, x_all, y_all, fit_index, val_index = _fit(
            spec, seed, train_graphs, test_graphs, vocabulary, threads, verbose)
    except CELL_ERRORS as e:
        failures.append(f"semente {seed}, treino: {e}")
        failed_rows(test_graphs, 'test', e)
        return rows, None, failures

    network = result.network
    for role, index in ((TRAIN_ROW, fit_index), (VALIDATION_ROW, val_index)):
        subset = _Samples(keys=np.zeros(0), targets=y_all[index], inputs=x_all[index],
                          graph_digests=set())
        row = {'seed': seed, 'graph': role, 'role': role,
               'nodes': sum(g.node_count for g in train_graphs), 'status': 'ok'}
        if len(index):
            row.update(_metric_values(network, subset, spec))
        rows.append(row)

    for loaded in test_graphs:
        row = {'seed': seed, 'graph': loaded.name, 'role': 'test', 'nodes': loaded.node_count}
        try:
            samples = _build_samples(loaded, _bundle(loaded, spec, seed, threads), spec,
                                     vocabulary, seed, 'test', options)
            raw = loaded.label_array()[samples.keys] if spec.task == 'node-class' else None
            row.update(_metric_values(network, samples, spec, raw))
            row['baseline'] = _baseline(spec, samples.targets, raw)
            row['status'] = 'ok'
            _log(verbose, f"✅ Semente {seed}, {loaded.name}: "
                          f"{spec.metrics[0]} = {row[spec.metrics[0]]:.4f}")
        except CELL_ERRORS as e:
            failures.append(f"semente {seed}, {loaded.name}: {e}")
            row['status'] = f"falha: {e}"
            _log(verbose, f"⚠️  Semente {seed}, {loaded.name}: {e}")
        rows.append(row)
    return rows, result, failures


def _summarize(cells: pd.DataFrame, spec: ExperimentSpec,
               test_graphs: List[LoadedGraph]) -> pd.DataFrame:
    columns = list(spec.metrics) + ['baseline']
    means = cells.groupby('graph', sort=False)[columns].mean()

    rows = []
    for loaded in test_graphs:
        values = means.loc[loaded.name] if loaded.name in means.index else pd.Series(dtype=float)
        rows.append({'graph': loaded.name, 'nodes': loaded.node_count,
                     **{c: values.get(c, np.nan) for c in columns}})
    per_graph = pd.DataFrame(rows, columns=['graph', 'nodes'] + columns)

    weights = per_graph['nodes'].to_numpy(dtype=np.float64)
    mean_row = {'graph': MEAN_ROW, 'nodes': int(weights.sum())}
    weighted_row = {'graph': WEIGHTED_MEAN_ROW, 'nodes': int(weights.sum())}
    for c in columns:
        values = per_graph[c].to_numpy(dtype=np.float64)
        finite = np.isfinite(values)
        mean_row[c] = float(values[finite].mean()) if finite.any() else np.nan
        weighted_row[c] = (float(np.average(values[finite], weights=weights[finite]))
                           if finite.any() and weights[finite].sum() > 0 else np.nan)

    extra = []
    for role in (TRAIN_ROW, VALIDATION_ROW):
        if role in means.index:
            nodes = int(cells.loc[cells['graph'] == role, 'nodes'].iloc[0])
            extra.append({'graph': role, 'nodes': nodes,
                          **{c: means.loc[role].get(c, np.nan) for c in columns}})
    summary = pd.concat([per_graph, pd.DataFrame([mean_row, weighted_row] + extra)],
                        ignore_index=True)
    return summary.set_index('graph')


def _acceptance(spec: ExperimentSpec, summary: pd.DataFrame) -> List[AcceptanceCheck]:
    metric = spec.metrics[0]
    value = float(summary.loc[MEAN_ROW, metric])
    checks = []
    if 'min_margin' in spec.acceptance:
        margin = value - float(summary.loc[MEAN_ROW, 'baseline'])
        checks.append(AcceptanceCheck(f"{metric} - baseline", spec.acceptance['min_margin'], margin))
    if 'min_metric' in spec.acceptance:
        checks.append(AcceptanceCheck(metric, spec.acceptance['min_metric'], value))
    return checks


def evaluate(spec: ExperimentSpec, threads: int = 1, verbose: bool = False) -> ExperimentReport:
    """
    Executa o experimento para cada semente e monta o relatório.

    A validação sai dos grafos de treino (fração `validation_fraction` das amostras
    agrupadas); nenhum grafo de teste alimenta treino ou seleção de modelo. Uma falha
    em um grafo de teste marca apenas a célula correspondente.

    Args:
        spec: Especificação do experimento
        threads: Paralelismo das projeções e features (não altera resultados)
        verbose: Imprime o progresso

    Returns:
        ExperimentReport, função determinística de (spec, sementes)

    Raises:
        FileNotFoundError: Se algum arquivo de grafo, rótulos ou embeddings não existir
        ValueError: Se um grafo de teste coincidir com um de treino fora do modo diagnóstico
    """
    _log(verbose, f"🔄 Carregando {len(spec.train_graphs) + len(spec.test_graphs)} grafos...")
    train_graphs = [load_source(s) for s in spec.train_graphs]
    test_graphs = [load_source(s) for s in spec.test_graphs]
    if not spec.diagnostic:
        train_digests = {g.digest for g in train_graphs}
        for loaded in test_graphs:
            if loaded.digest in train_digests:
                raise ValueError(f"Grafo de teste '{loaded.name}' idêntico a um grafo de treino")

    vocabulary = sorted_class_names(
        name for g in train_graphs for name in g.labels.names())

    all_rows, histories, failures, model_digests = [], [], [], {}
    for seed in spec.seeds:
        rows, result, seed_failures = _run_seed(spec, seed, train_graphs, test_graphs,
                                                vocabulary, threads, verbose)
        all_rows += rows
        failures += seed_failures
        if result is not None:
            histories.append(result.history.assign(seed=seed))
            model_digests[seed] = result.network.digest

    columns = ['seed', 'graph', 'role', 'nodes'] + list(spec.metrics) + ['baseline', 'status']
    cells = pd.DataFrame(all_rows).reindex(columns=columns)
    summary = _summarize(cells, spec, test_graphs)
    history = (pd.concat(histories, ignore_index=True) if histories
               else pd.DataFrame(columns=['epoch', 'train_loss', 'val_loss', 'metric', 'seed']))

    return ExperimentReport(
        name=spec.name, spec_digest=spec.digest(), task=spec.task, method=spec.method,
        metrics=spec.metrics, cells=cells, summary=summary, history=history,
        acceptance=_acceptance(spec, summary), failures=failures, model_digests=model_digests,
    )


def validation_metric(result: TrainResult) -> float:
    """Métrica de validação registrada no histórico para a época selecionada."""
    history = result.history
    return float(history.loc[history['epoch'] == result.best_epoch, 'metric'].iloc[0])

