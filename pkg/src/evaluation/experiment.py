"""
Especificação declarativa de experimentos entre grafos (arquivo INI `chave = valor`).

Seções:
    [experiment]   nome, tarefa, método, grafos de treino e teste, sementes, métricas
    [projection]   configuração das projeções (dim, powers, init, ...)
    [model]        arquitetura (conv_channels, conv_kernel, hidden)
    [train]        hiperparâmetros de treino
    [acceptance]   limites verificados ao final (min_margin, min_metric)
    [sbm.<nome>]   grafo sintético
    [graph.<nome>] grafo lido de arquivo (arestas, rótulos, embeddings, divisão, lado bipartido)
"""
import configparser
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

from data_loading.idata_reader import EdgeListOptions
from neuralnet.network import ModelSpec
from neuralnet.training import TrainConfig
from rproj.config import ProjectionConfig
from .sbm import SbmSpec

TASKS = ('node-class', 'pair-same-class')
METHODS = ('rp-dotprod', 'rp-convnet', 'igf', 'ri-gram', 'ensemble')
DEFAULT_METRICS = {'node-class': ('accuracy', 'mapped_accuracy'), 'pair-same-class': ('auc',)}
DEFAULT_VALIDATION_FRACTION = 0.2
DEFAULT_PAIRS_PER_NODE = 10


class ExperimentConfigError(ValueError):
    """Erro no arquivo de experimento, com seção, chave e linha."""

    def __init__(self, message: str, path: str = "", section: str = "", key: str = "",
                 line_number: Optional[int] = None):
        self.path = path
        self.section = section
        self.key = key
        self.line_number = line_number
        location = path or "<experimento>"
        if line_number is not None:
            location += f":{line_number}"
        context = " ".join(part for part in (f"[{section}]" if section else "", key) if part)
        prefix = f"{location}: {context}: " if context else f"{location}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class GraphSource:
    """
    Origem de um grafo do experimento.

    Attributes:
        name: Nome da seção
        sbm: Especificação SBM (grafo sintético) ou None
        edges: Lista de arestas (grafo de arquivo)
        labels: Arquivo de rótulos `node_id<TAB>label`
        options: Direcionado / ponderado / bipartido
        side: Lado usado em grafos bipartidos (quadrado bipartido)
        split: 'a' ou 'b' para usar uma das metades de split_nodes
        split_fraction: Fração da metade 'a'
        split_seed: Semente da divisão
        embeddings: Arquivo de embeddings externos (método ri-gram)
    """

    name: str
    sbm: Optional[SbmSpec] = None
    edges: Optional[str] = None
    labels: Optional[str] = None
    options: EdgeListOptions = EdgeListOptions()
    side: int = 0
    split: Optional[str] = None
    split_fraction: float = 0.5
    split_seed: int = 0
    embeddings: Optional[str] = None

    def describe(self) -> dict:
        payload = asdict(self)
        payload['sbm'] = None if self.sbm is None else self.sbm.digest()
        return payload


@dataclass(frozen=True)
class ExperimentSpec:
    """
    Experimento: treina nos grafos de treino e avalia em cada grafo de teste, para cada semente.

    Invariantes: ao menos um grafo de treino e um de teste; grafos de teste nunca
    aparecem no treino (exceto no modo diagnóstico).
    """

    name: str
    task: str
    method: str
    train_graphs: Tuple[GraphSource, ...]
    test_graphs: Tuple[GraphSource, ...]
    projection: ProjectionConfig = ProjectionConfig()
    model: ModelSpec = ModelSpec()
    train: TrainConfig = TrainConfig()
    metrics: Tuple[str, ...] = ()
    seeds: Tuple[int, ...] = (0,)
    validation_fraction: float = DEFAULT_VALIDATION_FRACTION
    pairs_per_node: int = DEFAULT_PAIRS_PER_NODE
    acceptance: Dict[str, float] = field(default_factory=dict)
    diagnostic: bool = False

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"task '{self.task}' inválida. Opções: {list(TASKS)}")
        if self.method not in METHODS:
            raise ValueError(f"method '{self.method}' inválido. Opções: {list(METHODS)}")
        if not self.train_graphs or not self.test_graphs:
            raise ValueError("O experimento exige ao menos um grafo de treino e um de teste")
        if not self.diagnostic:
            shared = {g.name for g in self.train_graphs} & {g.name for g in self.test_graphs}
            if shared:
                raise ValueError(f"Grafos de teste também usados no treino: {sorted(shared)}")
        if not self.seeds:
            raise ValueError("O experimento exige ao menos uma semente")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction deve estar em [0, 1)")
        if self.pairs_per_node < 1:
            raise ValueError("pairs_per_node deve ser >= 1")
        if not self.metrics:
            object.__setattr__(self, 'metrics', DEFAULT_METRICS[self.task])
        allowed = DEFAULT_METRICS[self.task] + (('accuracy',) if self.task == 'pair-same-class' else ())
        for metric in self.metrics:
            if metric not in allowed:
                raise ValueError(f"Métrica '{metric}' não se aplica à tarefa '{self.task}'")

    @property
    def model_kind(self) -> str:
        return 'convnet' if self.method == 'rp-convnet' else 'fc'

    @property
    def uses_projections(self) -> bool:
        return self.method in ('rp-dotprod', 'rp-convnet', 'ensemble')

    def for_seed(self, seed: int) -> Tuple[ProjectionConfig, TrainConfig]:
        """Configurações de projeção e treino com a semente do experimento."""
        return replace(self.projection, seed=seed), replace(self.train, seed=seed)

    def digest(self) -> str:
        payload = {
            'name': self.name, 'task': self.task, 'method': self.method,
            'train': [g.describe() for g in self.train_graphs],
            'test': [g.describe() for g in self.test_graphs],
            'projection': self.projection.digest(), 'model': self.model.digest(),
            'train_config': self.train.digest(), 'metrics': list(self.metrics),
            'seeds': list(self.seeds), 'validation_fraction': self.validation_fraction,
            'pairs_per_node': self.pairs_per_node, 'acceptance': self.acceptance,
            'diagnostic': self.diagnostic,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode('utf-8')).hexdigest()


# --- leitura do arquivo -------------------------------------------------------

_SECTION_RE = re.compile(r'^\s*\[([^\]]+)\]\s*$')
_KEY_RE = re.compile(r'^\s*([^=:#;\s][^=:]*?)\s*[=:]')


def _line_index(text: str) -> Dict[Tuple[str, str], int]:
    """Linha de cada seção (chave '') e de cada chave."""
    index, section = {}, None
    for number, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_RE.match(line)
        if match:
            section = match.group(1).strip()
            index[(section, '')] = number
            continue
        match = _KEY_RE.match(line)
        if match and section is not None:
            index.setdefault((section, match.group(1).strip().lower()), number)
    return index


def _split_list(value: str) -> Tuple[str, ...]:
    return tuple(item.strip() for item in value.split(',') if item.strip())


def _to_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on', 'sim'):
        return True
    if lowered in ('0', 'false', 'no', 'off', 'nao', 'não'):
        return False
    raise ValueError(f"valor booleano inválido '{value}'")


def _int_list(value: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in _split_list(value))


def _float_or_list(value: str) -> Union[float, Tuple[float, ...]]:
    items = _split_list(value)
    if len(items) == 1:
        return float(items[0])
    return tuple(float(v) for v in items)


class _SectionReader:
    """Lê chaves de uma seção convertendo tipos e apontando a linha em caso de erro."""

    def __init__(self, parser: configparser.ConfigParser, section: str, path: str,
                 lines: Dict[Tuple[str, str], int], allowed: Tuple[str, ...]):
        self.section = section
        self.path = path
        self.lines = lines
        self.values = dict(parser[section]) if parser.has_section(section) else {}
        for key in self.values:
            if key not in allowed:
                raise self.error(f"chave desconhecida (opções: {', '.join(allowed)})", key)

    def error(self, message: str, key: str = "") -> ExperimentConfigError:
        line = self.lines.get((self.section, key)) if key else self.lines.get((self.section, ''))
        return ExperimentConfigError(message, self.path, self.section, key, line)

    def get(self, key: str, convert: Callable = str, default=None):
        if key not in self.values:
            return default
        try:
            return convert(self.values[key])
        except (ValueError, TypeError) as e:
            raise self.error(f"valor inválido '{self.values[key]}' ({e})", key)

    def require(self, key: str, convert: Callable = str):
        if key not in self.values:
            raise self.error("chave obrigatória ausente", key)
        return self.get(key, convert)

    def build(self, factory: Callable, **kwargs):
        """Constrói uma configuração; erros de validação apontam a linha da seção."""
        try:
            return factory(**{k: v for k, v in kwargs.items() if v is not None})
        except (ValueError, TypeError) as e:
            raise self.error(str(e))


_EXPERIMENT_KEYS = ('name', 'task', 'method', 'train', 'test', 'seeds', 'metrics',
                    'validation_fraction', 'pairs_per_node', 'diagnostic')
_PROJECTION_KEYS = ('dim', 'powers', 'init', 'sparsity', 'normalization', 'beta', 'dtype')
_MODEL_KEYS = ('conv_channels', 'conv_kernel', 'hidden')
_TRAIN_KEYS = ('optimizer', 'learning_rate', 'batch_size', 'epochs', 'beta1', 'beta2',
               'epsilon', 'dtype')
_ACCEPTANCE_KEYS = ('min_margin', 'min_metric')
_SBM_KEYS = ('block_sizes', 'p_intra', 'p_inter', 'seed')
_GRAPH_KEYS = ('edges', 'labels', 'directed', 'weighted', 'bipartite', 'side', 'split',
               'split_fraction', 'split_seed', 'embeddings')


def _graph_source(parser, name: str, path: str, lines, base: Path) -> GraphSource:
    sbm_section, graph_section = f"sbm.{name}", f"graph.{name}"
    if parser.has_section(sbm_section):
        r = _SectionReader(parser, sbm_section, path, lines, _SBM_KEYS)
        spec = r.build(SbmSpec, block_sizes=r.require('block_sizes', _int_list),
                       p_intra=r.require('p_intra', _float_or_list),
                       p_inter=r.require('p_inter', float), seed=r.get('seed', int, 0))
        return GraphSource(name=name, sbm=spec)

    if parser.has_section(graph_section):
        r = _SectionReader(parser, graph_section, path, lines, _GRAPH_KEYS)

        def resolve(value: str) -> str:
            return str((base / value).resolve()) if not Path(value).is_absolute() else value

        split = r.get('split')
        if split not in (None, 'a', 'b'):
            raise r.error("split deve ser 'a' ou 'b'", 'split')
        side = r.get('side', int, 0)
        if side not in (0, 1):
            raise r.error("side deve ser 0 ou 1", 'side')
        fraction = r.get('split_fraction', float, 0.5)
        if not 0.0 < fraction < 1.0:
            raise r.error("split_fraction deve estar em (0, 1)", 'split_fraction')
        embeddings = r.get('embeddings')
        return GraphSource(
            name=name, edges=resolve(r.require('edges')), labels=resolve(r.require('labels')),
            options=EdgeListOptions(directed=r.get('directed', _to_bool, False),
                                    weighted=r.get('weighted', _to_bool, False),
                                    bipartite=r.get('bipartite', _to_bool, False)),
            side=side, split=split, split_fraction=fraction,
            split_seed=r.get('split_seed', int, 0),
            embeddings=None if embeddings is None else resolve(embeddings),
        )

    raise ExperimentConfigError(f"grafo '{name}' sem seção [sbm.{name}] ou [graph.{name}]",
                                path, 'experiment', 'train', lines.get(('experiment', 'train')))


def parse_experiment(text: str, path: str = "", base_dir: Optional[Path] = None) -> ExperimentSpec:
    """
    Interpreta o texto de um arquivo de experimento.

    Raises:
        ExperimentConfigError: Sintaxe, chave desconhecida, valor inválido ou seção ausente
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    try:
        parser.read_string(text, source=path or '<experimento>')
    except configparser.MissingSectionHeaderError as e:
        raise ExperimentConfigError("conteúdo antes da primeira seção", path, line_number=e.lineno)
    except configparser.DuplicateSectionError as e:
        raise ExperimentConfigError("seção duplicada", path, e.section, line_number=e.lineno)
    except configparser.DuplicateOptionError as e:
        raise ExperimentConfigError("chave duplicada", path, e.section, e.option, e.lineno)
    except configparser.ParsingError as e:
        line_number = e.errors[0][0] if e.errors else None
        raise ExperimentConfigError("linha inválida", path, line_number=line_number)

    lines = _line_index(text)
    base = base_dir or (Path(path).parent if path else Path.cwd())
    known = {'experiment', 'projection', 'model', 'train', 'acceptance'}
    for section in parser.sections():
        if section not in known and not section.startswith(('sbm.', 'graph.')):
            raise ExperimentConfigError("seção desconhecida", path, section,
                                        line_number=lines.get((section, '')))
    if not parser.has_section('experiment'):
        raise ExperimentConfigError("seção [experiment] ausente", path)

    exp = _SectionReader(parser, 'experiment', path, lines, _EXPERIMENT_KEYS)
    proj = _SectionReader(parser, 'projection', path, lines, _PROJECTION_KEYS)
    model = _SectionReader(parser, 'model', path, lines, _MODEL_KEYS)
    train = _SectionReader(parser, 'train', path, lines, _TRAIN_KEYS)
    accept = _SectionReader(parser, 'acceptance', path, lines, _ACCEPTANCE_KEYS)

    task = exp.require('task')
    method = exp.require('method')
    projection = proj.build(
        ProjectionConfig, dim=proj.get('dim', int), max_power=proj.get('powers', int),
        init=proj.get('init'), sparsity=proj.get('sparsity', int),
        normalization=proj.get('normalization'), beta=proj.get('beta', float),
        dtype=proj.get('dtype'))
    model_spec = model.build(
        ModelSpec, kind='convnet' if method == 'rp-convnet' else 'fc',
        conv_channels=model.get('conv_channels', _int_list),
        conv_kernel=model.get('conv_kernel', int), hidden=model.get('hidden', _int_list))
    train_config = train.build(
        TrainConfig, optimizer=train.get('optimizer'),
        learning_rate=train.get('learning_rate', float), batch_size=train.get('batch_size', int),
        epochs=train.get('epochs', int), beta1=train.get('beta1', float),
        beta2=train.get('beta2', float), epsilon=train.get('epsilon', float),
        dtype=train.get('dtype'),
        loss='binary-cross-entropy' if task == 'pair-same-class' else 'cross-entropy')
    acceptance = {key: accept.get(key, float) for key in _ACCEPTANCE_KEYS if key in accept.values}

    train_names = exp.require('train', _split_list)
    test_names = exp.require('test', _split_list)
    return exp.build(
        ExperimentSpec, name=exp.get('name', default=Path(path).stem if path else 'experimento'),
        task=task, method=method,
        train_graphs=tuple(_graph_source(parser, n, path, lines, base) for n in train_names),
        test_graphs=tuple(_graph_source(parser, n, path, lines, base) for n in test_names),
        projection=projection, model=model_spec, train=train_config,
        metrics=exp.get('metrics', _split_list), seeds=exp.get('seeds', _int_list),
        validation_fraction=exp.get('validation_fraction', float),
        pairs_per_node=exp.get('pairs_per_node', int), acceptance=acceptance,
        diagnostic=exp.get('diagnostic', _to_bool),
    )


def load_experiment(path: Union[str, Path]) -> ExperimentSpec:
    """
    Lê um arquivo de experimento.

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ExperimentConfigError: Se o conteúdo for inválido
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Arquivo de experimento não encontrado: {path}")
    return parse_experiment(path.read_text(encoding='utf-8'), str(path), path.parent)
