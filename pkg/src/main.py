"""
Representações generalizáveis de nós por projeções aleatórias de passeios.

Uso:
    python src/main.py [--seed S] [--threads T] [--precision float32|float64]
                       [--output-dir DIR] <comando> ...

Comandos: gen-sbm, project, features, train, eval, oracle-check.
Códigos de saída: 0 sucesso, 1 erro de validação ou de uso, 2 critério de aceitação não atingido,
3 erro de E/S.
"""
import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from data_loading.factory import load_implementations
from data_loading.idata_reader import EdgeListOptions
from data_loading.labels import NodeLabels, write_labels
from evaluation.experiment import load_experiment
from evaluation.harness import evaluate, train_experiment, validation_metric
from evaluation.sbm import SbmSpec, generate_sbm
from export.report_generator import ReportGenerator
from features.extractors import ExtractorOptions, GraphBundle, available_methods, create_extractor
from features.feature_table import save_table
from features.oracle import sampled_errors
from features.ri_gram import read_embeddings
from graph.loader import load_edge_list, write_edge_list, write_id_map
from graph.transition import bipartite_square, transition_matrix
from neuralnet.storage import save_model
from rproj.config import (
    DEFAULT_BETA, DEFAULT_DIM, DEFAULT_MAX_POWER, DEFAULT_SPARSITY, INIT_KINDS, NORMALIZATIONS,
    ProjectionConfig,
)
from rproj.propagation import propagate
from rproj.storage import load_projections, save_projections

OUTPUT_DIR_ENV = 'RPGRAPH_OUTPUT_DIR'
EXIT_OK, EXIT_VALIDATION, EXIT_ACCEPTANCE, EXIT_IO = 0, 1, 2, 3


class AcceptanceFailure(Exception):
    """Verificação de aceitação não atingida (código de saída 2)."""


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser cujos erros de uso saem com o código de validação."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"❌ {self.prog}: erro: {message}\n")


def _float_list(value: str):
    values = tuple(float(v) for v in value.split(','))
    return values[0] if len(values) == 1 else values


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"deve ser >= 1, recebido {number}")
    return number


def _add_graph_args(parser: argparse.ArgumentParser):
    parser.add_argument('--graph', required=True, help="Lista de arestas (.tsv/.txt/.csv)")
    parser.add_argument('--directed', action='store_true')
    parser.add_argument('--weighted', action='store_true')
    parser.add_argument('--bipartite', action='store_true')
    parser.add_argument('--side', type=int, choices=(0, 1), default=0,
                        help="Lado do grafo bipartido cujos nós são representados")


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog='rpgraph', description="Features de nós e pares por projeções aleatórias")
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--threads', type=_positive_int, default=1)
    parser.add_argument('--precision', choices=('float32', 'float64'), default='float32')
    parser.add_argument('--output-dir', default=os.environ.get(OUTPUT_DIR_ENV, 'output'))
    parser.add_argument('--quiet', action='store_true', help="Suprime mensagens de progresso")
    commands = parser.add_subparsers(dest='command', required=True)

    sbm = commands.add_parser('gen-sbm', help="Gera um grafo SBM e seus rótulos")
    sbm.add_argument('--blocks', required=True, help="Tamanhos dos blocos, ex.: 150,150")
    sbm.add_argument('--p-intra', required=True, type=_float_list,
                     help="Probabilidade intra-bloco (uma ou uma por bloco)")
    sbm.add_argument('--p-inter', required=True, type=float)
    sbm.add_argument('--name', default='sbm')

    project = commands.add_parser('project', help="Calcula as projeções R^(0)..R^(N)")
    _add_graph_args(project)
    project.add_argument('--dim', type=_positive_int, default=DEFAULT_DIM)
    project.add_argument('--powers', type=int, default=DEFAULT_MAX_POWER)
    project.add_argument('--init', choices=INIT_KINDS, default='gaussian')
    project.add_argument('--sparsity', type=int, default=DEFAULT_SPARSITY)
    project.add_argument('--normalization', choices=NORMALIZATIONS, default='none')
    project.add_argument('--beta', type=float, default=DEFAULT_BETA)
    project.add_argument('--out', help="Arquivo RPJ1 (padrão: <output-dir>/<grafo>.rpj)")

    features = commands.add_parser('features', help="Tabela de features de nós ou pares")
    _add_graph_args(features)
    features.add_argument('--method', choices=available_methods(), default='rp-dotprod')
    features.add_argument('--proj', help="Projeções RPJ1 (métodos rp-dotprod e ensemble)")
    features.add_argument('--embeddings', help="Embeddings externos (método ri-gram)")
    features.add_argument('--pairs', help="Arquivo `no_i<TAB>no_j` (padrão: features de nó)")
    features.add_argument('--powers', type=int, default=DEFAULT_MAX_POWER,
                          help="N do método oracle")
    features.add_argument('--out', help="Saída .csv ou .ftb (padrão: <output-dir>/<grafo>_<método>.csv)")

    train = commands.add_parser('train', help="Treina o modelo de um experimento")
    train.add_argument('--experiment', required=True)
    train.add_argument('--out', help="Arquivo MDL1 (padrão: <output-dir>/<nome>_seed<S>.mdl)")

    run = commands.add_parser('eval', help="Executa um experimento e grava o relatório")
    run.add_argument('--experiment', required=True)
    run.add_argument('--charts', action='store_true', help="Gera gráficos PNG")
    run.add_argument('--pdf', action='store_true', help="Gera o relatório em PDF")

    check = commands.add_parser('oracle-check', help="Erro do estimador contra o oráculo exato")
    _add_graph_args(check)
    check.add_argument('--proj', required=True)
    check.add_argument('--samples', type=int, default=2000)
    check.add_argument('--tolerance', type=float, default=0.05)
    check.add_argument('--charts', action='store_true', help="Histograma dos erros")
    return parser


class _Console:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, message: str):
        if not self.quiet:
            print(message)


def _load_transition(args) -> tuple:
    options = EdgeListOptions(directed=args.directed, weighted=args.weighted,
                              bipartite=args.bipartite)
    graph = load_edge_list(args.graph, options)
    transition = bipartite_square(graph, args.side) if args.bipartite else transition_matrix(graph)
    return graph, transition


def _default_path(args, name: str) -> Path:
    return Path(args.output_dir) / name


def cmd_gen_sbm(args, say: _Console) -> int:
    spec = SbmSpec(block_sizes=tuple(int(b) for b in args.blocks.split(',')),
                   p_intra=args.p_intra, p_inter=args.p_inter, seed=args.seed)
    say(f"🔄 Gerando SBM com blocos {spec.block_sizes} (semente {spec.seed})")
    graph, blocks = generate_sbm(spec)
    edges_path = _default_path(args, f"{args.name}.edges.tsv")
    labels_path = _default_path(args, f"{args.name}.labels.tsv")
    write_edge_list(edges_path, graph)
    write_labels(labels_path, NodeLabels.from_array(blocks), graph)
    say(f"✅ {graph.node_count} nós, {graph.edge_count} arestas: {edges_path}, {labels_path}")
    return EXIT_OK


def cmd_project(args, say: _Console) -> int:
    config = ProjectionConfig(dim=args.dim, max_power=args.powers, init=args.init,
                              sparsity=args.sparsity, normalization=args.normalization,
                              beta=args.beta, seed=args.seed, dtype=args.precision)
    say(f"🔄 Carregando grafo: {args.graph}")
    graph, transition = _load_transition(args)
    say(f"📊 {transition.node_count} nós; D = {config.dim}, N = {config.max_power}")
    projections = propagate(transition, config, threads=args.threads)
    out = Path(args.out) if args.out else _default_path(args, f"{Path(args.graph).stem}.rpj")
    save_projections(projections, out)
    write_id_map(f"{out}.ids.tsv", GraphBundle(graph=graph, transition=transition).node_names())
    say(f"✅ Projeções salvas em: {out}")
    return EXIT_OK


def _read_pairs(path: str, names: Sequence[str]) -> np.ndarray:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Arquivo de pares não encontrado: {path}")
    index = {name: node for node, name in enumerate(names)}
    df = pd.read_csv(path, sep='\t', header=None, names=['i', 'j'], dtype=str,
                     comment='#', skip_blank_lines=True)
    missing = [v for v in pd.concat([df['i'], df['j']]) if v not in index]
    if missing:
        raise ValueError(f"{path}: nó '{missing[0]}' não pertence ao grafo")
    return np.array([[index[i], index[j]] for i, j in zip(df['i'], df['j'])], dtype=np.int64)


def cmd_features(args, say: _Console) -> int:
    say(f"🔄 Carregando grafo: {args.graph}")
    graph, transition = _load_transition(args)
    projections = None
    if args.proj:
        projections = load_projections(args.proj, expected_hash=transition.digest)
    embeddings = read_embeddings(args.embeddings) if args.embeddings else None
    bundle = GraphBundle(graph=graph, transition=transition, projections=projections,
                         embeddings=embeddings)

    max_power = projections.max_power if projections is not None else args.powers
    extractor = create_extractor(args.method, ExtractorOptions(threads=args.threads,
                                                               max_power=max_power))
    if args.pairs:
        table = extractor.pair_table(bundle, _read_pairs(args.pairs, bundle.node_names()))
    else:
        table = extractor.node_table(bundle)

    out = (Path(args.out) if args.out
           else _default_path(args, f"{Path(args.graph).stem}_{args.method}.csv"))
    if out.suffix == '.csv':
        table.to_csv(out)
    else:
        save_table(table, out)
    write_id_map(f"{out}.ids.tsv", bundle.node_names())
    if table.flags is not None and table.flags.any():
        say(f"⚠️  {int(table.flags.sum())} linhas com clique aproximado (limite excedido)")
    say(f"✅ {len(table.values)} linhas x {len(table.schema)} features: {out}")
    return EXIT_OK


def cmd_train(args, say: _Console) -> int:
    spec = load_experiment(args.experiment)
    say(f"🔄 Treinando '{spec.name}' ({spec.method}, {spec.task}), semente {args.seed}")
    result = train_experiment(spec, args.seed, threads=args.threads, verbose=not say.quiet)
    _, config = spec.for_seed(args.seed)

    out = Path(args.out) if args.out else _default_path(args, f"{spec.name}_seed{args.seed}.mdl")
    save_model(result.network, out, config)
    history = ReportGenerator(out.parent).write_history(result.history,
                                                       f"{spec.name}_seed{args.seed}")
    say(f"📈 Melhor época: {result.best_epoch}; "
        f"{spec.metrics[0]} de validação = {validation_metric(result):.4f}")
    say(f"✅ Modelo salvo em: {out} (histórico: {history})")
    return EXIT_OK


def cmd_eval(args, say: _Console) -> int:
    spec = load_experiment(args.experiment)
    say(f"🔄 Experimento '{spec.name}': {len(spec.seeds)} sementes, "
        f"{len(spec.test_graphs)} grafos de teste")
    report = evaluate(spec, threads=args.threads, verbose=not say.quiet)

    output_dir = Path(args.output_dir)
    reports = ReportGenerator(output_dir)
    reports.write_csvs(report)
    chart_paths = []
    if args.charts:
        from visualization.chart_generator import ChartGenerator
        charts = ChartGenerator(output_dir)
        chart_paths.append(charts.metric_bars(report.summary, report.primary_metric, report.name))
        curves = charts.training_curves(report.history, report.name)
        if curves is not None:
            chart_paths.append(curves)
    md_path = reports.generate_experiment_report(report, chart_paths)
    say(f"✅ Relatório salvo em: {md_path}")
    if args.pdf:
        from export.pdf_generator import PDFGenerator
        say(f"✅ PDF salvo em: {PDFGenerator(output_dir).markdown_to_pdf(md_path)}")

    for message in report.failures:
        say(f"⚠️  {message}")
    for check in report.acceptance:
        marker = "✅" if check.passed else "❌"
        say(f"{marker} {check.name} = {check.value:.4f} (mínimo {check.threshold:.4f})")
    if not report.passed:
        raise AcceptanceFailure(f"Experimento '{spec.name}' não atingiu os critérios de aceitação")
    return EXIT_OK


def cmd_oracle_check(args, say: _Console) -> int:
    say(f"🔄 Carregando grafo: {args.graph}")
    _, transition = _load_transition(args)
    projections = load_projections(args.proj)
    summary = sampled_errors(projections, transition, args.samples, seed=args.seed)
    print(f"max  = {summary.max:.6g}")
    print(f"mean = {summary.mean:.6g}")
    print(f"p99  = {summary.p99:.6g}")
    if args.charts:
        from visualization.chart_generator import ChartGenerator
        chart = ChartGenerator(Path(args.output_dir)).error_histogram(
            summary.errors, args.tolerance, Path(args.proj).stem)
        say(f"📈 Histograma: {chart}")
    if summary.p99 > args.tolerance:
        raise AcceptanceFailure(
            f"Percentil 99 do erro ({summary.p99:.6g}) acima da tolerância ({args.tolerance})")
    say(f"✅ Percentil 99 dentro da tolerância ({args.tolerance})")
    return EXIT_OK


COMMANDS = {
    'gen-sbm': cmd_gen_sbm,
    'project': cmd_project,
    'features': cmd_features,
    'train': cmd_train,
    'eval': cmd_eval,
    'oracle-check': cmd_oracle_check,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Função principal; devolve o código de saída."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'oracle-check' and args.samples < 1:
        parser.error(f"--samples deve ser >= 1, recebido {args.samples}")

    load_implementations()
    say = _Console(args.quiet)
    try:
        return COMMANDS[args.command](args, say)
    except AcceptanceFailure as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    except OSError as e:
        print(f"❌ Erro de E/S: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IndexError, KeyError, MemoryError) as e:
        print(f"❌ Erro: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
