from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from evaluation.experiment import ExperimentConfigError, load_experiment, parse_experiment
from evaluation.harness import (
    MEAN_ROW, TRAIN_ROW, VALIDATION_ROW, WEIGHTED_MEAN_ROW, _split_validation, evaluate,
    train_experiment, validation_metric,
)

EXPERIMENTS = Path(__file__).resolve().parents[2] / "experiments"


def mini_experiment(task='node-class', method='rp-dotprod', test='g3', extra=""):
    return f"""[experiment]
name = mini
task = {task}
method = {method}
train = g1, g2
test = {test}
seeds = 0, 1

[projection]
dim = 16
powers = 2

[model]
hidden = 8

[train]
epochs = 3
batch_size = 32
learning_rate = 0.01

[sbm.g1]
block_sizes = 30, 30
p_intra = 0.3, 0.1
p_inter = 0.03
seed = 1

[sbm.g2]
block_sizes = 30, 30
p_intra = 0.3, 0.1
p_inter = 0.03
seed = 2

[sbm.g3]
block_sizes = 25, 35
p_intra = 0.3, 0.1
p_inter = 0.03
seed = 3
{extra}"""


class TestParseExperiment:
    def test_defaults(self):
        spec = parse_experiment(mini_experiment())
        assert spec.name == 'mini'
        assert spec.metrics == ('accuracy', 'mapped_accuracy')
        assert spec.seeds == (0, 1)
        assert spec.projection.dim == 16 and spec.projection.max_power == 2
        assert spec.model.kind == 'fc' and spec.model.hidden == (8,)
        assert spec.train.loss == 'cross-entropy'
        assert [g.name for g in spec.train_graphs] == ['g1', 'g2']
        assert spec.train_graphs[0].sbm.intra_probabilities == (0.3, 0.1)

    def test_pair_task_loss_and_convnet(self):
        spec = parse_experiment(mini_experiment(task='pair-same-class', method='rp-convnet'))
        assert spec.train.loss == 'binary-cross-entropy'
        assert spec.metrics == ('auc',)
        assert spec.model.kind == 'convnet'

    def test_unknown_key_names_line(self):
        text = mini_experiment().replace("epochs = 3", "epochs = 3\nmomentum = 0.9")
        with pytest.raises(ExperimentConfigError) as info:
            parse_experiment(text, "exp.ini")
        error = info.value
        assert (error.section, error.key, error.line_number) == ('train', 'momentum', 18)
        assert str(error).startswith("exp.ini:18: [train] momentum:")

    def test_invalid_value_names_line(self):
        text = mini_experiment().replace("dim = 16", "dim = muitos")
        with pytest.raises(ExperimentConfigError) as info:
            parse_experiment(text)
        assert info.value.line_number == 10
        assert info.value.key == 'dim'

    def test_invalid_config_points_to_section(self):
        text = mini_experiment().replace("epochs = 3", "epochs = 0")
        with pytest.raises(ExperimentConfigError) as info:
            parse_experiment(text)
        assert info.value.section == 'train'
        assert info.value.line_number == 16

    def test_unknown_section(self):
        with pytest.raises(ExperimentConfigError, match="seção desconhecida"):
            parse_experiment(mini_experiment(extra="\n[otimizador]\nx = 1\n"))

    def test_missing_graph_section(self):
        with pytest.raises(ExperimentConfigError, match="g9"):
            parse_experiment(mini_experiment(test='g9'))

    def test_duplicate_key(self):
        text = mini_experiment().replace("powers = 2", "powers = 2\npowers = 3")
        with pytest.raises(ExperimentConfigError, match="duplicada") as info:
            parse_experiment(text)
        assert info.value.line_number == 12

    def test_test_graph_in_training(self):
        with pytest.raises(ExperimentConfigError, match="também usados no treino"):
            parse_experiment(mini_experiment(test='g1'))

    def test_metric_must_match_task(self):
        text = mini_experiment().replace("seeds = 0, 1", "seeds = 0\nmetrics = auc")
        with pytest.raises(ExperimentConfigError, match="não se aplica"):
            parse_experiment(text)

    def test_graph_paths_resolved_against_file(self, tmp_path):
        text = mini_experiment(test='arquivo', extra=(
            "\n[graph.arquivo]\nedges = dados/g.tsv\nlabels = dados/l.tsv\n"
            "bipartite = sim\nside = 1\nsplit = b\n"))
        path = tmp_path / "exp.ini"
        path.write_text(text, encoding='utf-8')
        source = load_experiment(path).test_graphs[0]
        assert source.edges == str((tmp_path / "dados" / "g.tsv").resolve())
        assert source.options.bipartite and source.side == 1 and source.split == 'b'

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_experiment(tmp_path / "nada.ini")

    def test_example_experiments_parse(self):
        nodes = load_experiment(EXPERIMENTS / "sbm_desk.ini")
        pairs = load_experiment(EXPERIMENTS / "sbm_desk_pares.ini")
        assert len(nodes.train_graphs) == 4 and len(nodes.test_graphs) == 2
        assert nodes.acceptance == {'min_margin': 0.10}
        assert pairs.task == 'pair-same-class' and pairs.acceptance == {'min_metric': 0.65}


class TestValidationSplit:
    def test_each_graph_keeps_its_fraction(self):
        sizes = [10, 30, 60]
        fit, val = _split_validation(sizes, 0.2, seed=4)
        bounds = np.cumsum([0] + sizes)
        for start, stop, size in zip(bounds[:-1], bounds[1:], sizes):
            in_graph = (val >= start) & (val < stop)
            assert np.count_nonzero(in_graph) == round(0.2 * size)
        assert not np.intersect1d(fit, val).size
        assert_array_equal(np.sort(np.concatenate([fit, val])), np.arange(sum(sizes)))

    def test_small_graph_not_swamped(self):
        _, val = _split_validation([5, 500], 0.2, seed=0)
        assert np.count_nonzero(val < 5) == 1

    def test_deterministic(self):
        first = _split_validation([7, 13], 0.3, seed=2)
        second = _split_validation([7, 13], 0.3, seed=2)
        for a, b in zip(first, second):
            assert_array_equal(a, b)


class TestEvaluate:
    def test_report_layout(self):
        report = evaluate(parse_experiment(mini_experiment()))
        assert list(report.summary.index) == ['g3', MEAN_ROW, WEIGHTED_MEAN_ROW, TRAIN_ROW,
                                              VALIDATION_ROW]
        assert len(report.cells) == 2 * 3
        assert set(report.model_digests) == {0, 1}
        assert not report.failures
        g3 = report.summary.loc['g3']
        assert g3['nodes'] == 60
        assert g3['baseline'] == pytest.approx(35 / 60)
        assert g3['mapped_accuracy'] >= g3['accuracy']

    def test_deterministic_and_thread_independent(self):
        spec = parse_experiment(mini_experiment())
        first = evaluate(spec)
        assert evaluate(spec).digest == first.digest
        assert evaluate(spec, threads=3).digest == first.digest

    def test_identical_test_graph_rejected(self):
        extra = "\n[sbm.copia]\nblock_sizes = 30, 30\np_intra = 0.3, 0.1\np_inter = 0.03\nseed = 1\n"
        spec = parse_experiment(mini_experiment(test='copia', extra=extra))
        with pytest.raises(ValueError, match="idêntico"):
            evaluate(spec)

    def test_failed_cell_does_not_stop_experiment(self, tmp_path):
        (tmp_path / "g.tsv").write_text("a\tb\nb\tc\nc\ta\n", encoding='utf-8')
        (tmp_path / "l.tsv").write_text("a\tx\nb\tx\nc\tx\n", encoding='utf-8')
        extra = "\n[graph.unica]\nedges = g.tsv\nlabels = l.tsv\n"
        text = mini_experiment(task='pair-same-class', test='g3, unica', extra=extra)
        spec = parse_experiment(text, str(tmp_path / "exp.ini"))
        report = evaluate(spec)
        failed = report.cells[report.cells['graph'] == 'unica']
        assert failed['status'].str.startswith('falha').all()
        assert len(report.failures) == 2
        assert np.isfinite(report.summary.loc[MEAN_ROW, 'auc'])
        assert report.summary.loc[MEAN_ROW, 'baseline'] == 0.5

    def test_acceptance_checks(self):
        spec = parse_experiment(mini_experiment(extra="\n[acceptance]\nmin_metric = 1.5\n"))
        report = evaluate(spec)
        assert len(report.acceptance) == 1
        assert not report.passed

    def test_train_matches_evaluate_validation(self):
        spec = parse_experiment(mini_experiment().replace("seeds = 0, 1", "seeds = 0"))
        result = train_experiment(spec, 0)
        report = evaluate(spec)
        assert result.network.digest == report.model_digests[0]
        assert validation_metric(result) == pytest.approx(
            report.summary.loc[VALIDATION_ROW, 'accuracy'])


@pytest.mark.slow
class TestDeskScaleGeneralization:
    def test_node_classification_beats_baseline(self):
        report = evaluate(load_experiment(EXPERIMENTS / "sbm_desk.ini"))
        mean = report.summary.loc[MEAN_ROW]
        assert mean['accuracy'] >= mean['baseline'] + 0.10
        assert report.passed

    def test_pair_auc(self):
        report = evaluate(load_experiment(EXPERIMENTS / "sbm_desk_pares.ini"))
        assert report.summary.loc[MEAN_ROW, 'auc'] >= 0.65
        assert report.passed
