import numpy as np
import pandas as pd
import pytest

from evaluation.harness import AcceptanceCheck, ExperimentReport, MEAN_ROW
from export.atomic import atomic_output
from export.report_generator import ReportGenerator
from visualization.chart_generator import ChartGenerator


def sample_report(**overrides):
    summary = pd.DataFrame(
        {'nodes': [60, 60], 'accuracy': [0.8, 0.8], 'baseline': [0.5, 0.5],
         'mapped_accuracy': [0.85, float('nan')]},
        index=pd.Index(['g3', MEAN_ROW], name='graph'))
    cells = pd.DataFrame({'seed': [0], 'graph': ['g3'], 'role': ['teste'], 'accuracy': [0.8],
                          'baseline': [0.5], 'status': ['ok']})
    history = pd.DataFrame({'epoch': [1, 2], 'train_loss': [0.7, 0.5], 'val_loss': [0.8, 0.6],
                            'metric': [0.6, 0.7], 'seed': [0, 0]})
    fields = dict(name='mini', spec_digest='abc', task='node-class', method='rp-dotprod',
                  metrics=('accuracy', 'mapped_accuracy'), cells=cells, summary=summary,
                  history=history, model_digests={0: 'd0'})
    fields.update(overrides)
    return ExperimentReport(**fields)


class TestAtomicOutput:
    def test_replaces_on_success(self, tmp_path):
        target = tmp_path / "sub" / "a.txt"
        with atomic_output(target) as temp:
            temp.write_text("ok")
            assert not target.exists()
        assert target.read_text() == "ok"
        assert list(target.parent.iterdir()) == [target]

    def test_error_leaves_nothing(self, tmp_path):
        target = tmp_path / "a.txt"
        target.write_text("antigo")
        with pytest.raises(RuntimeError):
            with atomic_output(target) as temp:
                temp.write_text("novo")
                raise RuntimeError("interrompido")
        assert target.read_text() == "antigo"
        assert list(tmp_path.iterdir()) == [target]


class TestReportGenerator:
    def test_markdown_sections(self, tmp_path):
        report = sample_report(
            acceptance=[AcceptanceCheck('min_metric', 0.9, 0.8)],
            failures=["g4: grafo degenerado"])
        text = ReportGenerator(tmp_path).render_markdown(report)
        assert text.startswith("# Relatório do Experimento: mini")
        assert "| graph | nodes | accuracy | baseline | mapped_accuracy |" in text
        assert "| g3 | 60 | 0.8000 | 0.5000 | 0.8500 |" in text
        assert "| média | 60 | 0.8000 | 0.5000 | — |" in text
        assert "❌ falhou" in text
        assert "- g4: grafo degenerado" in text
        assert "- semente 0: `d0`" in text
        assert f"`{report.digest}`" in text
        assert "## 📈 Gráficos" not in text

    def test_optional_sections_omitted(self, tmp_path):
        text = ReportGenerator(tmp_path).render_markdown(sample_report(model_digests={}))
        assert "Critérios de Aceitação" not in text
        assert "Células com Falha" not in text
        assert "## 🔒 Modelos" not in text

    def test_chart_links(self, tmp_path):
        text = ReportGenerator(tmp_path).render_markdown(
            sample_report(), [tmp_path / "mini_metricas.png"])
        assert "![mini_metricas](mini_metricas.png)" in text

    def test_report_is_reproducible(self, tmp_path):
        first = ReportGenerator(tmp_path / "a").generate_experiment_report(sample_report())
        second = ReportGenerator(tmp_path / "b").generate_experiment_report(sample_report())
        assert first.name == "mini_relatorio.md"
        assert first.read_bytes() == second.read_bytes()

    def test_csvs(self, tmp_path):
        paths = ReportGenerator(tmp_path).write_csvs(sample_report())
        assert [p.name for p in paths] == ["mini_celulas.csv", "mini_resumo.csv",
                                           "mini_historico.csv"]
        summary = pd.read_csv(paths[1], index_col='graph')
        assert list(summary.index) == ['g3', MEAN_ROW]
        assert summary.loc['g3', 'accuracy'] == pytest.approx(0.8)
        assert np.isnan(summary.loc[MEAN_ROW, 'mapped_accuracy'])
        assert list(pd.read_csv(paths[2]).columns) == ['epoch', 'train_loss', 'val_loss',
                                                       'metric', 'seed']


class TestChartGenerator:
    def test_charts_written(self, tmp_path):
        charts = ChartGenerator(tmp_path)
        report = sample_report()
        paths = [
            charts.metric_bars(report.summary, 'accuracy', report.name),
            charts.training_curves(report.history, report.name),
            charts.error_histogram(np.abs(np.random.default_rng(0).normal(0, 0.01, 500)),
                                   0.05, 'oraculo'),
        ]
        assert [p.name for p in paths] == ["mini_metricas.png", "mini_treino.png",
                                           "oraculo_erros.png"]
        for path in paths:
            assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_empty_history_has_no_curve(self, tmp_path):
        assert ChartGenerator(tmp_path).training_curves(pd.DataFrame(), 'mini') is None
