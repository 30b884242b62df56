"""
Gerador de relatórios dos experimentos em Markdown e CSV.

Os arquivos não levam data nem hora: duas execuções do mesmo experimento
produzem relatórios byte a byte idênticos.
"""
import math
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from evaluation.harness import ExperimentReport
from .atomic import atomic_output


def _fmt(value) -> str:
    if isinstance(value, float):
        return "—" if math.isnan(value) else f"{value:.4f}"
    return str(value)


def _markdown_table(frame: pd.DataFrame) -> List[str]:
    header = list(frame.columns)
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("-" * (len(h) + 2) for h in header) + "|"]
    for row in frame.itertuples(index=False):
        lines.append("| " + " | ".join(_fmt(v) for v in row) + " |")
    return lines


class ReportGenerator:
    """Gera o relatório Markdown e as tabelas CSV de um ExperimentReport."""

    def __init__(self, output_dir: Path):
        """
        Inicializa o gerador de relatórios.

        Args:
            output_dir: Diretório onde os relatórios serão salvos
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _write_text(self, path: Path, text: str) -> Path:
        with atomic_output(path) as temp_path:
            temp_path.write_text(text, encoding='utf-8')
        return path

    def write_frame(self, frame: pd.DataFrame, name: str, index: bool = False) -> Path:
        """Grava uma tabela como CSV (escrita atômica)."""
        path = self.output_dir / name
        with atomic_output(path) as temp_path:
            frame.to_csv(temp_path, index=index, float_format='%.10g')
        return path

    def write_history(self, history: pd.DataFrame, name: str) -> Path:
        """Histórico de treino (epoch, train_loss, val_loss, metric[, seed])."""
        return self.write_frame(history, f"{name}_historico.csv")

    def write_csvs(self, report: ExperimentReport) -> List[Path]:
        """
        Grava células, resumo e histórico do experimento.

        Returns:
            Caminhos dos CSVs gerados
        """
        return [
            self.write_frame(report.cells, f"{report.name}_celulas.csv"),
            self.write_frame(report.summary, f"{report.name}_resumo.csv", index=True),
            self.write_history(report.history, report.name),
        ]

    def render_markdown(self, report: ExperimentReport,
                        chart_paths: Sequence[Path] = ()) -> str:
        """Texto Markdown do relatório."""
        metric = report.primary_metric
        lines = [
            f"# Relatório do Experimento: {report.name}",
            "",
            f"**Tarefa:** {report.task}  ",
            f"**Método:** {report.method}  ",
            f"**Sementes:** {len(report.model_digests) or '—'}  ",
            f"**Digest da especificação:** `{report.spec_digest}`  ",
            f"**Digest do relatório:** `{report.digest}`",
            "",
            "---",
            "",
            "## 📊 Resultados por Grafo",
            "",
        ]
        lines += _markdown_table(report.summary.reset_index())
        lines += ["", f"*Métrica principal: {metric}. Baseline: "
                      f"{'AUC 0.5' if metric == 'auc' else 'classe majoritária'}.*", ""]

        if report.acceptance:
            lines += ["## ✅ Critérios de Aceitação", "",
                      "| Verificação | Limite | Valor | Status |",
                      "|-------------|--------|-------|--------|"]
            for check in report.acceptance:
                status = "✅ ok" if check.passed else "❌ falhou"
                lines.append(f"| {check.name} | {check.threshold:.4f} | "
                             f"{_fmt(check.value)} | {status} |")
            lines.append("")

        if report.failures:
            lines += ["## ⚠️ Células com Falha", ""]
            lines += [f"- {message}" for message in report.failures]
            lines.append("")

        if report.model_digests:
            lines += ["## 🔒 Modelos", ""]
            lines += [f"- semente {seed}: `{digest}`"
                      for seed, digest in sorted(report.model_digests.items())]
            lines.append("")

        if chart_paths:
            lines += ["## 📈 Gráficos", ""]
            for chart_path in chart_paths:
                lines += [f"![{Path(chart_path).stem}]({Path(chart_path).name})", ""]

        return "\n".join(lines)

    def generate_experiment_report(self, report: ExperimentReport,
                                   chart_paths: Optional[Sequence[Path]] = None) -> Path:
        """
        Gera o relatório Markdown do experimento.

        Args:
            report: Resultado de evaluate
            chart_paths: Gráficos a referenciar (no mesmo diretório do relatório)

        Returns:
            Caminho do relatório gerado
        """
        report_path = self.output_dir / f"{report.name}_relatorio.md"
        return self._write_text(report_path, self.render_markdown(report, chart_paths or ()))
