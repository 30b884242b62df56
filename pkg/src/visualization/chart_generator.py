"""
Gerador de gráficos dos experimentos: métricas por grafo de teste, curvas de treino e
distribuição do erro das features estimadas.
"""
from pathlib import Path
from typing import Optional

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

# Configuração de estilo
sns.set_theme(style="whitegrid")
plt.rcParams['figure.figsize'] = (10, 6)
plt.rcParams['font.size'] = 10


class ChartGenerator:
    """Gerador de gráficos PNG para os relatórios."""

    def __init__(self, output_dir: Path):
        """
        Inicializa o gerador de gráficos.

        Args:
            output_dir: Diretório onde os gráficos serão salvos
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _save(self, fig, name: str) -> Path:
        chart_path = self.output_dir / name
        fig.tight_layout()
        fig.savefig(chart_path, dpi=150, bbox_inches='tight')
        plt.close(fig)
        return chart_path

    def metric_bars(self, summary: pd.DataFrame, metric: str, experiment_name: str) -> Path:
        """
        Barras da métrica principal por linha do resumo, com o baseline ao lado.

        Args:
            summary: Tabela de resumo (índice = grafo ou linha agregada)
            metric: Coluna da métrica
            experiment_name: Nome do experimento (título e nome do arquivo)

        Returns:
            Caminho do gráfico gerado
        """
        data = summary[[metric, 'baseline']].reset_index().melt(
            id_vars=summary.index.name or 'index', var_name='série', value_name='valor')
        fig, ax = plt.subplots(figsize=(max(8, 1.2 * len(summary)), 6))
        sns.barplot(data=data, x=summary.index.name or 'index', y='valor', hue='série',
                    palette=['steelblue', '#bbbbbb'], ax=ax)
        ax.set_xlabel('Grafo', fontsize=12, fontweight='bold')
        ax.set_ylabel(metric, fontsize=12, fontweight='bold')
        ax.set_title(f'{metric} por grafo - {experiment_name}', fontsize=14, fontweight='bold', pad=20)
        ax.set_ylim(0, 1.05)
        ax.tick_params(axis='x', rotation=30)

        for container in ax.containers:
            ax.bar_label(container, fmt='%.3f', fontsize=8)
        return self._save(fig, f"{experiment_name}_metricas.png")

    def training_curves(self, history: pd.DataFrame, experiment_name: str) -> Optional[Path]:
        """
        Perdas de treino e validação por época (média e faixa entre sementes).

        Returns:
            Caminho do gráfico, ou None se o histórico estiver vazio
        """
        if history.empty:
            return None
        long = history.melt(id_vars=['epoch'], value_vars=['train_loss', 'val_loss'],
                            var_name='conjunto', value_name='perda').dropna()
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(14, 5))
        sns.lineplot(data=long, x='epoch', y='perda', hue='conjunto', marker='o', ax=ax1)
        ax1.set_title('Perda por época', fontsize=14, fontweight='bold')
        ax1.set_xlabel('Época')

        sns.lineplot(data=history.dropna(subset=['metric']), x='epoch', y='metric',
                     marker='o', color='darkgreen', ax=ax2)
        ax2.set_title('Métrica de validação por época', fontsize=14, fontweight='bold')
        ax2.set_xlabel('Época')
        return self._save(fig, f"{experiment_name}_treino.png")

    def error_histogram(self, errors: np.ndarray, tolerance: float, name: str) -> Path:
        """Histograma de |F_estimado - F_exato| com o percentil 99 e a tolerância."""
        fig, ax = plt.subplots()
        sns.histplot(errors, bins=50, color='steelblue', ax=ax)
        p99 = float(np.percentile(errors, 99)) if len(errors) else 0.0
        ax.axvline(p99, color='darkorange', linestyle='--', label=f'percentil 99 = {p99:.4g}')
        ax.axvline(tolerance, color='red', linestyle=':', label=f'tolerância = {tolerance:.4g}')
        ax.set_xlabel('|F estimado - F exato|', fontsize=12, fontweight='bold')
        ax.set_ylabel('Frequência', fontsize=12, fontweight='bold')
        ax.set_title(f'Erro das features - {name}', fontsize=14, fontweight='bold', pad=20)
        ax.legend()
        return self._save(fig, f"{name}_erros.png")
