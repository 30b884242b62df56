"""
Leitor de listas de arestas em CSV (com cabeçalho).
"""
import pandas as pd

from graph.sparse_graph import SparseGraph
from ..idata_reader import IGraphReader
from ..factory import register
from ..edge_builder import EdgeBuilder, EdgeListFormatError


@register("csv")
class CSVEdgeListReader(IGraphReader):
    """Leitor de listas de arestas CSV: as duas primeiras colunas são origem e destino,
    a terceira (opcional) é o peso."""

    def read(self) -> SparseGraph:
        """
        Lê o arquivo CSV e retorna o grafo.

        Returns:
            SparseGraph: Grafo carregado

        Raises:
            FileNotFoundError: Se o arquivo não existir
            EdgeListFormatError: Se alguma linha estiver mal formada
        """
        df = self._read_frame()
        if df.shape[1] not in (2, 3):
            raise EdgeListFormatError(
                f"esperado 2 ou 3 colunas, encontrado {df.shape[1]}", 1, self.file_path)

        builder = EdgeBuilder(self.options, self.file_path)
        has_weight = df.shape[1] == 3
        # linha 1 é o cabeçalho
        for line_number, row in enumerate(df.itertuples(index=False), start=2):
            if pd.isna(row[0]) or pd.isna(row[1]) or (has_weight and pd.isna(row[2])):
                raise EdgeListFormatError("campo vazio", line_number, self.file_path)
            builder.add(str(row[0]).strip(), str(row[1]).strip(),
                        str(row[2]).strip() if has_weight else None, line_number)

        return builder.build()

    def _read_frame(self) -> pd.DataFrame:
        """Tenta os delimitadores comuns e usa o primeiro que produz mais de uma coluna."""
        try:
            for delimiter in [',', ';', '\t', '|']:
                df = pd.read_csv(self.file_path, delimiter=delimiter, dtype=str,
                                 comment='#', skip_blank_lines=True)
                if len(df.columns) > 1:
                    return df
            return pd.read_csv(self.file_path, dtype=str, comment='#')
        except FileNotFoundError:
            raise FileNotFoundError(f"Arquivo não encontrado: {self.file_path}")
        except pd.errors.EmptyDataError:
            return pd.DataFrame(columns=['src', 'dst'])
