"""
Leitor de listas de arestas em texto (`src<TAB>dst[<TAB>peso]`).
"""
from graph.sparse_graph import SparseGraph
from ..idata_reader import IGraphReader
from ..factory import register
from ..edge_builder import EdgeBuilder, EdgeListFormatError


@register("txt", "tsv", "edges", "edgelist")
class EdgeListReader(IGraphReader):
    """Leitor de listas de arestas separadas por TAB ou espaços."""

    def read(self) -> SparseGraph:
        """
        Lê o arquivo linha a linha. Linhas vazias e iniciadas por '#' são ignoradas.

        Returns:
            SparseGraph: Grafo carregado

        Raises:
            FileNotFoundError: Se o arquivo não existir
            EdgeListFormatError: Se alguma linha estiver mal formada
        """
        builder = EdgeBuilder(self.options, self.file_path)

        try:
            with open(self.file_path, 'r', encoding='utf-8') as f:
                for line_number, line in enumerate(f, start=1):
                    stripped = line.strip()
                    if not stripped or stripped.startswith('#'):
                        continue

                    fields = stripped.split()
                    if len(fields) not in (2, 3):
                        raise EdgeListFormatError(
                            f"esperado 'src dst [peso]', encontrado {len(fields)} campo(s)",
                            line_number, self.file_path)

                    weight = fields[2] if len(fields) == 3 else None
                    builder.add(fields[0], fields[1], weight, line_number)
        except FileNotFoundError:
            raise FileNotFoundError(f"Arquivo não encontrado: {self.file_path}")

        return builder.build()
