"""
Classe FeatureTable - vetores de features nomeados e ordenados por nó ou par de nós.

Formato binário FTB1 (little-endian): magic "FTB1", versão u16, aridade da chave u8,
linhas u64, features u32; bloco de esquema (JSON com nomes e proveniência);
chaves i64 (linhas x aridade); flags u8 por linha; valores f32 em ordem de linha.
"""
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from export.atomic import atomic_output
from export.binary_io import (
    ArtifactFormatError, check_magic, check_version, ensure_consumed, read_array,
    read_json_block, read_struct, write_array, write_json_block,
)

MAGIC = b"FTB1"
VERSION = 1

HEADER = np.dtype([
    ('magic', 'S4'),
    ('version', '<u2'),
    ('arity', 'u1'),
    ('rows', '<u8'),
    ('features', '<u4'),
])


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """
    Tabela de features.

    Attributes:
        schema: Nomes das features, em ordem
        keys: Array (linhas x 1) de nós ou (linhas x 2) de pares (i, j)
        values: Array (linhas x len(schema))
        provenance: Método, digest da configuração e digest do grafo de origem
        flags: Marca por linha (ex.: clique aproximado); None se nenhuma linha marcada
    """

    schema: Tuple[str, ...]
    keys: np.ndarray
    values: np.ndarray
    provenance: Dict[str, str] = field(default_factory=dict)
    flags: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, 'schema', tuple(self.schema))
        keys = np.asarray(self.keys, dtype=np.int64)
        if keys.ndim == 1:
            keys = keys[:, None]
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values.reshape(len(keys), len(self.schema))
        if keys.shape[1] not in (1, 2):
            raise ValueError(f"Chaves devem ter aridade 1 ou 2, recebido {keys.shape[1]}")
        if values.shape != (len(keys), len(self.schema)):
            raise ValueError(
                f"Valores com formato {values.shape}, esperado ({len(keys)}, {len(self.schema)})")
        object.__setattr__(self, 'keys', keys)
        object.__setattr__(self, 'values', values)
        if self.flags is not None:
            object.__setattr__(self, 'flags', np.asarray(self.flags, dtype=bool))

    @property
    def is_pairwise(self) -> bool:
        return self.keys.shape[1] == 2

    def __len__(self):
        return len(self.keys)

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.schema.index(name)]

    def row(self, i: int, j: Optional[int] = None) -> np.ndarray:
        """Vetor de features do nó i (ou do par (i, j))."""
        key = (i,) if j is None else (i, j)
        matches = np.flatnonzero((self.keys == np.asarray(key)).all(axis=1))
        if len(matches) == 0:
            raise KeyError(f"Chave {key} ausente da tabela")
        return self.values[matches[0]]

    def concat(self, other: 'FeatureTable') -> 'FeatureTable':
        """Concatena as colunas de duas tabelas com as mesmas chaves (ensemble)."""
        if not np.array_equal(self.keys, other.keys):
            raise ValueError("Tabelas com chaves diferentes não podem ser concatenadas")
        provenance = {f"a.{k}": v for k, v in self.provenance.items()}
        provenance.update({f"b.{k}": v for k, v in other.provenance.items()})
        provenance['method'] = f"{self.provenance.get('method', '?')}+{other.provenance.get('method', '?')}"
        flags = None
        if self.flags is not None or other.flags is not None:
            flags = np.zeros(len(self), dtype=bool)
            for table in (self, other):
                if table.flags is not None:
                    flags |= table.flags
        return FeatureTable(schema=self.schema + other.schema, keys=self.keys,
                            values=np.hstack([self.values, other.values]),
                            provenance=provenance, flags=flags)

    def to_frame(self) -> pd.DataFrame:
        key_columns = ['i', 'j'] if self.is_pairwise else ['i']
        df = pd.DataFrame(self.keys, columns=key_columns)
        values = pd.DataFrame(self.values, columns=list(self.schema))
        return pd.concat([df, values], axis=1)

    def to_csv(self, path: Union[str, Path]):
        """CSV com cabeçalho `i[,j],f1,...,fm` (escrita atômica)."""
        with atomic_output(path) as temp_path:
            self.to_frame().to_csv(temp_path, index=False, float_format='%.10g')

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update('\n'.join(self.schema).encode('utf-8'))
        for key in sorted(self.provenance):
            h.update(f"{key}={self.provenance[key]}".encode('utf-8'))
        h.update(self.keys.astype('<i8').tobytes())
        h.update(self.values.astype('<f8').tobytes())
        return h.hexdigest()

    def __repr__(self):
        kind = "pares" if self.is_pairwise else "nós"
        return (f"FeatureTable(method='{self.provenance.get('method', '?')}', "
                f"{len(self)} {kind}, {len(self.schema)} features)")


def save_table(table: FeatureTable, path: Union[str, Path]):
    """Grava a tabela no formato FTB1 (valores em f32)."""
    header = np.zeros((), dtype=HEADER)
    header['magic'] = MAGIC
    header['version'] = VERSION
    header['arity'] = table.keys.shape[1]
    header['rows'] = len(table)
    header['features'] = len(table.schema)

    flags = table.flags if table.flags is not None else np.zeros(len(table), dtype=bool)
    with atomic_output(path) as temp_path:
        with open(temp_path, 'wb') as f:
            f.write(header.tobytes())
            write_json_block(f, {'schema': list(table.schema), 'provenance': table.provenance})
            write_array(f, table.keys, '<i8')
            write_array(f, flags, 'u1')
            write_array(f, table.values, '<f4')


def load_table(path: Union[str, Path]) -> FeatureTable:
    """
    Carrega uma tabela FTB1.

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ArtifactFormatError: Magic, versão ou esquema inválidos
        TruncatedFileError: Arquivo menor que o declarado
    """
    path = str(path)
    try:
        f = open(path, 'rb')
    except FileNotFoundError:
        raise FileNotFoundError(f"Tabela de features não encontrada: {path}")

    with f:
        header = read_struct(f, HEADER, "cabeçalho FTB1")
        check_magic(header['magic'], MAGIC, path)
        check_version(header['version'], VERSION, path)
        rows, n_features, arity = int(header['rows']), int(header['features']), int(header['arity'])

        meta = read_json_block(f, "esquema FTB1")
        schema = tuple(meta.get('schema', []))
        if len(schema) != n_features:
            raise ArtifactFormatError(f"{path}: esquema com {len(schema)} nomes, esperado {n_features}")

        keys = read_array(f, '<i8', (rows, arity), "chaves")
        flags = read_array(f, 'u1', (rows,), "flags").astype(bool)
        values = read_array(f, '<f4', (rows, n_features), "valores")
        ensure_consumed(f, path)

    return FeatureTable(schema=schema, keys=keys, values=values.astype(np.float64),
                        provenance=dict(meta.get('provenance', {})),
                        flags=flags if flags.any() else None)


def stack_tables(tables: Sequence[FeatureTable]) -> np.ndarray:
    """Empilha os valores de várias tabelas com o mesmo esquema."""
    schemas = {t.schema for t in tables}
    if len(schemas) > 1:
        raise ValueError("Tabelas com esquemas diferentes")
    return np.vstack([t.values for t in tables])
