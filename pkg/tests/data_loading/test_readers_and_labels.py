import numpy as np
import pytest
from numpy.testing import assert_array_equal

from data_loading.factory import create_reader
from data_loading.idata_reader import EdgeListOptions
from data_loading.labels import NodeLabels, read_labels, sorted_class_names, write_labels
from data_loading.readers.csv_reader import CSVEdgeListReader
from data_loading.readers.edge_list_reader import EdgeListReader
from graph.loader import load_edge_list


class TestFactory:
    @pytest.mark.parametrize("file_type, expected", [
        ("txt", EdgeListReader), ("tsv", EdgeListReader), ("", EdgeListReader),
        ("csv", CSVEdgeListReader),
    ])
    def test_dispatch_by_extension(self, file_type, expected):
        assert isinstance(create_reader(file_type, "x"), expected)

    def test_unknown_type(self):
        with pytest.raises(ValueError, match="não suportado"):
            create_reader("parquet", "x")

    def test_options_are_forwarded(self):
        options = EdgeListOptions(directed=True)
        assert create_reader("txt", "x", options).options is options


class TestLabels:
    def test_sorted_class_names(self):
        assert sorted_class_names(['10', 'b', '2', 'a', '2']) == ('2', '10', 'a', 'b')

    def test_read_resolves_names(self, write_file):
        g = load_edge_list(write_file("g.tsv", "x\ty\ny\tz\n"))
        labels = read_labels(write_file("l.tsv", "z\tazul\nx\tverde\nw\tverde\n"), g)
        assert_array_equal(labels.nodes, [0, 2])
        assert labels.class_names == ('azul', 'verde')
        assert list(labels.names()) == ['verde', 'azul']

    def test_duplicate_label(self, write_file):
        with pytest.raises(ValueError, match="mais de uma vez"):
            read_labels(write_file("l.tsv", "0\ta\n0\tb\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_labels(tmp_path / "nada.tsv")

    def test_remap_unknown_class(self):
        labels = NodeLabels.from_array(['a', 'b', 'c'])
        remapped = labels.remap(('b', 'a'))
        assert_array_equal(remapped.classes, [1, 0, -1])

    def test_write_then_read(self, tmp_path):
        labels = NodeLabels.from_array([1, 0, 1, 1])
        path = tmp_path / "l.tsv"
        write_labels(path, labels)
        reloaded = read_labels(path)
        assert_array_equal(reloaded.nodes, np.arange(4))
        assert_array_equal(reloaded.classes, labels.classes)
