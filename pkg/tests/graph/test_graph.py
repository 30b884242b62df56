import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from data_loading.edge_builder import EdgeListFormatError
from data_loading.idata_reader import EdgeListOptions
from graph.loader import load_edge_list, write_edge_list, write_id_map
from graph.sparse_graph import SparseGraph
from graph.split import split_nodes
from graph.transition import bipartite_square, transition_matrix
from tests.helpers import complete_graph, graph_from_pairs, path_graph, random_graph


class TestLoadEdgeList:
    def test_duplicate_edges_merge(self, write_file):
        path = write_file("g.tsv", "0\t1\n1\t2\n0\t1\n")
        g = load_edge_list(path)
        assert g.node_count == 3
        assert g.edge_count == 2

    def test_duplicate_weights_sum(self, write_file):
        path = write_file("g.tsv", "a b 1.5\nb a 2\na b 1\n")
        g = load_edge_list(path, EdgeListOptions(directed=True, weighted=True))
        assert g.adjacency[0, 1] == 2.5
        assert g.adjacency[1, 0] == 2.0

    def test_empty_file(self, write_file):
        g = load_edge_list(write_file("empty.tsv", ""))
        assert g.node_count == 0
        assert g.edge_count == 0

    def test_negative_weight_reports_line(self, write_file):
        path = write_file("g.tsv", "0 1 -2.0\n")
        with pytest.raises(EdgeListFormatError) as info:
            load_edge_list(path, EdgeListOptions(weighted=True))
        assert info.value.line_number == 1

    def test_malformed_line_reports_line(self, write_file):
        path = write_file("g.tsv", "# comentário\n0 1\n\n0 1 2 3\n")
        with pytest.raises(EdgeListFormatError) as info:
            load_edge_list(path)
        assert info.value.line_number == 4

    def test_string_ids_interned_in_first_seen_order(self, write_file):
        g = load_edge_list(write_file("g.tsv", "zeta\talpha\nalpha\tbeta\n"))
        assert g.node_names == ('zeta', 'alpha', 'beta')

    def test_bipartite_intra_partition_edge(self, write_file):
        path = write_file("g.tsv", "u1 b1\nb1 b2\n")
        with pytest.raises(EdgeListFormatError) as info:
            load_edge_list(path, EdgeListOptions(bipartite=True))
        assert info.value.line_number == 2

    def test_csv_reader(self, write_file):
        path = write_file("g.csv", "src,dst,weight\n0,1,2.5\n1,2,1\n")
        g = load_edge_list(path, EdgeListOptions(weighted=True))
        assert g.node_count == 3
        assert g.adjacency[1, 0] == 2.5

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nao_existe.tsv"
        with pytest.raises(FileNotFoundError, match="nao_existe.tsv"):
            load_edge_list(missing)

    def test_write_then_load_keeps_structure(self, tmp_path):
        g = random_graph(30, 0.2, seed=3)
        path = tmp_path / "g.tsv"
        write_edge_list(path, g)
        reloaded = load_edge_list(path)
        names = [int(v) for v in reloaded.node_names]
        order = np.argsort(names)
        dense = reloaded.adjacency.toarray()[np.ix_(order, order)]
        connected = np.flatnonzero(g.degrees() > 0)
        assert_array_equal(dense, g.adjacency.toarray()[np.ix_(connected, connected)])

    def test_id_map(self, tmp_path):
        path = tmp_path / "ids.tsv"
        write_id_map(path, ['x', 'y'])
        assert path.read_text(encoding='utf-8') == "0\tx\n1\ty\n"


class TestSparseGraph:
    def test_undirected_symmetric(self):
        g = random_graph(20, 0.3, seed=1)
        assert (abs(g.adjacency - g.adjacency.T)).nnz == 0

    def test_symmetrize_idempotent(self):
        g = random_graph(20, 0.3, seed=2)
        assert g.symmetrized() is g
        directed = graph_from_pairs(3, [(0, 1), (1, 2)], directed=True)
        once = directed.symmetrized()
        assert_array_equal(once.symmetrized().adjacency.toarray(), once.adjacency.toarray())

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SparseGraph.from_edges(2, [0], [5])

    def test_rejects_bad_partition(self):
        with pytest.raises(ValueError):
            SparseGraph.from_edges(2, [0], [1], partition=[0, 0])

    def test_digest_depends_on_structure(self):
        assert path_graph(3).digest == path_graph(3).digest
        assert path_graph(3).digest != complete_graph(3).digest


class TestTransitionMatrix:
    def test_triangle(self):
        t = transition_matrix(complete_graph(3))
        for node in range(3):
            row = t.row(node)
            assert len(row) == 2
            assert all(p == pytest.approx(0.5) for p in row.values())

    def test_path(self):
        t = transition_matrix(path_graph(3))
        assert t.row(1) == pytest.approx({0: 0.5, 2: 0.5})
        assert t.row(0) == pytest.approx({1: 1.0})

    def test_isolated_node_self_loop(self):
        g = graph_from_pairs(6, [(0, 1), (1, 2)])
        t = transition_matrix(g)
        assert t.row(5) == {5: 1.0}

    @pytest.mark.parametrize("seed", range(5))
    def test_rows_stochastic(self, seed):
        t = transition_matrix(random_graph(40, 0.1, seed))
        dense = t.to_dense()
        assert np.all((dense >= 0) & (dense <= 1))
        assert_allclose(dense.sum(axis=1), 1.0, atol=1e-9)

    def test_apply_matches_dense_product(self):
        t = transition_matrix(random_graph(25, 0.15, seed=7))
        x = np.random.default_rng(0).normal(size=(25, 4))
        assert_allclose(t.apply(x), t.to_dense() @ x, atol=1e-12)


def _bipartite(pairs):
    # (business, user): businesses are sources (side 0), users destinations (side 1)
    names = sorted({b for b, _ in pairs}) + sorted({u for _, u in pairs})
    index = {name: i for i, name in enumerate(names)}
    partition = [0 if name.startswith('b') else 1 for name in names]
    return SparseGraph.from_edges(len(names), [index[b] for b, _ in pairs],
                                  [index[u] for _, u in pairs], partition=partition,
                                  node_names=names)


class TestBipartiteSquare:
    def test_star(self):
        t = bipartite_square(_bipartite([('ba', 'u1'), ('bb', 'u1')]), side=0)
        assert t.row(0) == pytest.approx({0: 0.5, 1: 0.5})
        assert t.row(1) == pytest.approx({0: 0.5, 1: 0.5})

    def test_disconnected_pairs_identity(self):
        t = bipartite_square(_bipartite([('ba', 'u1'), ('bb', 'u2')]), side=0)
        assert_allclose(t.to_dense(), np.eye(2))

    def test_matches_dense_product(self):
        g = _bipartite([('ba', 'u1'), ('bb', 'u1'), ('bb', 'u2'), ('bc', 'u2'), ('ba', 'u2')])
        t = bipartite_square(g, side=0)
        a = g.adjacency.toarray()
        side, other = np.flatnonzero(g.partition == 0), np.flatnonzero(g.partition == 1)
        forward = a[np.ix_(side, other)]
        back = a[np.ix_(other, side)]
        expected = (forward / forward.sum(1, keepdims=True)) @ (back / back.sum(1, keepdims=True))
        assert_allclose(t.to_dense(), expected, atol=1e-12)
        assert_array_equal(t.node_ids, side)

    def test_apply_without_product(self):
        g = _bipartite([('ba', 'u1'), ('bb', 'u1'), ('bc', 'u2'), ('bb', 'u2')])
        t = bipartite_square(g, side=1)
        x = np.arange(4.0).reshape(2, 2)
        assert_allclose(t.apply(x), t.to_dense() @ x, atol=1e-12)

    def test_requires_partition(self):
        with pytest.raises(ValueError):
            bipartite_square(path_graph(3), side=0)


class TestSplitNodes:
    def test_partition_law_and_determinism(self):
        g = random_graph(100, 0.05, seed=4)
        a, b, split = split_nodes(g, 0.5, seed=9)
        assert a.node_count + b.node_count == 100
        assert not set(split.graph_a_nodes) & set(split.graph_b_nodes)
        a2, _, split2 = split_nodes(g, 0.5, seed=9)
        assert_array_equal(split.graph_a_nodes, split2.graph_a_nodes)
        assert_array_equal(a.adjacency.toarray(), a2.adjacency.toarray())

    def test_edge_counts(self):
        g = random_graph(60, 0.1, seed=5)
        a, b, split = split_nodes(g, 0.4, seed=1)
        coo = g.adjacency.tocoo()
        upper = coo.row < coo.col
        cross = int(np.count_nonzero(split.part[coo.row[upper]] != split.part[coo.col[upper]]))
        assert a.edge_count + b.edge_count + cross == g.edge_count

    def test_complete_graph_halves(self):
        a, b, split = split_nodes(complete_graph(4), 0.5, seed=0)
        assert a.edge_count == 1 and b.edge_count == 1

    @pytest.mark.parametrize("fraction", [0.0, 1.0, -0.2, 1.5])
    def test_invalid_fraction(self, fraction):
        with pytest.raises(ValueError):
            split_nodes(path_graph(4), fraction, seed=0)
