import networkx as nx
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from features.extractors import (
    ExtractorOptions, GraphBundle, available_methods, create_extractor,
)
from features.igf import IGF_SCHEMA, igf_features, igf_table
from features.ri_gram import ExternalEmbeddings, read_embeddings, ri_gram_features
from features.rp_dotprod import node_schema
from graph.transition import transition_matrix
from rproj.config import ProjectionConfig
from rproj.propagation import propagate
from tests.helpers import complete_graph, cycle_graph, graph_from_pairs, random_graph, to_networkx


def dense_pagerank(g, damping=0.85):
    """PageRank exato por sistema linear (nós isolados só teletransportam)."""
    a = (g.adjacency.toarray() > 0).astype(float)
    np.fill_diagonal(a, 0.0)
    n = len(a)
    degree = a.sum(axis=1)
    walk = np.where(degree[:, None] > 0, a / np.maximum(degree, 1)[:, None], 1.0 / n)
    return np.linalg.solve(np.eye(n) - damping * walk.T, np.full(n, (1 - damping) / n))


class TestIGF:
    def test_complete_graph(self):
        for node in range(4):
            assert_allclose(igf_features(complete_graph(4), node), [3, 0.25, 3, 3, 4, 6, 0])

    def test_cycle(self):
        assert_allclose(igf_features(cycle_graph(5), 2), [2, 0.2, 0, 2, 2, 2, 2])

    def test_isolated_node(self):
        g = graph_from_pairs(4, [(0, 1), (1, 2), (0, 2)])
        values = igf_features(g, 3)
        assert values[IGF_SCHEMA.index('degree')] == 0
        assert values[IGF_SCHEMA.index('max_clique')] == 1
        assert values[IGF_SCHEMA.index('egonet_edges')] == 0

    def test_directed_rejected(self):
        g = graph_from_pairs(3, [(0, 1), (1, 2)], directed=True)
        with pytest.raises(ValueError, match="não direcionado"):
            igf_table(g)

    def test_greedy_clique_is_flagged(self):
        table = igf_table(complete_graph(6), clique_cap=3)
        assert table.flags is not None and table.flags.all()
        assert_array_equal(table.column('max_clique'), 6)
        assert igf_table(complete_graph(6)).flags is None

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 31))
        g = random_graph(n, float(rng.uniform(0.05, 0.6)), seed)
        nxg = to_networkx(g)
        table = igf_table(g)

        assert_array_equal(table.column('degree'), [nxg.degree(v) for v in range(n)])
        assert_allclose(table.column('pagerank'), dense_pagerank(g), atol=1e-9)
        assert_array_equal(table.column('triangles'), [nx.triangles(nxg, v) for v in range(n)])
        cores = nx.core_number(nxg)
        assert_array_equal(table.column('core_number'), [cores[v] for v in range(n)])

        cliques = list(nx.find_cliques(nxg))
        expected_clique = [max(len(c) for c in cliques if v in c) for v in range(n)]
        assert_array_equal(table.column('max_clique'), expected_clique)

        for v in range(n):
            ego = set(nxg[v]) | {v}
            internal = sum(1 for a, b in nxg.edges if a in ego and b in ego)
            boundary = sum(1 for a, b in nxg.edges if (a in ego) != (b in ego))
            assert table.row(v)[IGF_SCHEMA.index('egonet_edges')] == internal
            assert table.row(v)[IGF_SCHEMA.index('egonet_boundary')] == boundary


class TestRIGram:
    def test_node_with_equal_unit_vectors(self):
        e = np.array([0.6, 0.8])
        emb = ExternalEmbeddings(inputs={'a': e}, outputs={'a': e})
        assert_allclose(ri_gram_features(emb, 'a'), [1, 1, 1])

    def test_orthonormal_pair(self):
        basis = np.eye(4)
        emb = ExternalEmbeddings(inputs={'a': basis[0], 'b': basis[2]},
                                 outputs={'a': basis[1], 'b': basis[3]})
        values = ri_gram_features(emb, 'a', 'b')
        assert_allclose(values, [1, 0, 0, 0, 1, 0, 0, 1, 0, 1])

    def test_pair_without_outputs(self):
        emb = ExternalEmbeddings(inputs={'a': np.array([1.0, 2.0]), 'b': np.array([3.0, 0.0])})
        assert_allclose(ri_gram_features(emb, 'a', 'b'), [5, 3, 9])

    def test_rotation_invariance(self):
        rng = np.random.default_rng(3)
        q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
        inputs = {n: rng.normal(size=6) for n in 'abc'}
        outputs = {n: rng.normal(size=6) for n in 'abc'}
        emb = ExternalEmbeddings(inputs=inputs, outputs=outputs)
        rotated = ExternalEmbeddings(inputs={n: q @ v for n, v in inputs.items()},
                                     outputs={n: q @ v for n, v in outputs.items()})
        assert_allclose(ri_gram_features(emb, 'a', 'c'), ri_gram_features(rotated, 'a', 'c'),
                        atol=1e-12)

    def test_missing_vector(self):
        emb = ExternalEmbeddings(inputs={'a': np.ones(2)})
        with pytest.raises(KeyError):
            ri_gram_features(emb, 'z')

    def test_mixed_dimensions(self):
        with pytest.raises(ValueError, match="dimensões"):
            ExternalEmbeddings(inputs={'a': np.ones(2), 'b': np.ones(3)})

    def test_read_embeddings(self, write_file):
        path = write_file("emb.tsv", "# vetores\na\tIN\t1 0\na\tOUT\t0 1\nb\tIN\t2 2\n")
        emb = read_embeddings(path)
        assert emb.dim == 2
        assert emb.has_output('a') and not emb.has_output('b')

    @pytest.mark.parametrize("content, line", [
        ("a\tIN\t1 0\nb\tMID\t1 1\n", 2),
        ("a\tIN\t1 x\n", 1),
        ("a\tIN\t1 0\n\na\tIN\t1 1\n", 3),
    ])
    def test_read_embeddings_errors_name_line(self, write_file, content, line):
        path = write_file("emb.tsv", content)
        with pytest.raises(ValueError, match=f"emb.tsv:{line}:"):
            read_embeddings(path)

    def test_read_embeddings_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_embeddings(tmp_path / "nada.tsv")


def _bundle(g, dim=16, max_power=2, embeddings=None):
    t = transition_matrix(g)
    ps = propagate(t, ProjectionConfig(dim=dim, max_power=max_power, seed=1))
    return GraphBundle(graph=g, transition=t, projections=ps, embeddings=embeddings)


class TestExtractors:
    def test_registry(self):
        assert available_methods() == ('ensemble', 'igf', 'oracle', 'ri-gram', 'rp-dotprod')
        with pytest.raises(ValueError, match="desconhecido"):
            create_extractor('node2vec')

    def test_projections_required(self):
        g = complete_graph(4)
        bundle = GraphBundle(graph=g, transition=transition_matrix(g))
        with pytest.raises(ValueError, match="projeções"):
            create_extractor('rp-dotprod').node_table(bundle)

    def test_oracle_uses_projection_powers(self):
        table = create_extractor('oracle').node_table(_bundle(cycle_graph(6), max_power=3))
        assert table.schema == node_schema(3)

    def test_ensemble_concatenates(self):
        bundle = _bundle(random_graph(20, 0.2, seed=1))
        table = create_extractor('ensemble').node_table(bundle)
        assert table.schema == node_schema(2) + IGF_SCHEMA
        rp = create_extractor('rp-dotprod').node_table(bundle)
        assert_array_equal(table.values[:, :len(rp.schema)], rp.values)
        assert table.provenance['method'] == 'rp-dotprod+igf'

    def test_igf_pairs(self):
        bundle = _bundle(complete_graph(4))
        table = create_extractor('igf').pair_table(bundle, [(0, 1), (2, 2)])
        assert table.schema[:2] == ('i.degree', 'i.pagerank')
        assert table.schema[7] == 'j.degree'
        assert table.values.shape == (2, 14)
        assert_allclose(table.values[0, :7], table.values[0, 7:])

    def test_ri_gram_uses_original_ids(self):
        g = graph_from_pairs(3, [(0, 1), (1, 2)])
        emb = ExternalEmbeddings(inputs={'0': np.array([1.0, 0.0]), '1': np.array([0.0, 2.0]),
                                         '2': np.array([1.0, 1.0])})
        bundle = _bundle(g, embeddings=emb)
        table = create_extractor('ri-gram', ExtractorOptions()).pair_table(bundle, [(1, 2)])
        assert_allclose(table.row(1, 2), [4, 2, 2])
