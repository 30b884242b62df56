import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from export.binary_io import TruncatedFileError
from graph.transition import transition_matrix
from neuralnet.layers.activation import ReLU
from neuralnet.layers.aggregation import MeanOverRows
from neuralnet.layers.dense import Dense, RowConv
from neuralnet.layers.sliding_conv import SlidingConv1d
from neuralnet.losses import (
    NonFiniteLossError, binary_cross_entropy, get_loss, softmax_cross_entropy,
)
from neuralnet.network import (
    ModelSpec, backward, build_convnet_input, build_network, convnet_batch,
)
from neuralnet.optimizers import SGD, Adam
from neuralnet.storage import load_model, save_model
from neuralnet.training import TrainConfig, train
from rproj.config import ProjectionConfig
from rproj.propagation import propagate
from tests.helpers import random_graph

EPS = 1e-6


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)


def check_layer_gradients(layer, x, seed=0):
    """Compara os gradientes analíticos de L = sum(out * w) com diferenças centrais."""
    rng = np.random.default_rng(seed)
    weights = rng.normal(size=layer.forward(x).shape)

    def objective():
        return float(np.sum(layer.forward(x) * weights))

    layer.zero_grads()
    layer.forward(x)
    grad_x = layer.backward(weights)

    numeric_x = np.zeros_like(x)
    for index in np.ndindex(x.shape):
        saved = x[index]
        x[index] = saved + EPS
        up = objective()
        x[index] = saved - EPS
        down = objective()
        x[index] = saved
        numeric_x[index] = (up - down) / (2 * EPS)
    assert relative_error(grad_x, numeric_x) <= 1e-4

    for name, param in layer.params.items():
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + EPS
            up = objective()
            param[index] = saved - EPS
            down = objective()
            param[index] = saved
            numeric[index] = (up - down) / (2 * EPS)
        assert relative_error(layer.grads[name], numeric) <= 1e-4, name


TRIALS = range(20)


class TestLayerGradients:
    @pytest.mark.parametrize("trial", TRIALS)
    def test_dense(self, trial):
        rng = np.random.default_rng(trial)
        n_in, n_out = (int(v) for v in rng.integers(1, 7, size=2))
        layer = Dense(n_in, n_out, rng=rng, dtype='float64')
        check_layer_gradients(layer, rng.normal(size=(int(rng.integers(1, 5)), n_in)), trial)

    @pytest.mark.parametrize("trial", TRIALS)
    def test_row_conv(self, trial):
        rng = np.random.default_rng(100 + trial)
        width, channels, rows = (int(v) for v in rng.integers(1, 6, size=3))
        layer = RowConv(width, channels, rng=rng, dtype='float64')
        check_layer_gradients(layer, rng.normal(size=(2, rows, width)), trial)

    @pytest.mark.parametrize("trial", TRIALS)
    def test_sliding_conv(self, trial):
        rng = np.random.default_rng(200 + trial)
        width = int(rng.integers(3, 8))
        window = int(rng.integers(1, width + 1))
        layer = SlidingConv1d(width, int(rng.integers(1, 4)), window=window, rng=rng,
                              dtype='float64')
        check_layer_gradients(layer, rng.normal(size=(2, int(rng.integers(1, 5)), width)), trial)

    @pytest.mark.parametrize("trial", TRIALS)
    def test_relu(self, trial):
        x = np.random.default_rng(300 + trial).normal(size=(3, 7))
        x[np.abs(x) < 0.01] = 0.5
        check_layer_gradients(ReLU(), x, trial)

    @pytest.mark.parametrize("trial", TRIALS)
    def test_mean_over_rows(self, trial):
        rng = np.random.default_rng(400 + trial)
        shape = (int(rng.integers(1, 4)), int(rng.integers(1, 9)), int(rng.integers(1, 5)))
        check_layer_gradients(MeanOverRows(), rng.normal(size=shape), trial)

    def test_sliding_window_too_large(self):
        with pytest.raises(ValueError, match="Janela"):
            SlidingConv1d(4, 2, window=5)


def network_gradient_check(spec, x, labels, loss, n_outputs):
    network = build_network(spec, x.shape[-1], n_outputs, seed=7, dtype='float64')
    _, grads = backward(network, x, labels, loss)
    for name, param in network.named_parameters():
        numeric = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            saved = param[index]
            param[index] = saved + EPS
            up, _ = get_loss(loss)(network.forward(x), labels)
            param[index] = saved - EPS
            down, _ = get_loss(loss)(network.forward(x), labels)
            param[index] = saved
            numeric[index] = (up - down) / (2 * EPS)
        assert relative_error(grads[name], numeric) <= 1e-4, name


class TestNetworkGradients:
    def test_convnet_node_classification(self):
        x = np.random.default_rng(0).normal(size=(4, 6, 3))
        spec = ModelSpec(kind='convnet', conv_channels=(4, 3), hidden=(5,))
        network_gradient_check(spec, x, np.array([0, 2, 1, 2]), 'cross-entropy', 3)

    def test_convnet_sliding_pairs(self):
        x = np.random.default_rng(1).normal(size=(4, 5, 6))
        spec = ModelSpec(kind='convnet', conv_channels=(3, 2), conv_kernel=3, hidden=(4,))
        network_gradient_check(spec, x, np.array([1, 0, 0, 1]), 'binary-cross-entropy', 1)

    def test_fully_connected(self):
        x = np.random.default_rng(2).normal(size=(6, 7))
        spec = ModelSpec(kind='fc', hidden=(5, 4))
        network_gradient_check(spec, x, np.array([0, 1, 1, 0, 1, 0]), 'cross-entropy', 2)

    @pytest.mark.parametrize("loss, n_outputs, labels", [
        ('cross-entropy', 2, [0, 1, 0, 1]),
        ('binary-cross-entropy', 1, [1, 0, 0, 1]),
    ])
    def test_non_finite_loss_aborts_step(self, loss, n_outputs, labels):
        x = np.random.default_rng(3).normal(size=(4, 5))
        x[1, 2] = np.nan
        network = build_network(ModelSpec(kind='fc', hidden=(3,)), 5, n_outputs, seed=0,
                                dtype='float64')
        before = network.get_state()
        with pytest.raises(NonFiniteLossError, match="não finita") as info:
            backward(network, x, np.array(labels), loss)
        assert info.value.epoch is None and np.isnan(info.value.loss)
        for saved, current in zip(before, network.parameters()):
            assert_array_equal(saved, current)


class TestConvNet:
    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(0)
        network = build_network(ModelSpec(conv_channels=(16, 16), hidden=(8,)), 5, 3, seed=1)
        x = rng.normal(size=(4, 64, 5)).astype(np.float32)
        reference = network.forward(x)
        for _ in range(50):
            permuted = x[:, rng.permutation(64), :]
            assert_array_equal(network.forward(permuted), reference)

    def test_input_shapes(self):
        t = transition_matrix(random_graph(12, 0.3, seed=1))
        ps = propagate(t, ProjectionConfig(dim=8, max_power=3))
        assert build_convnet_input(ps, 2).shape == (8, 4)
        pair = build_convnet_input(ps, 2, 5)
        assert pair.shape == (8, 8)
        assert_array_equal(pair[:, :4], build_convnet_input(ps, 2))
        assert_array_equal(pair[:, 4:], build_convnet_input(ps, 5))
        assert_array_equal(convnet_batch(ps, np.array([[2, 5]]))[0], pair)
        with pytest.raises(IndexError):
            build_convnet_input(ps, 12)

    def test_rejects_wrong_width(self):
        network = build_network(ModelSpec(), 4, 2)
        with pytest.raises(ValueError, match="incompatível"):
            network.forward(np.zeros((1, 8, 5), dtype=np.float32))

    @pytest.mark.parametrize("kwargs", [
        {'kind': 'rnn'}, {'conv_channels': ()}, {'hidden': (0,)}, {'conv_kernel': -1},
    ])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ValueError):
            ModelSpec(**kwargs)


class TestLosses:
    def test_cross_entropy_uniform(self):
        loss, grad = softmax_cross_entropy(np.zeros((2, 4)), np.array([1, 3]))
        assert loss == pytest.approx(np.log(4))
        assert_allclose(grad[0], [0.125, -0.375, 0.125, 0.125])

    def test_masked_class_gets_no_gradient(self):
        logits = np.array([[0.0, -np.inf, 0.0]])
        loss, grad = softmax_cross_entropy(logits, np.array([0]))
        assert loss == pytest.approx(np.log(2))
        assert grad[0, 1] == 0.0

    def test_binary_cross_entropy(self):
        loss, grad = binary_cross_entropy(np.zeros((2, 1)), np.array([0, 1]))
        assert loss == pytest.approx(np.log(2))
        assert_allclose(grad[:, 0], [0.25, -0.25])

    def test_binary_cross_entropy_large_logits(self):
        loss, _ = binary_cross_entropy(np.array([[800.0], [-800.0]]), np.array([1, 0]))
        assert loss == pytest.approx(0.0, abs=1e-12)

    def test_unknown_loss(self):
        with pytest.raises(ValueError):
            get_loss('hinge')


class TestOptimizers:
    def test_sgd(self):
        p = np.array([1.0, 2.0])
        SGD(0.1).step([p], [np.array([1.0, -2.0])])
        assert_allclose(p, [0.9, 2.2])

    def test_adam_first_step_is_sign(self):
        p = np.array([1.0, 1.0])
        Adam(0.01).step([p], [np.array([3.0, -0.5])])
        assert_allclose(p, [0.99, 1.01], atol=1e-8)

    def test_invalid_learning_rate(self):
        with pytest.raises(ValueError):
            SGD(0.0)


def _blobs(seed=0, n=120):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    x = rng.normal(size=(n, 4)) + 2.0 * y[:, None]
    return x, y


class TestTrain:
    def test_deterministic(self):
        x, y = _blobs()
        config = TrainConfig(epochs=5, batch_size=16, learning_rate=0.01, seed=3)
        spec = ModelSpec(kind='fc', hidden=(8,))
        first = train(spec, x[:90], y[:90], config, x[90:], y[90:])
        second = train(spec, x[:90], y[:90], config, x[90:], y[90:])
        assert first.network.digest == second.network.digest
        assert first.history.equals(second.history)

    def test_selects_lowest_validation_loss(self):
        x, y = _blobs(1)
        config = TrainConfig(epochs=8, batch_size=16, learning_rate=0.05, seed=0)
        result = train(ModelSpec(kind='fc', hidden=(8,)), x[:90], y[:90], config, x[90:], y[90:])
        history = result.history
        assert list(history.columns) == ['epoch', 'train_loss', 'val_loss', 'metric']
        assert result.best_epoch == int(history.loc[history['val_loss'].idxmin(), 'epoch'])

    def test_learns_separable_data(self):
        x, y = _blobs(2, n=300)
        config = TrainConfig(epochs=20, batch_size=32, learning_rate=0.01)
        result = train(ModelSpec(kind='fc', hidden=(8,)), x[:200], y[:200], config,
                       x[200:], y[200:])
        assert result.history['metric'].max() >= 0.9

    def test_non_finite_loss(self):
        x, y = _blobs()
        x[5, 0] = np.nan
        with pytest.raises(NonFiniteLossError) as info:
            train(ModelSpec(kind='fc', hidden=(4,)), x, y, TrainConfig(epochs=1, batch_size=len(y)))
        assert info.value.epoch == 1 and info.value.batch == 0

    def test_empty_training_set(self):
        with pytest.raises(ValueError, match="vazio"):
            train(ModelSpec(kind='fc'), np.zeros((0, 3)), np.zeros(0), TrainConfig())

    def test_pair_labels_must_be_binary(self):
        with pytest.raises(ValueError):
            train(ModelSpec(kind='fc'), np.zeros((3, 2)), np.array([0, 1, 2]),
                  TrainConfig(loss='binary-cross-entropy'))

    @pytest.mark.parametrize("kwargs", [
        {'optimizer': 'rmsprop'}, {'learning_rate': 0}, {'batch_size': 0}, {'epochs': 0},
        {'beta1': 1.0}, {'loss': 'hinge'},
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)


class TestModelStorage:
    def test_round_trip_convnet(self, tmp_path):
        network = build_network(ModelSpec(conv_channels=(4,), conv_kernel=2, hidden=(3,)), 4, 3,
                                seed=2, class_mask=np.array([True, False, True]))
        path = tmp_path / "m.mdl"
        save_model(network, path, TrainConfig(seed=9))
        loaded = load_model(path)
        x = np.random.default_rng(0).normal(size=(5, 6, 4)).astype(np.float32)
        assert_array_equal(loaded.forward(x), network.forward(x))
        assert loaded.digest == network.digest
        assert_array_equal(loaded.class_mask, [True, False, True])

    def test_round_trip_fc_with_standardizer(self, tmp_path):
        x, y = _blobs()
        result = train(ModelSpec(kind='fc', hidden=(4,)), x, y,
                       TrainConfig(epochs=2, dtype='float64'))
        path = tmp_path / "m.mdl"
        save_model(result.network, path)
        loaded = load_model(path)
        assert loaded.dtype == np.float64
        assert_array_equal(loaded.standardizer.mean, result.network.standardizer.mean)
        assert_array_equal(loaded.forward(x), result.network.forward(x))

    def test_truncated(self, tmp_path):
        path = tmp_path / "m.mdl"
        save_model(build_network(ModelSpec(kind='fc'), 3, 2), path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(TruncatedFileError):
            load_model(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_model(tmp_path / "nada.mdl")
