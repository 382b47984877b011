import datetime as dt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stlf.errors import (
    CapacityExceededError,
    ConfigError,
    DivergenceError,
    InsufficientSamplesError,
    MaxIterationsError,
    NonBipolarInputError,
)
from stlf.features import Sample
from stlf.neural.elman import ElmanNet, elman_forward, hidden_sequence, init_elman
from stlf.neural.hopfield import (
    HopfieldNet,
    ThermometerCodec,
    energy,
    hopfield_forecast,
    hopfield_recall,
    hopfield_store,
    hopfield_train,
)
from stlf.neural.mlp import DenseNet, init_dense, mlp_forward
from stlf.neural.rbf import RbfNet, center_widths, fit_rbf, rbf_forward, rbf_train
from stlf.neural.train import TrainConfig, fit_arrays, gradient_check, train_backprop, train_elman, train_mlp


def zero_net(n_in=62, h=24, n_out=48, **kw):
    return DenseNet(np.zeros((n_in, h)), np.zeros(h), np.zeros((h, n_out)), np.zeros(n_out), **kw)


def loop_forward(net, x):
    """Scalar re-implementation used as an oracle."""
    hidden = []
    for j in range(net.n_hidden):
        z = net.bias_hidden[j]
        for i in range(net.n_inputs):
            z += net.weights_hidden[i, j] * x[i]
        hidden.append(np.tanh(z))
    out = []
    for k in range(net.n_outputs):
        y = net.bias_out[k]
        for j in range(net.n_hidden):
            y += net.weights_out[j, k] * hidden[j]
        out.append(y)
    return np.array(out)


def sample(x, t):
    return Sample(np.asarray(x, float), np.asarray(t, float), dt.datetime(2024, 1, 1), "weekday")


class TestMlpForward:
    def test_zero_net(self):
        np.testing.assert_array_equal(mlp_forward(zero_net(), np.full(62, 0.3)), 0.0)

    def test_bias_only(self):
        net = zero_net()
        net.bias_out[:] = 0.25
        np.testing.assert_array_equal(mlp_forward(net, np.linspace(0, 1, 62)), 0.25)

    @pytest.mark.parametrize("seed", range(5))
    def test_against_loop_oracle(self, seed):
        net = init_dense(7, 5, 3, seed=seed)
        x = np.random.default_rng(seed).uniform(size=7)
        np.testing.assert_allclose(mlp_forward(net, x), loop_forward(net, x), rtol=0, atol=1e-12)

    def test_rejects_non_finite(self):
        net = zero_net(3, 2, 1)
        w = net.weights_out.copy()
        w[0, 0] = np.nan
        with pytest.raises(ValueError):
            DenseNet(net.weights_hidden, net.bias_hidden, w, net.bias_out)


class TestTraining:
    def test_single_sample_reaches_error_target(self):
        rng = np.random.default_rng(0)
        s = sample(rng.uniform(size=62), rng.uniform(0.2, 0.8, size=48))
        net, trace = train_mlp([s], TrainConfig())
        assert trace.converged
        assert trace.epochs < TrainConfig().max_epochs
        assert trace.final_mse <= 1e-4

    def test_huge_learning_rate_diverges(self):
        rng = np.random.default_rng(1)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(5)]
        with pytest.raises(DivergenceError) as info:
            train_mlp(samples, TrainConfig(learning_rate=1e3))
        assert info.value.epoch >= 1

    @pytest.mark.parametrize("trainer", [train_mlp, train_elman])
    def test_deterministic(self, trainer):
        rng = np.random.default_rng(2)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(6)]
        cfg = TrainConfig(max_epochs=30, seed=5)
        a, ta = trainer(samples, cfg)
        b, tb = trainer(samples, cfg)
        for name, p in a.params().items():
            np.testing.assert_array_equal(p, b.params()[name])
        assert ta.mse == tb.mse

    def test_trace_finite_and_recorded(self):
        rng = np.random.default_rng(3)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(8)]
        _, trace = train_mlp(samples, TrainConfig(max_epochs=50))
        assert trace.epochs == 50 and not trace.converged
        assert np.all(np.isfinite(trace.mse))

    def test_input_net_untouched(self):
        net = init_dense(4, 3, 2, seed=0)
        before = net.weights_hidden.copy()
        fit_arrays(net, np.ones((2, 4)), np.zeros((2, 2)), TrainConfig(max_epochs=5))
        np.testing.assert_array_equal(net.weights_hidden, before)

    def test_empty(self):
        with pytest.raises(InsufficientSamplesError):
            train_backprop(init_dense(), [], TrainConfig())

    @pytest.mark.parametrize(
        "kw", [{"learning_rate": 0}, {"error_target": -1}, {"momentum": 1.0}, {"max_epochs": 0}]
    )
    def test_config_validation(self, kw):
        with pytest.raises(ConfigError):
            TrainConfig(**kw)


class TestGradientCheck:
    @pytest.mark.parametrize("seed", range(3))
    def test_random_small_net(self, seed):
        rng = np.random.default_rng(seed)
        net = init_dense(6, 5, 4, seed=seed)
        assert gradient_check(net, (rng.uniform(size=6), rng.uniform(size=4)), 1e-5) < 1e-5

    @settings(max_examples=100)
    @given(st.integers(0, 10_000))
    def test_property_over_seeds(self, seed):
        rng = np.random.default_rng(seed)
        net = init_dense(4, 3, 2, seed=seed, hidden_activation=["tanh", "logsig"][seed % 2])
        assert gradient_check(net, (rng.uniform(size=4), rng.uniform(size=2)), 1e-5) < 1e-4

    def test_logistic_output(self):
        rng = np.random.default_rng(9)
        net = init_dense(5, 4, 3, seed=9, output_activation="logistic")
        assert gradient_check(net, (rng.uniform(size=5), rng.uniform(size=3))) < 1e-5

    def test_stationary_point(self):
        from stlf.neural.train import analytic_gradient, numeric_gradient

        net = zero_net(4, 3, 2)
        net.bias_out[:] = [0.2, 0.7]
        x, t = np.full(4, 0.5), np.array([0.2, 0.7])
        _, grads = analytic_gradient(net, x, t)
        num = numeric_gradient(net, x, t)
        for name in grads:
            assert np.max(np.abs(grads[name])) < 1e-8
            assert np.max(np.abs(num[name])) < 1e-8

    def test_elman_frozen_context(self):
        rng = np.random.default_rng(4)
        net = init_elman(5, 4, 3, seed=4)
        ctx = rng.uniform(size=4)
        assert gradient_check(net, (rng.uniform(size=5), rng.uniform(size=3)), 1e-5, context=ctx) < 1e-5

    @pytest.mark.parametrize("eps", [1e-8, 1e-2])
    def test_epsilon_range(self, eps):
        with pytest.raises(ConfigError):
            gradient_check(init_dense(2, 2, 1), (np.zeros(2), np.zeros(1)), eps)


class TestElman:
    def test_zero_context_weights_reduce_to_mlp(self):
        net = init_elman(6, 4, 3, seed=1)
        net = net.with_params({"weights_context": np.zeros((4, 4))})
        dense = DenseNet(net.weights_hidden, net.bias_hidden, net.weights_out, net.bias_out, hidden_activation="logsig")
        xs = np.random.default_rng(0).uniform(size=(10, 6))
        Y, _, _ = elman_forward(net, xs)
        assert np.max(np.abs(Y - dense.predict(xs))) < 1e-12

    def test_repeated_input_changes_output(self):
        net = init_elman(6, 4, 3, seed=2)
        x = np.full(6, 0.4)
        Y, _, _ = elman_forward(net, [x, x])
        assert not np.allclose(Y[0], Y[1])

    def test_context_is_hidden_copy(self):
        net = init_elman(6, 4, 3, seed=3)
        xs = np.random.default_rng(1).uniform(size=(5, 6))
        _, contexts, final = elman_forward(net, xs)
        # recompute each step by hand from the previous hidden state
        np.testing.assert_array_equal(contexts[0], 0.0)
        np.testing.assert_array_equal(contexts[1:], hidden_sequence(net, xs)[:-1])
        c = np.zeros(4)
        for k in range(5):
            np.testing.assert_allclose(contexts[k], c, rtol=0, atol=1e-14)
            z = net.bias_hidden + xs[k] @ net.weights_hidden + c @ net.weights_context
            c = 1.0 / (1.0 + np.exp(-z))
            np.testing.assert_allclose(contexts[k + 1] if k < 4 else final, c, rtol=0, atol=1e-14)

    def test_rejects_tanh(self):
        with pytest.raises(ValueError):
            ElmanNet(np.zeros((2, 2)), np.zeros(2), np.zeros((2, 1)), np.zeros(1), hidden_activation="tanh")


class TestRbf:
    def one_center(self, w=0.7):
        return RbfNet(np.zeros((1, 3)), np.ones(1), np.full((1, 2), w), np.zeros(2))

    def test_at_center(self):
        net = self.one_center()
        assert net.basis(np.zeros(3))[0, 0] == 1.0
        np.testing.assert_array_equal(rbf_forward(net, np.zeros(3)), 0.7)

    def test_far_away(self):
        sigma = 0.3
        net = RbfNet(np.zeros((1, 3)), np.full(1, sigma), np.ones((1, 2)), np.zeros(2))
        x = np.array([10 * sigma, 0, 0])
        assert np.all(np.abs(rbf_forward(net, x)) <= 1e-20)

    def test_interpolation(self):
        rng = np.random.default_rng(0)
        X, Y = rng.uniform(size=(30, 62)), rng.uniform(size=(30, 48))
        net = fit_rbf(X, Y, 30)
        np.testing.assert_array_equal(net.centers, X)
        assert np.mean((net.predict(X) - Y) ** 2) <= 1e-10

    def test_single_center_constant_target(self):
        rng = np.random.default_rng(1)
        samples = [sample(rng.uniform(size=62), np.full(48, 0.6)) for _ in range(10)]
        net = rbf_train(samples, 1)
        pred = net.predict(np.stack([s.input for s in samples]))
        assert np.mean((pred - 0.6) ** 2) <= 1e-10

    def test_insufficient_samples(self):
        samples = [sample(np.zeros(62), np.zeros(48))] * 3
        with pytest.raises(InsufficientSamplesError):
            rbf_train(samples, 4)

    def test_widths(self):
        centers = np.array([[0.0], [1.0], [3.0]])
        # nearest two others: (1, 3), (1, 2), (2, 3)
        np.testing.assert_allclose(center_widths(centers), [2.0, 1.5, 2.5])

    def test_coincident_centers_use_ridge(self):
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
        net = fit_rbf(X, np.array([[1.0], [1.0], [2.0]]), 3)
        assert net.ridge_active and np.all(net.widths > 0)

    def test_deterministic(self):
        rng = np.random.default_rng(2)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(40)]
        a = rbf_train(samples, 10, TrainConfig(seed=3))
        b = rbf_train(samples, 10, TrainConfig(seed=3))
        np.testing.assert_array_equal(a.centers, b.centers)
        np.testing.assert_array_equal(a.weights_out, b.weights_out)


def loop_recall(W, s):
    """Independent asynchronous recall oracle."""
    s = list(s)
    sweeps = 0
    while True:
        sweeps += 1
        changed = False
        for i in range(len(s)):
            h = sum(W[i][j] * s[j] for j in range(len(s)))
            new = s[i] if h == 0 else (1.0 if h > 0 else -1.0)
            changed |= new != s[i]
            s[i] = new
        if not changed:
            return np.array(s), sweeps


class TestHopfield:
    def test_single_pattern_weights(self):
        net = hopfield_store([[1, -1, 1, -1]])
        W = net.weights
        assert W[0, 1] == -0.25
        np.testing.assert_array_equal(W, W.T)
        np.testing.assert_array_equal(np.diag(W), 0)

    @given(st.integers(20, 60), st.data())
    def test_symmetric(self, n, data):
        k = data.draw(st.integers(1, n // 10))
        rng = np.random.default_rng(data.draw(st.integers(0, 1000)))
        W = hopfield_store(rng.choice([-1.0, 1.0], size=(k, n))).weights
        assert np.array_equal(W - W.T, np.zeros_like(W))

    def test_single_pattern_always_fits(self):
        assert hopfield_store([[1, -1]]).n == 2

    def test_capacity(self):
        with pytest.raises(CapacityExceededError):
            hopfield_store(np.ones((5, 20)))

    def test_non_bipolar(self):
        with pytest.raises(NonBipolarInputError):
            hopfield_store([[1, 0, 1, -1] * 3])

    def test_stored_pattern_is_fixed_point(self):
        rng = np.random.default_rng(0)
        P = rng.choice([-1.0, 1.0], size=(3, 40))
        net = hopfield_store(P)
        result = hopfield_recall(net, P[1])
        np.testing.assert_array_equal(result.state, P[1])
        assert result.sweeps == 1

    def test_one_flipped_bit(self):
        p = np.random.default_rng(1).choice([-1.0, 1.0], size=16)
        net = hopfield_store([p])
        probe = p.copy()
        probe[5] *= -1
        result = hopfield_recall(net, probe)
        np.testing.assert_array_equal(result.state, p)
        expected, sweeps = loop_recall(net.weights.tolist(), probe)
        np.testing.assert_array_equal(result.state, expected)
        assert result.sweeps == sweeps

    def test_zero_weights(self):
        result = hopfield_recall(HopfieldNet(np.zeros((2, 2))), [1, -1])
        np.testing.assert_array_equal(result.state, [1, -1])

    @given(st.integers(0, 10_000))
    def test_matches_oracle_and_energy_never_rises(self, seed):
        rng = np.random.default_rng(seed)
        net = hopfield_store(rng.choice([-1.0, 1.0], size=(3, 30)))
        probe = rng.choice([-1.0, 1.0], size=30)
        result = hopfield_recall(net, probe, check_energy=True)
        assert np.all(np.diff(result.energies) <= 1e-12)
        expected, sweeps = loop_recall(net.weights.tolist(), probe)
        np.testing.assert_array_equal(result.state, expected)
        assert result.sweeps == sweeps
        assert energy(net, result.state) <= energy(net, probe) + 1e-12

    def test_max_sweeps(self):
        net = HopfieldNet(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert hopfield_recall(net, [1, -1]).sweeps == 2
        with pytest.raises(MaxIterationsError):
            hopfield_recall(net, [1, -1], max_sweeps=1)

    def test_probe_length(self):
        with pytest.raises(ValueError):
            hopfield_recall(HopfieldNet(np.zeros((3, 3))), [1, 1])


class TestThermometer:
    def test_half(self):
        np.testing.assert_array_equal(ThermometerCodec(8).encode([0.5]), [1, 1, 1, 1, -1, -1, -1, -1])

    @given(st.lists(st.floats(0, 1), min_size=1, max_size=20))
    def test_round_trip_within_step(self, values):
        codec = ThermometerCodec(8)
        decoded, invalid = codec.decode(codec.encode(values))
        assert invalid == 0
        assert np.all(np.abs(decoded - values) <= 0.5 / 8 + 1e-12)

    def test_invalid_word(self):
        decoded, invalid = ThermometerCodec(4).decode([1, -1, 1, 1])
        assert invalid == 1 and decoded[0] in (0.0, 1.0, 0.25, 0.5, 0.75)


class TestHopfieldForecaster:
    def test_history_of_stored_day_recalls_its_target(self):
        # thermometer words of unrelated days overlap by about a third, so
        # stored days stay fixed points only while few are stored
        rng = np.random.default_rng(0)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(3)]
        model = hopfield_train(samples)
        codec = ThermometerCodec(8)
        for s in samples:
            expected, _ = codec.decode(codec.encode(s.target))
            np.testing.assert_array_equal(hopfield_forecast(model, s.input), expected)

    def test_keeps_most_recent_within_capacity(self):
        rng = np.random.default_rng(1)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(100)]
        model = hopfield_train(samples)
        codec = ThermometerCodec(8)
        recent = [np.concatenate([codec.encode(s.input), codec.encode(s.target)]) for s in samples[-88:]]
        np.testing.assert_array_equal(model.net.weights, hopfield_store(recent).weights)

    def test_forecast_is_pure(self):
        rng = np.random.default_rng(2)
        samples = [sample(rng.uniform(size=62), rng.uniform(size=48)) for _ in range(5)]
        model = hopfield_train(samples, seed=4)
        x = rng.uniform(size=62)
        np.testing.assert_array_equal(hopfield_forecast(model, x), hopfield_forecast(model, x))
