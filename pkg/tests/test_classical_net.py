import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridbound.classical_net import (
    Activation,
    BoundedLayer,
    NetworkStack,
    backprop,
    forward,
    forward_trace,
    output_diff_factor,
    project_frobenius,
    random_network,
)
from hybridbound.errors import ParameterError, ShapeError

activations = st.sampled_from(list(Activation))


def net_from(ws, act="identity", alpha=10.0):
    return NetworkStack(tuple(BoundedLayer(np.array(w, float), alpha) for w in ws), act)


def test_identity_single_layer():
    net = net_from([np.eye(3)])
    x = np.array([0.5, -1.0, 2.0])
    assert np.allclose(forward(net, x), x)


def test_relu_kills_negatives():
    net = net_from([np.eye(2), np.eye(2)], "relu")
    assert np.allclose(forward(net, np.array([-1.0, 2.0])), [0.0, 2.0])


def test_no_activation_after_last_layer():
    net = net_from([np.eye(2)], "relu")
    assert np.allclose(forward(net, np.array([-1.0, 2.0])), [-1.0, 2.0])


def test_shape_errors():
    net = net_from([np.eye(2)])
    with pytest.raises(ShapeError):
        forward(net, np.ones(3))
    with pytest.raises(ShapeError):
        net_from([np.ones((2, 3)), np.ones((1, 3))])
    with pytest.raises(ShapeError):
        NetworkStack(())


def test_layer_validation():
    with pytest.raises(ParameterError):
        BoundedLayer(np.array([[np.nan]]), 1.0)
    with pytest.raises(ParameterError):
        BoundedLayer(np.eye(2), 0.0)
    with pytest.raises(ParameterError):
        Activation.parse("sigmoid")


def test_projection_examples():
    w = np.array([[0.3, 0.4]])  # norm 0.5
    assert project_frobenius(BoundedLayer(w, 1.0)).weights is not None
    assert np.array_equal(project_frobenius(BoundedLayer(w, 1.0)).weights, w)
    w2 = np.array([[1.2, 1.6]])  # norm 2
    assert np.allclose(project_frobenius(BoundedLayer(w2, 1.0)).weights, w2 / 2)
    rng = np.random.default_rng(0)
    w3 = rng.standard_normal((3, 4)) * 5
    p = project_frobenius(BoundedLayer(w3, 0.7))
    assert abs(np.linalg.norm(p.weights) - 0.7) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.floats(0.1, 3.0), st.floats(0.01, 10), st.integers(0, 2**31))
def test_projection_idempotent_and_in_ball(m, n, alpha, scale, seed):
    w = np.random.default_rng(seed).standard_normal((m, n)) * scale
    p = project_frobenius(BoundedLayer(w, alpha))
    assert p.in_ball()
    assert np.array_equal(project_frobenius(p).weights, p.weights)


def test_output_diff_factor():
    assert output_diff_factor(1, 3.0, 1.0) == 1.0
    assert output_diff_factor(2, 1.0, 2.0) == 4.0
    with pytest.raises(ParameterError):
        output_diff_factor(0, 1.0, 1.0)


@pytest.mark.parametrize("act", list(Activation))
def test_activation_lipschitz(act):
    a = np.linspace(-5, 5, 2001)
    slopes = np.abs(np.diff(act(a))) / np.diff(a)
    assert act.lipschitz == 1.0
    assert slopes.max() <= act.lipschitz + 1e-12


def test_random_network_respects_ball():
    rng = np.random.default_rng(1)
    net = random_network([3, 4, 2], 0.8, rng)
    assert all(l.in_ball() for l in net.layers)
    sph = random_network([3, 4, 2], 0.8, rng, on_sphere=True)
    assert all(abs(l.frobenius - 0.8) < 1e-12 for l in sph.layers)
    assert net.dims == [3, 4, 2] and net.k == 2


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.floats(0.2, 2.0),
       activations, st.floats(0.1, 5.0), st.integers(0, 2**31))
def test_growth_inequality(dims, alpha, act, R, seed):
    rng = np.random.default_rng(seed)
    net = random_network(dims, alpha, rng, act)
    x = rng.standard_normal(dims[0])
    x *= R / np.linalg.norm(x)
    _, a = forward_trace(net, x)
    for i, ai in enumerate(a):
        assert np.linalg.norm(ai) <= (act.lipschitz * alpha) ** i * R + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.floats(0.2, 2.0),
       activations, st.integers(0, 2**31))
def test_contraction(dims, alpha, act, seed):
    rng = np.random.default_rng(seed)
    net = random_network(dims, alpha, rng, act)
    z, z2 = rng.standard_normal((2, dims[0]))
    lhs = np.linalg.norm(forward(net, z) - forward(net, z2))
    assert lhs <= output_diff_factor(net.k, net.lipschitz, alpha) * np.linalg.norm(z - z2) + 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.floats(0.2, 2.0),
       activations, st.floats(0.1, 5.0), st.integers(0, 2**31))
def test_layer_telescope(dims, alpha, act, R, seed):
    rng = np.random.default_rng(seed)
    f = random_network(dims, alpha, rng, act)
    h = random_network(dims, alpha, rng, act)
    X = rng.standard_normal((5, dims[0]))
    X *= R / np.linalg.norm(X, axis=1, keepdims=True)
    lhs = np.max(np.linalg.norm(forward(f, X) - forward(h, X), axis=1))
    rhs = R * alpha ** (f.k - 1) * sum(np.linalg.norm(a - b) for a, b in zip(f.weights, h.weights))
    assert lhs <= rhs + 1e-9


def test_backprop_matches_finite_differences():
    rng = np.random.default_rng(2)
    for act in Activation:
        net = random_network([3, 4, 2], 1.5, rng, act)
        X = rng.standard_normal((6, 3))
        G = rng.standard_normal((6, 2))
        grads = backprop(net, X, G)
        h = 1e-6
        for li, w in enumerate(net.weights):
            num = np.zeros_like(w)
            for idx in np.ndindex(w.shape):
                ws_p = [x.copy() for x in net.weights]
                ws_m = [x.copy() for x in net.weights]
                ws_p[li][idx] += h
                ws_m[li][idx] -= h
                num[idx] = (np.sum(G * forward(net.with_weights(ws_p), X))
                            - np.sum(G * forward(net.with_weights(ws_m), X))) / (2 * h)
            assert np.allclose(grads[li], num, atol=1e-6)


def test_weights_are_read_only():
    net = net_from([np.eye(2)])
    with pytest.raises(ValueError):
        net.weights[0][0, 0] = 3.0
