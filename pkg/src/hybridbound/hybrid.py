"""Hybrid hypotheses ``h(x) = F(z(x))``: circuit readout fed into a bounded network."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .classical_net import NetworkStack, backprop, forward, random_network
from .errors import DivergenceError, ParameterError, ShapeError

FD_STEP = 1e-4


@dataclass(frozen=True)
class HybridModel:
    circuit: qcore.CircuitSpec
    net: NetworkStack

    def __post_init__(self):
        if self.net.in_dim != self.circuit.n:
            raise ShapeError(
                f"network input dim {self.net.in_dim} != measurement count {self.circuit.n}")

    @property
    def theta(self):
        return self.circuit.theta

    @property
    def out_dim(self):
        return self.net.out_dim

    def with_params(self, theta=None, weights=None):
        circuit = self.circuit if theta is None else self.circuit.with_theta(theta)
        net = self.net if weights is None else self.net.with_weights(weights)
        return HybridModel(circuit, net)

    def __call__(self, X):
        return predict_batch(self, X)


def random_model(qubits, T, dims, alpha, rng, *, activation="tanh", layout=None,
                 slots=None, measured=None, on_sphere=False):
    """Draw a model with uniform gate angles and Gaussian weights inside the ball."""
    circuit = qcore.random_circuit(qubits, T, rng, layout=layout, slots=slots, measured=measured)
    net = random_network(dims, alpha, rng, activation, on_sphere=on_sphere)
    return HybridModel(circuit, net)


def predict(model, x):
    """Single prediction through the density-matrix path."""
    c = model.circuit
    state = qcore.run_circuit(c, qcore.encode(x, c.qubits))
    return forward(model.net, qcore.measure_vector(c, state))


def predict_batch(model, X):
    """Predictions for every row of ``X`` using pure-state simulation.

    Encoded inputs are product states and the gates are unitary, so this
    agrees with :func:`predict` while avoiding ``2^q x 2^q`` densities.
    """
    return forward(model.net, qcore.quantum_features(model.circuit, X))


@dataclass(frozen=True)
class LossSpec:
    """Clipped mean squared error ``min(clip, mean((p - y)^2))``."""

    clip: float = 4.0
    lipschitz: float = None
    out_dim: int = 1

    def __post_init__(self):
        if not self.clip > 0:
            raise ParameterError(f"clip must be positive, got {self.clip}")
        if self.lipschitz is None:
            # |d/dp_i| = 2|p_i - y_i|/d and |p_i - y_i| <= sqrt(d * clip) where unclipped
            object.__setattr__(self, "lipschitz", 2.0 * np.sqrt(self.clip / self.out_dim))
        elif not self.lipschitz > 0:
            raise ParameterError("lipschitz must be positive")


def _per_sample_loss(spec, pred, label):
    pred = np.atleast_2d(pred)
    label = np.atleast_2d(label)
    if pred.shape != label.shape:
        raise ShapeError(f"prediction {pred.shape} and label {label.shape} differ")
    return np.minimum(spec.clip, np.mean((pred - label) ** 2, axis=1))


def loss(spec, pred, label):
    pred = np.asarray(pred, dtype=float)
    label = np.asarray(label, dtype=float)
    if pred.shape != label.shape:
        raise ShapeError(f"prediction {pred.shape} and label {label.shape} differ")
    return float(_per_sample_loss(spec, pred.ravel(), label.ravel())[0])


@dataclass(frozen=True)
class SampleSet:
    inputs: np.ndarray
    labels: np.ndarray
    radius: float = None

    def __post_init__(self):
        x = np.atleast_2d(np.array(self.inputs, dtype=float))
        y = np.array(self.labels, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        if x.shape[0] != y.shape[0]:
            raise ShapeError(f"{x.shape[0]} inputs but {y.shape[0]} labels")
        if x.shape[0] < 1:
            raise ParameterError("a sample set needs at least one point")
        if self.radius is not None and np.max(np.linalg.norm(x, axis=1)) > self.radius * (1 + 1e-12):
            raise ParameterError(f"inputs exceed radius {self.radius}")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "labels", y)

    @property
    def N(self):
        return self.inputs.shape[0]

    def __len__(self):
        return self.N


def empirical_risk(model, loss_spec, data):
    if len(data) == 0:
        raise ParameterError("empty sample set")
    return float(np.mean(_per_sample_loss(loss_spec, predict_batch(model, data.inputs), data.labels)))


def sample_ball(n_points, dim, radius, rng):
    """Uniform draws from the Euclidean ball of the given radius."""
    g = rng.standard_normal((n_points, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * radius * rng.uniform(size=(n_points, 1)) ** (1.0 / dim)


def teacher_samples(teacher, n_points, radius, noise, rng, in_dim=None):
    """Inputs uniform in a ball, labels ``teacher(x) + noise * N(0, 1)``."""
    in_dim = teacher.circuit.qubits if in_dim is None else in_dim
    X = sample_ball(n_points, in_dim, radius, rng)
    Y = predict_batch(teacher, X)
    Y = Y + noise * rng.standard_normal(Y.shape)
    return SampleSet(X, Y, radius)


def _risk_and_output_grad(loss_spec, pred, Y):
    diff = pred - Y
    mse = np.mean(diff ** 2, axis=1)
    active = mse <= loss_spec.clip
    risk = np.mean(np.minimum(loss_spec.clip, mse))
    grad = np.where(active[:, None], 2.0 * diff / (diff.shape[1] * diff.shape[0]), 0.0)
    return risk, grad


def _theta_gradient(circuit, net, loss_spec, psi0, Y):
    """Central finite differences of the training risk in every gate parameter.

    All 30 perturbations of one slot run through the circuit together, starting
    from the cached state just before the slot's first use.
    """
    q = circuit.qubits
    base = circuit.gate_unitaries()
    prefix = [psi0]
    for u, t in zip(base, circuit.layout):
        prefix.append(qcore.apply_gate_vectors(prefix[-1], u, t, q))

    theta = circuit.theta
    grad = np.zeros_like(theta)
    shifts = np.concatenate([np.eye(15), -np.eye(15)]) * FD_STEP
    for s in range(circuit.T):
        us = qcore.build_unitaries(theta[s] + shifts)
        first = circuit.slots.index(s)
        psi = np.broadcast_to(prefix[first], (len(shifts),) + psi0.shape)
        for g in range(first, len(base)):
            t = circuit.layout[g]
            if circuit.slots[g] == s:
                psi = qcore.apply_gate_stacked(psi, us, t, q)
            else:
                flat = qcore.apply_gate_vectors(psi.reshape(-1, psi.shape[-1]), base[g], t, q)
                psi = flat.reshape(psi.shape)
        feats = qcore.measure_vectors(circuit, psi.reshape(-1, psi.shape[-1]))
        pred = forward(net, feats).reshape(len(shifts), psi0.shape[0], -1)
        risks = np.mean(np.minimum(loss_spec.clip, np.mean((pred - Y) ** 2, axis=2)), axis=1)
        grad[s] = (risks[:15] - risks[15:]) / (2 * FD_STEP)
    return grad


def train(model, loss_spec, data, steps, lr, seed=0):
    """Full-batch gradient descent with Frobenius projection after every step.

    Gate parameters get central finite differences (step ``FD_STEP``), weights
    exact backpropagation. The update consumes no randomness, so ``seed`` does
    not affect the result; it is accepted so callers can record it.
    """
    if steps < 0 or int(steps) != steps:
        raise ParameterError(f"steps must be a non-negative integer, got {steps}")
    if not lr > 0:
        raise ParameterError(f"lr must be positive, got {lr}")
    X, Y = data.inputs, data.labels
    circuit, net = model.circuit, model.net
    psi0 = qcore.encode_vectors(X, circuit.qubits)

    for step in range(int(steps)):
        Zx = qcore.measure_vectors(circuit, qcore.run_vectors(circuit, psi0))
        risk, g_out = _risk_and_output_grad(loss_spec, forward(net, Zx), Y)
        if not np.isfinite(risk):
            raise DivergenceError(step, risk)
        w_grads = backprop(net, Zx, g_out)
        g_theta = _theta_gradient(circuit, net, loss_spec, psi0, Y)
        circuit = circuit.with_theta(circuit.theta - lr * g_theta)
        net = net.with_weights([w - lr * g for w, g in zip(net.weights, w_grads)]).projected()

    final = HybridModel(circuit, net)
    if steps:
        r = empirical_risk(final, loss_spec, data)
        if not np.isfinite(r):
            raise DivergenceError(int(steps), r)
    return final
