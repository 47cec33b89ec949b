"""Bounded feed-forward networks ``f(x) = F_k s(F_{k-1} s(... s(F_1 x)))``.

Layers carry no bias and every weight matrix lives in a Frobenius ball of
radius ``alpha``. The activation is applied between layers, never after the
last one.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError


class Activation(enum.Enum):
    RELU = "relu"
    TANH = "tanh"
    IDENTITY = "identity"

    @property
    def lipschitz(self):
        return 1.0

    def __call__(self, a):
        if self is Activation.RELU:
            return np.maximum(a, 0.0)
        if self is Activation.TANH:
            return np.tanh(a)
        return a

    def derivative(self, a):
        if self is Activation.RELU:
            return (a > 0).astype(float)
        if self is Activation.TANH:
            return 1.0 - np.tanh(a) ** 2
        return np.ones_like(a)

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ParameterError(f"unknown activation {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class BoundedLayer:
    """Weight matrix of shape (out_dim, in_dim) with Frobenius bound ``alpha``."""

    weights: np.ndarray
    alpha: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.size == 0:
            raise ShapeError(f"weights must be a non-empty matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights have non-finite entries")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def shape(self):
        return self.weights.shape

    @property
    def frobenius(self):
        return float(np.linalg.norm(self.weights))

    def in_ball(self, tol=1e-12):
        return self.frobenius <= self.alpha * (1 + tol)


def project_frobenius(layer):
    """Radially shrink ``layer`` onto its Frobenius ball if it lies outside."""
    norm = layer.frobenius
    if layer.in_ball():  # rescaled layers may sit an ulp above alpha; leave them be
        return layer
    return BoundedLayer(layer.weights * (layer.alpha / norm), layer.alpha)


@dataclass(frozen=True)
class NetworkStack:
    layers: tuple
    activation: Activation = Activation.TANH

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ShapeError("a network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.shape[0] != nxt.shape[1]:
                raise ShapeError(f"layer shapes {prev.shape} -> {nxt.shape} do not compose")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "activation", Activation.parse(self.activation))

    @property
    def k(self):
        return len(self.layers)

    @property
    def in_dim(self):
        return self.layers[0].shape[1]

    @property
    def out_dim(self):
        return self.layers[-1].shape[0]

    @property
    def dims(self):
        return [self.in_dim] + [l.shape[0] for l in self.layers]

    @property
    def alpha(self):
        return max(l.alpha for l in self.layers)

    @property
    def lipschitz(self):
        return self.activation.lipschitz

    @property
    def weights(self):
        return [l.weights for l in self.layers]

    def with_weights(self, weights):
        layers = [BoundedLayer(w, l.alpha) for w, l in zip(weights, self.layers)]
        return NetworkStack(tuple(layers), self.activation)

    def projected(self):
        return NetworkStack(tuple(project_frobenius(l) for l in self.layers), self.activation)


def random_network(dims, alpha, rng, activation=Activation.TANH, on_sphere=False):
    """Gaussian weights projected into (or, with ``on_sphere``, onto) the ball."""
    layers = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        w = rng.standard_normal((d_out, d_in))
        if on_sphere:
            w *= alpha / np.linalg.norm(w)
        else:
            # random radius in [0, alpha] so interior points are covered too
            w *= alpha * rng.uniform() / np.linalg.norm(w)
        layers.append(BoundedLayer(w, alpha))
    return NetworkStack(tuple(layers), activation)


def forward_trace(net, x):
    """Pre-activations ``f_i`` and post-activations ``a_i`` of the recursion.

    Returns ``(f, a)`` with ``f[0] = a[0] = x`` (the input is not passed through
    the activation) and ``f[i] = F_i a[i-1]``; ``a[i] = s(f[i])`` for i < k.
    Rows of ``x`` are independent inputs.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != net.in_dim:
        raise ShapeError(f"input has dim {x.shape[-1]}, network expects {net.in_dim}")
    f, a = [x], [x]
    for i, layer in enumerate(net.layers):
        f.append(a[-1] @ layer.weights.T)
        if i < net.k - 1:
            a.append(net.activation(f[-1]))
    return f, a


def forward(net, x):
    """Network output for a single input vector or a batch of row vectors."""
    return forward_trace(net, x)[0][-1]


def output_diff_factor(k, L, alpha):
    """Lipschitz constant ``L^(k-1) alpha^k`` of a k-layer network in its input."""
    if int(k) != k or k < 1:
        raise ParameterError(f"k must be a positive integer, got {k}")
    if not (L > 0 and alpha > 0):
        raise ParameterError("L and alpha must be positive")
    return float(L) ** (k - 1) * float(alpha) ** k


def backprop(net, x, grad_out):
    """Weight gradients of ``sum(grad_out * forward(net, x))``.

    ``x`` has shape (B, in_dim), ``grad_out`` (B, out_dim).
    """
    f, a = forward_trace(net, np.atleast_2d(x))
    g = np.atleast_2d(grad_out)
    grads = [None] * net.k
    for i in range(net.k - 1, -1, -1):
        grads[i] = g.T @ a[i]
        if i > 0:
            g = (g @ net.layers[i].weights) * net.activation.derivative(f[i])
    return grads
