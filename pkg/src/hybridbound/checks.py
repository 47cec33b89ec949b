"""Numerical verification suites.

Each suite pits a closed-form quantity against an independent oracle
(quadrature, packing counts, exact diamond distances, direct evaluation) and
returns a :class:`CheckResult`. The ``verify`` command runs them at small
sizes; the acceptance tests run them at full size.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import bounds, empirical, hybrid, qcore
from .classical_net import Activation, forward, forward_trace, output_diff_factor, random_network

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    checks: int = 0
    failures: int = 0
    worst: float = -math.inf
    allowance: int = 0
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.failures <= self.allowance

    def record(self, slack, tol=0.0):
        """Count one check; ``slack = lhs - rhs`` must be ``<= tol``."""
        self.checks += 1
        self.worst = max(self.worst, float(slack))
        if not slack <= tol:
            self.failures += 1

    def merge(self, other):
        self.checks += other.checks
        self.failures += other.failures
        self.worst = max(self.worst, other.worst)
        self.details[other.name] = other.summary()
        return self

    def summary(self):
        return {
            "checks": self.checks,
            "failures": self.failures,
            "allowance": self.allowance,
            "worst_slack": self.worst if self.checks else None,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            **({"details": self.details} if self.details else {}),
        }

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: {self.failures} failures / {self.checks} checks "
                f"(worst slack {self.worst:.3g}, {self.seconds:.2f}s)")


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def gamma_quadrature(x):
    """``int_x^inf sqrt(t) exp(-t) dt`` by adaptive quadrature."""
    f = lambda t: math.sqrt(t) * math.exp(-t)  # noqa: E731
    # split so the sqrt endpoint and the infinite tail are integrated separately
    head, _ = integrate.quad(f, x, x + 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(f, x + 1.0, math.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return head + tail


def dudley_quadrature(C, gamma0):
    """``int_0^gamma0 sqrt(max(0, log(C / eps))) d eps`` by adaptive quadrature."""
    upper = min(gamma0, C)
    f = lambda e: math.sqrt(max(0.0, math.log(C / e))) if e > 0 else 0.0  # noqa: E731
    val, _ = integrate.quad(f, 0.0, upper, epsabs=0.0, epsrel=1e-12, limit=500)
    return val


@_timed
def gamma_suite(points=50, x_max=20.0, tol=1e-8):
    res = CheckResult("gamma")
    for x in np.linspace(0.0, x_max, points):
        res.record(abs(bounds.upper_gamma_three_halves(x) - gamma_quadrature(x)), tol)
    return res


@_timed
def dudley_suite(pairs=100, seed=0, tol=1e-6):
    res = CheckResult("dudley")
    rng = np.random.default_rng(seed)
    cases = [(6.0, 6.0)]
    for _ in range(pairs):
        C = 10 ** rng.uniform(-1, 2)
        cases.append((C, C * rng.uniform(1e-3, 1.0)))
    for C, g in cases:
        exact = dudley_quadrature(C, g)
        res.record(abs(bounds.dudley_J(C, g) - exact) / exact, tol)
    res.details["anchor_C6_g6"] = bounds.dudley_J(6.0, 6.0)
    return res


# ---------------------------------------------------------------------------
# Entropy domination by packing oracles
# ---------------------------------------------------------------------------

def _packing_vs(res, space, entropy_fn, eps_values):
    for eps in eps_values:
        packing = empirical.greedy_packing_number(space, eps)
        res.record(math.log(packing) - entropy_fn(eps), 1e-12)


def lattice_in_ball(values, dim, alpha):
    grid = np.array(np.meshgrid(*[values] * dim, indexing="ij")).reshape(dim, -1).T
    return grid[np.linalg.norm(grid, axis=1) <= alpha * (1 + 1e-12)]


def l2_ball_family(rng, alpha=1.0, n_points=3000):
    res = CheckResult("l2_ball")
    eps_values = np.geomspace(0.05, 1.2, 10) * alpha
    for n in (1, 2, 3):
        if n == 1:
            pts = np.linspace(-alpha, alpha, 2001)[:, None]
        else:
            pts = hybrid.sample_ball(n_points, n, alpha, rng)
        space = empirical.MetricSpaceSample(pts, "l2")
        _packing_vs(res, space, lambda e, n=n: bounds.entropy_l2_ball(n, alpha, e), eps_values)
    return res


def frobenius_family(rng, alpha=1.0, n_points=3000):
    res = CheckResult("frobenius_ball")
    eps_values = np.geomspace(0.05, 1.2, 10) * alpha
    for m, n in ((1, 2), (2, 1), (2, 2)):
        pts = hybrid.sample_ball(n_points, m * n, alpha, rng).reshape(-1, m, n)
        space = empirical.MetricSpaceSample(pts, "frobenius")
        _packing_vs(res, space, lambda e, m=m, n=n: bounds.entropy_fc_layer(m, n, alpha, e),
                    eps_values)
    return res


def unitary_grid(per_axis=10, labels=("XI", "IY", "ZZ", "XY"), span=np.pi / 2):
    values = np.linspace(-span, span, per_axis)
    idx = [qcore.pauli_index(l) for l in labels]
    combos = np.array(np.meshgrid(*[values] * len(idx), indexing="ij")).reshape(len(idx), -1).T
    thetas = np.zeros((len(combos), 15))
    thetas[:, idx] = combos
    return qcore.build_unitaries(thetas)


def unitary_family(per_axis=10):
    res = CheckResult("two_qubit_unitaries")
    space = empirical.MetricSpaceSample(unitary_grid(per_axis), "spectral")
    res.details["points"] = len(space)
    _packing_vs(res, space, bounds.entropy_two_qubit_unitary, np.linspace(0.1, 1.0, 10))
    return res


def network_grid(dims, alpha, X, values, activation=Activation.TANH):
    """Outputs on ``X`` of every lattice network whose layers lie in their balls."""
    shapes = [(o, i) for i, o in zip(dims[:-1], dims[1:])]
    per_layer = [lattice_in_ball(values, o * i, alpha).reshape(-1, o, i) for o, i in shapes]
    outs = []
    for combo in np.ndindex(*[len(p) for p in per_layer]):
        ws = [per_layer[l][c] for l, c in enumerate(combo)]
        a = X
        for l, w in enumerate(ws):
            a = a @ w.T
            if l < len(ws) - 1:
                a = activation(a)
        outs.append(a)
    return np.array(outs)


def network_family(rng, R=1.0, alpha=1.0, n_inputs=8):
    res = CheckResult("networks")
    X = hybrid.sample_ball(n_inputs, 2, R, rng)
    for dims, values in (([2, 1], np.linspace(-1, 1, 21)), ([2, 2, 1], np.linspace(-1, 1, 5))):
        outs = network_grid(dims, alpha, X, values * alpha)
        space = empirical.MetricSpaceSample(outs, "x_l2")
        p = bounds.BoundParams(k=len(dims) - 1, m=max(dims[1:]), n=max(dims[:-1]),
                               alpha=alpha, R=R)
        cut = bounds.network_cutoff(p)
        res.details[f"dims_{dims}"] = len(space)
        _packing_vs(res, space, lambda e, p=p: bounds.entropy_network(p, e),
                    np.geomspace(0.01 * cut, 1.5 * cut, 10))
    return res


def hybrid_product_grid(X, theta_values=15, weight_values=7, labels=("XY", "ZX"), alpha=1.0):
    """Outputs of (one-gate circuit grid) x (single-layer weight grid) on ``X``."""
    values = np.linspace(-np.pi / 2, np.pi / 2, theta_values)
    idx = [qcore.pauli_index(l) for l in labels]
    weights = lattice_in_ball(np.linspace(-alpha, alpha, weight_values), 2, alpha)
    outs = []
    for a in values:
        for b in values:
            theta = np.zeros((1, 15))
            theta[0, idx] = (a, b)
            z = qcore.quantum_features(qcore.CircuitSpec(2, [(0, 1)], theta), X)
            outs.append(z @ weights.T)  # (N, W)
    outs = np.concatenate(outs, axis=1).T  # (grid, N)
    return outs[:, :, None]


def hybrid_family(rng, n_inputs=8):
    res = CheckResult("hybrid_product")
    X = hybrid.sample_ball(n_inputs, 2, np.pi, rng)
    space = empirical.MetricSpaceSample(hybrid_product_grid(X), "x_l2")
    res.details["points"] = len(space)
    p = bounds.BoundParams(T=1, k=1, m=1, n=2, alpha=1.0, beta=1.0)
    _packing_vs(res, space, lambda e: bounds.entropy_hybrid(p, e), np.geomspace(0.01, 2.0, 10))
    return res


@_timed
def entropy_suite(seed=0, full=True):
    """Packing-number lower bounds never exceed the entropy formulas."""
    rng = np.random.default_rng(seed)
    res = CheckResult("entropy")
    n_points = 3000 if full else 600
    res.merge(l2_ball_family(rng, n_points=n_points))
    res.merge(frobenius_family(rng, n_points=n_points))
    res.merge(unitary_family(per_axis=10 if full else 5))
    res.merge(network_family(rng))
    res.merge(hybrid_family(rng))
    return res


# ---------------------------------------------------------------------------
# Perturbation chains
# ---------------------------------------------------------------------------

def _random_net(rng, k=None, max_width=4):
    k = int(rng.integers(1, 5)) if k is None else k
    dims = list(rng.integers(1, max_width + 1, size=k + 1))
    alpha = float(rng.uniform(0.3, 2.0))
    act = list(Activation)[int(rng.integers(3))]
    return random_network(dims, alpha, rng, act), alpha


def growth_chain(rng, instances=1000):
    res = CheckResult("growth")
    for _ in range(instances):
        net, alpha = _random_net(rng)
        R = float(rng.uniform(0.1, 5.0))
        x = hybrid.sample_ball(1, net.in_dim, R, rng)[0]
        _, a = forward_trace(net, x)
        L = net.lipschitz
        for i, ai in enumerate(a):  # a[i] is a_i; bound (L alpha)^i ||x||
            res.record(np.linalg.norm(ai) - (L * alpha) ** i * np.linalg.norm(x), TOL)
    return res


def layer_telescope_chain(rng, instances=1000, n_inputs=5):
    res = CheckResult("layer_telescope")
    for _ in range(instances):
        net, alpha = _random_net(rng)
        other = random_network(net.dims, alpha, rng, net.activation)
        if rng.uniform() < 0.5:  # small perturbations too
            other = net.with_weights([w + 0.01 * rng.standard_normal(w.shape) for w in net.weights]).projected()
        R = float(rng.uniform(0.1, 5.0))
        X = hybrid.sample_ball(n_inputs, net.in_dim, R, rng)
        lhs = np.sqrt(np.mean(np.sum((forward(net, X) - forward(other, X)) ** 2, axis=1)))
        rhs = R * (net.lipschitz * alpha) ** (net.k - 1) * sum(
            np.linalg.norm(f - g) for f, g in zip(net.weights, other.weights))
        res.record(lhs - rhs, TOL)
    return res


def contraction_chain(rng, instances=1000):
    res = CheckResult("contraction")
    for _ in range(instances):
        net, alpha = _random_net(rng)
        z, z2 = rng.standard_normal((2, net.in_dim)) * rng.uniform(0.01, 3)
        lhs = np.linalg.norm(forward(net, z) - forward(net, z2))
        rhs = output_diff_factor(net.k, net.lipschitz, alpha) * np.linalg.norm(z - z2)
        res.record(lhs - rhs, TOL)
    return res


def _circuit_pair(rng):
    q = int(rng.integers(2, 5))
    T = int(rng.integers(1, 5))
    c = qcore.random_circuit(q, T, rng)
    scale = 10 ** rng.uniform(-3, 0.5)
    c2 = c.with_theta(c.theta + scale * rng.standard_normal(c.theta.shape))
    return c, c2


def measurement_chain(rng, instances=1000):
    """``|z_j - z'_j| <= beta * diamond <= 2 beta sum ||U_t - V_t||`` and the l2 version."""
    res = CheckResult("measurement")
    for _ in range(instances):
        c, c2 = _circuit_pair(rng)
        x = rng.uniform(-np.pi, np.pi, size=c.qubits)
        z = qcore.measure_vector(c, qcore.run_circuit(c, qcore.encode(x, c.qubits)))
        z2 = qcore.measure_vector(c2, qcore.run_circuit(c2, qcore.encode(x, c.qubits)))
        beta = c.beta
        diamond = qcore.diamond_distance_unitary_oracle(qcore.circuit_unitary(c),
                                                        qcore.circuit_unitary(c2))
        tele = qcore.telescope_bound(c.gate_unitaries(), c2.gate_unitaries())
        res.record(np.max(np.abs(z - z2)) - beta * diamond, TOL)
        res.record(np.linalg.norm(z - z2) - beta * math.sqrt(c.n) * diamond, TOL)
        res.record(beta * diamond - beta * tele, TOL)
    return res


def _model_pair(rng, share="net"):
    c, c2 = _circuit_pair(rng)
    k = int(rng.integers(1, 4))
    dims = [c.n] + list(rng.integers(1, 4, size=k))
    alpha = float(rng.uniform(0.3, 2.0))
    act = list(Activation)[int(rng.integers(3))]
    net = random_network(dims, alpha, rng, act)
    if share == "net":
        return hybrid.HybridModel(c, net), hybrid.HybridModel(c2, net), alpha
    net2 = random_network(dims, alpha, rng, act)
    return hybrid.HybridModel(c, net), hybrid.HybridModel(c, net2), alpha


def quantum_part_chain(rng, instances=1000, n_inputs=5):
    """Shared network, perturbed gates: ``||h - h'||_X <= 2 L^(k-1) alpha^k beta sqrt(n) sum ||U_t - V_t||``."""
    res = CheckResult("quantum_part")
    for _ in range(instances):
        h, h2, alpha = _model_pair(rng, "net")
        X = rng.uniform(-np.pi, np.pi, size=(n_inputs, h.circuit.qubits))
        lhs = empirical.hypothesis_distance(h, h2, X)
        c, c2 = h.circuit, h2.circuit
        rhs = 2 * output_diff_factor(h.net.k, h.net.lipschitz, alpha) * c.beta * math.sqrt(c.n) \
            * sum(qcore.spectral_norm(u - v) for u, v in zip(c.gate_unitaries(), c2.gate_unitaries()))
        res.record(lhs - rhs, TOL)
    return res


def classical_part_chain(rng, instances=1000, n_inputs=5):
    """Shared gates, perturbed weights: ``||h - h'||_X <= beta sqrt(n) (L alpha)^(k-1) sum ||F_i - K_i||_F``."""
    res = CheckResult("classical_part")
    for _ in range(instances):
        h, h2, alpha = _model_pair(rng, "gates")
        X = rng.uniform(-np.pi, np.pi, size=(n_inputs, h.circuit.qubits))
        lhs = empirical.hypothesis_distance(h, h2, X)
        c = h.circuit
        rhs = c.beta * math.sqrt(c.n) * (h.net.lipschitz * alpha) ** (h.net.k - 1) * sum(
            np.linalg.norm(f - g) for f, g in zip(h.net.weights, h2.net.weights))
        res.record(lhs - rhs, TOL)
    return res


@_timed
def perturbation_suite(seed=0, instances=1000):
    rng = np.random.default_rng(seed)
    res = CheckResult("perturbation")
    for fn in (growth_chain, layer_telescope_chain, contraction_chain, measurement_chain,
               quantum_part_chain, classical_part_chain):
        res.merge(fn(rng, instances))
    return res


@_timed
def telescope_suite(seed=0, instances=1000):
    """Single-gate telescoping bound dominates the exact diamond distance."""
    rng = np.random.default_rng(seed)
    res = CheckResult("telescope")
    for _ in range(instances):
        th = rng.uniform(-np.pi, np.pi, 15)
        th2 = th + 10 ** rng.uniform(-3, 0.5) * rng.standard_normal(15)
        u, v = qcore.build_unitary(th), qcore.build_unitary(th2)
        res.record(qcore.diamond_distance_unitary_oracle(u, v) - qcore.telescope_bound([u], [v]), TOL)
    res.merge(measurement_chain(rng, max(10, instances // 10)))
    return res


@_timed
def radius_suite(seed=0, models=100, inputs_per_model=100):
    """``||z(x)|| <= beta sqrt(n)`` over random models and inputs, no tolerance."""
    rng = np.random.default_rng(seed)
    res = CheckResult("radius")
    for _ in range(models):
        q = int(rng.integers(1, 6)) + 1
        c = qcore.random_circuit(q, int(rng.integers(1, 6)), rng)
        X = rng.uniform(-np.pi, np.pi, size=(inputs_per_model, q))
        norms = np.linalg.norm(qcore.quantum_features(c, X), axis=1)
        for v in norms:
            res.record(v - c.beta * math.sqrt(c.n), 0.0)
    return res


# ---------------------------------------------------------------------------
# Rademacher consistency
# ---------------------------------------------------------------------------

def hybrid_grid_models(theta_values=10, weights=((1.0, 0.0), (0.0, 1.0)), labels=("XY", "ZX")):
    values = np.linspace(-np.pi / 2, np.pi / 2, theta_values)
    idx = [qcore.pauli_index(l) for l in labels]
    from .classical_net import BoundedLayer, NetworkStack
    nets = [NetworkStack((BoundedLayer(np.array([w]), 1.0),), Activation.IDENTITY) for w in weights]
    models = []
    for a in values:
        for b in values:
            theta = np.zeros((1, 15))
            theta[0, idx] = (a, b)
            c = qcore.CircuitSpec(2, [(0, 1)], theta)
            models.extend(hybrid.HybridModel(c, net) for net in nets)
    return models


@_timed
def rademacher_suite(seed=0, seeds=20, N=32, draws=2000):
    res = CheckResult("rademacher")
    two = empirical.rademacher_from_values([[1.0, 1.0], [-1.0, -1.0]], exhaustive=True)
    res.record(abs(two.mean - 0.5), 0.0)
    res.details["two_constants_N2"] = two.mean
    rng = np.random.default_rng(seed)
    for n in range(1, 13):
        single = empirical.rademacher_from_values(rng.standard_normal((1, n)), exhaustive=True)
        res.record(abs(single.mean), 1e-12)
    models = hybrid_grid_models()
    params = bounds.BoundParams(T=1, k=1, m=1, n=2, alpha=1.0, beta=1.0, N=N)
    bound = bounds.rademacher_bound_hybrid(params).total
    res.details["grid_size"] = len(models)
    res.details["bound"] = bound
    estimates = []
    for s in range(seeds):
        X = hybrid.sample_ball(N, 2, np.pi, np.random.default_rng([seed, s]))
        est = empirical.monte_carlo_rademacher(models, X, draws=draws, seed=s)
        estimates.append(est.mean)
        res.record(est.mean - bound, 0.0)
    res.details["max_estimate"] = max(estimates)
    return res


# ---------------------------------------------------------------------------
# Gap experiment
# ---------------------------------------------------------------------------

@_timed
def gap_suite(config, records=None):
    """Every gap below its bound, with a ``floor(delta * count)`` allowance."""
    res = CheckResult("gap")
    if records is None:
        records = empirical.run_gap_experiment(config)
    for r in records:
        if r.diverged:
            res.record(math.inf, 0.0)
        else:
            res.record(r.gap - r.bound.total, 0.0)
    res.allowance = int(math.floor(config.bound.delta * len(records)))
    res.details["median_gap"] = {str(k): v for k, v in empirical.median_gaps(records).items()}
    return res
