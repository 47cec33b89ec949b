"""Closed-form metric entropies, Dudley integrals and generalization bounds.

Every O-expression is evaluated with leading constant 1; the explicit
constants that the chaining argument produces are kept in
``BoundBreakdown.intermediate`` so they can be rescaled later.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.special import erfc

from .errors import DomainError, ParameterError

SQRT_PI_2 = math.sqrt(math.pi) / 2


def _positive(**kw):
    for name, v in kw.items():
        if not (np.isfinite(v) and v > 0):
            raise ParameterError(f"{name} must be positive and finite, got {v}")


# ---------------------------------------------------------------------------
# Parameters and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundParams:
    """Every symbol of the hybrid bound.

    ``R`` is the input radius seen by the network; left as ``None`` it is the
    measurement radius ``beta * sqrt(n)``. ``c_conf`` defaults to
    ``3 * M_loss``.
    """

    T: int = 1
    k: int = 1
    m: int = 1
    n: int = 1
    alpha: float = 1.0
    beta: float = 1.0
    L: float = 1.0
    N: int = 100
    delta: float = 0.05
    M_rep: int = 1
    R: float = None
    L_loss: float = 1.0
    M_loss: float = 1.0
    c_conf: float = None

    def __post_init__(self):
        for name in ("T", "k", "m", "n", "N", "M_rep"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v}")
            object.__setattr__(self, name, int(v))
        _positive(alpha=self.alpha, beta=self.beta, L=self.L, L_loss=self.L_loss,
                  M_loss=self.M_loss)
        if not 0 < self.delta <= 1:
            raise ParameterError(f"delta must lie in (0, 1], got {self.delta}")
        if self.R is None:
            object.__setattr__(self, "R", self.beta * math.sqrt(self.n))
        _positive(R=self.R)
        if self.c_conf is None:
            object.__setattr__(self, "c_conf", 3.0 * self.M_loss)
        if not (np.isfinite(self.c_conf) and self.c_conf >= 0):
            raise ParameterError(f"c_conf must be non-negative, got {self.c_conf}")

    @property
    def lip_product(self):
        """``L^(k-1) alpha^k``."""
        return self.L ** (self.k - 1) * self.alpha ** self.k

    @property
    def gamma0(self):
        """Radius ``beta sqrt(n)`` of the hybrid class."""
        return self.beta * math.sqrt(self.n)

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BoundBreakdown:
    classical_term: float
    quantum_term: float
    confidence_term: float
    total: float
    intermediate: dict = field(default_factory=dict)

    @property
    def rademacher(self):
        """Classical plus quantum Dudley contributions."""
        return self.classical_term + self.quantum_term

    def to_dict(self):
        return {
            "classical_term": self.classical_term,
            "quantum_term": self.quantum_term,
            "confidence_term": self.confidence_term,
            "total": self.total,
            "intermediate": dict(self.intermediate),
        }


# ---------------------------------------------------------------------------
# Metric entropies
# ---------------------------------------------------------------------------

def entropy_l2_ball(n, alpha, eps):
    """``max(0, n log(3 alpha / eps))`` for the radius-``alpha`` ball in R^n."""
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")
    _positive(alpha=alpha, eps=eps)
    return max(0.0, n * math.log(3 * alpha / eps))


def entropy_fc_layer(m, n, alpha, eps):
    """Frobenius ball of m x n matrices, via R^{m x n} ~ R^{mn}."""
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m}")
    return entropy_l2_ball(int(m) * int(n), alpha, eps)


def network_cutoff(params):
    """``k R L^(k-1) alpha^k``; the network entropy vanishes above it."""
    return params.k * params.R * params.lip_product


def entropy_network(params, eps):
    """k-layer network class under the sample l2 metric, input radius ``params.R``."""
    _positive(eps=eps)
    cut = network_cutoff(params)
    if eps > cut:
        return 0.0
    return params.k * params.m * params.n * math.log(3 * cut / eps)


def entropy_two_qubit_unitary(eps, id_norm=1.0):
    """``32 log(6 ||I|| / eps)``, valid for ``0 < eps <= ||I||``."""
    _positive(eps=eps, id_norm=id_norm)
    if eps > id_norm:
        raise DomainError(f"eps = {eps} exceeds ||I|| = {id_norm}; the bound needs eps <= ||I||")
    return 32.0 * math.log(6.0 * id_norm / eps)


def _unitary_entropy_capped(eps, id_norm=1.0):
    # one ball covers every unitary once eps reaches the diameter 2 ||I||;
    # between ||I|| and 2 ||I|| reuse the value at ||I|| (covering numbers are monotone)
    if eps >= 2 * id_norm:
        return 0.0
    return entropy_two_qubit_unitary(min(eps, id_norm), id_norm)


def hybrid_resolutions(params, eps):
    """Per-gate and network resolutions used to cover the hybrid class at ``eps``."""
    scale = params.gamma0  # beta sqrt(n)
    eps_u = eps / (4 * params.T * params.lip_product * scale)
    eps_f = eps / (2 * scale)
    return eps_u, eps_f


def entropy_hybrid_parts(params, eps, id_norm=1.0):
    """``(quantum, classical)`` summands of the hybrid metric entropy."""
    _positive(eps=eps)
    eps_u, eps_f = hybrid_resolutions(params, eps)
    quantum = params.T * _unitary_entropy_capped(eps_u, id_norm)
    classical = entropy_network(params.replace(R=params.gamma0), eps_f)
    return quantum, classical


def entropy_hybrid(params, eps, id_norm=1.0):
    """Log covering number of the hybrid class: T unitary covers plus one network cover.

    The network part is evaluated with input radius ``beta sqrt(n)``, the
    bound on the measurement vector.
    """
    quantum, classical = entropy_hybrid_parts(params, eps, id_norm)
    return quantum + classical


# ---------------------------------------------------------------------------
# Dudley integral
# ---------------------------------------------------------------------------

def upper_gamma_three_halves(x):
    """``Gamma(3/2, x) = (sqrt(pi)/2) erfc(sqrt(x)) + sqrt(x) exp(-x)`` for x >= 0."""
    if x < 0:
        raise DomainError(f"x must be non-negative, got {x}")
    r = math.sqrt(x)
    return SQRT_PI_2 * float(erfc(r)) + r * math.exp(-x)


def dudley_J(C, gamma0):
    """``int_0^gamma0 sqrt(max(0, log(C / eps))) d eps`` in closed form.

    Substituting ``u = log(C / eps)`` gives ``C Gamma(3/2, log(C / gamma0))``.
    Past ``eps = C`` the integrand is zero, so ``gamma0 > C`` returns the
    full value ``C sqrt(pi) / 2``.
    """
    _positive(C=C, gamma0=gamma0)
    if gamma0 >= C:
        return C * SQRT_PI_2
    u = math.log(C / gamma0)
    return C * upper_gamma_three_halves(u)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------

def _quantum_term(params, gamma0):
    arg = 24 * params.T * params.lip_product * params.gamma0 / gamma0
    log_arg = math.log(arg)
    clamped = log_arg <= 0
    value = 3 * math.sqrt(512) / math.sqrt(params.N) * gamma0 * math.sqrt(params.T) \
        * math.sqrt(max(0.0, log_arg))
    return value, arg, clamped


def _quantum_integral_exact(params, gamma0):
    # 12/sqrt(N) * int_0^gamma0 sqrt(T * 32 log(24 T A / eps)) d eps, A = L^(k-1) alpha^k beta sqrt(n)
    C_q = 24 * params.T * params.lip_product * params.gamma0
    return 12 / math.sqrt(params.N) * math.sqrt(32 * params.T) * dudley_J(C_q, gamma0)


def rademacher_bound_hybrid(params):
    """Chaining bound on the empirical Rademacher complexity of the hybrid class.

    The returned breakdown has ``confidence_term = 0`` and
    ``total = classical_term + quantum_term``.
    """
    gamma0 = params.gamma0
    C = 6 * params.k * params.R * params.lip_product * gamma0
    J = dudley_J(C, gamma0)
    kmn = params.k * params.m * params.n
    classical = 12 * math.sqrt(kmn) / math.sqrt(params.N) * J
    quantum, q_arg, clamped = _quantum_term(params, gamma0)
    intermediate = {
        "C": C,
        "gamma0": gamma0,
        "J": J,
        "quantum_log_arg": q_arg,
        "quantum_clamped": clamped,
        "quantum_integral_exact": _quantum_integral_exact(params, gamma0),
        "entropy_at_gamma0": entropy_hybrid(params, gamma0),
        "classical_constant": 72 * math.sqrt(math.pi) * params.R * params.beta / params.L,
    }
    return BoundBreakdown(classical, quantum, 0.0, classical + quantum, intermediate)


def confidence_term(c_conf, delta, N):
    return c_conf * math.sqrt(math.log(1 / delta) / N)


def generalization_bound_hybrid(params):
    """``2 (L_loss / sqrt(n)) (classical + quantum) + c sqrt(log(1/delta) / N)``.

    The ``L_loss / sqrt(n)`` factor is the contraction step for a mean-reduced,
    coordinatewise Lipschitz loss.
    """
    rad = rademacher_bound_hybrid(params)
    contraction = params.L_loss / math.sqrt(params.n)
    conf = confidence_term(params.c_conf, params.delta, params.N)
    total = 2 * contraction * (rad.classical_term + rad.quantum_term) + conf
    intermediate = dict(rad.intermediate, contraction=contraction)
    return BoundBreakdown(rad.classical_term, rad.quantum_term, conf, total, intermediate)


@dataclass(frozen=True)
class QMLMBound:
    value: float
    complexity_term: float
    confidence_term: float
    T: int

    def required_N(self, eps):
        """Sample size making ``sqrt(T log T / N)`` smaller than ``eps``."""
        return required_sample_size(self.T, eps)


def required_sample_size(T, eps):
    _positive(eps=eps)
    return T * math.log(T) / eps ** 2


def generalization_bound_qmlm(T, M_rep, N, delta):
    """``sqrt(T log(T M) / N) + sqrt(log(1/delta) / N)`` for a purely quantum model."""
    for name, v in (("T", T), ("M_rep", M_rep), ("N", N)):
        if int(v) != v or v < 1:
            raise ParameterError(f"{name} must be a positive integer, got {v}")
    if not 0 < delta <= 1:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    complexity = math.sqrt(T * math.log(T * M_rep) / N)
    conf = math.sqrt(math.log(1 / delta) / N)
    return QMLMBound(complexity + conf, complexity, conf, int(T))


def generalization_bound_network(params):
    """``L_loss L^k alpha^k k^(3/2) sqrt(mn/N) + c sqrt(log(1/delta)/N)``."""
    p = params
    first = p.L_loss * p.L ** p.k * p.alpha ** p.k * p.k ** 1.5 * math.sqrt(p.m * p.n / p.N)
    return first + confidence_term(p.c_conf, p.delta, p.N)
