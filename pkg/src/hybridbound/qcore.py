"""Dense simulation of parametrized two-qubit circuits.

Qubit 0 is the most significant tensor factor, i.e. the basis state
``|b_0 b_1 ... b_{q-1}>`` has index ``sum_i b_i 2**(q-1-i)``.

Gates are generated by the 15 non-identity two-qubit Pauli products::

    U(theta) = exp(-i sum_j theta_j P_j)

with ``P_j`` ordered as in :data:`PAULI_LABELS` (``"IX", "IY", ..., "ZZ"``),
the left letter acting on the first target qubit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ContractViolation, ParameterError, ShapeError

MAX_QUBITS = 10
UNITARY_TOL = 1e-10
PSD_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}

PAULI_LABELS = tuple(a + b for a, b in product("IXYZ", repeat=2))[1:]
PAULI_PRODUCTS = np.array([np.kron(_SINGLE[l[0]], _SINGLE[l[1]]) for l in PAULI_LABELS])


def pauli_index(label):
    """Position of a two-letter Pauli label (e.g. ``"ZZ"``) in the generator basis."""
    try:
        return PAULI_LABELS.index(label.upper())
    except ValueError:
        raise ParameterError(f"unknown two-qubit Pauli label {label!r}") from None


def theta_for(**angles):
    """Build a 15-vector from keyword angles, e.g. ``theta_for(ZZ=np.pi / 2)``."""
    theta = np.zeros(15)
    for label, value in angles.items():
        theta[pauli_index(label)] = value
    return theta


# ---------------------------------------------------------------------------
# Generic matrix helpers
# ---------------------------------------------------------------------------

def _check_finite(a, what="matrix"):
    a = np.asarray(a)
    if a.size == 0:
        raise ShapeError(f"{what} is empty")
    if not np.all(np.isfinite(a)):
        raise ParameterError(f"{what} has non-finite entries")
    return a


def spectral_norm(a):
    """Largest singular value of ``a``."""
    a = _check_finite(a)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    return float(np.linalg.norm(a, 2))


def unitarity_error(u):
    """``||U^dagger U - I||`` in spectral norm."""
    u = np.asarray(u)
    return spectral_norm(u.conj().T @ u - np.eye(u.shape[0]))


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and unitarity_error(u) <= tol


def build_unitaries(thetas):
    """Vectorized :func:`build_unitary` over a stack of shape (P, 15)."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != 15:
        raise ShapeError(f"thetas must have shape (P, 15), got {thetas.shape}")
    if not np.all(np.isfinite(thetas)):
        raise ParameterError("theta has non-finite entries")
    generators = np.tensordot(thetas, PAULI_PRODUCTS, axes=1)
    evals, evecs = np.linalg.eigh(generators)
    return (evecs * np.exp(-1j * evals)[:, None, :]) @ np.conj(np.swapaxes(evecs, 1, 2))


def build_unitary(theta):
    """SU(4) element ``exp(-i sum_j theta_j P_j)``.

    The exponential is taken through the eigendecomposition of the Hermitian
    generator, so the result is unitary to machine precision.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (15,):
        raise ShapeError(f"theta must have shape (15,), got {theta.shape}")
    return build_unitaries(theta[None, :])[0]


# ---------------------------------------------------------------------------
# Circuit description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoQubitGate:
    """A parametrized gate acting on the ordered pair ``targets``."""

    theta: np.ndarray
    targets: tuple

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        if theta.shape != (15,):
            raise ShapeError(f"theta must have shape (15,), got {theta.shape}")
        a, b = self.targets
        if a == b:
            raise ParameterError(f"gate targets must be distinct, got {self.targets}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "targets", (int(a), int(b)))

    @property
    def unitary(self):
        return build_unitary(self.theta)


@dataclass(frozen=True)
class CircuitSpec:
    """Layout and parameters of a two-qubit-gate circuit.

    Parameters
    ----------
    qubits : int
        Register width ``q`` (at most 10).
    layout : sequence of (int, int)
        Target pair of every gate application, in execution order.
    theta : array, shape (T, 15)
        One parameter vector per independent slot.
    slots : sequence of int, optional
        Slot used by each gate application. Defaults to ``range(len(layout))``,
        i.e. no sharing. A slot used several times models a repeated gate.
    measured : sequence of int, optional
        Qubits read out, one observable each. Defaults to all qubits.
    observables : sequence of (2, 2) arrays, optional
        Single-qubit Hermitian observables; Pauli-Z by default.
    """

    qubits: int
    layout: tuple
    theta: np.ndarray
    slots: tuple = None
    measured: tuple = None
    observables: tuple = field(default=None, repr=False)

    def __post_init__(self):
        q = int(self.qubits)
        if not 1 <= q <= MAX_QUBITS:
            raise ParameterError(f"qubits must satisfy 1 <= q <= {MAX_QUBITS}, got {q}")
        layout = tuple((int(a), int(b)) for a, b in self.layout)
        for a, b in layout:
            if a == b or not (0 <= a < q and 0 <= b < q):
                raise ShapeError(f"gate targets {(a, b)} invalid for {q} qubits")
        slots = tuple(range(len(layout))) if self.slots is None else tuple(int(s) for s in self.slots)
        if len(slots) != len(layout):
            raise ShapeError("slots and layout must have equal length")
        n_slots = max(slots) + 1 if slots else 0
        if sorted(set(slots)) != list(range(n_slots)):
            raise ParameterError("slots must use every index 0..T-1")
        theta = np.array(self.theta, dtype=float).reshape(-1, 15) if n_slots else np.zeros((0, 15))
        if theta.shape[0] != n_slots:
            raise ShapeError(f"theta has {theta.shape[0]} slots, layout uses {n_slots}")
        if not np.all(np.isfinite(theta)):
            raise ParameterError("theta has non-finite entries")
        measured = tuple(range(q)) if self.measured is None else tuple(int(m) for m in self.measured)
        if len(set(measured)) != len(measured) or any(not 0 <= m < q for m in measured):
            raise ShapeError(f"measured qubits {measured} invalid for {q} qubits")
        if self.observables is None:
            observables = tuple(Z for _ in measured)
        else:
            observables = tuple(np.asarray(o, dtype=complex) for o in self.observables)
            if len(observables) != len(measured):
                raise ShapeError("need one observable per measured qubit")
            for o in observables:
                if o.shape != (2, 2):
                    raise ShapeError("observables must be 2x2")
                if not np.allclose(o, o.conj().T, atol=UNITARY_TOL):
                    raise ContractViolation("observable is not Hermitian")
        theta.setflags(write=False)
        object.__setattr__(self, "qubits", q)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "measured", measured)
        object.__setattr__(self, "observables", observables)

    @property
    def T(self):
        """Number of independently parametrized gate slots."""
        return self.theta.shape[0]

    @property
    def M_rep(self):
        """Largest number of times any slot is applied."""
        if not self.slots:
            return 1
        return int(np.bincount(self.slots).max())

    @property
    def n(self):
        """Length of the measurement vector."""
        return len(self.measured)

    @property
    def beta(self):
        """Largest spectral norm among the observables."""
        return max((spectral_norm(o) for o in self.observables), default=0.0)

    @property
    def dim(self):
        return 2 ** self.qubits

    @property
    def gates(self):
        """The gate applications in order, with their slot parameters."""
        return [TwoQubitGate(self.theta[s], t) for t, s in zip(self.layout, self.slots)]

    def slot_unitaries(self):
        return list(build_unitaries(self.theta)) if self.T else []

    def gate_unitaries(self):
        """4x4 unitary of every gate application, in order."""
        per_slot = self.slot_unitaries()
        return [per_slot[s] for s in self.slots]

    def with_theta(self, theta):
        return CircuitSpec(self.qubits, self.layout, theta, self.slots, self.measured,
                           self.observables)


def random_circuit(qubits, T, rng, *, layout=None, slots=None, measured=None, scale=np.pi):
    """Circuit with ``T`` slots and parameters uniform in ``[-scale, scale]``.

    Without an explicit ``layout`` the gates cycle over neighbouring pairs
    ``(0, 1), (1, 2), ...``.
    """
    if layout is None:
        if qubits < 2:
            raise ParameterError("two-qubit gates need at least 2 qubits")
        pairs = [(i, i + 1) for i in range(qubits - 1)]
        layout = [pairs[t % len(pairs)] for t in range(T)]
    theta = rng.uniform(-scale, scale, size=(T, 15))
    return CircuitSpec(qubits, layout, theta, slots, measured)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumState:
    """Density operator on ``qubits`` qubits."""

    density: np.ndarray

    def __post_init__(self):
        rho = np.array(self.density, dtype=complex)
        d = rho.shape[0] if rho.ndim == 2 else 0
        if rho.ndim != 2 or rho.shape != (d, d) or d & (d - 1) or d < 2:
            raise ShapeError(f"density must be 2^q x 2^q, got {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "density", rho)

    @property
    def qubits(self):
        return int(self.density.shape[0]).bit_length() - 1

    def validate(self, tol=UNITARY_TOL, psd_tol=PSD_TOL):
        """Raise ContractViolation unless Hermitian, unit trace and PSD."""
        rho = self.density
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ContractViolation("density is not Hermitian")
        if abs(np.trace(rho) - 1) > tol:
            raise ContractViolation(f"trace is {np.trace(rho).real:.3g}, not 1")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -psd_tol:
            raise ContractViolation("density is not positive semidefinite")
        return self

    @classmethod
    def from_vector(cls, psi):
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))


def _ry_column(x):
    # RY(x)|0> = cos(x/2)|0> + sin(x/2)|1>
    return np.stack([np.cos(np.asarray(x) / 2), np.sin(np.asarray(x) / 2)], axis=-1)


def encode_vectors(X, qubits):
    """Angle-encoded statevectors for a batch ``X`` of shape (B, d), d <= qubits."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] > qubits:
        raise ShapeError(f"{X.shape[1]} features do not fit on {qubits} qubits")
    angles = np.zeros((X.shape[0], qubits))
    angles[:, :X.shape[1]] = X
    cols = _ry_column(angles)
    psi = cols[:, 0, :]
    for i in range(1, qubits):
        psi = (psi[:, :, None] * cols[:, i, None, :]).reshape(X.shape[0], -1)
    return psi.astype(complex)


def encode(x, qubits):
    """Product state ``RY(x_0)|0> (x) RY(x_1)|0> (x) ...`` as a density matrix.

    Qubits beyond ``len(x)`` stay in ``|0>``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise ParameterError("features must be finite")
    if not 1 <= qubits <= MAX_QUBITS:
        raise ParameterError(f"qubits must satisfy 1 <= q <= {MAX_QUBITS}")
    return QuantumState.from_vector(encode_vectors(x[None, :], qubits)[0])


# ---------------------------------------------------------------------------
# Gate application
# ---------------------------------------------------------------------------

def apply_gate_vectors(psi, u, targets, qubits):
    """Apply a 4x4 ``u`` on ``targets`` to every row of ``psi`` (shape (B, 2^q))."""
    a, b = targets
    B = psi.shape[0]
    t = psi.reshape((B,) + (2,) * qubits)
    t = np.tensordot(t, u.reshape(2, 2, 2, 2), axes=([a + 1, b + 1], [2, 3]))
    # tensordot puts the two new axes last; move them back to a, b
    t = np.moveaxis(t, [-2, -1], [a + 1, b + 1])
    return t.reshape(B, -1)


def apply_gate_stacked(psi, us, targets, qubits):
    """Apply a different 4x4 unitary to each leading slice.

    ``psi`` has shape (P, B, 2^q) and ``us`` shape (P, 4, 4); slice ``p`` of
    the batch is acted on by ``us[p]``.
    """
    a, b = targets
    P, B = psi.shape[:2]
    t = psi.reshape((P, B) + (2,) * qubits)
    t = np.moveaxis(t, [a + 2, b + 2], [-2, -1])
    moved_shape = t.shape
    t = t.reshape(P, -1, 4) @ np.transpose(us, (0, 2, 1))
    t = np.moveaxis(t.reshape(moved_shape), [-2, -1], [a + 2, b + 2])
    return t.reshape(P, B, -1)


def embed_gate(u, targets, qubits):
    """Full ``2^q x 2^q`` matrix of ``I (x) ... (x) U (x) ... (x) I``."""
    eye = np.eye(2 ** qubits, dtype=complex)
    return apply_gate_vectors(eye, np.asarray(u, dtype=complex), targets, qubits).T


def circuit_unitary(spec):
    """Product of all embedded gates, last gate leftmost."""
    eye = np.eye(spec.dim, dtype=complex)
    rows = eye
    for u, t in zip(spec.gate_unitaries(), spec.layout):
        rows = apply_gate_vectors(rows, u, t, spec.qubits)
    return rows.T


def run_vectors(spec, psi):
    """Evolve a batch of statevectors through the circuit."""
    for u, t in zip(spec.gate_unitaries(), spec.layout):
        psi = apply_gate_vectors(psi, u, t, spec.qubits)
    return psi


def run_circuit(spec, state):
    """Apply every embedded gate of ``spec`` to ``state`` in order."""
    rho = state.density
    if rho.shape != (spec.dim, spec.dim):
        raise ShapeError(f"state is {rho.shape}, circuit acts on {spec.qubits} qubits")
    for u, t in zip(spec.gate_unitaries(), spec.layout):
        # U rho U^dagger: act on the rows, then on the rows of the conjugate transpose
        rho = apply_gate_vectors(rho.T, u, t, spec.qubits).T
        rho = apply_gate_vectors(rho.conj(), u, t, spec.qubits).conj()
    return QuantumState(rho)


def _single_qubit_op(o, qubit, qubits):
    return np.kron(np.kron(np.eye(2 ** qubit), o), np.eye(2 ** (qubits - qubit - 1)))


def measure_vector(spec, state):
    """Expectation values ``tr(M_j rho)`` of the measured observables."""
    rho = state.density
    if rho.shape != (spec.dim, spec.dim):
        raise ShapeError(f"state is {rho.shape}, circuit acts on {spec.qubits} qubits")
    z = [np.trace(_single_qubit_op(o, m, spec.qubits) @ rho).real
         for o, m in zip(spec.observables, spec.measured)]
    return np.array(z)


def _z_signs(qubits, measured):
    idx = np.arange(2 ** qubits)
    return np.stack([1.0 - 2.0 * ((idx >> (qubits - 1 - m)) & 1) for m in measured], axis=1)


def measure_vectors(spec, psi):
    """Measurement vectors for a batch of statevectors; shape (B, n)."""
    B = psi.shape[0]
    out = np.empty((B, spec.n))
    is_z = [np.array_equal(o, Z) for o in spec.observables]
    if any(is_z):
        probs = psi.real ** 2 + psi.imag ** 2
        cols = [j for j, flag in enumerate(is_z) if flag]
        out[:, cols] = probs @ _z_signs(spec.qubits, [spec.measured[j] for j in cols])
    t = psi.reshape((B,) + (2,) * spec.qubits)
    for j, (o, m) in enumerate(zip(spec.observables, spec.measured)):
        if not is_z[j]:
            ot = np.moveaxis(np.tensordot(t, o, axes=([m + 1], [1])), -1, m + 1)
            out[:, j] = np.einsum("bi,bi->b", psi.conj(), ot.reshape(B, -1)).real
    return out


def quantum_features(spec, X):
    """``z(x)`` for every row of ``X``: encode, run, measure."""
    return measure_vectors(spec, run_vectors(spec, encode_vectors(X, spec.qubits)))


# ---------------------------------------------------------------------------
# Channel distances
# ---------------------------------------------------------------------------

def telescope_bound(us, vs):
    """``2 sum_k ||U_k - V_k||``, an upper bound on the diamond distance
    between the circuits built from the two gate lists."""
    us, vs = list(us), list(vs)
    if len(us) != len(vs):
        raise ShapeError(f"gate lists differ in length ({len(us)} vs {len(vs)})")
    return 2.0 * sum(spectral_norm(np.asarray(u) - np.asarray(v)) for u, v in zip(us, vs))


def diamond_distance_unitary_oracle(u, v):
    """Exact ``||U . U^dagger - V . V^dagger||_diamond`` for unitaries.

    Equal to ``2 sqrt(1 - nu^2)`` with ``nu`` the distance from the origin to
    the convex hull of the eigenvalues of ``U^dagger V``. Those eigenvalues
    lie on the unit circle, so the hull misses the origin exactly when they
    fit in an arc shorter than pi; then ``nu = cos(arc / 2)``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeError(f"need equal square matrices, got {u.shape} and {v.shape}")
    if not (is_unitary(u) and is_unitary(v)):
        raise ContractViolation("diamond oracle needs unitary inputs")
    angles = np.sort(np.angle(np.linalg.eigvals(u.conj().T @ v)))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
    arc = 2 * np.pi - gaps.max()
    nu = max(0.0, np.cos(arc / 2)) if arc < np.pi else 0.0
    return float(2 * np.sqrt(max(0.0, 1 - nu * nu)))
